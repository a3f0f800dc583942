// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/text_formats.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "asearch/errors.hpp"

namespace asearch {

namespace {

constexpr const char* kTraceHeader = "# asearch.trace v1";
constexpr const char* kBeliefHeader = "# asearch.beliefs v1";
constexpr const char* kDetectionsHeader = "# asearch.detections v1";
constexpr const char* kCurveHeader = "# asearch.curve v1";

// Shortest round-trip form, so written values reload bit-exactly.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ifstream open_checked(const std::filesystem::path& path, const char* header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ValidationError(path.string() + ": missing or unsupported schema header (expected '" +
                          header + "')");
  }
  return in;
}

std::string meta_value(const std::string& line, const std::string& key) {
  // Lines of the form `# key: value`.
  const std::string prefix = "# " + key + ": ";
  if (line.rfind(prefix, 0) != 0) {
    throw ValidationError("expected metadata line '" + prefix + "...'");
  }
  return line.substr(prefix.size());
}

}  // namespace

void save_trace(const Episode& episode, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace file " + path.string());
  out << kTraceHeader << '\n';
  out << "# image: " << episode.image_id << '\n';
  out << "# columns: t proposal_index x y w h score belief\n";
  for (const TraceRow& row : episode.trace) {
    out << row.t << ' ' << row.proposal_index << ' ' << fmt(row.window.x) << ' '
        << fmt(row.window.y) << ' ' << fmt(row.window.w) << ' ' << fmt(row.window.h) << ' '
        << fmt(row.score) << ' ' << fmt(row.belief_at_selection) << '\n';
  }
}

Episode load_trace(const std::filesystem::path& path) {
  std::ifstream in = open_checked(path, kTraceHeader);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": truncated trace");
  Episode episode;
  episode.image_id = meta_value(line, "image");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TraceRow row;
    double x, y, w, h;
    if (!(ss >> row.t >> row.proposal_index >> x >> y >> w >> h >> row.score >>
          row.belief_at_selection)) {
      throw ValidationError(path.string() + ": malformed trace row '" + line + "'");
    }
    row.window = Window(x, y, w, h);
    episode.trace.push_back(row);
  }
  return episode;
}

void save_belief_snapshot(const std::string& image_id, const BeliefSnapshot& snapshot,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write belief snapshot " + path.string());
  out << kBeliefHeader << '\n';
  out << "# image: " << image_id << '\n';
  out << "# iteration: " << snapshot.t << '\n';
  out << "# columns: proposal_index belief\n";
  for (std::size_t i = 0; i < snapshot.beliefs.size(); ++i) {
    out << i << ' ' << fmt(snapshot.beliefs[i]) << '\n';
  }
}

void save_detections(std::span<const Detection> detections, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write detections file " + path.string());
  out << kDetectionsHeader << '\n';
  out << "# columns: image_id x y w h score\n";
  for (const Detection& d : detections) {
    out << d.image_id << ' ' << fmt(d.window.x) << ' ' << fmt(d.window.y) << ' '
        << fmt(d.window.w) << ' ' << fmt(d.window.h) << ' ' << fmt(d.score) << '\n';
  }
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  std::ifstream in = open_checked(path, kDetectionsHeader);
  std::vector<Detection> detections;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Detection d;
    double x, y, w, h;
    if (!(ss >> d.image_id >> x >> y >> w >> h >> d.score)) {
      throw ValidationError(path.string() + ": malformed detection row '" + line + "'");
    }
    if (d.score < 0.0 || d.score > 1.0) {
      throw ValidationError(path.string() + ": detection score outside [0,1] in row '" +
                            line + "'");
    }
    d.window = Window(x, y, w, h);
    detections.push_back(std::move(d));
  }
  return detections;
}

void save_curve(const BudgetCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write curve file " + path.string());
  out << kCurveHeader << '\n';
  out << "# class: " << curve.class_name << '\n';
  out << "# policy: " << curve.policy << '\n';
  out << "# columns: budget ap\n";
  for (const CurvePoint& p : curve.points) {
    out << p.budget << ' ' << fmt(p.ap) << '\n';
  }
}

BudgetCurve load_curve(const std::filesystem::path& path) {
  std::ifstream in = open_checked(path, kCurveHeader);
  std::string line;
  BudgetCurve curve;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": truncated curve");
  curve.class_name = meta_value(line, "class");
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": truncated curve");
  curve.policy = meta_value(line, "policy");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    CurvePoint p;
    if (!(ss >> p.budget >> p.ap)) {
      throw ValidationError(path.string() + ": malformed curve row '" + line + "'");
    }
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace asearch
