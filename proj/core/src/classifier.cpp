// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "asearch/errors.hpp"
#include "asearch/rng.hpp"

namespace asearch {

namespace {

constexpr const char* kScoresHeader = "# asearch.scores v1";

const Proposal& proposal_at(const ImageRecord& image, std::int32_t index) {
  if (index < 0 || static_cast<std::size_t>(index) >= image.proposals.size()) {
    throw InvalidInputError("proposal index " + std::to_string(index) +
                            " out of range for image '" + image.id + "'");
  }
  return image.proposals[static_cast<std::size_t>(index)];
}

}  // namespace

OracleScorer::OracleScorer(std::string class_name, NoiseConfig noise)
    : class_name_(std::move(class_name)), noise_(noise) {
  if (noise_.amplitude < 0.0 || !std::isfinite(noise_.amplitude)) {
    throw InvalidInputError("oracle noise amplitude must be non-negative");
  }
  if (!(noise_.gamma > 0.0)) {
    throw InvalidInputError("oracle gamma must be positive");
  }
}

double OracleScorer::score(const ImageRecord& image, std::int32_t proposal_index) const {
  const Proposal& p = proposal_at(image, proposal_index);

  double base = 0.0;
  const auto it = image.ground_truth.find(class_name_);
  if (it != image.ground_truth.end()) {
    for (const Window& g : it->second) base = std::max(base, iou(p.window, g));
  }
  if (noise_.gamma != 1.0) base = std::pow(base, noise_.gamma);

  double eps = 0.0;
  if (noise_.amplitude > 0.0) {
    // Stateless per-proposal noise: a pure function of (seed, image, index),
    // so scores are identical no matter in which order proposals are visited.
    std::uint64_t h = hash_string(image.id);
    h = mix_seed(h ^ mix_seed(noise_.seed));
    h = mix_seed(h ^ static_cast<std::uint64_t>(proposal_index + 1));
    const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
    eps = noise_.amplitude * (2.0 * unit - 1.0);
  }
  return std::clamp(base + eps, 0.0, 1.0);
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open score table " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != kScoresHeader) {
    throw ValidationError("score table " + path.string() + ": missing or unsupported header");
  }

  std::vector<std::pair<std::int64_t, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::int64_t index = -1;
    double value = -1.0;
    if (!(ss >> index >> value)) {
      throw ValidationError("score table " + path.string() + " row " +
                            std::to_string(line_no) + ": expected 'index score'");
    }
    if (value < 0.0 || value > 1.0 || !std::isfinite(value)) {
      throw ValidationError("score table " + path.string() + " row " +
                            std::to_string(line_no) + ": score " + std::to_string(value) +
                            " outside [0,1]");
    }
    rows.emplace_back(index, value);
  }

  ScoreTable table;
  table.scores.assign(rows.size(), -1.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto [index, value] = rows[r];
    if (index < 0 || index >= static_cast<std::int64_t>(rows.size())) {
      throw ValidationError("score table " + path.string() + ": index " +
                            std::to_string(index) + " does not cover 0.." +
                            std::to_string(rows.size() - 1));
    }
    if (table.scores[static_cast<std::size_t>(index)] >= 0.0) {
      throw ValidationError("score table " + path.string() + ": duplicate index " +
                            std::to_string(index));
    }
    table.scores[static_cast<std::size_t>(index)] = value;
  }
  return table;
}

void save_score_table(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write score table " + path.string());
  out << kScoresHeader << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.scores.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), table.scores[i]);
    out << i << ' ';
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
}

TableScorer::TableScorer(const Dataset& dataset, const std::filesystem::path& table_dir)
    : tables_() {
  for (const ImageRecord& img : dataset.images) {
    const std::filesystem::path file = table_dir / (img.id + ".scores");
    ScoreTable table = load_score_table(file);
    if (table.scores.size() != img.proposals.size()) {
      throw ValidationError("score table " + file.string() + " has " +
                            std::to_string(table.scores.size()) + " rows but image '" +
                            img.id + "' has " + std::to_string(img.proposals.size()) +
                            " proposals");
    }
    tables_[img.id] = std::move(table);
  }
}

TableScorer::TableScorer(std::map<std::string, ScoreTable> tables)
    : tables_(std::move(tables)) {
  for (const auto& [id, table] : tables_) {
    for (std::size_t i = 0; i < table.scores.size(); ++i) {
      if (table.scores[i] < 0.0 || table.scores[i] > 1.0) {
        throw ValidationError("score table for image '" + id + "' row " + std::to_string(i) +
                              ": score outside [0,1]");
      }
    }
  }
}

double TableScorer::score(const ImageRecord& image, std::int32_t proposal_index) const {
  const auto it = tables_.find(image.id);
  if (it == tables_.end()) {
    throw InvalidInputError("no score table loaded for image '" + image.id + "'");
  }
  if (proposal_index < 0 ||
      static_cast<std::size_t>(proposal_index) >= it->second.scores.size()) {
    throw InvalidInputError("proposal index " + std::to_string(proposal_index) +
                            " out of range for score table of image '" + image.id + "'");
  }
  return it->second.scores[static_cast<std::size_t>(proposal_index)];
}

std::unique_ptr<ScoreFn> make_scorer(const std::string& spec, const std::string& class_name,
                                     const Dataset& dataset, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "oracle") {
    NoiseConfig noise;
    noise.seed = seed;
    if (!arg.empty()) {
      try {
        noise.amplitude = std::stod(arg);
      } catch (const std::exception&) {
        throw ValidationError("scorer spec '" + spec + "': noise amplitude is not a number");
      }
    }
    return std::make_unique<OracleScorer>(class_name, noise);
  }
  if (kind == "table") {
    if (arg.empty()) throw ValidationError("scorer spec 'table:' needs a directory path");
    return std::make_unique<TableScorer>(dataset, std::filesystem::path(arg));
  }
  throw ValidationError("unknown scorer spec '" + spec + "' (use oracle:<noise> or table:<dir>)");
}

}  // namespace asearch
