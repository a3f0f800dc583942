// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/dataio.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asearch/errors.hpp"
#include "asearch/version.hpp"

namespace asearch {

using nlohmann::json;

namespace {

constexpr const char* kDatasetSchema = "asearch.dataset";
constexpr double kGeometryEps = 1e-12;

json window_to_json(const Window& w) {
  return json::array({w.x, w.y, w.w, w.h});
}

Window window_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError(where + ": window must be a [x,y,w,h] array");
  }
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(where + ": window entries must be numbers");
  }
  try {
    return Window(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                  j[3].get<double>());
  } catch (const InvalidInputError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace

const ImageRecord* Dataset::find(std::string_view id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

void validate_dataset(const Dataset& dataset) {
  std::set<std::string> seen_ids;
  for (const auto& img : dataset.images) {
    const std::string where = "image '" + img.id + "'";
    if (img.id.empty()) throw ValidationError("image with empty id");
    if (!seen_ids.insert(img.id).second) {
      throw ValidationError("duplicate image id '" + img.id + "'");
    }
    if (img.proposals.empty()) {
      throw ValidationError(where + ": proposals must be non-empty");
    }
    for (std::size_t i = 0; i < img.proposals.size(); ++i) {
      const Proposal& p = img.proposals[i];
      const std::string pwhere = where + " proposal " + std::to_string(i);
      if (p.index != static_cast<std::int32_t>(i)) {
        throw ValidationError(pwhere + ": index field does not match position");
      }
      if (p.code.bit_count() != dataset.code_bits) {
        throw ValidationError(pwhere + ": appearance code length " +
                              std::to_string(p.code.bit_count()) + " != dataset code_bits " +
                              std::to_string(dataset.code_bits));
      }
      const Window& w = p.window;
      if (w.x + w.w > 1.0 + kGeometryEps || w.y + w.h > 1.0 + kGeometryEps) {
        throw ValidationError(pwhere + ": window extends outside the unit square");
      }
    }
    for (const auto& [cls, boxes] : img.ground_truth) {
      for (std::size_t g = 0; g < boxes.size(); ++g) {
        const Window& w = boxes[g];
        if (w.x + w.w > 1.0 + kGeometryEps || w.y + w.h > 1.0 + kGeometryEps) {
          throw ValidationError(where + " ground-truth box " + std::to_string(g) +
                                " of class '" + cls + "' extends outside the unit square");
        }
      }
    }
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset file is empty: " + path.string());

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError("dataset header is not valid JSON: " + std::string(e.what()));
  }
  if (header.value("schema", "") != kDatasetSchema) {
    throw ValidationError("not a dataset file (bad schema field)");
  }
  if (header.value("version", -1) != kSchemaVersion) {
    throw ValidationError("unsupported dataset schema version");
  }

  Dataset dataset;
  dataset.code_bits = header.value("code_bits", std::size_t{0});

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    ImageRecord img;
    img.id = j.value("id", "");
    const std::string where = "line " + std::to_string(line_no) + " (image '" + img.id + "')";
    img.width = j.value("width", 0);
    img.height = j.value("height", 0);
    if (!j.contains("proposals") || !j["proposals"].is_array()) {
      throw ValidationError(where + ": missing proposals array");
    }
    std::int32_t index = 0;
    for (const auto& pj : j["proposals"]) {
      Proposal p;
      p.window = window_from_json(pj.at("window"), where);
      if (!pj.contains("code") || !pj["code"].is_string()) {
        throw ValidationError(where + ": proposal missing code string");
      }
      p.code = AppearanceCode::from_hex(pj["code"].get<std::string>());
      p.index = index++;
      img.proposals.push_back(std::move(p));
    }
    if (j.contains("ground_truth")) {
      for (const auto& [cls, boxes] : j["ground_truth"].items()) {
        std::vector<Window> parsed;
        for (const auto& bj : boxes) parsed.push_back(window_from_json(bj, where));
        img.ground_truth[cls] = std::move(parsed);
      }
    }
    dataset.images.push_back(std::move(img));
  }

  validate_dataset(dataset);
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file " + path.string());

  json header;
  header["schema"] = kDatasetSchema;
  header["version"] = kSchemaVersion;
  header["code_bits"] = dataset.code_bits;
  out << header.dump() << '\n';

  for (const auto& img : dataset.images) {
    json j;
    j["id"] = img.id;
    j["width"] = img.width;
    j["height"] = img.height;
    json props = json::array();
    for (const auto& p : img.proposals) {
      json pj;
      pj["window"] = window_to_json(p.window);
      pj["code"] = p.code.to_hex();
      props.push_back(std::move(pj));
    }
    j["proposals"] = std::move(props);
    json gt = json::object();
    for (const auto& [cls, boxes] : img.ground_truth) {
      json arr = json::array();
      for (const auto& b : boxes) arr.push_back(window_to_json(b));
      gt[cls] = std::move(arr);
    }
    j["ground_truth"] = std::move(gt);
    out << j.dump() << '\n';
  }
  if (!out) throw ValidationError("failed writing dataset file " + path.string());
}

Window mean_ground_truth_window(const Dataset& dataset, const std::string& class_name) {
  double sx = 0, sy = 0, sw = 0, sh = 0;
  std::size_t n = 0;
  for (const auto& img : dataset.images) {
    auto it = img.ground_truth.find(class_name);
    if (it == img.ground_truth.end()) continue;
    for (const Window& g : it->second) {
      sx += g.x;
      sy += g.y;
      sw += g.w;
      sh += g.h;
      ++n;
    }
  }
  if (n == 0) {
    throw NoTrainingDataError("no ground-truth boxes for class '" + class_name + "'");
  }
  const double inv = 1.0 / static_cast<double>(n);
  return Window(sx * inv, sy * inv, sw * inv, sh * inv);
}

}  // namespace asearch
