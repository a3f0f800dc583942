// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <fstream>

#include <json.hpp>

#include "asearch/errors.hpp"
#include "asearch/forest.hpp"
#include "asearch/version.hpp"

namespace asearch {

using nlohmann::json;

namespace {

constexpr const char* kForestSchema = "asearch.forest";

json window_to_json(const Window& w) { return json::array({w.x, w.y, w.w, w.h}); }

Window window_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("model file: malformed window");
  return Window(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

json displacement_to_json(const Displacement& d) {
  return json::array({d.dx, d.dy, d.dw, d.dh});
}

Displacement displacement_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("model file: malformed displacement");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

const char* kind_name(DistanceKind kind) {
  return kind == DistanceKind::kLocation ? "location" : "appearance";
}

DistanceKind kind_from_name(const std::string& name) {
  if (name == "location") return DistanceKind::kLocation;
  if (name == "appearance") return DistanceKind::kAppearance;
  throw ValidationError("model file: unknown distance kind '" + name + "'");
}

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const Tree::Node& node : tree.nodes()) {
    json nj;
    if (node.is_leaf()) {
      nj["leaf"] = displacement_to_json(node.leaf);
    } else {
      nj["l"] = node.left;
      nj["r"] = node.right;
      nj["kind"] = kind_name(node.test->kind);
      nj["tau"] = node.test->threshold;
      nj["pivot"] = {{"window", window_to_json(node.test->pivot.window)},
                     {"code", node.test->pivot.code.to_hex()},
                     {"index", node.test->pivot.index}};
    }
    nodes.push_back(std::move(nj));
  }
  return json{{"nodes", std::move(nodes)}};
}

Tree tree_from_json(const json& j) {
  if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty()) {
    throw ValidationError("model file: tree without nodes");
  }
  std::vector<Tree::Node> nodes;
  const std::int32_t count = static_cast<std::int32_t>(j["nodes"].size());
  nodes.reserve(count);
  for (const json& nj : j["nodes"]) {
    Tree::Node node;
    if (nj.contains("leaf")) {
      node.leaf = displacement_from_json(nj["leaf"]);
    } else {
      node.left = nj.at("l").get<std::int32_t>();
      node.right = nj.at("r").get<std::int32_t>();
      if (node.left < 0 || node.left >= count || node.right < 0 || node.right >= count) {
        throw ValidationError("model file: node child index out of range");
      }
      NodeTest test;
      test.kind = kind_from_name(nj.at("kind").get<std::string>());
      test.threshold = nj.at("tau").get<double>();
      const json& pj = nj.at("pivot");
      test.pivot.window = window_from_json(pj.at("window"));
      test.pivot.code = AppearanceCode::from_hex(pj.at("code").get<std::string>());
      test.pivot.index = pj.value("index", 0);
      node.test = std::move(test);
    }
    nodes.push_back(std::move(node));
  }
  return Tree(std::move(nodes));
}

}  // namespace

void save_forest(const ForestModel& model, const std::filesystem::path& path) {
  json j;
  j["schema"] = kForestSchema;
  j["version"] = kSchemaVersion;
  j["class"] = model.class_name;
  j["seed"] = model.seed;
  j["config"] = {{"tree_count", model.config.tree_count},
                 {"max_depth", model.config.max_depth},
                 {"min_leaf", model.config.min_leaf},
                 {"candidate_triplets", model.config.candidate_triplets},
                 {"histogram_bins", model.config.histogram_bins},
                 {"images_per_tree", model.config.images_per_tree}};
  j["start_window"] = window_to_json(model.start_window);
  if (model.embedder.has_value()) {
    j["embedder"] = {{"input_dim", model.embedder->input_dim()},
                     {"code_bits", model.embedder->code_bits()},
                     {"seed", model.embedder->seed()}};
  } else {
    j["embedder"] = nullptr;
  }
  json trees = json::array();
  for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
  j["trees"] = std::move(trees);

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file " + path.string());
  out << j.dump() << '\n';
  if (!out) throw ValidationError("failed writing model file " + path.string());
}

ForestModel load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("model file is not valid JSON: " + std::string(e.what()));
  }
  if (j.value("schema", "") != kForestSchema) {
    throw ValidationError("not a forest model file (bad schema field)");
  }
  if (j.value("version", -1) != kSchemaVersion) {
    throw ValidationError("unsupported forest model schema version");
  }

  ForestModel model;
  model.class_name = j.value("class", "");
  model.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config")) {
    const json& cj = j["config"];
    model.config.tree_count = cj.value("tree_count", model.config.tree_count);
    model.config.max_depth = cj.value("max_depth", model.config.max_depth);
    model.config.min_leaf = cj.value("min_leaf", model.config.min_leaf);
    model.config.candidate_triplets =
        cj.value("candidate_triplets", model.config.candidate_triplets);
    model.config.histogram_bins = cj.value("histogram_bins", model.config.histogram_bins);
    model.config.images_per_tree = cj.value("images_per_tree", model.config.images_per_tree);
  }
  model.start_window = window_from_json(j.at("start_window"));
  if (j.contains("embedder") && !j["embedder"].is_null()) {
    const json& ej = j["embedder"];
    model.embedder.emplace(ej.at("input_dim").get<std::size_t>(),
                           ej.at("code_bits").get<std::size_t>(),
                           ej.at("seed").get<std::uint64_t>());
  }
  if (!j.contains("trees") || !j["trees"].is_array() || j["trees"].empty()) {
    throw ValidationError("model file: missing trees");
  }
  for (const json& tj : j["trees"]) model.trees.push_back(tree_from_json(tj));
  return model;
}

}  // namespace asearch
