// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asearch/dataio.hpp"
#include "asearch/features.hpp"
#include "asearch/geometry.hpp"

namespace asearch {

struct ForestConfig {
  int tree_count = 10;
  int max_depth = 15;
  int min_leaf = 5;
  /// Random (pivot, kind, threshold) triplets drawn per node; the best one by
  /// information gain becomes the node test.
  int candidate_triplets = 100;
  /// Bins per displacement dimension over the fixed range [-1,1].
  int histogram_bins = 20;
  /// Each tree trains on all proposals from this many randomly drawn images.
  int images_per_tree = 40;

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// One training pair: a proposal and the displacement taking its window to
/// the closest ground-truth box of its image.
struct TrainingSample {
  Proposal proposal;
  Displacement displacement;
  std::int32_t image_index = 0;
};

/// Distance test applied at an internal node: the query goes LEFT when its
/// distance to the stored pivot is >= the threshold, RIGHT otherwise.
struct NodeTest {
  Proposal pivot;
  DistanceKind kind = DistanceKind::kLocation;
  double threshold = 0.0;
};

struct RouteStats {
  int distance_evaluations = 0;
};

class Tree {
 public:
  struct Node {
    std::optional<NodeTest> test;  // empty on leaves
    Displacement leaf;             // meaningful on leaves
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return !test.has_value(); }
  };

  Tree() = default;
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  /// Root-to-leaf traversal; returns the leaf displacement. Counts one
  /// distance evaluation per internal node crossed when stats is given.
  const Displacement& route(const Proposal& o, RouteStats* stats = nullptr) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  /// Longest root-to-leaf path, in edges.
  int depth() const;

 private:
  std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// Sum over the four displacement dimensions of the Shannon entropy (bits) of
/// a fixed-range histogram over [-1,1]. Throws InvalidInputError on an empty
/// list.
double entropy(std::span<const Displacement> displacements, int bins = 20);

/// IG = H(S) - |L|/|S| H(L) - |R|/|S| H(R). Requires a proper two-way
/// partition: |L|+|R| = |S| with both sides non-empty.
double information_gain(std::span<const Displacement> parent,
                        std::span<const Displacement> left,
                        std::span<const Displacement> right, int bins = 20);

/// Element minimizing the summed Euclidean distance to all others; ties go to
/// the lowest index. Throws InvalidInputError on an empty list.
Displacement medoid(std::span<const Displacement> displacements);

Tree train_tree(std::span<const TrainingSample> samples, const ForestConfig& config,
                std::uint64_t rng_seed);

/// The context extractor: an ensemble of distance-test trees regressing
/// displacement vectors, plus the training-set statistics a search episode
/// needs (the mean ground-truth window used as the starting point).
struct ForestModel {
  std::string class_name;
  ForestConfig config;
  std::uint64_t seed = 0;
  Window start_window;
  std::optional<EmbedderModel> embedder;
  std::vector<Tree> trees;

  std::size_t tree_count() const { return trees.size(); }

  /// Routes the proposal through every tree and applies each returned
  /// displacement to its window (with clamping). Output length is exactly the
  /// tree count; duplicates are kept.
  std::vector<Window> extract_context(const Proposal& o, RouteStats* stats = nullptr) const;
};

/// Pairs every proposal of every class-bearing image with the displacement to
/// its closest ground-truth box (highest IoU; smallest center distance when
/// no box overlaps). Image order and proposal order are preserved.
std::vector<TrainingSample> collect_training_samples(const Dataset& dataset,
                                                     const std::string& class_name);

/// Index into `boxes` of the closest box to `window`, or -1 when boxes is
/// empty: highest IoU, falling back to (and tie-breaking by) smallest center
/// distance.
int closest_ground_truth(const Window& window, std::span<const Window> boxes);

/// Trains `config.tree_count` trees, each on all proposals from an
/// independently drawn subset of min(images_per_tree, available) class-bearing
/// images. Deterministic given the seed, regardless of `jobs`.
ForestModel train_forest(const Dataset& training, const std::string& class_name,
                         const ForestConfig& config, std::uint64_t seed, int jobs = 1);

/// Self-describing JSON model file. Save/load round-trips bit-exactly:
/// a reloaded model produces identical extract_context output.
void save_forest(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

}  // namespace asearch
