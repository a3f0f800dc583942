// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "asearch/errors.hpp"
#include "asearch/parallel.hpp"
#include "asearch/rng.hpp"

namespace asearch {

namespace {

// Per-dimension fixed-range histogram over [-1,1] for the four displacement
// components. Entropies are summed across dimensions.
class HistogramSet {
 public:
  explicit HistogramSet(int bins) : bins_(bins), counts_(4 * bins, 0) {}

  void reset() {
    std::fill(counts_.begin(), counts_.end(), 0);
    total_ = 0;
  }

  int bin_index(double v) const {
    const int idx = static_cast<int>((v + 1.0) * 0.5 * bins_);
    return std::clamp(idx, 0, bins_ - 1);
  }

  void add(const Displacement& d) {
    ++counts_[bin_index(d.dx)];
    ++counts_[bins_ + bin_index(d.dy)];
    ++counts_[2 * bins_ + bin_index(d.dw)];
    ++counts_[3 * bins_ + bin_index(d.dh)];
    ++total_;
  }

  int total() const { return total_; }

  // Shannon entropy in bits, with 0 log 0 := 0.
  double entropy_bits() const {
    if (total_ == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(total_);
    double h = 0.0;
    for (int c : counts_) {
      if (c == 0) continue;
      const double p = c * inv;
      h -= p * std::log2(p);
    }
    return h;
  }

 private:
  int bins_;
  std::vector<int> counts_;
  int total_ = 0;
};

double sample_distance(const TrainingSample& s, const Proposal& pivot, DistanceKind kind) {
  return kind == DistanceKind::kLocation
             ? location_distance(s.proposal.window, pivot.window)
             : hamming_distance(s.proposal.code, pivot.code);
}

double displacement_distance(const Displacement& a, const Displacement& b) {
  const double dx = a.dx - b.dx;
  const double dy = a.dy - b.dy;
  const double dw = a.dw - b.dw;
  const double dh = a.dh - b.dh;
  return std::sqrt(dx * dx + dy * dy + dw * dw + dh * dh);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const TrainingSample> samples, const ForestConfig& config,
              std::uint64_t seed)
      : samples_(samples), config_(config), rng_(seed) {}

  Tree build() {
    std::vector<std::int32_t> all(samples_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int32_t>(i);
    build_node(std::move(all), 0);
    return Tree(std::move(nodes_));
  }

 private:
  std::int32_t make_leaf(const std::vector<std::int32_t>& idxs) {
    std::vector<Displacement> disps;
    disps.reserve(idxs.size());
    for (std::int32_t i : idxs) disps.push_back(samples_[i].displacement);
    Tree::Node node;
    node.leaf = medoid(disps);
    nodes_.push_back(std::move(node));
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t build_node(std::vector<std::int32_t> idxs, int depth) {
    const std::size_t n = idxs.size();
    if (depth >= config_.max_depth || n <= static_cast<std::size_t>(config_.min_leaf)) {
      return make_leaf(idxs);
    }

    HistogramSet parent(config_.histogram_bins);
    for (std::int32_t i : idxs) parent.add(samples_[i].displacement);
    const double parent_entropy = parent.entropy_bits();

    double best_ig = 0.0;
    bool have_best = false;
    std::int32_t best_pivot = -1;
    DistanceKind best_kind = DistanceKind::kLocation;
    double best_tau = 0.0;

    std::vector<double> dist(n);
    std::vector<double> best_dist;
    HistogramSet left_hist(config_.histogram_bins);
    HistogramSet right_hist(config_.histogram_bins);

    for (int trial = 0; trial < config_.candidate_triplets; ++trial) {
      const std::int32_t pivot_idx = idxs[rng_.below(n)];
      const DistanceKind kind =
          rng_.below(2) == 0 ? DistanceKind::kLocation : DistanceKind::kAppearance;
      const Proposal& pivot = samples_[pivot_idx].proposal;
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = sample_distance(samples_[idxs[i]], pivot, kind);
      }
      // Thresholds come from the empirical distances so candidate splits are
      // never vacuous by construction of the range (they can still be
      // one-sided, which the emptiness check rejects).
      const double tau = dist[rng_.below(n)];

      left_hist.reset();
      right_hist.reset();
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] >= tau) {
          left_hist.add(samples_[idxs[i]].displacement);
        } else {
          right_hist.add(samples_[idxs[i]].displacement);
        }
      }
      if (left_hist.total() == 0 || right_hist.total() == 0) continue;

      const double nl = left_hist.total();
      const double nr = right_hist.total();
      const double ig = parent_entropy -
                        (nl / static_cast<double>(n)) * left_hist.entropy_bits() -
                        (nr / static_cast<double>(n)) * right_hist.entropy_bits();
      if (ig > best_ig) {
        best_ig = ig;
        have_best = true;
        best_pivot = pivot_idx;
        best_kind = kind;
        best_tau = tau;
        best_dist = dist;
      }
    }

    if (!have_best) return make_leaf(idxs);

    // Recompute the winning distances only when the winner was not the last
    // trial evaluated; best_dist always holds them.
    std::vector<std::int32_t> left_idxs;
    std::vector<std::int32_t> right_idxs;
    for (std::size_t i = 0; i < n; ++i) {
      if (best_dist[i] >= best_tau) {
        left_idxs.push_back(idxs[i]);
      } else {
        right_idxs.push_back(idxs[i]);
      }
    }

    const std::int32_t node_id = static_cast<std::int32_t>(nodes_.size());
    Tree::Node node;
    node.test = NodeTest{samples_[best_pivot].proposal, best_kind, best_tau};
    nodes_.push_back(std::move(node));

    idxs.clear();
    idxs.shrink_to_fit();

    const std::int32_t left_id = build_node(std::move(left_idxs), depth + 1);
    const std::int32_t right_id = build_node(std::move(right_idxs), depth + 1);
    nodes_[node_id].left = left_id;
    nodes_[node_id].right = right_id;
    return node_id;
  }

  std::span<const TrainingSample> samples_;
  const ForestConfig& config_;
  Rng rng_;
  std::vector<Tree::Node> nodes_;
};

void validate(const ForestConfig& c) {
  if (c.tree_count < 1) throw InvalidInputError("forest config: tree_count must be >= 1");
  if (c.max_depth < 0) throw InvalidInputError("forest config: max_depth must be >= 0");
  if (c.min_leaf < 1) throw InvalidInputError("forest config: min_leaf must be >= 1");
  if (c.candidate_triplets < 1) {
    throw InvalidInputError("forest config: candidate_triplets must be >= 1");
  }
  if (c.histogram_bins < 1) throw InvalidInputError("forest config: histogram_bins must be >= 1");
  if (c.images_per_tree < 1) throw InvalidInputError("forest config: images_per_tree must be >= 1");
}

}  // namespace

const Displacement& Tree::route(const Proposal& o, RouteStats* stats) const {
  if (nodes_.empty()) throw InvalidInputError("route on an empty tree");
  const Node* node = &nodes_[0];
  while (!node->is_leaf()) {
    const NodeTest& test = *node->test;
    const double d = test.kind == DistanceKind::kLocation
                         ? location_distance(o.window, test.pivot.window)
                         : hamming_distance(o.code, test.pivot.code);
    if (stats) ++stats->distance_evaluations;
    node = d >= test.threshold ? &nodes_[node->left] : &nodes_[node->right];
  }
  return node->leaf;
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  int max_depth = 0;
  std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.is_leaf()) {
      max_depth = std::max(max_depth, d);
    } else {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return max_depth;
}

double entropy(std::span<const Displacement> displacements, int bins) {
  if (displacements.empty()) throw InvalidInputError("entropy of an empty displacement list");
  if (bins < 1) throw InvalidInputError("entropy needs at least one histogram bin");
  HistogramSet hist(bins);
  for (const Displacement& d : displacements) hist.add(d);
  return hist.entropy_bits();
}

double information_gain(std::span<const Displacement> parent,
                        std::span<const Displacement> left,
                        std::span<const Displacement> right, int bins) {
  if (left.empty() || right.empty()) {
    throw InvalidInputError("information gain requires both children non-empty");
  }
  if (left.size() + right.size() != parent.size()) {
    throw InvalidInputError("information gain children do not partition the parent");
  }
  // The children must form the parent exactly (as multisets).
  const auto key_less = [](const Displacement& a, const Displacement& b) {
    return std::tie(a.dx, a.dy, a.dw, a.dh) < std::tie(b.dx, b.dy, b.dw, b.dh);
  };
  std::vector<Displacement> expected(parent.begin(), parent.end());
  std::vector<Displacement> merged(left.begin(), left.end());
  merged.insert(merged.end(), right.begin(), right.end());
  std::sort(expected.begin(), expected.end(), key_less);
  std::sort(merged.begin(), merged.end(), key_less);
  if (!(expected == merged)) {
    throw InvalidInputError("information gain children do not partition the parent");
  }
  const double n = static_cast<double>(parent.size());
  return entropy(parent, bins) -
         (static_cast<double>(left.size()) / n) * entropy(left, bins) -
         (static_cast<double>(right.size()) / n) * entropy(right, bins);
}

Displacement medoid(std::span<const Displacement> displacements) {
  if (displacements.empty()) throw InvalidInputError("medoid of an empty displacement list");
  const std::size_t n = displacements.size();

  bool all_identical = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(displacements[i] == displacements[0])) {
      all_identical = false;
      break;
    }
  }
  if (all_identical) return displacements[0];

  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += displacement_distance(displacements[i], displacements[j]);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return displacements[best];
}

Tree train_tree(std::span<const TrainingSample> samples, const ForestConfig& config,
                std::uint64_t rng_seed) {
  validate(config);
  if (samples.empty()) throw InvalidInputError("train_tree requires at least one sample");
  return TreeBuilder(samples, config, rng_seed).build();
}

int closest_ground_truth(const Window& window, std::span<const Window> boxes) {
  int best = -1;
  double best_iou = -1.0;
  double best_center = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const double v = iou(window, boxes[k]);
    const double cx = window.center_x() - boxes[k].center_x();
    const double cy = window.center_y() - boxes[k].center_y();
    const double center = std::sqrt(cx * cx + cy * cy);
    // Highest IoU wins; equal IoU (including the all-zero case) falls back to
    // the smallest center distance, then to the first box.
    if (v > best_iou || (v == best_iou && center < best_center)) {
      best = static_cast<int>(k);
      best_iou = v;
      best_center = center;
    }
  }
  return best;
}

std::vector<TrainingSample> collect_training_samples(const Dataset& dataset,
                                                     const std::string& class_name) {
  std::vector<TrainingSample> samples;
  for (std::size_t img_idx = 0; img_idx < dataset.images.size(); ++img_idx) {
    const ImageRecord& img = dataset.images[img_idx];
    const auto it = img.ground_truth.find(class_name);
    if (it == img.ground_truth.end() || it->second.empty()) continue;
    const std::vector<Window>& gts = it->second;
    for (const Proposal& p : img.proposals) {
      const int g = closest_ground_truth(p.window, gts);
      samples.push_back(TrainingSample{p, displacement_between(p.window, gts[g]),
                                       static_cast<std::int32_t>(img_idx)});
    }
  }
  return samples;
}

std::vector<Window> ForestModel::extract_context(const Proposal& o, RouteStats* stats) const {
  std::vector<Window> windows;
  windows.reserve(trees.size());
  for (const Tree& tree : trees) {
    const Displacement& d = tree.route(o, stats);
    windows.push_back(apply_displacement(o.window, d));
  }
  return windows;
}

ForestModel train_forest(const Dataset& training, const std::string& class_name,
                         const ForestConfig& config, std::uint64_t seed, int jobs) {
  validate(config);

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < training.images.size(); ++i) {
    const auto it = training.images[i].ground_truth.find(class_name);
    if (it != training.images[i].ground_truth.end() && !it->second.empty()) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    throw NoTrainingDataError("no training images contain class '" + class_name + "'");
  }

  // Grouped per image so each tree can slice out its image subset.
  const std::vector<TrainingSample> all_samples = collect_training_samples(training, class_name);
  std::map<std::int32_t, std::pair<std::size_t, std::size_t>> image_ranges;
  {
    std::size_t begin = 0;
    while (begin < all_samples.size()) {
      std::size_t end = begin;
      while (end < all_samples.size() &&
             all_samples[end].image_index == all_samples[begin].image_index) {
        ++end;
      }
      image_ranges[all_samples[begin].image_index] = {begin, end};
      begin = end;
    }
  }

  ForestModel model;
  model.class_name = class_name;
  model.config = config;
  model.seed = seed;
  model.start_window = mean_ground_truth_window(training, class_name);
  model.trees.resize(config.tree_count);

  const std::size_t subset_size =
      std::min<std::size_t>(static_cast<std::size_t>(config.images_per_tree), eligible.size());

  parallel_for(static_cast<std::size_t>(config.tree_count), jobs, [&](std::size_t j) {
    Rng subset_rng(derive_seed(seed, 2 * j));
    std::vector<std::size_t> picks = subset_rng.sample_indices(eligible.size(), subset_size);
    std::sort(picks.begin(), picks.end());

    std::vector<TrainingSample> tree_samples;
    for (std::size_t pick : picks) {
      const auto range = image_ranges.find(static_cast<std::int32_t>(eligible[pick]));
      if (range == image_ranges.end()) continue;
      for (std::size_t s = range->second.first; s < range->second.second; ++s) {
        tree_samples.push_back(all_samples[s]);
      }
    }
    model.trees[j] = train_tree(tree_samples, config, derive_seed(seed, 2 * j + 1));
  });

  return model;
}

}  // namespace asearch
