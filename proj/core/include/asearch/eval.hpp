// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asearch/classifier.hpp"
#include "asearch/dataio.hpp"
#include "asearch/forest.hpp"
#include "asearch/search.hpp"

namespace asearch {

inline constexpr double kNmsIouThreshold = 0.3;
inline constexpr double kApIouThreshold = 0.5;

struct Detection {
  std::string image_id;
  std::int32_t proposal_index = -1;
  Window window;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// image id -> ground-truth boxes, for one class.
using GroundTruthMap = std::map<std::string, std::vector<Window>>;

GroundTruthMap ground_truth_for_class(const Dataset& dataset, const std::string& class_name);

/// Greedy non-maxima suppression over one image's detections: highest score
/// first (ties by lowest proposal index), discarding anything overlapping a
/// kept detection by more than the threshold. Output is in greedy order.
std::vector<Detection> nms(std::vector<Detection> detections,
                           double iou_threshold = kNmsIouThreshold);

/// PASCAL-style average precision over post-NMS detections from any number of
/// images: detections are ranked by score, each greedily matched to the
/// highest-IoU unmatched ground-truth box of its image, counted correct when
/// the overlap exceeds `iou_match`, and the area under the precision envelope
/// is returned. With zero ground-truth boxes AP is undefined and nullopt is
/// returned.
std::optional<double> average_precision(std::span<const Detection> detections,
                                        const GroundTruthMap& ground_truth,
                                        double iou_match = kApIouThreshold);

/// The first `prefix_len` visits of an episode as detections, in canonical
/// proposal-index order.
std::vector<Detection> episode_detections(const Episode& episode, std::size_t prefix_len);

/// Scores every proposal of the image independently: the budget-unlimited
/// reference the rightmost curve point must match.
std::vector<Detection> exhaustive_detections(const ImageRecord& image, const ScoreFn& scorer);

/// Per-image NMS followed by pooled AP.
std::optional<double> detection_ap(const std::vector<Detection>& raw_detections,
                                   const GroundTruthMap& ground_truth,
                                   double nms_threshold = kNmsIouThreshold,
                                   double iou_match = kApIouThreshold);

struct CurvePoint {
  int budget = 0;
  double ap = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// AP as a function of the number of classifier evaluations allowed.
struct BudgetCurve {
  std::string class_name;
  std::string policy;
  std::vector<CurvePoint> points;

  friend bool operator==(const BudgetCurve&, const BudgetCurve&) = default;
};

/// {step, 2*step, ...} up to and always including max_budget.
std::vector<int> default_checkpoints(int max_budget, int step = 10);

/// Evaluates episodes at each checkpoint by prefix-truncating their traces
/// (valid because the visit sequence is budget-independent), applying NMS per
/// image and pooling AP. Checkpoints must be strictly increasing.
BudgetCurve budget_curve(std::span<const Episode> episodes, const GroundTruthMap& ground_truth,
                         std::span<const int> checkpoints, const std::string& class_name,
                         const std::string& policy, double nms_threshold = kNmsIouThreshold);

/// Trapezoidal area under the curve, normalized by the last budget.
double curve_auc(const BudgetCurve& curve);

/// Cumulative AUC at every checkpoint: entry k integrates the curve up to
/// checkpoint k, normalized by that checkpoint's budget.
std::vector<double> running_auc(const BudgetCurve& curve);

/// Pointwise mean of curves sharing identical checkpoints.
BudgetCurve mean_curve(std::span<const BudgetCurve> curves, const std::string& policy);

/// Proposals-Subsampling baseline: visits a seeded uniformly random
/// permutation prefix of the proposals. Same Episode shape as the active
/// search so it flows through the same evaluation plumbing.
Episode subsampling_episode(const ImageRecord& image, const ScoreFn& scorer, int budget,
                            std::uint64_t seed);

struct TuneConfig {
  std::vector<double> lambda_grid;
  std::vector<double> sigma_s_grid;
  std::vector<double> sigma_c_grid;
  int folds = 2;
  int budget = 150;
  int checkpoint_step = 10;
};

/// Default grids: lambda in {0,0.25,0.5,0.75,1}, both sigmas on a 5-point
/// log scale over [0.01, 1].
TuneConfig default_tune_config();

struct GridScore {
  Hyperparameters theta;
  double mean_auc = 0.0;
};

struct TuneResult {
  Hyperparameters best;
  std::vector<GridScore> grid;  // in enumeration order (lambda, sigma_c, sigma_s)
};

/// Grid search maximizing the mean over k image-folds of the area under the
/// AP-vs-budget curve. Ties break toward smaller lambda, then smaller
/// sigma_c, then smaller sigma_s. Throws InvalidInputError on an empty grid.
TuneResult tune_hyperparameters(const Dataset& training, const ForestModel& forest,
                                const ScoreFn& scorer, const TuneConfig& config, int jobs = 1);

/// Per-iteration overhead accounting for a batch of episodes.
struct OverheadReport {
  int images = 0;
  int proposals_per_image = 0;
  long long iterations = 0;
  double mean_overhead_ms = 0.0;
  double median_overhead_ms = 0.0;
  double mean_forest_ms = 0.0;
  double mean_update_ms = 0.0;
  double mean_select_ms = 0.0;
  double total_overhead_ms = 0.0;
  double mean_distance_evaluations_per_iteration = 0.0;
  std::string scorer_cost_label;
};

/// Runs timed episodes over the dataset (sequentially, to keep timings
/// honest) and aggregates the per-iteration overhead split.
OverheadReport measure_overhead(const Dataset& dataset, const ForestModel& forest,
                                const ScoreFn& scorer, const Hyperparameters& theta,
                                int max_images = 0);

}  // namespace asearch
