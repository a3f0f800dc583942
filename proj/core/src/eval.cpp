// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asearch/errors.hpp"
#include "asearch/parallel.hpp"
#include "asearch/rng.hpp"

namespace asearch {

namespace {

// Canonical detection order: score descending, then image id, then proposal
// index, then window coordinates. Makes every ranked computation independent
// of the order detections arrive in.
bool canonical_less(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.proposal_index != b.proposal_index) return a.proposal_index < b.proposal_index;
  if (a.window.x != b.window.x) return a.window.x < b.window.x;
  if (a.window.y != b.window.y) return a.window.y < b.window.y;
  if (a.window.w != b.window.w) return a.window.w < b.window.w;
  return a.window.h < b.window.h;
}

}  // namespace

GroundTruthMap ground_truth_for_class(const Dataset& dataset, const std::string& class_name) {
  GroundTruthMap gt;
  for (const ImageRecord& img : dataset.images) {
    const auto it = img.ground_truth.find(class_name);
    if (it != img.ground_truth.end() && !it->second.empty()) gt[img.id] = it->second;
  }
  return gt;
}

std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold) {
  std::sort(detections.begin(), detections.end(), canonical_less);
  std::vector<Detection> kept;
  for (Detection& d : detections) {
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (iou(d.window, k.window) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(d));
  }
  return kept;
}

std::optional<double> average_precision(std::span<const Detection> detections,
                                        const GroundTruthMap& ground_truth,
                                        double iou_match) {
  std::size_t total_gt = 0;
  for (const auto& [id, boxes] : ground_truth) total_gt += boxes.size();
  if (total_gt == 0) return std::nullopt;
  if (detections.empty()) return 0.0;

  std::vector<Detection> ranked(detections.begin(), detections.end());
  std::sort(ranked.begin(), ranked.end(), canonical_less);

  std::map<std::string, std::vector<char>> matched;
  for (const auto& [id, boxes] : ground_truth) matched[id].assign(boxes.size(), 0);

  std::vector<char> is_tp(ranked.size(), 0);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const Detection& det = ranked[r];
    const auto it = ground_truth.find(det.image_id);
    if (it == ground_truth.end()) continue;
    const std::vector<Window>& boxes = it->second;
    std::vector<char>& used = matched[det.image_id];

    int best = -1;
    double best_iou = 0.0;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      if (used[k]) continue;
      const double v = iou(det.window, boxes[k]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(k);
      }
    }
    if (best >= 0 && best_iou > iou_match) {
      is_tp[r] = 1;
      used[static_cast<std::size_t>(best)] = 1;
    }
  }

  // Precision envelope (all-points interpolation): at each rank use the best
  // precision achievable at that recall or beyond.
  const std::size_t n = ranked.size();
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t r = 0; r < n; ++r) {
    tp += is_tp[r];
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
  }
  for (std::size_t r = n - 1; r-- > 0;) {
    precision[r] = std::max(precision[r], precision[r + 1]);
  }

  double ap = 0.0;
  std::size_t seen_tp = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (!is_tp[r]) continue;
    ++seen_tp;
    ap += precision[r] / static_cast<double>(total_gt);
  }
  (void)seen_tp;
  return ap;
}

std::vector<Detection> episode_detections(const Episode& episode, std::size_t prefix_len) {
  const std::size_t count = std::min(prefix_len, episode.trace.size());
  std::vector<Detection> detections;
  detections.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const TraceRow& row = episode.trace[i];
    detections.push_back(Detection{episode.image_id, row.proposal_index, row.window, row.score});
  }
  std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    return a.proposal_index < b.proposal_index;
  });
  return detections;
}

std::vector<Detection> exhaustive_detections(const ImageRecord& image, const ScoreFn& scorer) {
  std::vector<Detection> detections;
  detections.reserve(image.proposals.size());
  for (std::size_t i = 0; i < image.proposals.size(); ++i) {
    const auto idx = static_cast<std::int32_t>(i);
    detections.push_back(
        Detection{image.id, idx, image.proposals[i].window, scorer.score(image, idx)});
  }
  return detections;
}

std::optional<double> detection_ap(const std::vector<Detection>& raw_detections,
                                   const GroundTruthMap& ground_truth, double nms_threshold,
                                   double iou_match) {
  std::map<std::string, std::vector<Detection>> per_image;
  for (const Detection& d : raw_detections) per_image[d.image_id].push_back(d);

  std::vector<Detection> pooled;
  for (auto& [id, dets] : per_image) {
    std::vector<Detection> kept = nms(std::move(dets), nms_threshold);
    pooled.insert(pooled.end(), kept.begin(), kept.end());
  }
  return average_precision(pooled, ground_truth, iou_match);
}

std::vector<int> default_checkpoints(int max_budget, int step) {
  if (max_budget < 1) throw InvalidInputError("checkpoints need max_budget >= 1");
  if (step < 1) throw InvalidInputError("checkpoints need step >= 1");
  std::vector<int> checkpoints;
  for (int b = step; b < max_budget; b += step) checkpoints.push_back(b);
  checkpoints.push_back(max_budget);
  return checkpoints;
}

BudgetCurve budget_curve(std::span<const Episode> episodes, const GroundTruthMap& ground_truth,
                         std::span<const int> checkpoints, const std::string& class_name,
                         const std::string& policy, double nms_threshold) {
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) {
      throw InvalidInputError("budget curve checkpoints must be strictly increasing");
    }
  }
  if (!checkpoints.empty() && checkpoints.front() < 0) {
    throw InvalidInputError("budget curve checkpoints must be non-negative");
  }

  BudgetCurve curve;
  curve.class_name = class_name;
  curve.policy = policy;
  curve.points.resize(checkpoints.size());

  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const int budget = checkpoints[c];
    std::vector<Detection> raw;
    for (const Episode& ep : episodes) {
      std::vector<Detection> dets = episode_detections(ep, static_cast<std::size_t>(budget));
      raw.insert(raw.end(), dets.begin(), dets.end());
    }
    const std::optional<double> ap = detection_ap(raw, ground_truth, nms_threshold);
    if (!ap.has_value()) {
      throw InvalidInputError("budget curve needs ground truth for class '" + class_name + "'");
    }
    curve.points[c] = CurvePoint{budget, *ap};
  }
  return curve;
}

double curve_auc(const BudgetCurve& curve) {
  if (curve.points.empty()) throw InvalidInputError("AUC of an empty curve");
  if (curve.points.size() == 1) return curve.points[0].ap;
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double db = curve.points[i].budget - curve.points[i - 1].budget;
    area += db * 0.5 * (curve.points[i].ap + curve.points[i - 1].ap);
  }
  return area / static_cast<double>(curve.points.back().budget);
}

std::vector<double> running_auc(const BudgetCurve& curve) {
  // Anchored at the implicit (0, 0) point: AP with zero evaluations is zero.
  std::vector<double> out(curve.points.size());
  double area = 0.0;
  int prev_budget = 0;
  double prev_ap = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const double db = curve.points[i].budget - prev_budget;
    area += db * 0.5 * (curve.points[i].ap + prev_ap);
    out[i] = area / static_cast<double>(curve.points[i].budget);
    prev_budget = curve.points[i].budget;
    prev_ap = curve.points[i].ap;
  }
  return out;
}

BudgetCurve mean_curve(std::span<const BudgetCurve> curves, const std::string& policy) {
  if (curves.empty()) throw InvalidInputError("mean of zero curves");
  BudgetCurve mean;
  mean.class_name = curves[0].class_name;
  mean.policy = policy;
  mean.points = curves[0].points;
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].points.size() != mean.points.size()) {
      throw InvalidInputError("mean_curve requires identical checkpoints");
    }
    for (std::size_t i = 0; i < mean.points.size(); ++i) {
      if (curves[c].points[i].budget != mean.points[i].budget) {
        throw InvalidInputError("mean_curve requires identical checkpoints");
      }
      mean.points[i].ap += curves[c].points[i].ap;
    }
  }
  for (CurvePoint& p : mean.points) p.ap /= static_cast<double>(curves.size());
  return mean;
}

Episode subsampling_episode(const ImageRecord& image, const ScoreFn& scorer, int budget,
                            std::uint64_t seed) {
  if (budget < 1) throw InvalidInputError("subsampling budget must be >= 1");
  if (image.proposals.empty()) {
    throw InvalidInputError("subsampling_episode: image '" + image.id + "' has no proposals");
  }
  const std::size_t n = image.proposals.size();
  Rng rng(derive_seed(seed, hash_string(image.id)));
  std::vector<std::size_t> order = rng.sample_indices(n, n);

  Episode episode;
  episode.image_id = image.id;
  episode.theta.budget = budget;
  const std::size_t visits = std::min(n, static_cast<std::size_t>(budget));
  episode.trace.reserve(visits);
  for (std::size_t t = 0; t < visits; ++t) {
    const auto idx = static_cast<std::int32_t>(order[t]);
    episode.trace.push_back(TraceRow{static_cast<int>(t) + 1, idx,
                                     image.proposals[order[t]].window,
                                     scorer.score(image, idx), 0.0});
  }
  return episode;
}

TuneConfig default_tune_config() {
  TuneConfig config;
  config.lambda_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  config.sigma_s_grid.resize(5);
  config.sigma_c_grid.resize(5);
  for (int i = 0; i < 5; ++i) {
    // Five points log-spaced over [0.01, 1].
    const double v = std::pow(10.0, -2.0 + 0.5 * i);
    config.sigma_s_grid[static_cast<std::size_t>(i)] = v;
    config.sigma_c_grid[static_cast<std::size_t>(i)] = v;
  }
  return config;
}

TuneResult tune_hyperparameters(const Dataset& training, const ForestModel& forest,
                                const ScoreFn& scorer, const TuneConfig& config, int jobs) {
  if (config.lambda_grid.empty() || config.sigma_s_grid.empty() || config.sigma_c_grid.empty()) {
    throw InvalidInputError("tune grid must be non-empty");
  }
  if (config.folds < 1) throw InvalidInputError("tune needs folds >= 1");
  if (config.budget < 1) throw InvalidInputError("tune needs budget >= 1");
  if (training.images.empty()) throw InvalidInputError("tune needs a non-empty training set");
  if (static_cast<std::size_t>(config.folds) > training.images.size()) {
    throw InvalidInputError("tune has more folds than training images");
  }

  std::vector<double> lambdas = config.lambda_grid;
  std::vector<double> sigmas_s = config.sigma_s_grid;
  std::vector<double> sigmas_c = config.sigma_c_grid;
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(sigmas_s.begin(), sigmas_s.end());
  std::sort(sigmas_c.begin(), sigmas_c.end());

  const GroundTruthMap gt = ground_truth_for_class(training, forest.class_name);
  const Window start = mean_ground_truth_window(training, forest.class_name);
  const std::vector<int> checkpoints = default_checkpoints(config.budget, config.checkpoint_step);

  // Image folds: position modulo fold count. Each fold is scored against its
  // own images' ground truth only.
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(config.folds));
  for (std::size_t i = 0; i < training.images.size(); ++i) {
    folds[i % static_cast<std::size_t>(config.folds)].push_back(i);
  }
  std::vector<GroundTruthMap> fold_gt(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) {
      const auto it = gt.find(training.images[i].id);
      if (it != gt.end()) fold_gt[f][it->first] = it->second;
    }
  }

  std::size_t scored_folds = 0;
  for (const GroundTruthMap& fg : fold_gt) {
    if (!fg.empty()) ++scored_folds;
  }
  if (scored_folds == 0) {
    throw NoTrainingDataError("tune: no fold contains ground truth for class '" +
                              forest.class_name + "'");
  }

  const auto evaluate_theta = [&](const Hyperparameters& theta) {
    double auc_sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      if (fold_gt[f].empty()) continue;
      const std::vector<std::size_t>& fold = folds[f];
      std::vector<Episode> episodes(fold.size());
      parallel_for(fold.size(), jobs, [&](std::size_t k) {
        episodes[k] = run_episode(training.images[fold[k]], forest, scorer, theta, start);
      });
      const BudgetCurve curve =
          budget_curve(episodes, fold_gt[f], checkpoints, forest.class_name, "tune");
      auc_sum += curve_auc(curve);
    }
    return auc_sum / static_cast<double>(scored_folds);
  };

  // Grid points that disable a force share results with every sigma value of
  // that force; evaluate each equivalence class once.
  struct CacheKey {
    double lambda, sigma_s, sigma_c;
    bool operator<(const CacheKey& o) const {
      if (lambda != o.lambda) return lambda < o.lambda;
      if (sigma_s != o.sigma_s) return sigma_s < o.sigma_s;
      return sigma_c < o.sigma_c;
    }
  };
  std::map<CacheKey, double> cache;

  TuneResult result;
  bool have_best = false;
  double best_auc = 0.0;

  for (double lambda : lambdas) {
    for (double sigma_c : sigmas_c) {
      for (double sigma_s : sigmas_s) {
        const Hyperparameters theta{lambda, sigma_s, sigma_c, config.budget};
        validate(theta);
        const CacheKey key{lambda, lambda > 0.0 ? sigma_s : -1.0,
                           lambda < 1.0 ? sigma_c : -1.0};
        auto it = cache.find(key);
        if (it == cache.end()) {
          it = cache.emplace(key, evaluate_theta(theta)).first;
        }
        const double auc = it->second;
        result.grid.push_back(GridScore{theta, auc});
        // Strict improvement keeps the earliest (smallest lambda, then
        // sigma_c, then sigma_s) grid point on ties.
        if (!have_best || auc > best_auc) {
          have_best = true;
          best_auc = auc;
          result.best = theta;
        }
      }
    }
  }
  return result;
}

OverheadReport measure_overhead(const Dataset& dataset, const ForestModel& forest,
                                const ScoreFn& scorer, const Hyperparameters& theta,
                                int max_images) {
  if (dataset.images.empty()) throw InvalidInputError("overhead needs a non-empty dataset");
  const Window start = forest.start_window;
  const std::size_t count =
      max_images > 0 ? std::min<std::size_t>(dataset.images.size(),
                                             static_cast<std::size_t>(max_images))
                     : dataset.images.size();

  OverheadReport report;
  report.images = static_cast<int>(count);
  report.proposals_per_image = static_cast<int>(dataset.images[0].proposals.size());
  report.scorer_cost_label = scorer.cost_label();

  std::vector<double> per_iteration;
  double forest_ns = 0.0, update_ns = 0.0, select_ns = 0.0;
  long long distance_evals = 0;
  for (std::size_t i = 0; i < count; ++i) {
    EpisodeTimers timers;
    run_episode(dataset.images[i], forest, scorer, theta, start, {}, &timers);
    report.iterations += timers.iterations;
    forest_ns += timers.forest_ns;
    update_ns += timers.update_ns;
    select_ns += timers.select_ns;
    distance_evals += timers.distance_evaluations;
    per_iteration.insert(per_iteration.end(), timers.per_iteration_ns.begin(),
                         timers.per_iteration_ns.end());
  }

  if (report.iterations > 0) {
    const double iters = static_cast<double>(report.iterations);
    report.mean_forest_ms = forest_ns / iters * 1e-6;
    report.mean_update_ms = update_ns / iters * 1e-6;
    report.mean_select_ms = select_ns / iters * 1e-6;
    report.mean_distance_evaluations_per_iteration =
        static_cast<double>(distance_evals) / iters;
    report.total_overhead_ms = (forest_ns + update_ns + select_ns) * 1e-6;
    report.mean_overhead_ms = report.total_overhead_ms / iters;
    std::sort(per_iteration.begin(), per_iteration.end());
    const std::size_t mid = per_iteration.size() / 2;
    report.median_overhead_ms =
        (per_iteration.size() % 2 == 1
             ? per_iteration[mid]
             : 0.5 * (per_iteration[mid - 1] + per_iteration[mid])) *
        1e-6;
  }
  return report;
}

}  // namespace asearch
