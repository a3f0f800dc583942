// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "asearch/errors.hpp"

namespace asearch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point start) {
  return std::chrono::duration<double, std::nano>(Clock::now() - start).count();
}

}  // namespace

void validate(const Hyperparameters& theta) {
  if (!(theta.lambda >= 0.0 && theta.lambda <= 1.0)) {
    throw InvalidInputError("hyperparameters: lambda must lie in [0,1]");
  }
  if (!(theta.sigma_s > 0.0) || !std::isfinite(theta.sigma_s)) {
    throw InvalidInputError("hyperparameters: sigma_s must be positive");
  }
  if (!(theta.sigma_c > 0.0) || !std::isfinite(theta.sigma_c)) {
    throw InvalidInputError("hyperparameters: sigma_c must be positive");
  }
  if (theta.budget < 1) {
    throw InvalidInputError("hyperparameters: budget must be >= 1");
  }
}

double score_force(const Window& candidate, const Window& observed, double phi,
                   double sigma_s) {
  return kernel(candidate, observed, sigma_s) * (phi - 0.5);
}

double context_force(const Window& candidate, std::span<const Window> gamma, double sigma_c) {
  double sum = 0.0;
  for (const Window& w : gamma) sum += kernel(w, candidate, sigma_c);
  return sum;
}

BeliefState::BeliefState(std::size_t proposal_count)
    : beliefs_(proposal_count, 0.0), visited_(proposal_count, 0) {
  if (proposal_count == 0) {
    throw InvalidInputError("belief state needs at least one proposal");
  }
}

void BeliefState::observe(std::int32_t index, double score) {
  if (index < 0 || static_cast<std::size_t>(index) >= beliefs_.size()) {
    throw InvalidInputError("observe: proposal index out of range");
  }
  if (visited_[static_cast<std::size_t>(index)]) {
    throw InvalidInputError("observe: proposal " + std::to_string(index) +
                            " was already visited");
  }
  visited_[static_cast<std::size_t>(index)] = 1;
  visit_log_.emplace_back(index, score);
}

std::optional<std::int32_t> select_next(const BeliefState& state, std::int32_t first_index) {
  if (state.visited_count() >= state.size()) return std::nullopt;
  if (state.iteration() == 0) return first_index;

  std::int32_t best = -1;
  double best_belief = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.visited(i)) continue;
    const double b = state.belief(i);
    if (best < 0 || b > best_belief) {
      best = static_cast<std::int32_t>(i);
      best_belief = b;
    }
  }
  return best;
}

void update_beliefs(BeliefState& state, std::span<const Window> proposal_windows,
                    const Window& observed, double phi, std::span<const Window> gamma,
                    const Hyperparameters& theta) {
  const double lambda = theta.lambda;
  const bool use_score = lambda > 0.0;
  const bool use_context = lambda < 1.0;
  const double centered = phi - 0.5;

  // Disjoint windows are the common case; the kernel value at distance 1 is
  // cached and bit-identical to evaluating the kernel directly.
  const double score_disjoint = kernel_from_distance(1.0, theta.sigma_s);
  const double context_disjoint = kernel_from_distance(1.0, theta.sigma_c);

  for (std::size_t i = 0; i < proposal_windows.size(); ++i) {
    const Window& cand = proposal_windows[i];
    double increment = 0.0;
    if (use_score) {
      const double v = iou(cand, observed);
      const double k =
          v == 0.0 ? score_disjoint : kernel_from_distance(1.0 - v, theta.sigma_s);
      increment += lambda * (k * centered);
    }
    if (use_context) {
      double c = 0.0;
      for (const Window& w : gamma) {
        const double v = iou(w, cand);
        c += v == 0.0 ? context_disjoint : kernel_from_distance(1.0 - v, theta.sigma_c);
      }
      increment += (1.0 - lambda) * c;
    }
    state.beliefs_[i] += increment;
  }
}

Window initial_window(const Dataset& training, const std::string& class_name) {
  return mean_ground_truth_window(training, class_name);
}

std::int32_t nearest_proposal(const ImageRecord& image, const Window& target) {
  if (image.proposals.empty()) {
    throw InvalidInputError("nearest_proposal: image '" + image.id + "' has no proposals");
  }
  std::int32_t best = 0;
  double best_iou = -1.0;
  for (std::size_t i = 0; i < image.proposals.size(); ++i) {
    const double v = iou(image.proposals[i].window, target);
    if (v > best_iou) {
      best_iou = v;
      best = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

std::vector<TraceRow> Episode::detections() const {
  std::vector<TraceRow> rows = trace;
  std::sort(rows.begin(), rows.end(),
            [](const TraceRow& a, const TraceRow& b) { return a.proposal_index < b.proposal_index; });
  return rows;
}

Episode run_episode(const ImageRecord& image, const ForestModel& forest,
                    const ScoreFn& scorer, const Hyperparameters& theta,
                    const Window& start_window, std::span<const int> snapshot_iterations,
                    EpisodeTimers* timers) {
  validate(theta);
  if (image.proposals.empty()) {
    throw InvalidInputError("run_episode: image '" + image.id + "' has no proposals");
  }

  const std::size_t n = image.proposals.size();
  std::vector<Window> windows;
  windows.reserve(n);
  for (const Proposal& p : image.proposals) windows.push_back(p.window);

  Episode episode;
  episode.image_id = image.id;
  episode.theta = theta;
  episode.trace.reserve(std::min<std::size_t>(n, static_cast<std::size_t>(theta.budget)));

  const std::int32_t first_index = nearest_proposal(image, start_window);
  const bool use_context = theta.lambda < 1.0;

  BeliefState state(n);
  for (int t = 1; t <= theta.budget; ++t) {
    double iteration_ns = 0.0;
    const auto select_start = Clock::now();
    const std::optional<std::int32_t> selected = select_next(state, first_index);
    if (timers) {
      const double ns = elapsed_ns(select_start);
      timers->select_ns += ns;
      iteration_ns += ns;
    }
    if (!selected.has_value()) break;

    const std::int32_t idx = *selected;
    const double phi = scorer.score(image, idx);
    episode.trace.push_back(TraceRow{t, idx, windows[static_cast<std::size_t>(idx)], phi,
                                     state.belief(static_cast<std::size_t>(idx))});
    state.observe(idx, phi);

    std::vector<Window> gamma;
    if (use_context) {
      const auto forest_start = Clock::now();
      RouteStats stats;
      gamma = forest.extract_context(image.proposals[static_cast<std::size_t>(idx)], &stats);
      if (timers) {
        const double ns = elapsed_ns(forest_start);
        timers->forest_ns += ns;
        iteration_ns += ns;
        timers->distance_evaluations += stats.distance_evaluations;
      }
    }

    const auto update_start = Clock::now();
    update_beliefs(state, windows, windows[static_cast<std::size_t>(idx)], phi, gamma, theta);
    if (timers) {
      const double ns = elapsed_ns(update_start);
      timers->update_ns += ns;
      iteration_ns += ns;
      ++timers->iterations;
      timers->per_iteration_ns.push_back(iteration_ns);
    }

    if (std::find(snapshot_iterations.begin(), snapshot_iterations.end(), t) !=
        snapshot_iterations.end()) {
      episode.snapshots.push_back(
          BeliefSnapshot{t, std::vector<double>(state.beliefs().begin(), state.beliefs().end())});
    }
  }
  return episode;
}

}  // namespace asearch
