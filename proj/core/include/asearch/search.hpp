// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asearch/classifier.hpp"
#include "asearch/dataio.hpp"
#include "asearch/forest.hpp"
#include "asearch/geometry.hpp"

namespace asearch {

/// The tunable contract between the two forces plus the evaluation budget.
struct Hyperparameters {
  double lambda = 0.5;   // mixing weight: 1 = score force only, 0 = context only
  double sigma_s = 0.1;  // score-force kernel bandwidth
  double sigma_c = 0.3;  // context-force kernel bandwidth
  int budget = 100;      // max classifier evaluations per image

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Throws InvalidInputError unless lambda is in [0,1], both sigmas are
/// positive and budget >= 1.
void validate(const Hyperparameters& theta);

/// Score force: K(candidate, observed; sigma_s) * (phi - 0.5). Attracts the
/// search toward the observation's surroundings when its classifier score is
/// above 0.5 and repels when below.
double score_force(const Window& candidate, const Window& observed, double phi,
                   double sigma_s);

/// Context force: sum of K(w_j, candidate; sigma_c) over the displaced
/// windows predicted from the observation. Always positive, at most the
/// number of predicted windows.
double context_force(const Window& candidate, std::span<const Window> gamma,
                     double sigma_c);

/// Per-proposal belief values plus visit bookkeeping for one image episode.
/// Beliefs start at zero (complete uncertainty) and accumulate force
/// contributions; visited proposals keep receiving updates but are excluded
/// from future selection.
class BeliefState {
 public:
  explicit BeliefState(std::size_t proposal_count);

  std::size_t size() const { return beliefs_.size(); }
  int iteration() const { return static_cast<int>(visit_log_.size()); }
  double belief(std::size_t i) const { return beliefs_[i]; }
  std::span<const double> beliefs() const { return beliefs_; }
  bool visited(std::size_t i) const { return visited_[i] != 0; }
  std::size_t visited_count() const { return visit_log_.size(); }

  /// (proposal index, classifier score) in visit order; entries are distinct.
  std::span<const std::pair<std::int32_t, double>> visit_log() const {
    return visit_log_;
  }

  /// Records an observation. Throws InvalidInputError on repeat visits.
  void observe(std::int32_t index, double score);

  friend void update_beliefs(BeliefState& state, std::span<const Window> proposal_windows,
                             const Window& observed, double phi,
                             std::span<const Window> gamma, const Hyperparameters& theta);

 private:
  std::vector<double> beliefs_;
  std::vector<std::uint8_t> visited_;
  std::vector<std::pair<std::int32_t, double>> visit_log_;
};

/// Next proposal to observe: the highest-belief unvisited proposal, ties
/// broken by lowest index. The very first selection instead returns
/// `first_index`, the proposal closest to the mean ground-truth window (the
/// mean box itself is generally not a proposal). Returns nullopt once every
/// proposal has been visited.
std::optional<std::int32_t> select_next(const BeliefState& state, std::int32_t first_index);

/// Adds lambda * S + (1-lambda) * C to every proposal's belief, including
/// already-visited ones.
void update_beliefs(BeliefState& state, std::span<const Window> proposal_windows,
                    const Window& observed, double phi, std::span<const Window> gamma,
                    const Hyperparameters& theta);

/// Mean ground-truth box of the class over the training set: the search's
/// starting window. Throws NoTrainingDataError when the class is absent.
Window initial_window(const Dataset& training, const std::string& class_name);

/// Proposal with the highest IoU to `target`, ties broken by lowest index.
std::int32_t nearest_proposal(const ImageRecord& image, const Window& target);

struct TraceRow {
  int t = 0;  // 1-based iteration
  std::int32_t proposal_index = 0;
  Window window;
  double score = 0.0;
  double belief_at_selection = 0.0;  // belief of the selected proposal before observing it
};

struct BeliefSnapshot {
  int t = 0;
  std::vector<double> beliefs;
};

/// One image's search episode: full visit trace plus any requested belief
/// snapshots. The visit sequence is budget-independent, so a longer episode's
/// trace prefix equals a shorter episode's trace.
struct Episode {
  std::string image_id;
  Hyperparameters theta;
  std::vector<TraceRow> trace;
  std::vector<BeliefSnapshot> snapshots;

  /// The episode's detections: every visited window with its classifier
  /// score, in canonical (proposal index) order. Duplicate suppression is
  /// deferred to evaluation-side NMS.
  std::vector<TraceRow> detections() const;
};

/// Wall-clock split of the per-iteration overhead (everything except the
/// classifier call).
struct EpisodeTimers {
  double forest_ns = 0.0;
  double update_ns = 0.0;
  double select_ns = 0.0;
  int iterations = 0;
  long long distance_evaluations = 0;  // forest node tests across all queries
  std::vector<double> per_iteration_ns;
};

/// Runs the active search on one image: select by belief, score, extract
/// context, update all beliefs; repeats for `theta.budget` iterations or
/// until the proposals are exhausted. Deterministic given the scorer's and
/// forest's determinism. Passing `timers` records the per-component overhead.
Episode run_episode(const ImageRecord& image, const ForestModel& forest,
                    const ScoreFn& scorer, const Hyperparameters& theta,
                    const Window& start_window, std::span<const int> snapshot_iterations = {},
                    EpisodeTimers* timers = nullptr);

}  // namespace asearch
