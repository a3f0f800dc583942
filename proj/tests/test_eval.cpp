// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include <doctest.h>

#include "asearch/classifier.hpp"
#include "asearch/errors.hpp"
#include "asearch/eval.hpp"
#include "asearch/text_formats.hpp"
#include "helpers.hpp"

using namespace asearch;
using namespace asearch::testing;

namespace {

Detection det(const std::string& image, std::int32_t index, const Window& w, double score) {
  return Detection{image, index, w, score};
}

std::filesystem::path test_tmp_dir() {
  const std::filesystem::path dir = std::filesystem::path(ASEARCH_TEST_TMP) / "eval";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("nms keeps the top of overlapping groups") {
  const Window w(0.1, 0.1, 0.2, 0.2);

  SUBCASE("single detection survives") {
    const auto out = nms({det("a", 0, w, 0.4)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].score == 0.4);
  }

  SUBCASE("identical windows: only the higher score survives") {
    const auto out = nms({det("a", 0, w, 0.9), det("a", 1, w, 0.8)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].score == 0.9);
  }

  SUBCASE("hand-traced three-box case") {
    // A (0.9) suppresses B (IoU(A,B) = 1/3 > 0.3); C is disjoint from A and
    // survives. Greedy order: A, then B dropped, then C kept.
    const Window a(0.1, 0.1, 0.2, 0.2);
    const Window b(0.2, 0.1, 0.2, 0.2);
    const Window c(0.5, 0.5, 0.2, 0.2);
    REQUIRE(iou(a, b) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    REQUIRE(iou(a, c) == 0.0);
    const auto out = nms({det("a", 0, a, 0.9), det("a", 1, b, 0.8), det("a", 2, c, 0.7)});
    REQUIRE(out.size() == 2);
    CHECK(out[0].window == a);
    CHECK(out[1].window == c);
  }

  SUBCASE("empty input gives empty output") { CHECK(nms({}).empty()); }

  SUBCASE("survivors are a subset with bounded pairwise overlap, sorted by score") {
    Rng rng(17);
    std::vector<Detection> input;
    for (int i = 0; i < 200; ++i) {
      input.push_back(det("a", i, random_window(rng), rng.unit()));
    }
    const auto out = nms(input, 0.3);
    CHECK(!out.empty());
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        CHECK(iou(out[i].window, out[j].window) <= 0.3);
        CHECK(out[i].score >= out[j].score);
      }
    }
    for (const Detection& d : out) {
      CHECK(std::find(input.begin(), input.end(), d) != input.end());
    }
  }
}

TEST_CASE("average precision on anchor cases") {
  GroundTruthMap gt;
  gt["a"] = {Window(0.1, 0.1, 0.2, 0.2)};

  SUBCASE("one detection exactly on the single box") {
    const auto ap = average_precision(
        std::vector<Detection>{det("a", 0, Window(0.1, 0.1, 0.2, 0.2), 0.9)}, gt);
    REQUIRE(ap.has_value());
    CHECK(*ap == 1.0);
  }

  SUBCASE("all detections disjoint from the ground truth") {
    const auto ap = average_precision(
        std::vector<Detection>{det("a", 0, Window(0.6, 0.6, 0.2, 0.2), 0.9),
                               det("a", 1, Window(0.6, 0.1, 0.2, 0.2), 0.8)},
        gt);
    REQUIRE(ap.has_value());
    CHECK(*ap == 0.0);
  }

  SUBCASE("no ground truth at all: AP is undefined, not zero") {
    const GroundTruthMap empty;
    CHECK(!average_precision(std::vector<Detection>{det("a", 0, Window(0.1, 0.1, 0.2, 0.2), 0.9)},
                             empty)
               .has_value());
  }

  SUBCASE("empty detections with ground truth present: AP is zero") {
    const auto ap = average_precision(std::vector<Detection>{}, gt);
    REQUIRE(ap.has_value());
    CHECK(*ap == 0.0);
  }

  SUBCASE("manual precision-recall table: TP, FP, TP over two boxes") {
    GroundTruthMap two;
    two["a"] = {Window(0.0, 0.0, 0.2, 0.2), Window(0.5, 0.5, 0.2, 0.2)};
    // Rank 1: on the first box (precision 1, recall 1/2).
    // Rank 2: false positive (precision 1/2).
    // Rank 3: on the second box (precision 2/3, recall 1).
    // All-points AP = 0.5 * 1 + 0.5 * 2/3 = 5/6.
    const std::vector<Detection> dets{
        det("a", 0, Window(0.0, 0.0, 0.2, 0.2), 0.9),
        det("a", 1, Window(0.0, 0.5, 0.2, 0.2), 0.8),
        det("a", 2, Window(0.5, 0.5, 0.2, 0.2), 0.7),
    };
    const auto ap = average_precision(dets, two);
    REQUIRE(ap.has_value());
    CHECK(*ap == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }

  SUBCASE("each ground-truth box is matched at most once") {
    // Two detections on the same box: the second becomes a false positive.
    const std::vector<Detection> dets{
        det("a", 0, Window(0.1, 0.1, 0.2, 0.2), 0.9),
        det("a", 1, Window(0.11, 0.1, 0.2, 0.2), 0.8),
    };
    const auto ap = average_precision(dets, gt);
    REQUIRE(ap.has_value());
    CHECK(*ap == 1.0);  // the TP comes first; the duplicate trails as FP
  }
}

TEST_CASE("AP is invariant under strictly monotone score transforms") {
  Rng rng(23);
  GroundTruthMap gt;
  std::vector<Detection> dets;
  for (int img = 0; img < 6; ++img) {
    const std::string id = "img" + std::to_string(img);
    gt[id] = {random_window(rng)};
    for (int i = 0; i < 30; ++i) {
      // Mix of near-box and random windows with distinct hash-based scores.
      Window w = random_window(rng);
      if (i % 5 == 0) w = gt[id][0];
      dets.push_back(det(id, i, w, rng.unit()));
    }
  }
  const auto base = detection_ap(dets, gt);
  REQUIRE(base.has_value());

  auto squared = dets;
  for (Detection& d : squared) d.score = d.score * d.score;
  auto rooted = dets;
  for (Detection& d : rooted) d.score = std::sqrt(d.score);

  CHECK(*detection_ap(squared, gt) == *base);
  CHECK(*detection_ap(rooted, gt) == *base);
}

TEST_CASE("budget curve: exhaustion identity, zero checkpoint, dominance plumbing") {
  const SyntheticDataset data = generate_synthetic(tiny_config(141));
  ForestConfig fc;
  fc.tree_count = 5;
  const ForestModel forest = train_forest(data.train, "object", fc, 71, 2);
  const OracleScorer scorer("object", NoiseConfig{0.0, 1.0, 0});
  const GroundTruthMap gt = ground_truth_for_class(data.test, "object");
  const int n = static_cast<int>(data.test.images[0].proposals.size());

  std::vector<Episode> episodes;
  for (const ImageRecord& image : data.test.images) {
    episodes.push_back(run_episode(image, forest, scorer, Hyperparameters{0.5, 0.1, 0.3, n},
                                   forest.start_window));
  }

  const std::vector<int> checkpoints{0, 5, 10, 20, n};
  const BudgetCurve curve = budget_curve(episodes, gt, checkpoints, "object", "active");
  REQUIRE(curve.points.size() == 5);
  CHECK(curve.points[0].ap == 0.0);

  // Rightmost point equals independently scoring every proposal.
  std::vector<Detection> exhaustive;
  for (const ImageRecord& image : data.test.images) {
    const auto dets = exhaustive_detections(image, scorer);
    exhaustive.insert(exhaustive.end(), dets.begin(), dets.end());
  }
  const auto exhaustive_ap = detection_ap(exhaustive, gt);
  REQUIRE(exhaustive_ap.has_value());
  CHECK(curve.points.back().ap == *exhaustive_ap);

  SUBCASE("checkpoints must increase strictly") {
    const std::vector<int> bad{5, 5};
    CHECK_THROWS_AS(budget_curve(episodes, gt, bad, "object", "x"), InvalidInputError);
  }

  SUBCASE("curve files round-trip") {
    const auto path = test_tmp_dir() / "curve.tsv";
    save_curve(curve, path);
    CHECK(load_curve(path) == curve);
  }
}

TEST_CASE("default checkpoints cover the budget inclusively") {
  CHECK(default_checkpoints(50, 10) == std::vector<int>{10, 20, 30, 40, 50});
  CHECK(default_checkpoints(55, 10) == std::vector<int>{10, 20, 30, 40, 50, 55});
  CHECK(default_checkpoints(5, 10) == std::vector<int>{5});
  CHECK_THROWS_AS(default_checkpoints(0, 10), InvalidInputError);
}

TEST_CASE("curve AUC arithmetic") {
  BudgetCurve curve;
  curve.points = {{10, 0.2}, {20, 0.6}, {40, 1.0}};
  // Trapezoids: 10*(0.2+0.6)/2 + 20*(0.6+1.0)/2 = 4 + 16 = 20; normalized by 40.
  CHECK(curve_auc(curve) == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<double> running = running_auc(curve);
  REQUIRE(running.size() == 3);
  // Anchored at (0,0): [0,10] area 1 -> 0.1; plus [10,20] area 4 -> 5/20;
  // plus [20,40] area 16 -> 21/40.
  CHECK(running[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(running[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(running[2] == doctest::Approx(21.0 / 40.0).epsilon(1e-12));
}

TEST_CASE("subsampling baseline") {
  const SyntheticDataset data = generate_synthetic(tiny_config(151));
  const OracleScorer scorer("object", NoiseConfig{0.0, 1.0, 0});
  const ImageRecord& image = data.test.images[0];
  const int n = static_cast<int>(image.proposals.size());

  SUBCASE("budget equal to N covers every proposal") {
    const Episode ep = subsampling_episode(image, scorer, n, 9);
    CHECK(ep.trace.size() == static_cast<std::size_t>(n));
    std::set<std::int32_t> seen;
    for (const TraceRow& row : ep.trace) CHECK(seen.insert(row.proposal_index).second);
    CHECK(episode_detections(ep, ep.trace.size()) == exhaustive_detections(image, scorer));
  }

  SUBCASE("same seed, same trace; different seed, different trace") {
    const Episode a = subsampling_episode(image, scorer, 10, 9);
    const Episode b = subsampling_episode(image, scorer, 10, 9);
    const Episode c = subsampling_episode(image, scorer, 10, 10);
    REQUIRE(a.trace.size() == b.trace.size());
    bool all_equal = true;
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].proposal_index == b.trace[i].proposal_index);
      if (i < c.trace.size() && a.trace[i].proposal_index != c.trace[i].proposal_index) {
        all_equal = false;
      }
    }
    CHECK_FALSE(all_equal);
  }
}

TEST_CASE("tuning selects grid points deterministically") {
  const SyntheticDataset data = generate_synthetic(tiny_config(161));
  ForestConfig fc;
  fc.tree_count = 4;
  const ForestModel forest = train_forest(data.train, "object", fc, 81, 2);
  const OracleScorer scorer("object", NoiseConfig{0.0, 1.0, 0});

  SUBCASE("a single grid point is returned as-is") {
    TuneConfig config;
    config.lambda_grid = {0.25};
    config.sigma_s_grid = {0.07};
    config.sigma_c_grid = {0.4};
    config.budget = 10;
    config.checkpoint_step = 5;
    const TuneResult result = tune_hyperparameters(data.train, forest, scorer, config, 2);
    CHECK(result.best.lambda == 0.25);
    CHECK(result.best.sigma_s == 0.07);
    CHECK(result.best.sigma_c == 0.4);
    CHECK(result.best.budget == 10);
    CHECK(result.grid.size() == 1);
  }

  SUBCASE("empty grid is rejected") {
    TuneConfig config;
    config.lambda_grid = {};
    CHECK_THROWS_AS(tune_hyperparameters(data.train, forest, scorer, config, 1),
                    InvalidInputError);
  }

  SUBCASE("exact AUC ties break toward the smaller lambda") {
    // A dataset whose proposals never overlap the ground truth by more than
    // 0.5: every policy scores AP 0 at every checkpoint, so all grid points
    // tie and the tie-break has to pick the smallest lambda.
    Dataset flat;
    flat.code_bits = 8;
    for (int i = 0; i < 4; ++i) {
      ImageRecord img;
      img.id = "flat" + std::to_string(i);
      img.ground_truth["object"] = {Window(0.8, 0.8, 0.15, 0.15)};
      const AppearanceCode code(8);
      for (int p = 0; p < 12; ++p) {
        img.proposals.push_back(
            make_proposal(Window(0.05 * p, 0.1, 0.1, 0.1), code, p));
      }
      flat.images.push_back(std::move(img));
    }
    ForestConfig tiny_fc;
    tiny_fc.tree_count = 2;
    const ForestModel flat_forest = train_forest(flat, "object", tiny_fc, 5);
    TuneConfig config;
    config.lambda_grid = {0.0, 1.0};
    config.sigma_s_grid = {0.1};
    config.sigma_c_grid = {0.1};
    config.budget = 6;
    config.checkpoint_step = 3;
    const TuneResult result = tune_hyperparameters(flat, flat_forest, scorer, config, 1);
    CHECK(result.best.lambda == 0.0);
    for (const GridScore& g : result.grid) CHECK(g.mean_auc == 0.0);
  }
}

TEST_CASE("detections files round-trip and reject bad rows") {
  const auto dir = test_tmp_dir();
  Rng rng(31);
  std::vector<Detection> dets;
  for (int i = 0; i < 40; ++i) {
    Detection d = det("img" + std::to_string(i % 3), i, random_window(rng), rng.unit());
    d.proposal_index = -1;  // the on-disk format does not carry indices
    dets.push_back(d);
  }
  const auto path = dir / "detections.tsv";
  save_detections(dets, path);
  const auto loaded = load_detections(path);
  CHECK(loaded == dets);

  const auto bad = dir / "bad_detections.tsv";
  {
    std::ofstream out(bad);
    out << "# asearch.detections v1\nimg 0.1 0.1 0.2 0.2 1.5\n";
  }
  CHECK_THROWS_AS(load_detections(bad), ValidationError);
}

TEST_CASE("trace files round-trip") {
  const SyntheticDataset data = generate_synthetic(tiny_config(171));
  const OracleScorer scorer("object", NoiseConfig{0.05, 1.0, 3});
  const Episode ep = subsampling_episode(data.test.images[0], scorer, 15, 4);

  const auto path = test_tmp_dir() / "episode.trace.tsv";
  save_trace(ep, path);
  const Episode loaded = load_trace(path);
  CHECK(loaded.image_id == ep.image_id);
  REQUIRE(loaded.trace.size() == ep.trace.size());
  for (std::size_t i = 0; i < ep.trace.size(); ++i) {
    CHECK(loaded.trace[i].t == ep.trace[i].t);
    CHECK(loaded.trace[i].proposal_index == ep.trace[i].proposal_index);
    CHECK(loaded.trace[i].window == ep.trace[i].window);
    CHECK(loaded.trace[i].score == ep.trace[i].score);
    CHECK(loaded.trace[i].belief_at_selection == ep.trace[i].belief_at_selection);
  }
}

TEST_CASE("overhead measurement populates the report") {
  const SyntheticDataset data = generate_synthetic(tiny_config(181));
  ForestConfig fc;
  fc.tree_count = 3;
  const ForestModel forest = train_forest(data.train, "object", fc, 91, 2);
  const OracleScorer scorer("object", NoiseConfig{0.0, 1.0, 0});

  const OverheadReport report =
      measure_overhead(data.test, forest, scorer, Hyperparameters{0.5, 0.1, 0.3, 20}, 3);
  CHECK(report.images == 3);
  CHECK(report.iterations == 60);
  CHECK(report.mean_overhead_ms > 0.0);
  CHECK(report.median_overhead_ms > 0.0);
  CHECK(report.total_overhead_ms > 0.0);
  CHECK(report.mean_distance_evaluations_per_iteration > 0.0);
  CHECK(report.mean_distance_evaluations_per_iteration <=
        static_cast<double>(fc.tree_count * fc.max_depth));
  CHECK(report.scorer_cost_label == "oracle");
}

}  // TEST_SUITE
