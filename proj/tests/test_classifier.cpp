// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "asearch/classifier.hpp"
#include "asearch/errors.hpp"
#include "asearch/eval.hpp"
#include "helpers.hpp"

using namespace asearch;
using namespace asearch::testing;

namespace {

std::filesystem::path test_tmp_dir() {
  const std::filesystem::path dir = std::filesystem::path(ASEARCH_TEST_TMP) / "classifier";
  std::filesystem::create_directories(dir);
  return dir;
}

ImageRecord image_with_gt() {
  ImageRecord img;
  img.id = "img";
  img.ground_truth["object"] = {Window(0.4, 0.4, 0.2, 0.2)};
  const AppearanceCode code(8);
  img.proposals = {
      make_proposal(Window(0.4, 0.4, 0.2, 0.2), code, 0),   // exactly on the box
      make_proposal(Window(0.0, 0.0, 0.1, 0.1), code, 1),   // disjoint
      make_proposal(Window(0.4, 0.4, 0.2, 0.1), code, 2),   // IoU 0.5
  };
  return img;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("noise-free oracle equals the best ground-truth overlap") {
  const ImageRecord img = image_with_gt();
  const OracleScorer scorer("object", NoiseConfig{0.0, 1.0, 0});
  CHECK(scorer.score(img, 0) == 1.0);
  CHECK(scorer.score(img, 1) == 0.0);
  CHECK(scorer.score(img, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(scorer.score(img, 99), InvalidInputError);

  ImageRecord empty = img;
  empty.ground_truth.clear();
  CHECK(scorer.score(empty, 0) == 0.0);
}

TEST_CASE("oracle noise is deterministic, seeded, and keeps scores in range") {
  const ImageRecord img = image_with_gt();
  const OracleScorer noisy("object", NoiseConfig{0.3, 1.0, 42});
  for (std::int32_t i = 0; i < 3; ++i) {
    const double first = noisy.score(img, i);
    CHECK(noisy.score(img, i) == first);
    CHECK(first >= 0.0);
    CHECK(first <= 1.0);
  }
  const OracleScorer other_seed("object", NoiseConfig{0.3, 1.0, 43});
  CHECK(noisy.score(img, 1) != other_seed.score(img, 1));
  CHECK(noisy.cost_label() == "oracle");
}

TEST_CASE("score tables store and return values verbatim") {
  ScoreTable table;
  table.scores = {0.1, 0.2, 0.3, 0.4, 0.5, 0.73};
  std::map<std::string, ScoreTable> tables;
  tables["img"] = table;
  const TableScorer scorer(std::move(tables));

  const ImageRecord img = []() {
    ImageRecord i;
    i.id = "img";
    const AppearanceCode code(8);
    for (int p = 0; p < 6; ++p) {
      i.proposals.push_back(make_proposal(Window(0.1, 0.1, 0.1, 0.1), code, p));
    }
    return i;
  }();
  CHECK(scorer.score(img, 5) == 0.73);
  CHECK(scorer.cost_label() == "table");
  CHECK_THROWS_AS(scorer.score(img, 6), InvalidInputError);
  CHECK_THROWS_AS(scorer.score(img, -1), InvalidInputError);
}

TEST_CASE("score table files validate on load") {
  const auto dir = test_tmp_dir();

  SUBCASE("round trip") {
    ScoreTable table;
    table.scores = {0.0, 0.25, 1.0, 0.125};
    const auto path = dir / "ok.scores";
    save_score_table(table, path);
    const ScoreTable loaded = load_score_table(path);
    CHECK(loaded.scores == table.scores);
  }

  SUBCASE("out-of-range value names the row") {
    const auto path = dir / "bad_value.scores";
    {
      std::ofstream out(path);
      out << "# asearch.scores v1\n0 0.5\n1 1.01\n";
    }
    try {
      load_score_table(path);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }

  SUBCASE("gaps and duplicates in the index column are rejected") {
    const auto path = dir / "bad_index.scores";
    {
      std::ofstream out(path);
      out << "# asearch.scores v1\n0 0.5\n0 0.25\n";
    }
    CHECK_THROWS_AS(load_score_table(path), ValidationError);
    {
      std::ofstream out(path);
      out << "# asearch.scores v1\n0 0.5\n2 0.25\n";
    }
    CHECK_THROWS_AS(load_score_table(path), ValidationError);
  }

  SUBCASE("missing or wrong header is rejected") {
    const auto path = dir / "no_header.scores";
    {
      std::ofstream out(path);
      out << "0 0.5\n";
    }
    CHECK_THROWS_AS(load_score_table(path), ValidationError);
  }
}

TEST_CASE("table replay reproduces exhaustive oracle evaluation exactly") {
  const SyntheticDataset data = generate_synthetic(tiny_config(71));
  const OracleScorer oracle("object", NoiseConfig{0.1, 1.0, 9});

  // Capture oracle scores into tables, then replay them.
  std::map<std::string, ScoreTable> tables;
  for (const ImageRecord& img : data.test.images) {
    ScoreTable t;
    t.scores.reserve(img.proposals.size());
    for (std::size_t i = 0; i < img.proposals.size(); ++i) {
      t.scores.push_back(oracle.score(img, static_cast<std::int32_t>(i)));
    }
    tables[img.id] = std::move(t);
  }
  const TableScorer replay(std::move(tables));

  const GroundTruthMap gt = ground_truth_for_class(data.test, "object");
  std::vector<Detection> from_oracle;
  std::vector<Detection> from_table;
  for (const ImageRecord& img : data.test.images) {
    auto a = exhaustive_detections(img, oracle);
    auto b = exhaustive_detections(img, replay);
    CHECK(a == b);
    from_oracle.insert(from_oracle.end(), a.begin(), a.end());
    from_table.insert(from_table.end(), b.begin(), b.end());
  }
  const auto ap_oracle = detection_ap(from_oracle, gt);
  const auto ap_table = detection_ap(from_table, gt);
  REQUIRE(ap_oracle.has_value());
  REQUIRE(ap_table.has_value());
  CHECK(*ap_oracle == *ap_table);
}

TEST_CASE("table scorer from a directory validates row counts") {
  const SyntheticDataset data = generate_synthetic(tiny_config(81));
  const auto dir = test_tmp_dir() / "tables";
  std::filesystem::create_directories(dir);
  const OracleScorer oracle("object", NoiseConfig{0.0, 1.0, 0});
  for (const ImageRecord& img : data.test.images) {
    ScoreTable t;
    for (std::size_t i = 0; i < img.proposals.size(); ++i) {
      t.scores.push_back(oracle.score(img, static_cast<std::int32_t>(i)));
    }
    save_score_table(t, dir / (img.id + ".scores"));
  }
  const TableScorer scorer(data.test, dir);
  CHECK(scorer.score(data.test.images[0], 0) == oracle.score(data.test.images[0], 0));

  // Truncate one table: the row count no longer matches.
  {
    ScoreTable t;
    t.scores = {0.5};
    save_score_table(t, dir / (data.test.images[0].id + ".scores"));
  }
  CHECK_THROWS_AS(TableScorer(data.test, dir), ValidationError);
}

}  // TEST_SUITE
