// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "asearch/text_formats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string output;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::path(ASEARCH_TEST_TMP) / "cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = work_dir() / ("out" + std::to_string(counter++) + ".log");
  const std::string cmd =
      std::string(ASEARCH_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One small dataset + model shared by the CLI cases, built once.
struct Fixture {
  fs::path data_dir;
  fs::path model_file;
  fs::path config_file;
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    Fixture f;
    f.config_file = work_dir() / "config.json";
    {
      std::ofstream out(f.config_file);
      out << R"({"schema":"asearch.config","version":1,"train_scenes":10,"test_scenes":5,)"
          << R"("proposals_per_image":50,"code_bits":64,"seed":13})";
    }
    f.data_dir = work_dir() / "data";
    CliResult gen = run_cli("generate --config " + f.config_file.string() + " --out " +
                            f.data_dir.string() + " --jobs 2");
    REQUIRE(gen.code == 0);
    const fs::path model_dir = work_dir() / "model";
    CliResult train = run_cli("train --dataset " + (f.data_dir / "train.jsonl").string() +
                              " --class object --trees 5 --images-per-tree 8 --seed 3 --out " +
                              model_dir.string() + " --jobs 2");
    REQUIRE(train.code == 0);
    f.model_file = model_dir / "model.json";
    return f;
  }();
  return fx;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate writes datasets, config snapshot, and manifest") {
  const Fixture& fx = fixture();
  CHECK(fs::exists(fx.data_dir / "train.jsonl"));
  CHECK(fs::exists(fx.data_dir / "test.jsonl"));
  CHECK(fs::exists(fx.data_dir / "config.json"));
  CHECK(fs::exists(fx.data_dir / "manifest.json"));

  const json manifest = json::parse(slurp(fx.data_dir / "manifest.json"));
  CHECK(manifest["command"] == "generate");
  CHECK(manifest["schema"] == "asearch.manifest");
  CHECK(manifest["seeds"]["seed"] == 13);
  CHECK(manifest.contains("timing"));
}

TEST_CASE("generate is deterministic per seed") {
  const Fixture& fx = fixture();
  const fs::path again = work_dir() / "data_again";
  const CliResult r = run_cli("generate --config " + fx.config_file.string() + " --out " +
                              again.string() + " --jobs 1");
  REQUIRE(r.code == 0);
  CHECK(slurp(again / "train.jsonl") == slurp(fx.data_dir / "train.jsonl"));
  CHECK(slurp(again / "test.jsonl") == slurp(fx.data_dir / "test.jsonl"));
}

TEST_CASE("generate rejects bad configs naming the field") {
  const fs::path bad = work_dir() / "bad_config.json";
  {
    std::ofstream out(bad);
    out << R"({"schema":"asearch.config","version":1,"noise_rate":0.9})";
  }
  const CliResult r =
      run_cli("generate --config " + bad.string() + " --out " + (work_dir() / "x").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("noise_rate") != std::string::npos);
}

TEST_CASE("train produces identical models for identical seeds") {
  const Fixture& fx = fixture();
  const fs::path again = work_dir() / "model_again";
  const CliResult r = run_cli("train --dataset " + (fx.data_dir / "train.jsonl").string() +
                              " --class object --trees 5 --images-per-tree 8 --seed 3 --out " +
                              again.string() + " --jobs 1");
  REQUIRE(r.code == 0);
  CHECK(slurp(again / "model.json") == slurp(fx.model_file));
}

TEST_CASE("train fails cleanly for a class with no data") {
  const Fixture& fx = fixture();
  const CliResult r = run_cli("train --dataset " + (fx.data_dir / "train.jsonl").string() +
                              " --class unicorn --out " + (work_dir() / "m2").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("unicorn") != std::string::npos);
}

TEST_CASE("search writes traces, detections, snapshots, and is deterministic") {
  const Fixture& fx = fixture();
  const fs::path run1 = work_dir() / "run1";
  const CliResult r1 = run_cli(
      "search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
      fx.model_file.string() +
      " --scorer oracle:0.0 --lambda 0.5 --sigma-s 0.1 --sigma-c 0.3 --budget 20 "
      "--emit-belief-snapshots 2,5 --jobs 2 --out " +
      run1.string());
  REQUIRE(r1.code == 0);
  CHECK(fs::exists(run1 / "detections.tsv"));
  CHECK(fs::exists(run1 / "traces" / "test_0000.trace.tsv"));
  CHECK(fs::exists(run1 / "test_0000.beliefs.2.tsv"));
  CHECK(fs::exists(run1 / "test_0000.beliefs.5.tsv"));

  const fs::path run2 = work_dir() / "run2";
  const CliResult r2 = run_cli(
      "search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
      fx.model_file.string() +
      " --scorer oracle:0.0 --lambda 0.5 --sigma-s 0.1 --sigma-c 0.3 --budget 20 "
      "--emit-belief-snapshots 2,5 --jobs 1 --out " +
      run2.string());
  REQUIRE(r2.code == 0);
  CHECK(slurp(run2 / "detections.tsv") == slurp(run1 / "detections.tsv"));
  CHECK(slurp(run2 / "traces" / "test_0002.trace.tsv") ==
        slurp(run1 / "traces" / "test_0002.trace.tsv"));

  // A one-evaluation budget produces one-row traces.
  const fs::path run3 = work_dir() / "run3";
  REQUIRE(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                  fx.model_file.string() + " --scorer oracle:0.0 --budget 1 --out " +
                  run3.string())
              .code == 0);
  const asearch::Episode one = asearch::load_trace(run3 / "traces" / "test_0000.trace.tsv");
  CHECK(one.trace.size() == 1);
}

TEST_CASE("search with the full budget matches exhaustive scoring downstream") {
  const Fixture& fx = fixture();
  const fs::path full = work_dir() / "run_full";
  REQUIRE(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                  fx.model_file.string() + " --scorer oracle:0.05 --seed 4 --budget 50 --out " +
                  full.string() + " --jobs 2")
              .code == 0);
  const fs::path random_full = work_dir() / "run_full_random";
  REQUIRE(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                  fx.model_file.string() +
                  " --scorer oracle:0.05 --seed 4 --budget 50 --policy random --out " +
                  random_full.string() + " --jobs 2")
              .code == 0);

  // Same visited set (everything) and same stateless scores: identical
  // detections after canonical ordering.
  CHECK(slurp(full / "detections.tsv") == slurp(random_full / "detections.tsv"));
}

TEST_CASE("evaluate emits a curve with one row per checkpoint") {
  const Fixture& fx = fixture();
  const fs::path run = work_dir() / "run_eval";
  REQUIRE(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                  fx.model_file.string() + " --scorer oracle:0.0 --budget 30 --out " +
                  run.string())
              .code == 0);
  const fs::path out = work_dir() / "eval_out";
  const CliResult r =
      run_cli("evaluate --traces " + (run / "traces").string() + " --dataset " +
              (fx.data_dir / "test.jsonl").string() + " --class object --step 10 --out " +
              out.string());
  REQUIRE(r.code == 0);
  const asearch::BudgetCurve curve = asearch::load_curve(out / "curve.tsv");
  CHECK(curve.points.size() == 3);  // 10, 20, 30
  CHECK(curve.points.back().budget == 30);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report.contains("ap_at_max_budget"));
  CHECK(report.contains("auc"));
}

TEST_CASE("evaluate on an empty detections file reports AP zero") {
  const Fixture& fx = fixture();
  const fs::path empty = work_dir() / "empty_detections.tsv";
  {
    std::ofstream out(empty);
    out << "# asearch.detections v1\n";
  }
  const fs::path out = work_dir() / "eval_empty";
  const CliResult r = run_cli("evaluate --detections " + empty.string() + " --dataset " +
                              (fx.data_dir / "test.jsonl").string() +
                              " --class object --out " + out.string());
  REQUIRE(r.code == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["ap"] == 0.0);
}

TEST_CASE("tune with a single grid point returns that point and logs the grid") {
  const Fixture& fx = fixture();
  const fs::path out = work_dir() / "tune_out";
  const CliResult r = run_cli(
      "tune --dataset " + (fx.data_dir / "train.jsonl").string() + " --model " +
      fx.model_file.string() +
      " --scorer oracle:0.0 --budget 10 --step 5 --folds 2 --lambda-grid 0.25 "
      "--sigma-s-grid 0.05 --sigma-c-grid 0.4 --jobs 2 --out " +
      out.string());
  REQUIRE(r.code == 0);
  const json theta = json::parse(slurp(out / "theta.json"));
  CHECK(theta["lambda"] == 0.25);
  CHECK(theta["sigma_s"] == 0.05);
  CHECK(theta["sigma_c"] == 0.4);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["grid_scores"].size() == 1);
  CHECK(manifest["grid_scores"][0].contains("mean_auc"));
}

TEST_CASE("benchmark reports per-iteration overhead statistics") {
  const Fixture& fx = fixture();
  const fs::path out = work_dir() / "bench_out";
  const CliResult r = run_cli("benchmark --dataset " + (fx.data_dir / "test.jsonl").string() +
                              " --model " + fx.model_file.string() +
                              " --scorer oracle:0.0 --budget 25 --images 2 --out " +
                              out.string());
  REQUIRE(r.code == 0);
  const json report = json::parse(slurp(out / "benchmark.json"));
  CHECK(report["per_iteration_overhead_ms"].contains("mean"));
  CHECK(report["per_iteration_overhead_ms"].contains("median"));
  CHECK(report["per_iteration_overhead_ms"].contains("forest_query"));
  CHECK(report["per_iteration_overhead_ms"].contains("belief_update"));
  CHECK(report["iterations"] == 50);
  CHECK(report["mean_distance_evaluations_per_iteration"].get<double>() > 0.0);
}

TEST_CASE("plot renders an SVG chart from curve files") {
  const Fixture& fx = fixture();
  const fs::path run = work_dir() / "run_plot";
  REQUIRE(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                  fx.model_file.string() + " --scorer oracle:0.0 --budget 20 --out " +
                  run.string())
              .code == 0);
  const fs::path curve_out = work_dir() / "plot_eval";
  REQUIRE(run_cli("evaluate --traces " + (run / "traces").string() + " --dataset " +
                  (fx.data_dir / "test.jsonl").string() + " --class object --step 5 --out " +
                  curve_out.string())
              .code == 0);
  const fs::path out = work_dir() / "plot_out";
  const CliResult r =
      run_cli("plot --curves " + (curve_out / "curve.tsv").string() + " --title test --out " +
              out.string());
  REQUIRE(r.code == 0);
  const std::string svg = slurp(out / "plot.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("evaluated windows") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("exit codes distinguish usage, validation, and runtime failures") {
  CHECK(run_cli("definitely-not-a-command").code == 1);
  CHECK(run_cli("search --no-such-flag").code == 1);
  CHECK(run_cli("train --dataset /nonexistent.jsonl --out " + (work_dir() / "x2").string())
            .code == 2);

  const Fixture& fx = fixture();
  // Unknown scorer spec is a validation failure.
  CHECK(run_cli("search --dataset " + (fx.data_dir / "test.jsonl").string() + " --model " +
                fx.model_file.string() + " --scorer magic:1 --budget 5 --out " +
                (work_dir() / "x3").string())
            .code == 2);
}

}  // TEST_SUITE
