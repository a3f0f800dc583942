// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Command-line front end: generate | train | search | evaluate | tune |
// benchmark | plot. Every command writes a manifest.json next to its outputs
// recording the resolved configuration, seeds and timing, so a run can be
// reproduced from the manifest alone (wall-clock fields aside).

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asearch/classifier.hpp"
#include "asearch/dataio.hpp"
#include "asearch/errors.hpp"
#include "asearch/eval.hpp"
#include "asearch/forest.hpp"
#include "asearch/parallel.hpp"
#include "asearch/search.hpp"
#include "asearch/svg.hpp"
#include "asearch/text_formats.hpp"
#include "asearch/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace asearch;

namespace {

constexpr const char* kThetaSchema = "asearch.theta";

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json manifest_skeleton(const std::string& command) {
  json m;
  m["schema"] = "asearch.manifest";
  m["version"] = kSchemaVersion;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  return m;
}

void write_manifest(json manifest, const fs::path& out_dir, double wall_ms) {
  manifest["timing"]["wall_ms"] = wall_ms;
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw ValidationError("cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << '\n';
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir.string());
  return dir;
}

void save_theta(const Hyperparameters& theta, const fs::path& path) {
  json j;
  j["schema"] = kThetaSchema;
  j["version"] = kSchemaVersion;
  j["lambda"] = theta.lambda;
  j["sigma_s"] = theta.sigma_s;
  j["sigma_c"] = theta.sigma_c;
  j["budget"] = theta.budget;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write theta file " + path.string());
  out << j.dump(2) << '\n';
}

Hyperparameters load_theta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open theta file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("theta file is not valid JSON: " + std::string(e.what()));
  }
  if (j.value("schema", "") != kThetaSchema) {
    throw ValidationError("not a theta file (bad schema field)");
  }
  if (j.value("version", -1) != kSchemaVersion) {
    throw ValidationError("unsupported theta schema version");
  }
  Hyperparameters theta;
  theta.lambda = j.value("lambda", theta.lambda);
  theta.sigma_s = j.value("sigma_s", theta.sigma_s);
  theta.sigma_c = j.value("sigma_c", theta.sigma_c);
  theta.budget = j.value("budget", theta.budget);
  return theta;
}

json theta_to_json(const Hyperparameters& theta) {
  return json{{"lambda", theta.lambda},
              {"sigma_s", theta.sigma_s},
              {"sigma_c", theta.sigma_c},
              {"budget", theta.budget}};
}

// Options shared by search/tune/benchmark.
struct ScorerOptions {
  std::string spec = "oracle:0.0";
};

struct GenerateOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

struct TrainOptions {
  std::string dataset;
  std::string class_name = "object";
  std::string out;
  ForestConfig config;
  std::uint64_t seed = 1;
  int jobs = 0;
};

struct SearchOptions {
  std::string dataset;
  std::string model;
  ScorerOptions scorer;
  std::string theta_path;
  double lambda = 0.5;
  double sigma_s = 0.1;
  double sigma_c = 0.3;
  int budget = 0;
  std::string policy = "active";
  std::vector<int> snapshot_iterations;
  std::string out;
  std::uint64_t seed = 1;
  int jobs = 0;
};

struct EvaluateOptions {
  std::string traces_dir;
  std::string detections_path;
  std::string dataset;
  std::string class_name = "object";
  std::string label = "active";
  int step = 10;
  std::string out;
};

struct TuneOptions {
  std::string dataset;
  std::string model;
  ScorerOptions scorer;
  TuneConfig config;
  std::string out;
  std::uint64_t seed = 1;
  int jobs = 0;
};

struct BenchmarkOptions {
  std::string dataset;
  std::string model;
  ScorerOptions scorer;
  double lambda = 0.5;
  double sigma_s = 0.1;
  double sigma_c = 0.3;
  int budget = 350;
  int images = 0;
  std::string out;
  std::uint64_t seed = 1;
};

struct PlotOptions {
  std::vector<std::string> curve_paths;
  std::string title = "AP vs evaluated windows";
  std::string out;
};

int run_generate(const GenerateOptions& opt) {
  WallTimer timer;
  SyntheticConfig config;
  if (!opt.config_path.empty()) config = load_synthetic_config(opt.config_path);
  if (opt.seed.has_value()) config.seed = *opt.seed;

  const fs::path out_dir = ensure_out_dir(opt.out);
  SyntheticDataset data = generate_synthetic(config, opt.jobs);
  save_dataset(data.train, out_dir / "train.jsonl");
  save_dataset(data.test, out_dir / "test.jsonl");
  save_synthetic_config(config, out_dir / "config.json");

  json manifest = manifest_skeleton("generate");
  manifest["seeds"]["seed"] = config.seed;
  manifest["inputs"]["config"] = opt.config_path;
  manifest["outputs"] = {(out_dir / "train.jsonl").string(), (out_dir / "test.jsonl").string(),
                         (out_dir / "config.json").string()};
  manifest["config"]["train_scenes"] = config.train_scenes;
  manifest["config"]["test_scenes"] = config.test_scenes;
  manifest["config"]["proposals_per_image"] = config.proposals_per_image;
  manifest["config"]["class_name"] = config.class_name;
  manifest["config"]["jobs"] = opt.jobs;
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "generated " << data.train.images.size() << " train and "
            << data.test.images.size() << " test scenes in " << out_dir.string() << '\n';
  return 0;
}

int run_train(const TrainOptions& opt) {
  WallTimer timer;
  const Dataset dataset = load_dataset(opt.dataset);
  const fs::path out_dir = ensure_out_dir(opt.out);

  const ForestModel model = train_forest(dataset, opt.class_name, opt.config, opt.seed, opt.jobs);
  save_forest(model, out_dir / "model.json");

  json manifest = manifest_skeleton("train");
  manifest["seeds"]["seed"] = opt.seed;
  manifest["inputs"]["dataset"] = opt.dataset;
  manifest["outputs"] = {(out_dir / "model.json").string()};
  manifest["config"]["class"] = opt.class_name;
  manifest["config"]["tree_count"] = opt.config.tree_count;
  manifest["config"]["max_depth"] = opt.config.max_depth;
  manifest["config"]["min_leaf"] = opt.config.min_leaf;
  manifest["config"]["candidate_triplets"] = opt.config.candidate_triplets;
  manifest["config"]["histogram_bins"] = opt.config.histogram_bins;
  manifest["config"]["images_per_tree"] = opt.config.images_per_tree;
  manifest["config"]["jobs"] = opt.jobs;
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "trained " << model.trees.size() << "-tree model for class '" << opt.class_name
            << "' -> " << (out_dir / "model.json").string() << '\n';
  return 0;
}

int run_search(const SearchOptions& opt) {
  WallTimer timer;
  const Dataset dataset = load_dataset(opt.dataset);
  const ForestModel model = load_forest(opt.model);
  const auto scorer = make_scorer(opt.scorer.spec, model.class_name, dataset, opt.seed);

  Hyperparameters theta{opt.lambda, opt.sigma_s, opt.sigma_c, 100};
  if (!opt.theta_path.empty()) theta = load_theta(opt.theta_path);
  if (opt.budget > 0) theta.budget = opt.budget;
  validate(theta);

  const fs::path out_dir = ensure_out_dir(opt.out);
  const fs::path trace_dir = out_dir / "traces";
  fs::create_directories(trace_dir);

  std::vector<Episode> episodes(dataset.images.size());
  if (opt.policy == "active") {
    parallel_for(dataset.images.size(), opt.jobs, [&](std::size_t i) {
      episodes[i] = run_episode(dataset.images[i], model, *scorer, theta, model.start_window,
                                opt.snapshot_iterations);
    });
  } else if (opt.policy == "random") {
    parallel_for(dataset.images.size(), opt.jobs, [&](std::size_t i) {
      episodes[i] = subsampling_episode(dataset.images[i], *scorer, theta.budget, opt.seed);
    });
  } else {
    throw ValidationError("unknown policy '" + opt.policy + "' (use active or random)");
  }

  std::vector<Detection> all_detections;
  for (const Episode& ep : episodes) {
    save_trace(ep, trace_dir / (ep.image_id + ".trace.tsv"));
    for (const BeliefSnapshot& snap : ep.snapshots) {
      save_belief_snapshot(ep.image_id, snap,
                           out_dir / (ep.image_id + ".beliefs." + std::to_string(snap.t) + ".tsv"));
    }
    std::vector<Detection> dets = episode_detections(ep, ep.trace.size());
    all_detections.insert(all_detections.end(), dets.begin(), dets.end());
  }
  save_detections(all_detections, out_dir / "detections.tsv");

  json manifest = manifest_skeleton("search");
  manifest["seeds"]["seed"] = opt.seed;
  manifest["inputs"]["dataset"] = opt.dataset;
  manifest["inputs"]["model"] = opt.model;
  manifest["config"]["scorer"] = opt.scorer.spec;
  manifest["config"]["policy"] = opt.policy;
  manifest["config"]["theta"] = theta_to_json(theta);
  manifest["config"]["snapshots"] = opt.snapshot_iterations;
  manifest["config"]["jobs"] = opt.jobs;
  manifest["outputs"] = {(out_dir / "detections.tsv").string(), trace_dir.string()};
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "ran " << episodes.size() << " episodes (policy " << opt.policy << ", budget "
            << theta.budget << ") -> " << out_dir.string() << '\n';
  return 0;
}

int run_evaluate(const EvaluateOptions& opt) {
  WallTimer timer;
  if (opt.traces_dir.empty() == opt.detections_path.empty()) {
    throw ValidationError("evaluate needs exactly one of --traces or --detections");
  }
  const Dataset dataset = load_dataset(opt.dataset);
  const GroundTruthMap gt = ground_truth_for_class(dataset, opt.class_name);
  const fs::path out_dir = ensure_out_dir(opt.out);

  json manifest = manifest_skeleton("evaluate");
  manifest["inputs"]["dataset"] = opt.dataset;
  manifest["config"]["class"] = opt.class_name;
  manifest["config"]["step"] = opt.step;

  if (!opt.detections_path.empty()) {
    const std::vector<Detection> detections = load_detections(opt.detections_path);
    const std::optional<double> ap = detection_ap(detections, gt);
    json report;
    report["class"] = opt.class_name;
    if (ap.has_value()) {
      report["ap"] = *ap;
    } else {
      report["ap"] = nullptr;
      report["note"] = "undefined: no ground-truth boxes for this class";
    }
    std::ofstream rep(out_dir / "report.json");
    rep << report.dump(2) << '\n';
    manifest["inputs"]["detections"] = opt.detections_path;
    manifest["outputs"] = {(out_dir / "report.json").string()};
    write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());
    std::cout << "AP(" << opt.class_name << ") = "
              << (ap.has_value() ? std::to_string(*ap) : std::string("undefined")) << '\n';
    return 0;
  }

  std::vector<fs::path> trace_files;
  for (const auto& entry : fs::directory_iterator(opt.traces_dir)) {
    if (entry.path().extension() == ".tsv") trace_files.push_back(entry.path());
  }
  if (trace_files.empty()) {
    throw ValidationError("no .tsv trace files in " + opt.traces_dir);
  }
  std::sort(trace_files.begin(), trace_files.end());

  std::vector<Episode> episodes;
  episodes.reserve(trace_files.size());
  std::size_t max_budget = 0;
  for (const fs::path& f : trace_files) {
    episodes.push_back(load_trace(f));
    max_budget = std::max(max_budget, episodes.back().trace.size());
  }

  const std::vector<int> checkpoints =
      default_checkpoints(static_cast<int>(max_budget), opt.step);
  const BudgetCurve curve = budget_curve(episodes, gt, checkpoints, opt.class_name, opt.label);
  save_curve(curve, out_dir / "curve.tsv");

  json report;
  report["class"] = opt.class_name;
  report["policy"] = opt.label;
  report["ap_at_max_budget"] = curve.points.back().ap;
  report["auc"] = curve_auc(curve);
  report["checkpoints"] = checkpoints.size();
  std::ofstream rep(out_dir / "report.json");
  rep << report.dump(2) << '\n';

  manifest["inputs"]["traces"] = opt.traces_dir;
  manifest["outputs"] = {(out_dir / "curve.tsv").string(), (out_dir / "report.json").string()};
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "AP(" << opt.class_name << ") at budget " << curve.points.back().budget << " = "
            << curve.points.back().ap << ", AUC = " << curve_auc(curve) << '\n';
  return 0;
}

int run_tune(const TuneOptions& opt) {
  WallTimer timer;
  const Dataset dataset = load_dataset(opt.dataset);
  const ForestModel model = load_forest(opt.model);
  const auto scorer = make_scorer(opt.scorer.spec, model.class_name, dataset, opt.seed);
  const fs::path out_dir = ensure_out_dir(opt.out);

  const TuneResult result = tune_hyperparameters(dataset, model, *scorer, opt.config, opt.jobs);
  save_theta(result.best, out_dir / "theta.json");

  json manifest = manifest_skeleton("tune");
  manifest["seeds"]["seed"] = opt.seed;
  manifest["inputs"]["dataset"] = opt.dataset;
  manifest["inputs"]["model"] = opt.model;
  manifest["config"]["scorer"] = opt.scorer.spec;
  manifest["config"]["folds"] = opt.config.folds;
  manifest["config"]["budget"] = opt.config.budget;
  manifest["config"]["checkpoint_step"] = opt.config.checkpoint_step;
  manifest["config"]["lambda_grid"] = opt.config.lambda_grid;
  manifest["config"]["sigma_s_grid"] = opt.config.sigma_s_grid;
  manifest["config"]["sigma_c_grid"] = opt.config.sigma_c_grid;
  manifest["config"]["jobs"] = opt.jobs;
  json grid = json::array();
  for (const GridScore& g : result.grid) {
    json gj = theta_to_json(g.theta);
    gj["mean_auc"] = g.mean_auc;
    grid.push_back(std::move(gj));
  }
  manifest["grid_scores"] = std::move(grid);
  manifest["best"] = theta_to_json(result.best);
  manifest["outputs"] = {(out_dir / "theta.json").string()};
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "best theta: lambda=" << result.best.lambda << " sigma_s=" << result.best.sigma_s
            << " sigma_c=" << result.best.sigma_c << " -> " << (out_dir / "theta.json").string()
            << '\n';
  return 0;
}

int run_benchmark(const BenchmarkOptions& opt) {
  WallTimer timer;
  const Dataset dataset = load_dataset(opt.dataset);
  const ForestModel model = load_forest(opt.model);
  const auto scorer = make_scorer(opt.scorer.spec, model.class_name, dataset, opt.seed);
  const fs::path out_dir = ensure_out_dir(opt.out);

  Hyperparameters theta{opt.lambda, opt.sigma_s, opt.sigma_c, opt.budget};
  validate(theta);

  const OverheadReport report = measure_overhead(dataset, model, *scorer, theta, opt.images);

  json rj;
  rj["schema"] = "asearch.benchmark";
  rj["version"] = kSchemaVersion;
  rj["images"] = report.images;
  rj["proposals_per_image"] = report.proposals_per_image;
  rj["iterations"] = report.iterations;
  rj["tree_count"] = model.trees.size();
  rj["scorer_cost_label"] = report.scorer_cost_label;
  rj["per_iteration_overhead_ms"] = {{"mean", report.mean_overhead_ms},
                                     {"median", report.median_overhead_ms},
                                     {"forest_query", report.mean_forest_ms},
                                     {"belief_update", report.mean_update_ms},
                                     {"selection", report.mean_select_ms}};
  rj["total_overhead_ms"] = report.total_overhead_ms;
  rj["mean_distance_evaluations_per_iteration"] =
      report.mean_distance_evaluations_per_iteration;
  std::ofstream rep(out_dir / "benchmark.json");
  rep << rj.dump(2) << '\n';

  json manifest = manifest_skeleton("benchmark");
  manifest["seeds"]["seed"] = opt.seed;
  manifest["inputs"]["dataset"] = opt.dataset;
  manifest["inputs"]["model"] = opt.model;
  manifest["config"]["scorer"] = opt.scorer.spec;
  manifest["config"]["theta"] = theta_to_json(theta);
  manifest["config"]["images"] = opt.images;
  manifest["timing"]["per_iteration_overhead_ms_mean"] = report.mean_overhead_ms;
  manifest["outputs"] = {(out_dir / "benchmark.json").string()};
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "per-iteration overhead: mean " << report.mean_overhead_ms << " ms, median "
            << report.median_overhead_ms << " ms (forest " << report.mean_forest_ms
            << " ms, update " << report.mean_update_ms << " ms) over " << report.iterations
            << " iterations\n";
  return 0;
}

int run_plot(const PlotOptions& opt) {
  WallTimer timer;
  if (opt.curve_paths.empty()) throw ValidationError("plot needs at least one --curves file");
  std::vector<BudgetCurve> curves;
  for (const std::string& p : opt.curve_paths) curves.push_back(load_curve(p));

  const fs::path out_dir = ensure_out_dir(opt.out);
  const std::string svg = render_curve_svg(curves, opt.title);
  std::ofstream out(out_dir / "plot.svg");
  if (!out) throw ValidationError("cannot write plot.svg in " + out_dir.string());
  out << svg;

  json manifest = manifest_skeleton("plot");
  manifest["inputs"]["curves"] = opt.curve_paths;
  manifest["config"]["title"] = opt.title;
  manifest["outputs"] = {(out_dir / "plot.svg").string()};
  write_manifest(std::move(manifest), out_dir, timer.elapsed_ms());

  std::cout << "wrote " << (out_dir / "plot.svg").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active search for object detection: belief-map window selection driven by a "
               "classifier score force and a random-forest context force."};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a synthetic train/test dataset");
  cmd_gen->add_option("--config", gen.config_path, "Generator config JSON (defaults when omitted)");
  cmd_gen->add_option("--out", gen.out, "Output directory")->required();
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = cmd_gen->add_option("--seed", gen_seed, "Override the config seed");
  cmd_gen->add_option("--jobs", gen.jobs, "Worker threads (0 = all cores)");

  TrainOptions train;
  auto* cmd_train = app.add_subcommand("train", "Train the context forest for a class");
  cmd_train->add_option("--dataset", train.dataset, "Training dataset (.jsonl)")->required();
  cmd_train->add_option("--class", train.class_name, "Object class name");
  cmd_train->add_option("--out", train.out, "Output directory")->required();
  cmd_train->add_option("--trees", train.config.tree_count, "Trees in the ensemble");
  cmd_train->add_option("--max-depth", train.config.max_depth, "Maximum tree depth");
  cmd_train->add_option("--min-leaf", train.config.min_leaf, "Minimum samples per leaf");
  cmd_train->add_option("--triplets", train.config.candidate_triplets,
                        "Candidate triplets per node");
  cmd_train->add_option("--bins", train.config.histogram_bins, "Histogram bins per dimension");
  cmd_train->add_option("--images-per-tree", train.config.images_per_tree,
                        "Training images sampled per tree");
  cmd_train->add_option("--seed", train.seed, "Training seed");
  cmd_train->add_option("--jobs", train.jobs, "Worker threads (0 = all cores)");

  SearchOptions search;
  auto* cmd_search = app.add_subcommand("search", "Run search episodes over a dataset");
  cmd_search->add_option("--dataset", search.dataset, "Dataset (.jsonl)")->required();
  cmd_search->add_option("--model", search.model, "Forest model file")->required();
  cmd_search->add_option("--scorer", search.scorer.spec, "Scorer spec: oracle:<noise> or table:<dir>");
  cmd_search->add_option("--theta", search.theta_path, "Theta JSON from tune");
  cmd_search->add_option("--lambda", search.lambda, "Force mixing weight");
  cmd_search->add_option("--sigma-s", search.sigma_s, "Score force bandwidth");
  cmd_search->add_option("--sigma-c", search.sigma_c, "Context force bandwidth");
  cmd_search->add_option("--budget", search.budget, "Classifier evaluations per image");
  cmd_search->add_option("--policy", search.policy, "active | random");
  cmd_search->add_option("--emit-belief-snapshots", search.snapshot_iterations,
                         "Iterations at which to dump the belief map")
      ->delimiter(',');
  cmd_search->add_option("--out", search.out, "Output directory")->required();
  cmd_search->add_option("--seed", search.seed, "Seed (oracle noise, random policy)");
  cmd_search->add_option("--jobs", search.jobs, "Worker threads (0 = all cores)");

  EvaluateOptions evaluate;
  auto* cmd_eval = app.add_subcommand("evaluate", "Compute AP and AP-vs-budget curves");
  cmd_eval->add_option("--traces", evaluate.traces_dir, "Directory of episode traces");
  cmd_eval->add_option("--detections", evaluate.detections_path, "Detections file");
  cmd_eval->add_option("--dataset", evaluate.dataset, "Dataset with ground truth")->required();
  cmd_eval->add_option("--class", evaluate.class_name, "Object class name");
  cmd_eval->add_option("--label", evaluate.label, "Policy label for the curve");
  cmd_eval->add_option("--step", evaluate.step, "Checkpoint spacing in evaluations");
  cmd_eval->add_option("--out", evaluate.out, "Output directory")->required();

  TuneOptions tune;
  tune.config = default_tune_config();
  auto* cmd_tune = app.add_subcommand("tune", "Grid-search hyperparameters by cross-validation");
  cmd_tune->add_option("--dataset", tune.dataset, "Training dataset (.jsonl)")->required();
  cmd_tune->add_option("--model", tune.model, "Forest model file")->required();
  cmd_tune->add_option("--scorer", tune.scorer.spec, "Scorer spec");
  cmd_tune->add_option("--budget", tune.config.budget, "Episode budget during tuning");
  cmd_tune->add_option("--step", tune.config.checkpoint_step, "Curve checkpoint spacing");
  cmd_tune->add_option("--folds", tune.config.folds, "Cross-validation folds");
  cmd_tune->add_option("--lambda-grid", tune.config.lambda_grid, "Lambda grid values")
      ->delimiter(',');
  cmd_tune->add_option("--sigma-s-grid", tune.config.sigma_s_grid, "Sigma_s grid values")
      ->delimiter(',');
  cmd_tune->add_option("--sigma-c-grid", tune.config.sigma_c_grid, "Sigma_c grid values")
      ->delimiter(',');
  cmd_tune->add_option("--out", tune.out, "Output directory")->required();
  cmd_tune->add_option("--seed", tune.seed, "Seed (oracle noise)");
  cmd_tune->add_option("--jobs", tune.jobs, "Worker threads (0 = all cores)");

  BenchmarkOptions bench;
  auto* cmd_bench = app.add_subcommand("benchmark", "Measure per-iteration search overhead");
  cmd_bench->add_option("--dataset", bench.dataset, "Dataset (.jsonl)")->required();
  cmd_bench->add_option("--model", bench.model, "Forest model file")->required();
  cmd_bench->add_option("--scorer", bench.scorer.spec, "Scorer spec");
  cmd_bench->add_option("--lambda", bench.lambda, "Force mixing weight");
  cmd_bench->add_option("--sigma-s", bench.sigma_s, "Score force bandwidth");
  cmd_bench->add_option("--sigma-c", bench.sigma_c, "Context force bandwidth");
  cmd_bench->add_option("--budget", bench.budget, "Iterations per episode");
  cmd_bench->add_option("--images", bench.images, "Max images to measure (0 = all)");
  cmd_bench->add_option("--out", bench.out, "Output directory")->required();
  cmd_bench->add_option("--seed", bench.seed, "Seed (oracle noise)");

  PlotOptions plot;
  auto* cmd_plot = app.add_subcommand("plot", "Render curve files as an SVG chart");
  cmd_plot->add_option("--curves", plot.curve_paths, "Curve files")->delimiter(',')->required();
  cmd_plot->add_option("--title", plot.title, "Chart title");
  cmd_plot->add_option("--out", plot.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_gen->parsed()) {
      if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
      return run_generate(gen);
    }
    if (cmd_train->parsed()) return run_train(train);
    if (cmd_search->parsed()) return run_search(search);
    if (cmd_eval->parsed()) return run_evaluate(evaluate);
    if (cmd_tune->parsed()) return run_tune(tune);
    if (cmd_bench->parsed()) return run_benchmark(bench);
    if (cmd_plot->parsed()) return run_plot(plot);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
