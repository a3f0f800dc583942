// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Microbenchmarks for the hot paths of a search iteration: window geometry,
// Hamming distances, forest routing, and the full belief update.

#include <benchmark/benchmark.h>

#include <vector>

#include "asearch/classifier.hpp"
#include "asearch/dataio.hpp"
#include "asearch/forest.hpp"
#include "asearch/geometry.hpp"
#include "asearch/rng.hpp"
#include "asearch/search.hpp"

using namespace asearch;

namespace {

SyntheticConfig bench_config(int proposals) {
  SyntheticConfig cfg;
  cfg.train_scenes = 20;
  cfg.test_scenes = 2;
  cfg.proposals_per_image = proposals;
  cfg.seed = 5;
  return cfg;
}

Window random_window(Rng& rng) {
  const double w = rng.uniform(0.02, 0.6);
  const double h = rng.uniform(0.02, 0.6);
  return Window(rng.uniform(0.0, 1.0 - w), rng.uniform(0.0, 1.0 - h), w, h);
}

void BM_Iou(benchmark::State& state) {
  Rng rng(1);
  std::vector<Window> windows;
  for (int i = 0; i < 1024; ++i) windows.push_back(random_window(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(windows[i & 1023], windows[(i * 7 + 3) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_Kernel(benchmark::State& state) {
  Rng rng(2);
  std::vector<Window> windows;
  for (int i = 0; i < 1024; ++i) windows.push_back(random_window(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel(windows[i & 1023], windows[(i * 5 + 1) & 1023], 0.25));
    ++i;
  }
}
BENCHMARK(BM_Kernel);

void BM_HammingDistance512(benchmark::State& state) {
  Rng rng(3);
  std::vector<AppearanceCode> codes;
  for (int c = 0; c < 256; ++c) {
    AppearanceCode code(512);
    for (std::size_t b = 0; b < 512; ++b) {
      if (rng.bernoulli(0.5)) code.set_bit(b, true);
    }
    codes.push_back(std::move(code));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hamming_distance(codes[i & 255], codes[(i * 11 + 7) & 255]));
    ++i;
  }
}
BENCHMARK(BM_HammingDistance512);

void BM_ForestQuery(benchmark::State& state) {
  const SyntheticDataset data = generate_synthetic(bench_config(500));
  const ForestModel model = train_forest(data.train, "object", ForestConfig{}, 7, 0);
  const ImageRecord& image = data.test.images[0];
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.extract_context(image.proposals[i % image.proposals.size()]));
    ++i;
  }
}
BENCHMARK(BM_ForestQuery);

void BM_BeliefUpdate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SyntheticDataset data = generate_synthetic(bench_config(n));
  const ImageRecord& image = data.test.images[0];
  std::vector<Window> windows;
  for (const Proposal& p : image.proposals) windows.push_back(p.window);
  std::vector<Window> gamma(windows.begin(), windows.begin() + 10);
  const Hyperparameters theta{0.5, 0.1, 0.3, 1};

  BeliefState beliefs(windows.size());
  std::size_t i = 0;
  for (auto _ : state) {
    update_beliefs(beliefs, windows, windows[i % windows.size()], 0.7, gamma, theta);
    ++i;
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BeliefUpdate)->Arg(500)->Arg(1000)->Arg(3200);

}  // namespace

BENCHMARK_MAIN();
