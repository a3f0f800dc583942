// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "asearch/dataio.hpp"
#include "asearch/features.hpp"
#include "asearch/geometry.hpp"
#include "asearch/rng.hpp"

namespace asearch::testing {

// Independent IoU oracle: rasterize both boxes on a g x g grid and count cell
// centers. The per-axis center counting is exact integer arithmetic, a fully
// separate route from the area algebra in iou(). Box edges snapped to
// multiples of 1/g make the count exact.
inline long long axis_cells(double lo, double hi, int g) {
  long long i_min = static_cast<long long>(std::ceil(lo * g - 0.5));
  long long i_max = static_cast<long long>(std::ceil(hi * g - 0.5));
  i_min = std::max(i_min, 0LL);
  i_max = std::min(i_max, static_cast<long long>(g));
  return std::max(0LL, i_max - i_min);
}

inline double grid_iou(const Window& a, const Window& b, int g = 1000) {
  const auto cells = [g](const Window& w) {
    return axis_cells(w.x, w.x + w.w, g) * axis_cells(w.y, w.y + w.h, g);
  };
  const double ix_lo = std::max(a.x, b.x);
  const double ix_hi = std::min(a.x + a.w, b.x + b.w);
  const double iy_lo = std::max(a.y, b.y);
  const double iy_hi = std::min(a.y + a.h, b.y + b.h);
  long long inter = 0;
  if (ix_hi > ix_lo && iy_hi > iy_lo) {
    inter = axis_cells(ix_lo, ix_hi, g) * axis_cells(iy_lo, iy_hi, g);
  }
  const long long uni = cells(a) + cells(b) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Random window with all coordinates on the 1/1000 lattice, so the grid
// oracle is exact for it.
inline Window random_grid_window(Rng& rng) {
  const int w = 20 + static_cast<int>(rng.below(400));
  const int h = 20 + static_cast<int>(rng.below(400));
  const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(1001 - w)));
  const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(1001 - h)));
  return Window(x / 1000.0, y / 1000.0, w / 1000.0, h / 1000.0);
}

inline Window random_window(Rng& rng) {
  const double w = rng.uniform(0.02, 0.6);
  const double h = rng.uniform(0.02, 0.6);
  return Window(rng.uniform(0.0, 1.0 - w), rng.uniform(0.0, 1.0 - h), w, h);
}

inline AppearanceCode random_code(Rng& rng, std::size_t bits) {
  AppearanceCode code(bits);
  for (std::size_t i = 0; i < bits; ++i) {
    if (rng.bernoulli(0.5)) code.set_bit(i, true);
  }
  return code;
}

inline Proposal make_proposal(const Window& w, const AppearanceCode& code, std::int32_t index) {
  Proposal p;
  p.window = w;
  p.code = code;
  p.index = index;
  return p;
}

// Small synthetic configuration for fast unit tests.
inline SyntheticConfig tiny_config(std::uint64_t seed = 11) {
  SyntheticConfig cfg;
  cfg.train_scenes = 12;
  cfg.test_scenes = 6;
  cfg.proposals_per_image = 60;
  cfg.code_bits = 64;
  cfg.seed = seed;
  return cfg;
}

}  // namespace asearch::testing
