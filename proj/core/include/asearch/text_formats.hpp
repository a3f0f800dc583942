// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "asearch/eval.hpp"
#include "asearch/search.hpp"

namespace asearch {

// Columnar text exports. Every file starts with a `# asearch.<kind> v<N>`
// schema line; readers reject unknown kinds or versions. Floating-point
// columns are written in shortest round-trip form, so save followed by load
// reproduces values bit-exactly.

/// One row per iteration: t proposal_index x y w h score belief.
void save_trace(const Episode& episode, const std::filesystem::path& path);
Episode load_trace(const std::filesystem::path& path);

/// One row per snapshot entry: proposal_index belief.
void save_belief_snapshot(const std::string& image_id, const BeliefSnapshot& snapshot,
                          const std::filesystem::path& path);

/// One row per detection: image_id x y w h score.
void save_detections(std::span<const Detection> detections, const std::filesystem::path& path);
std::vector<Detection> load_detections(const std::filesystem::path& path);

/// One row per checkpoint: budget ap.
void save_curve(const BudgetCurve& curve, const std::filesystem::path& path);
BudgetCurve load_curve(const std::filesystem::path& path);

}  // namespace asearch
