// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <span>
#include <string>

#include "asearch/eval.hpp"

namespace asearch {

/// Self-contained SVG line chart of AP against the number of evaluated
/// windows, one polyline per curve with a legend of policy labels.
std::string render_curve_svg(std::span<const BudgetCurve> curves, const std::string& title);

}  // namespace asearch
