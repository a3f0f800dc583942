// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "asearch/errors.hpp"

namespace asearch {

Window::Window(double x, double y, double w, double h) : x(x), y(y), w(w), h(h) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h))) {
    throw InvalidInputError("window coordinates must be finite");
  }
  if (x < 0.0 || y < 0.0) {
    throw InvalidInputError("window corner must be non-negative");
  }
  if (w <= 0.0 || h <= 0.0) {
    throw InvalidInputError("window sides must be positive");
  }
}

double iou(const Window& a, const Window& b) noexcept {
  // Identical boxes must give exactly 1: the edge arithmetic below carries
  // rounding error in both directions.
  if (a == b) return 1.0;
  // The raw edge difference can exceed either side by a rounding error, which
  // would push overlaps above 1; an intersection side never exceeds the sides
  // themselves, so cap it.
  const double ix = std::min(std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x),
                             std::min(a.w, b.w));
  const double iy = std::min(std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y),
                             std::min(a.h, b.h));
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

double kernel_from_distance(double distance, double sigma) noexcept {
  return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

double kernel(const Window& a, const Window& b, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidInputError("kernel sigma must be a positive finite value");
  }
  return kernel_from_distance(1.0 - iou(a, b), sigma);
}

Displacement displacement_between(const Window& from, const Window& to) noexcept {
  return {to.x - from.x, to.y - from.y, to.w - from.w, to.h - from.h};
}

Window apply_displacement(const Window& o, const Displacement& d) noexcept {
  const double w = std::clamp(o.w + d.dw, kMinWindowSide, 1.0);
  const double h = std::clamp(o.h + d.dh, kMinWindowSide, 1.0);
  const double x = std::clamp(o.x + d.dx, 0.0, 1.0 - w);
  const double y = std::clamp(o.y + d.dy, 0.0, 1.0 - h);
  return Window(x, y, w, h);
}

}  // namespace asearch
