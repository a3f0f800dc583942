// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <compare>

namespace asearch {

/// Smallest side length a displaced window is clamped to.
inline constexpr double kMinWindowSide = 0.01;

/// Axis-aligned box in image-normalized coordinates: top-left corner plus
/// size, all expressed as fractions of image width/height. Construction
/// rejects degenerate (zero or negative area) boxes; windows produced by
/// clamping additionally satisfy x+w <= 1 and y+h <= 1, but an unclamped
/// window is allowed to hang over the right/bottom edge.
struct Window {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  Window() = default;
  Window(double x, double y, double w, double h);

  double area() const { return w * h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Signed componentwise offset between two normalized windows.
struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;

  friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Intersection over union. Symmetric, in [0,1], 0 for disjoint boxes and 1
/// only for identical ones.
double iou(const Window& a, const Window& b) noexcept;

/// exp(-d^2 / (2 sigma^2)) for a window distance d in [0,1]. Shared by the
/// kernel and by callers that already know the distance.
double kernel_from_distance(double distance, double sigma) noexcept;

/// Smoothing kernel K(a,b;sigma) = exp(-(1-IoU(a,b))^2 / (2 sigma^2)).
/// Throws InvalidInputError for sigma <= 0 or non-finite sigma.
double kernel(const Window& a, const Window& b, double sigma);

/// Componentwise difference turning `from` into `to`.
Displacement displacement_between(const Window& from, const Window& to) noexcept;

/// Componentwise addition followed by clamping: sides are clipped to
/// [kMinWindowSide, 1], then the corner is shifted so the window lies inside
/// the unit square.
Window apply_displacement(const Window& o, const Displacement& d) noexcept;

}  // namespace asearch
