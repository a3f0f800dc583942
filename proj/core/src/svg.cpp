// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asearch/errors.hpp"

namespace asearch {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 56;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_curve_svg(std::span<const BudgetCurve> curves, const std::string& title) {
  if (curves.empty()) throw InvalidInputError("svg rendering needs at least one curve");

  int max_budget = 1;
  for (const BudgetCurve& c : curves) {
    for (const CurvePoint& p : c.points) max_budget = std::max(max_budget, p.budget);
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto px = [&](double budget) { return kMarginLeft + budget / max_budget * plot_w; };
  const auto py = [&](double ap) { return kMarginTop + (1.0 - ap) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(0.0) << "\" x2=\"" << px(max_budget)
      << "\" y2=\"" << py(0.0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(0.0) << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << py(1.0) << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double ap = i / 5.0;
    svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << py(ap) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << py(ap) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(ap) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ap
        << "</text>\n";
    const int budget = static_cast<int>(std::lround(max_budget * ap));
    svg << "<line x1=\"" << px(budget) << "\" y1=\"" << py(0.0) << "\" x2=\"" << px(budget)
        << "\" y2=\"" << py(0.0) + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(budget) << "\" y=\"" << py(0.0) + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << budget
        << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
         "evaluated windows</text>\n";
  svg << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">AP</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const CurvePoint& p : curves[c].points) {
      svg << px(p.budget) << ',' << py(p.ap) << ' ';
    }
    svg << "\"/>\n";

    const double ly = kMarginTop + 16.0 * static_cast<double>(c);
    svg << "<line x1=\"" << kMarginLeft + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
        << kMarginLeft + plot_w - 126 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kMarginLeft + plot_w - 120 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(curves[c].policy)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace asearch
