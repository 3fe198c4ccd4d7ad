// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Detail layers attached to atlas charts. Evaluation lives in heightfield.hpp.

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dass/types.hpp"

namespace dass {

/// A sketched curve in chart coordinates. Fragments of one stroke share the
/// `stroke` id; their distance is taken to the union of fragments.
struct HeightCurve {
  std::vector<Vector2d> points;
  double height = 0;  // model units, signed
  double radius = 0;  // chart units
  std::uint64_t stroke = 0;
};

/// Gray image, row-major with the origin at the top-left pixel, values in
/// [0, 1]. Chart coordinate u runs along columns and v along rows.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  /// Bilinear lookup with clamping to the border.
  double sample(const Vector2d& uv) const;
};

struct SketchedLayer {
  std::vector<HeightCurve> curves;
};

struct RasterLayer {
  RasterImage image;
  double scale = 1;
};

using HeightLayer = std::variant<SketchedLayer, RasterLayer>;

}  // namespace dass
