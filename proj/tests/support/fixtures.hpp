// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Models shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dass/atlas.hpp"
#include "dass/basemesh.hpp"
#include "dass/hrbf.hpp"
#include "dass/io.hpp"
#include "dass/session.hpp"

namespace dass::test {

#ifndef DASS_SCENES_DIR
#define DASS_SCENES_DIR "scenes"
#endif

inline std::string scene_path(const std::string& name) { return std::string(DASS_SCENES_DIR) + "/" + name; }

/// Fibonacci points on an axis-aligned ellipsoid with exact normals.
inline std::vector<OrientedSampled> ellipsoid_samples(int n, const Vector3d& radii,
                                                      const Vector3d& center = Vector3d::Zero()) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<OrientedSampled> out;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const Vector3d unit(r * std::cos(golden * i), r * std::sin(golden * i), z);
    const Vector3d p = center + unit.cwiseProduct(radii);
    const Vector3d g = unit.cwiseQuotient(radii).normalized();
    out.push_back({p, g});
  }
  return out;
}

inline std::vector<OrientedSampled> sphere_samples(int n = 80, double radius = 0.5) {
  return ellipsoid_samples(n, Vector3d::Constant(radius));
}

inline const HrbfSurfaced& unit_sphere() {
  static const HrbfSurfaced s = HrbfSurfaced::fit(sphere_samples());
  return s;
}

inline Projector sphere_projector(const HrbfSurfaced& s = unit_sphere()) {
  return [&s](const Vector3d& p) { return s.project_onto(p); };
}

/// Cube base mesh (6 quads) lifted from one tesel over the sphere.
inline BaseMeshPlan cube_base(const HrbfSurfaced& s = unit_sphere()) {
  const auto tesels = TeselComplex::create(Vector2d(-0.3, -0.3), Vector2d(0.3, 0.3), DrawingPlane{});
  return lift(tesels, s);
}

/// Two unit quads sharing the edge x = 1, on the plane z = 0.
inline BaseMeshPlan strip_base() {
  BaseMeshPlan b;
  b.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 1, 0}};
  b.quads = {{0, 1, 4, 3}, {1, 2, 5, 4}};
  b.boundary_count = 1;
  return b;
}

/// Vertical projection onto z = 0.2 sin(x) cos(y). Idempotent, so projected
/// vertices are fixed points.
inline Vector3d wavy(const Vector3d& p) { return {p.x(), p.y(), 0.2 * std::sin(p.x()) * std::cos(p.y())}; }

inline std::string scene_text(const std::string& name) { return read_file(scene_path(name)); }

/// Code of the dass::Error thrown by `f`, or nullopt when it returns.
template <class F>
std::optional<ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace dass::test
