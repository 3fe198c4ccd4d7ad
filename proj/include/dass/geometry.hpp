// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Small dense-geometry kernels shared by the mesh, atlas and detail layers.
// All of them are templated on the scalar so they can be reused from tests
// with long double oracles.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include "dass/types.hpp"

namespace dass {

template <class Scalar>
struct TrianglePoint {
  Vector3<Scalar> point;
  /// Weights of (a, b, c); non-negative and summing to one.
  Vector3<Scalar> weights;
};

/// Closest point to `p` on triangle (a, b, c), Voronoi-region walk.
template <class Scalar>
TrianglePoint<Scalar> closest_point_on_triangle(const Vector3<Scalar>& p, const Vector3<Scalar>& a,
                                                const Vector3<Scalar>& b, const Vector3<Scalar>& c) {
  using V = Vector3<Scalar>;
  const V ab = b - a;
  const V ac = c - a;
  const V ap = p - a;
  const Scalar d1 = ab.dot(ap);
  const Scalar d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return {a, V(1, 0, 0)};

  const V bp = p - b;
  const Scalar d3 = ab.dot(bp);
  const Scalar d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return {b, V(0, 1, 0)};

  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const Scalar t = d1 / (d1 - d3);
    return {a + t * ab, V(1 - t, t, 0)};
  }

  const V cp = p - c;
  const Scalar d5 = ab.dot(cp);
  const Scalar d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return {c, V(0, 0, 1)};

  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const Scalar t = d2 / (d2 - d6);
    return {a + t * ac, V(1 - t, 0, t)};
  }

  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const Scalar t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + t * (c - b), V(0, 1 - t, t)};
  }

  const Scalar denom = Scalar(1) / (va + vb + vc);
  const Scalar v = vb * denom;
  const Scalar w = vc * denom;
  return {a + ab * v + ac * w, V(1 - v - w, v, w)};
}

/// Barycentric weights of `p` with respect to the planar triangle (a, b, c).
/// Returns nothing for a degenerate triangle. A query that coincides with a
/// corner gets the exact unit weight of that corner.
template <class Scalar>
std::optional<Vector3<Scalar>> barycentric_2d(const Vector2<Scalar>& p, const Vector2<Scalar>& a,
                                              const Vector2<Scalar>& b, const Vector2<Scalar>& c) {
  if (p == a) return Vector3<Scalar>(1, 0, 0);
  if (p == b) return Vector3<Scalar>(0, 1, 0);
  if (p == c) return Vector3<Scalar>(0, 0, 1);
  const Vector2<Scalar> v0 = b - a;
  const Vector2<Scalar> v1 = c - a;
  const Vector2<Scalar> v2 = p - a;
  const Scalar det = v0.x() * v1.y() - v1.x() * v0.y();
  if (std::abs(det) <= Scalar(0)) return std::nullopt;
  const Scalar wb = (v2.x() * v1.y() - v1.x() * v2.y()) / det;
  const Scalar wc = (v0.x() * v2.y() - v2.x() * v0.y()) / det;
  return Vector3<Scalar>(1 - wb - wc, wb, wc);
}

template <class Scalar, int Dim>
Scalar point_segment_distance(const Eigen::Matrix<Scalar, Dim, 1>& p, const Eigen::Matrix<Scalar, Dim, 1>& a,
                              const Eigen::Matrix<Scalar, Dim, 1>& b) {
  const auto ab = (b - a).eval();
  const Scalar len2 = ab.squaredNorm();
  Scalar t = 0;
  if (len2 > 0) t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Minimum Euclidean distance from `p` to an open polyline.
template <class Scalar>
Scalar point_polyline_distance(const Vector2<Scalar>& p, std::span<const Vector2<Scalar>> polyline) {
  if (polyline.empty()) return std::numeric_limits<Scalar>::infinity();
  if (polyline.size() == 1) return (p - polyline.front()).norm();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
    best = std::min(best, point_segment_distance<Scalar, 2>(p, polyline[i], polyline[i + 1]));
  return best;
}

/// Moller-Trumbore; returns the ray parameter and the (a, b, c) weights of
/// the hit for t > 0.
template <class Scalar>
std::optional<std::pair<Scalar, Vector3<Scalar>>> ray_triangle(const Vector3<Scalar>& origin,
                                                               const Vector3<Scalar>& dir,
                                                               const Vector3<Scalar>& a,
                                                               const Vector3<Scalar>& b,
                                                               const Vector3<Scalar>& c) {
  const Vector3<Scalar> e1 = b - a;
  const Vector3<Scalar> e2 = c - a;
  const Vector3<Scalar> pvec = dir.cross(e2);
  const Scalar det = e1.dot(pvec);
  if (std::abs(det) < Scalar(1e-300)) return std::nullopt;
  const Scalar inv = Scalar(1) / det;
  const Vector3<Scalar> tvec = origin - a;
  const Scalar u = tvec.dot(pvec) * inv;
  if (u < 0 || u > 1) return std::nullopt;
  const Vector3<Scalar> qvec = tvec.cross(e1);
  const Scalar v = dir.dot(qvec) * inv;
  if (v < 0 || u + v > 1) return std::nullopt;
  const Scalar t = e2.dot(qvec) * inv;
  if (t <= 0) return std::nullopt;
  return std::make_pair(t, Vector3<Scalar>(1 - u - v, u, v));
}

}  // namespace dass
