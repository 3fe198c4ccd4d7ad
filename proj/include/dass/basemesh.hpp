// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Planar tesel editing and lifting to a closed quad base mesh.
//
// A tesel complex is a disk of convex quads drawn on a plane. Lifting shoots a
// ray along the plane normal from every planar vertex in both directions and
// keeps the first root of the implicit surface on each side, giving a front
// and a back sheet. Boundary edges of the planar complex are closed by side
// quads joining the two sheets. A torus-kind tesel is replaced by a ring of
// four quads around a hole (the footprint shrunk about its centroid), and the
// hole boundary is closed the same way, adding one handle.

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "dass/hrbf.hpp"
#include "dass/types.hpp"

namespace dass {

enum class TeselKind { Cube, Torus };
enum class SplitAxis { U, V };

struct DrawingPlane {
  Vector3d origin = Vector3d::Zero();
  Vector3d u_axis = Vector3d::UnitX();
  Vector3d v_axis = Vector3d::UnitY();

  Vector3d normal() const { return u_axis.cross(v_axis).normalized(); }
  Vector3d to_world(const Vector2d& p) const { return origin + p.x() * u_axis + p.y() * v_axis; }
};

struct Tesel {
  /// Counter-clockwise planar vertex ids.
  std::array<std::uint32_t, 4> corners{};
  TeselKind kind = TeselKind::Cube;
};

class TeselComplex {
 public:
  TeselComplex() = default;

  /// Single cube tesel covering the box [lo, hi] of the drawing plane.
  static TeselComplex create(const Vector2d& lo, const Vector2d& hi, const DrawingPlane& plane);

  /// Cuts the tesel through the midpoints of its two edges transverse to
  /// `axis` (U cuts edges 0-1 and 3-2). The cut runs on through neighbouring
  /// tesels so the complex stays conforming; returns the number of tesels cut.
  int subdivide(std::uint32_t tesel, SplitAxis axis);
  void move_vertex(std::uint32_t vertex, const Vector2d& position);
  void set_kind(std::uint32_t tesel, TeselKind kind);

  const DrawingPlane& plane() const { return plane_; }
  const std::vector<Vector2d>& vertices() const { return vertices_; }
  const std::vector<Tesel>& tesels() const { return tesels_; }
  bool empty() const { return tesels_.empty(); }

  /// One handle per torus-kind tesel.
  int declared_genus() const;

  /// Lossless text snapshot (positions printed with 17 significant digits).
  std::string to_text() const;
  static TeselComplex from_text(const std::string& text);

 private:
  bool footprint_ok(const Tesel& t) const;

  DrawingPlane plane_;
  std::vector<Vector2d> vertices_;
  std::vector<Tesel> tesels_;
};

struct BaseMeshPlan {
  std::vector<Vector3d> vertices;
  /// Counter-clockwise seen from outside.
  std::vector<std::array<std::uint32_t, 4>> quads;
  int genus = 0;
  int boundary_count = 0;
  /// Lifted vertices whose ray found no root (only with allow_fallback).
  std::vector<std::uint32_t> fallback_vertices;
};

struct LiftOptions {
  /// Ray length on each side of the plane; non-positive means twice the
  /// surface bounding-box diagonal.
  double range = 0;
  /// Keep missed vertices on the plane instead of failing.
  bool allow_fallback = false;
  /// Size of a torus hole relative to its tesel footprint.
  double hole_scale = 0.5;
};

BaseMeshPlan lift(const TeselComplex& complex, const HrbfSurfaced& surface, const LiftOptions& options = {});

/// Chi of a quad mesh given as faces over `vertex_count` vertices.
long quad_euler_characteristic(std::size_t vertex_count, const std::vector<std::array<std::uint32_t, 4>>& quads);

}  // namespace dass
