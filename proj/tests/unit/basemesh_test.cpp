// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dass/basemesh.hpp"
#include "fixtures.hpp"

namespace dass {
namespace {

using test::code_of;

/// Torus around the z axis with exact normals.
std::vector<OrientedSampled> torus_samples(double major, double minor, int nu, int nv) {
  std::vector<OrientedSampled> out;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = 2 * std::numbers::pi * (i + 0.5 * (j % 2)) / nu;
      const double v = 2 * std::numbers::pi * j / nv;
      const Vector3d n(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
      const Vector3d c(major * std::cos(u), major * std::sin(u), 0);
      out.push_back({c + minor * n, n});
    }
  return out;
}

TEST(BaseMesh, CreateSingleTesel) {
  const auto c = TeselComplex::create(Vector2d(-1, -0.5), Vector2d(1, 0.5), DrawingPlane{});
  EXPECT_EQ(c.tesels().size(), 1u);
  EXPECT_EQ(c.vertices().size(), 4u);
  EXPECT_EQ(c.declared_genus(), 0);
  EXPECT_EQ(code_of([] { TeselComplex::create(Vector2d(0, 0), Vector2d(1, 0), DrawingPlane{}); }),
            ErrorCode::DegenerateBBox);
  DrawingPlane parallel;
  parallel.v_axis = parallel.u_axis;
  EXPECT_EQ(code_of([&] { TeselComplex::create(Vector2d(0, 0), Vector2d(1, 1), parallel); }),
            ErrorCode::DegenerateBBox);
}

TEST(BaseMesh, SubdivideAddsTesels) {
  auto c = TeselComplex::create(Vector2d(-1, -1), Vector2d(1, 1), DrawingPlane{});
  EXPECT_EQ(c.subdivide(0, SplitAxis::U), 1);
  EXPECT_EQ(c.tesels().size(), 2u);
  EXPECT_EQ(c.vertices().size(), 6u);
  // A V cut through one half runs on through the other.
  EXPECT_EQ(c.subdivide(0, SplitAxis::V), 2);
  EXPECT_EQ(c.tesels().size(), 4u);
  EXPECT_EQ(c.vertices().size(), 9u);
  EXPECT_EQ(code_of([&] { c.subdivide(9, SplitAxis::U); }), ErrorCode::InvalidId);
}

TEST(BaseMesh, MoveVertex) {
  auto c = TeselComplex::create(Vector2d(0, 0), Vector2d(1, 1), DrawingPlane{});
  c.move_vertex(2, Vector2d(1.2, 1.1));
  EXPECT_EQ(c.vertices()[2], Vector2d(1.2, 1.1));
  // Dragging a corner across the diagonal folds the quad.
  EXPECT_EQ(code_of([&] { c.move_vertex(2, Vector2d(-0.5, -0.5)); }), ErrorCode::WouldDegenerate);
  EXPECT_EQ(c.vertices()[2], Vector2d(1.2, 1.1));
  EXPECT_EQ(code_of([&] { c.move_vertex(4, Vector2d(0, 0)); }), ErrorCode::InvalidId);
}

TEST(BaseMesh, LiftCubeOntoSphere) {
  const auto& s = test::unit_sphere();
  const auto plan = test::cube_base(s);
  EXPECT_EQ(plan.vertices.size(), 8u);
  EXPECT_EQ(plan.quads.size(), 6u);
  EXPECT_EQ(plan.genus, 0);
  EXPECT_EQ(quad_euler_characteristic(plan.vertices.size(), plan.quads), 2);
  for (const auto& p : plan.vertices) EXPECT_LE(std::abs(s.eval(p)), 1e-8);
  // Front roots above the plane, back roots below.
  int above = 0;
  for (const auto& p : plan.vertices) above += p.z() > 0;
  EXPECT_EQ(above, 4);
}

TEST(BaseMesh, LiftSubdividedComplex) {
  const auto& s = test::unit_sphere();
  auto c = TeselComplex::create(Vector2d(-0.3, -0.3), Vector2d(0.3, 0.3), DrawingPlane{});
  c.subdivide(0, SplitAxis::U);
  const auto plan = lift(c, s);
  EXPECT_EQ(plan.vertices.size(), 12u);
  EXPECT_EQ(plan.quads.size(), 10u);
  EXPECT_EQ(quad_euler_characteristic(plan.vertices.size(), plan.quads), 2);
  const auto am = init_atlas(plan, s);
  EXPECT_FALSE(check_manifold(am.mesh).has_value());
  EXPECT_EQ(euler_characteristic(am.mesh), 2);
}

TEST(BaseMesh, TorusTeselGivesGenusOne) {
  const auto s = HrbfSurfaced::fit(torus_samples(0.5, 0.25, 16, 8));
  auto c = TeselComplex::create(Vector2d(-0.45, -0.45), Vector2d(0.45, 0.45), DrawingPlane{});
  c.set_kind(0, TeselKind::Torus);
  EXPECT_EQ(c.declared_genus(), 1);
  const auto plan = lift(c, s);
  EXPECT_EQ(plan.genus, 1);
  EXPECT_EQ(plan.vertices.size(), 16u);
  EXPECT_EQ(plan.quads.size(), 16u);
  EXPECT_EQ(quad_euler_characteristic(plan.vertices.size(), plan.quads), 0);
  for (const auto& p : plan.vertices) EXPECT_LE(std::abs(s.eval(p)), 1e-8);
  const auto am = init_atlas(plan, s);
  EXPECT_EQ(euler_characteristic(am.mesh), 0);
  EXPECT_FALSE(check_manifold(am.mesh).has_value());
}

TEST(BaseMesh, LiftFailsWithoutRoot) {
  const auto& s = test::unit_sphere();
  // The corners at (2, 2) miss the sphere of radius 0.5.
  const auto c = TeselComplex::create(Vector2d(-0.3, -0.3), Vector2d(2, 2), DrawingPlane{});
  EXPECT_EQ(code_of([&] { lift(c, s); }), ErrorCode::NoRootFound);
  LiftOptions options;
  options.allow_fallback = true;
  const auto plan = lift(c, s, options);
  EXPECT_FALSE(plan.fallback_vertices.empty());
  EXPECT_EQ(code_of([&] { lift(TeselComplex{}, s); }), ErrorCode::InvalidBaseMesh);
  EXPECT_EQ(code_of([&] { lift(c, HrbfSurfaced{}); }), ErrorCode::PhaseError);
}

TEST(BaseMesh, TextRoundTripIsLossless) {
  DrawingPlane plane;
  plane.origin = Vector3d(0.05, -0.02, 0.05);
  plane.u_axis = Vector3d(1, 0.1, 0).normalized();
  plane.v_axis = Vector3d(-0.1, 1, 0.2).normalized();
  auto c = TeselComplex::create(Vector2d(-0.3, -0.25), Vector2d(0.3, 0.25), plane);
  c.subdivide(0, SplitAxis::V);
  c.move_vertex(1, Vector2d(1.0 / 3, -0.21));
  const auto back = TeselComplex::from_text(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  ASSERT_EQ(back.vertices().size(), c.vertices().size());
  for (std::size_t i = 0; i < c.vertices().size(); ++i) EXPECT_EQ(back.vertices()[i], c.vertices()[i]);
  EXPECT_EQ(back.plane().u_axis, c.plane().u_axis);

  const auto& s = test::unit_sphere();
  const auto a = lift(c, s), b = lift(back, s);
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(a.vertices[i], b.vertices[i]);
  EXPECT_EQ(a.quads, b.quads);

  EXPECT_EQ(code_of([] { TeselComplex::from_text("bogus 1 2\n"); }), ErrorCode::ParseError);
}

}  // namespace
}  // namespace dass
