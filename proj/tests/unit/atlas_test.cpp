// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "dass/atlas.hpp"
#include "fixtures.hpp"

namespace dass {
namespace {

using test::code_of;

TEST(Atlas, CubeGivesSixCharts) {
  const auto am = init_atlas(test::cube_base(), test::sphere_projector());
  EXPECT_EQ(am.atlas.chart_count(), 6u);
  EXPECT_EQ(am.mesh.vertex_count(), 14u);
  EXPECT_EQ(am.mesh.face_count(), 24u);
  EXPECT_EQ(euler_characteristic(am.mesh), 2);
  EXPECT_FALSE(check_manifold(am.mesh).has_value());
  EXPECT_TRUE(validate_rk(am.mesh).ok);
  for (const auto& c : am.atlas.charts()) {
    EXPECT_EQ(am.atlas.neighbours(c.id).size(), 4u);
    const auto& center = am.mesh.vertex(c.center);
    EXPECT_EQ(center.label, c.id);
    EXPECT_EQ(*center.coords_in(c.id), Vector2d(0.5, 0.5));
    EXPECT_LE(std::abs(test::unit_sphere().eval(center.position)), 1e-8);
  }
  const auto parts = chart_partition(am.mesh, am.atlas.chart_count());
  EXPECT_TRUE(parts[0].empty());
  for (std::size_t c = 1; c <= 6; ++c) EXPECT_EQ(parts[c].size(), 4u);
}

TEST(Atlas, SingleQuadHasOneChartAndOpenBoundary) {
  BaseMeshPlan quad;
  quad.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  quad.quads = {{0, 1, 2, 3}};
  const auto am = init_atlas(quad, identity_projector);
  EXPECT_EQ(am.atlas.chart_count(), 1u);
  EXPECT_EQ(am.atlas.neighbours(1).size(), 0u);
  EXPECT_EQ(boundary_edge_count(am.mesh), 4u);
  EXPECT_EQ(am.mesh.vertex(am.atlas.chart(1).center).position, Vector3d(0.5, 0.5, 0));
}

TEST(Atlas, StripStaysRegularUnderRefinement) {
  auto am = init_atlas(test::strip_base(), test::wavy);
  for (int i = 0; i < 3; ++i) {
    refine_uniform(am.mesh, test::wavy);
    const auto r = validate_rk(am.mesh);
    EXPECT_TRUE(r.ok) << r.message;
  }
  const auto parts = chart_partition(am.mesh, 2);
  EXPECT_EQ(parts[1].size(), parts[2].size());
  EXPECT_EQ(parts[1].size() + parts[2].size(), am.mesh.face_count());
  // The shared edge x = 1 carries coordinates in both charts: u = 1 in the
  // first and u = 0 in the second.
  for (VertexId v : am.mesh.alive_vertices()) {
    const auto& vx = am.mesh.vertex(v);
    if (vx.label != 0 || std::abs(vx.position.x() - 1) > 1e-12) continue;
    ASSERT_NE(vx.coords_in(1), nullptr);
    ASSERT_NE(vx.coords_in(2), nullptr);
    EXPECT_NEAR(vx.coords_in(1)->x(), 1, 1e-15);
    EXPECT_NEAR(vx.coords_in(2)->x(), 0, 1e-15);
    EXPECT_NEAR(vx.coords_in(1)->y(), vx.coords_in(2)->y(), 1e-15);
  }
}

TEST(Atlas, RegularityViolations) {
  Mesh48 mixed;
  mixed.add_vertex(Vector3d(0, 0, 0), 1);
  mixed.add_vertex(Vector3d(1, 0, 0), 2);
  mixed.add_vertex(Vector3d(0, 1, 0), 0);
  mixed.add_face(0, 1, 2);
  const auto r1 = validate_rk(mixed);
  EXPECT_FALSE(r1.ok);
  EXPECT_EQ(r1.face, 0u);
  EXPECT_EQ(code_of([&] { face_label(mixed, 0); }), ErrorCode::NotRegular);
  EXPECT_EQ(code_of([&] { edge_label(mixed, {0, 1}); }), ErrorCode::NotRegular);

  Mesh48 unlabelled;
  for (int k = 0; k < 3; ++k) unlabelled.add_vertex(Vector3d(k == 1, k == 2, 0), 0);
  unlabelled.add_face(0, 1, 2);
  EXPECT_FALSE(validate_rk(unlabelled).ok);
  EXPECT_EQ(code_of([&] { face_label(unlabelled, 0); }), ErrorCode::NotRegular);
}

TEST(Atlas, FaceAndEdgeLabels) {
  Mesh48 m;
  m.add_vertex(Vector3d(0, 0, 0), 0);
  m.add_vertex(Vector3d(1, 0, 0), 0);
  m.add_vertex(Vector3d(0, 1, 0), 2);
  m.add_face(0, 1, 2);
  EXPECT_EQ(face_label(m, 0), 2u);
  EXPECT_EQ(edge_label(m, {0, 1}), 0u);
  EXPECT_EQ(edge_label(m, {1, 2}), 2u);
  EXPECT_EQ(edge_label(m, {2, 0}), 2u);
}

TEST(Atlas, PhiAtCornersAndCenter) {
  const auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const Projector project = test::sphere_projector();
  for (const auto& c : am.atlas.charts()) {
    const std::array<Vector2d, 4> uv{Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1), Vector2d(0, 1)};
    for (int k = 0; k < 4; ++k) {
      const Vector3d p = am.mesh.vertex(c.corners[k]).position;
      EXPECT_LE((phi(am.atlas, am.mesh, c.id, uv[k], project) - project(p)).norm(), 1e-12);
    }
    EXPECT_LE((phi(am.atlas, am.mesh, c.id, Vector2d(0.5, 0.5), project) - am.mesh.vertex(c.center).position).norm(),
              1e-12);
  }
  EXPECT_EQ(code_of([&] { phi(am.atlas, am.mesh, 1, Vector2d(1.5, 0.5), project); }), ErrorCode::UvOutsideChart);
  EXPECT_EQ(code_of([&] { phi(am.atlas, am.mesh, 7, Vector2d(0.5, 0.5), project); }), ErrorCode::InvalidId);
}

TEST(Atlas, PhiInverseRoundTrip) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const Projector project = test::sphere_projector();
  refine_uniform(am.mesh, project);
  refine_uniform(am.mesh, project);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 200; ++i) {
    const ChartId c = 1 + static_cast<ChartId>(rng() % 6);
    const Vector2d uv(u(rng), u(rng));
    const Vector3d p = phi(am.atlas, am.mesh, c, uv, project);
    const ChartPoint back = phi_inv(am.atlas, am.mesh, p, project);
    EXPECT_LE((phi(am.atlas, am.mesh, back.chart, back.uv, project) - p).norm(), 1e-9);
    if (back.chart == c) EXPECT_LE((back.uv - uv).norm(), 1e-9);
  }
}

TEST(Atlas, TransitionsAgreeOnSharedEdges) {
  const auto am = init_atlas(test::cube_base(), test::sphere_projector());
  EXPECT_EQ(am.atlas.transitions().size(), 24u);
  for (const auto& t : am.atlas.transitions()) {
    for (VertexId v : {t.base_edge.a, t.base_edge.b}) {
      const auto& vx = am.mesh.vertex(v);
      ASSERT_NE(vx.coords_in(t.from), nullptr);
      ASSERT_NE(vx.coords_in(t.to), nullptr);
      EXPECT_LE((t.apply(*vx.coords_in(t.from)) - *vx.coords_in(t.to)).norm(), 1e-12);
    }
    const Vector2d uv(0.3, 0.7);
    EXPECT_LE((t.inverse().apply(t.apply(uv)) - uv).norm(), 1e-12);
  }
}

TEST(Atlas, TransferAcrossSeam) {
  const auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const auto& t = am.atlas.transitions().front();
  const Vector2d a = *am.mesh.vertex(t.base_edge.a).coords_in(t.from);
  const Vector2d b = *am.mesh.vertex(t.base_edge.b).coords_in(t.from);
  const Vector2d a2 = *am.mesh.vertex(t.base_edge.a).coords_in(t.to);
  const Vector2d b2 = *am.mesh.vertex(t.base_edge.b).coords_in(t.to);
  const Vector2d mid = transfer(am.atlas, 0.5 * (a + b), t.from, t.to);
  EXPECT_LE((mid - 0.5 * (a2 + b2)).norm(), 1e-12);
  const Vector2d uv(0.9, 0.4);
  EXPECT_LE((transfer(am.atlas, transfer(am.atlas, uv, t.from, t.to), t.to, t.from) - uv).norm(), 1e-12);
  EXPECT_EQ(transfer(am.atlas, uv, 3, 3), uv);

  // Opposite cube faces share no edge.
  ChartId far = 0;
  for (ChartId c = 2; c <= 6; ++c) {
    const auto n = am.atlas.neighbours(1);
    if (std::find(n.begin(), n.end(), c) == n.end()) far = c;
  }
  ASSERT_NE(far, 0u);
  EXPECT_EQ(code_of([&] { transfer(am.atlas, uv, 1, far); }), ErrorCode::NotAdjacent);
}

TEST(Atlas, InvalidBaseMeshes) {
  BaseMeshPlan empty;
  EXPECT_EQ(code_of([&] { init_atlas(empty, identity_projector); }), ErrorCode::InvalidBaseMesh);
  BaseMeshPlan flipped = test::strip_base();
  flipped.quads[1] = {4, 5, 2, 1};
  EXPECT_EQ(code_of([&] { init_atlas(flipped, identity_projector); }), ErrorCode::InvalidBaseMesh);
}

}  // namespace
}  // namespace dass
