// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dass/heightfield.hpp"
#include "fixtures.hpp"

namespace dass {
namespace {

using test::code_of;

/// Six axis samples: the fit is mirror symmetric in every coordinate plane,
/// so Newton projection from an axis point stays on the axis.
const HrbfSurfaced& axis_sphere() {
  static const HrbfSurfaced s = [] {
    std::vector<OrientedSampled> samples;
    for (int k = 0; k < 3; ++k)
      for (double sign : {1.0, -1.0}) {
        Vector3d n = Vector3d::Zero();
        n[k] = sign;
        samples.push_back({n, n});
      }
    return HrbfSurfaced::fit(samples);
  }();
  return s;
}

AtlasMesh single_quad() {
  BaseMeshPlan quad;
  quad.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  quad.quads = {{0, 1, 2, 3}};
  return init_atlas(quad, identity_projector);
}

HeightCurve curve(std::vector<Vector2d> points, double h, double r, std::uint64_t stroke) {
  return HeightCurve{std::move(points), h, r, stroke};
}

RasterLayer constant_raster(double value) {
  RasterLayer r;
  r.image = RasterImage{2, 2, {1, 1, 1, 1}};
  r.scale = value;
  return r;
}

void set_everywhere(Atlas& atlas, const HeightLayer& layer) {
  for (ChartId c = 1; c <= atlas.chart_count(); ++c) atlas.chart(c).layers = {layer};
}

TEST(Heightfield, Falloff) {
  EXPECT_EQ(curve_falloff(0.3, 0.1, 0), 0.3);
  EXPECT_NEAR(curve_falloff(1, 0.2, 0.2), std::exp(-25.0 / 4), 1e-15);
  EXPECT_NEAR(curve_falloff(1, 0.2, 0.2), 0.0019304541, 1e-10);
  EXPECT_NEAR(curve_falloff(-2, 0.5, 0.5), -2 * 0.0019304541, 1e-9);
  // 2r gives exp(-100), which is below the cutoff.
  EXPECT_EQ(curve_falloff(1, 0.1, 0.2), 0.0);
  EXPECT_EQ(curve_falloff(1, 0.1, 5), 0.0);
  EXPECT_EQ(curve_falloff(1, 0, 0), 0.0);
}

TEST(Heightfield, CurveDistance) {
  const std::vector<HeightCurve> c{curve({Vector2d(0, 0), Vector2d(1, 0)}, 1, 1, 0)};
  for (double t : {0.0, 0.05, 0.3, 1.0}) EXPECT_NEAR(curve_distance(c, Vector2d(0.4, t)), t, 1e-15);
  EXPECT_NEAR(curve_distance(c, Vector2d(1.3, 0.4)), 0.5, 1e-15);
  const std::vector<HeightCurve> two{c[0], curve({Vector2d(0, 1), Vector2d(1, 1)}, 1, 1, 0)};
  EXPECT_NEAR(curve_distance(two, Vector2d(0.5, 0.8)), 0.2, 1e-15);
}

TEST(Heightfield, StrokesAddFragmentsUnite) {
  auto am = single_quad();
  const auto a = curve({Vector2d(0.2, 0.5), Vector2d(0.8, 0.5)}, 0.1, 0.2, 1);
  const auto b = curve({Vector2d(0.5, 0.2), Vector2d(0.5, 0.8)}, -0.04, 0.15, 2);
  const Vector2d at(0.55, 0.45);
  const double ha = curve_falloff(0.1, 0.2, curve_distance({&a, 1}, at));
  const double hb = curve_falloff(-0.04, 0.15, curve_distance({&b, 1}, at));

  am.atlas.chart(1).layers = {SketchedLayer{{a, b}}};
  EXPECT_NEAR(composed_height(am.atlas, 1, at), ha + hb, 1e-15);
  am.atlas.chart(1).layers = {SketchedLayer{{b, a}}};
  EXPECT_NEAR(composed_height(am.atlas, 1, at), ha + hb, 1e-15);
  am.atlas.chart(1).layers = {SketchedLayer{{a}}, SketchedLayer{{b}}};
  EXPECT_NEAR(composed_height(am.atlas, 1, at), ha + hb, 1e-15);

  // Two fragments of one stroke: the nearer one wins, no double counting.
  auto a1 = curve({Vector2d(0.2, 0.5), Vector2d(0.5, 0.5)}, 0.1, 0.2, 1);
  auto a2 = curve({Vector2d(0.5, 0.5), Vector2d(0.8, 0.5)}, 0.1, 0.2, 1);
  am.atlas.chart(1).layers = {SketchedLayer{{a1, a2}}};
  EXPECT_NEAR(composed_height(am.atlas, 1, at), ha, 1e-15);
  EXPECT_NEAR(composed_height(am.atlas, 1, Vector2d(0.5, 0.5)), 0.1, 1e-15);
}

TEST(Heightfield, RasterLayer) {
  RasterImage img{3, 2, {0, 0.5, 1, 1, 1, 1}};
  EXPECT_EQ(img.sample(Vector2d(0, 0)), 0.0);
  EXPECT_EQ(img.sample(Vector2d(0.5, 0)), 0.5);
  EXPECT_EQ(img.sample(Vector2d(0.25, 0)), 0.25);
  EXPECT_EQ(img.sample(Vector2d(1, 1)), 1.0);
  EXPECT_EQ(img.sample(Vector2d(-3, 0)), 0.0);
  EXPECT_EQ(height_at(RasterLayer{img, 0.2}, Vector2d(0.5, 0.5)), 0.2 * 0.75);
}

TEST(Heightfield, DetailFactor) {
  EXPECT_EQ(default_eta(3), 6.0);
  EXPECT_EQ(default_eta(0.4), 1.0);
  EXPECT_EQ(default_eta(0), 1.0);

  // h = 3u on every chart of a cube over the sphere.
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  set_everywhere(am.atlas, RasterLayer{RasterImage{2, 1, {0, 1}}, 3});
  const DisplacedSurface ds(test::unit_sphere(), am.mesh, am.atlas);
  const Projector project = test::sphere_projector();
  for (ChartId c = 1; c <= 6; ++c) {
    const Vector3d p = phi(am.atlas, am.mesh, c, Vector2d(0.4, 0.6), project);
    EXPECT_NEAR(ds.detail_factor(p), 6, 1e-6);
    const Vector2d g = height_gradient(am.atlas, c, Vector2d(0.4, 0.6));
    EXPECT_NEAR(g.x(), 3, 1e-9);
    EXPECT_NEAR(g.y(), 0, 1e-9);
  }
  set_everywhere(am.atlas, RasterLayer{RasterImage{2, 1, {0, 1}}, 0.4});
  EXPECT_EQ(ds.detail_factor(phi(am.atlas, am.mesh, 2, Vector2d(0.5, 0.5), project)), 1.0);
}

TEST(Heightfield, ConstantHeightOffsetsAlongNormal) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  set_everywhere(am.atlas, constant_raster(0.1));
  const DisplacedSurface ds(test::unit_sphere(), am.mesh, am.atlas);
  const Projector project = test::sphere_projector();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    const Vector3d p = phi(am.atlas, am.mesh, 1 + static_cast<ChartId>(rng() % 6), Vector2d(u(rng), u(rng)), project);
    EXPECT_NEAR(ds.height(p), 0.1, 1e-15);
    const Vector3d d = ds.displace(p);
    EXPECT_NEAR((d - p).norm(), 0.1, 1e-15);
    EXPECT_LE((d - p - 0.1 * ds.normal(p)).norm(), 1e-15);
    // The fitted sphere is close to radius 0.5.
    EXPECT_NEAR(d.norm(), 0.6, 2e-3);
  }
  for (VertexId v : am.mesh.alive_vertices()) EXPECT_NEAR(ds.vertex_height(v), 0.1, 1e-15);
}

TEST(Heightfield, DisplacedDistanceOnAxes) {
  const auto& s = axis_sphere();
  const auto base = lift(TeselComplex::create(Vector2d(-0.6, -0.6), Vector2d(0.6, 0.6), DrawingPlane{}), s);
  auto am = init_atlas(base, s);
  set_everywhere(am.atlas, constant_raster(0.1));
  const DisplacedSurface ds(s, am.mesh, am.atlas);
  for (int k = 0; k < 3; ++k)
    for (double sign : {1.0, -1.0}) {
      Vector3d axis = Vector3d::Zero();
      axis[k] = sign;
      const Vector3d p = s.project_onto(axis * 0.9);
      const Vector3d d = ds.displace(p);
      EXPECT_LE(ds.distance(d), 1e-6);
      // Points above and below on the same axis land on d.
      EXPECT_LE((ds.project_final(d + 0.05 * axis) - d).norm(), 1e-6);
      EXPECT_LE((ds.project_final(d - 0.05 * axis) - d).norm(), 1e-6);
      EXPECT_NEAR(ds.distance(d + 0.05 * axis), 0.05, 1e-6);
    }
}

TEST(Heightfield, ErrorModelDeterminism) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  refine_uniform(am.mesh, test::sphere_projector());
  add_fragments(am.atlas, std::vector<CurveFragment>{
                              {1, curve({Vector2d(0.2, 0.3), Vector2d(0.8, 0.6)}, 0.05, 0.2, 1)},
                              {3, curve({Vector2d(0.5, 0.1), Vector2d(0.5, 0.9)}, -0.03, 0.1, 2)}});
  const DisplacedSurface ds(test::unit_sphere(), am.mesh, am.atlas);
  const ErrorModel a(ds, {ErrorKind::Local, 6, 42, 3});
  const ErrorModel b(ds, {ErrorKind::Local, 6, 42, 3});
  const ErrorModel rotated(ds, {ErrorKind::Local, 6, 42, 3});
  const ErrorModel other(ds, {ErrorKind::Local, 6, 42, 4});
  bool differs = false;
  for (FaceId f : am.mesh.alive_faces()) {
    const Triangle& t = am.mesh.face(f).v;
    EXPECT_EQ(a.face_error(am.mesh, t), b.face_error(am.mesh, t));
    EXPECT_GE(a.face_max_error(am.mesh, t), a.face_error(am.mesh, t));
    differs |= a.sample_weights(t) != other.sample_weights(t);
    // A rotated corner order gives the same error (fresh cache).
    EXPECT_EQ(rotated.face_error(am.mesh, Triangle{t[1], t[2], t[0]}), a.face_error(am.mesh, t));
    for (const auto& w : a.sample_weights(t)) {
      EXPECT_NEAR(w.sum(), 1, 1e-15);
      EXPECT_GE(w.minCoeff(), 0);
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.sample_weights(am.mesh.face(0).v).size(), 6u);
  EXPECT_EQ(code_of([&] { ErrorModel(ds, {ErrorKind::Simple, 0, 0, 0}); }), ErrorCode::InvalidLayer);
}

TEST(Heightfield, UnitEtaMatchesSimpleError) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  add_fragments(am.atlas,
                std::vector<CurveFragment>{{2, curve({Vector2d(0.1, 0.5), Vector2d(0.9, 0.5)}, 0.08, 0.1, 1)}});
  const DisplacedSurface unit(test::unit_sphere(), am.mesh, am.atlas, {}, [](double) { return 1.0; });
  const DisplacedSurface standard(test::unit_sphere(), am.mesh, am.atlas);
  const ErrorModel local(unit, {ErrorKind::Local, 6, 1, 0});
  const ErrorModel simple(unit, {ErrorKind::Simple, 6, 1, 0});
  const ErrorModel weighted(standard, {ErrorKind::Local, 6, 1, 0});
  for (FaceId f : am.mesh.alive_faces()) {
    const Triangle& t = am.mesh.face(f).v;
    EXPECT_EQ(local.face_error(am.mesh, t), simple.face_error(am.mesh, t));
    EXPECT_GE(weighted.face_error(am.mesh, t), simple.face_error(am.mesh, t));
  }
}

TEST(Heightfield, FlatFaceErrorIsChordError) {
  // No heights: the error of a face is the mean distance of its samples to
  // their projections.
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const DisplacedSurface ds(test::unit_sphere(), am.mesh, am.atlas);
  const ErrorModel model(ds, {ErrorKind::Simple, 6, 5, 0});
  const FaceId f = am.mesh.alive_faces()[2];
  Triangle t = am.mesh.face(f).v;
  double expected = 0;
  const auto weights = model.sample_weights(t);
  std::sort(t.begin(), t.end());
  for (const auto& w : weights) {
    Vector3d p = Vector3d::Zero();
    for (int k = 0; k < 3; ++k) p += w[k] * am.mesh.vertex(t[k]).position;
    expected += (test::unit_sphere().project_onto(p) - p).norm();
  }
  expected /= weights.size();
  EXPECT_NEAR(model.face_error(am.mesh, am.mesh.face(f).v), expected, 1e-15);
}

TEST(Heightfield, StrokeInsideOneChart) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const Projector project = test::sphere_projector();
  refine_uniform(am.mesh, project);
  const std::vector<Vector2d> uv{Vector2d(0.3, 0.4), Vector2d(0.5, 0.5), Vector2d(0.7, 0.45)};
  std::vector<Vector3d> stroke;
  for (const auto& p : uv) stroke.push_back(phi(am.atlas, am.mesh, 4, p, project));
  const auto fragments = transport_stroke(am.atlas, am.mesh, stroke, project, 0.02, 0.1, 9);
  ASSERT_EQ(fragments.size(), 1u);
  EXPECT_EQ(fragments[0].chart, 4u);
  EXPECT_EQ(fragments[0].curve.stroke, 9u);
  EXPECT_EQ(fragments[0].curve.height, 0.02);
  ASSERT_EQ(fragments[0].curve.points.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_LE((fragments[0].curve.points[k] - uv[k]).norm(), 1e-6);

  EXPECT_EQ(code_of([&] { transport_stroke(am.atlas, am.mesh, {}, project, 0.02, 0.1, 1); }),
            ErrorCode::EmptyStroke);
  EXPECT_EQ(code_of([&] { transport_stroke(am.atlas, am.mesh, stroke, project, 0.02, 0, 1); }),
            ErrorCode::InvalidLayer);
}

TEST(Heightfield, StrokeAcrossSeam) {
  auto am = init_atlas(test::cube_base(), test::sphere_projector());
  const Projector project = test::sphere_projector();
  refine_uniform(am.mesh, project);
  refine_uniform(am.mesh, project);
  const Transition& t = am.atlas.transitions().front();
  // From the middle of one chart to the middle of its neighbour.
  const Vector3d a = phi(am.atlas, am.mesh, t.from, Vector2d(0.5, 0.5), project);
  const Vector3d b = phi(am.atlas, am.mesh, t.to, Vector2d(0.5, 0.5), project);
  std::vector<Vector3d> stroke;
  for (int k = 0; k <= 8; ++k) stroke.push_back(project(a + (b - a) * (k / 8.0)));
  const auto fragments = transport_stroke(am.atlas, am.mesh, stroke, project, 0.03, 0.08, 1);
  ASSERT_EQ(fragments.size(), 2u);
  EXPECT_EQ(fragments[0].chart, t.from);
  EXPECT_EQ(fragments[1].chart, t.to);
  const Vector2d end = fragments[0].curve.points.back();
  const Vector2d start = fragments[1].curve.points.front();
  EXPECT_LE((transfer(am.atlas, end, t.from, t.to) - start).norm(), 1e-6);
  EXPECT_LE((phi(am.atlas, am.mesh, t.from, end, project) - phi(am.atlas, am.mesh, t.to, start, project)).norm(),
            1e-6);

  // Heights agree on both sides of the seam.
  add_fragments(am.atlas, fragments);
  for (double s = 0.02; s < 1; s += 0.04) {
    const Vector2d c0 = Vector2d(0, 0), c1 = Vector2d(1, 0), c2 = Vector2d(1, 1), c3 = Vector2d(0, 1);
    const std::array<Vector2d, 4> corners{c0, c1, c2, c3};
    const Vector2d on = corners[t.side] + s * (corners[(t.side + 1) % 4] - corners[t.side]);
    const double from = composed_height(am.atlas, t.from, on);
    const double to = composed_height(am.atlas, t.to, t.apply(on));
    EXPECT_NEAR(from, to, 1e-12) << "s = " << s;
  }
  EXPECT_NEAR(composed_height(am.atlas, t.from, end), 0.03, 1e-12);
}

}  // namespace
}  // namespace dass
