// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dass/hrbf.hpp"
#include "fixtures.hpp"

namespace dass {
namespace {

std::vector<OrientedSampled> axis_samples(double r = 1) {
  std::vector<OrientedSampled> s;
  for (int k = 0; k < 3; ++k)
    for (double sign : {1.0, -1.0}) {
      Vector3d n = Vector3d::Zero();
      n[k] = sign;
      s.push_back({r * n, n});
    }
  return s;
}

std::vector<OrientedSampled> cube_corner_samples(double r) {
  std::vector<OrientedSampled> s;
  for (int i = 0; i < 8; ++i) {
    const Vector3d n = Vector3d(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1).normalized();
    s.push_back({r * n, n});
  }
  return s;
}

TEST(Hrbf, AxisSphereIsNegativeInside) {
  const auto s = HrbfSurfaced::fit(axis_samples());
  EXPECT_LT(s.eval(Vector3d::Zero()), 0);
  EXPECT_GT(s.eval(Vector3d(2, 0, 0)), 0);
}

TEST(Hrbf, InterpolatesValuesAndNormals) {
  for (const auto& samples : {axis_samples(), test::sphere_samples(60), cube_corner_samples(2)}) {
    const auto s = HrbfSurfaced::fit(samples);
    for (const auto& x : samples) {
      EXPECT_LE(std::abs(s.eval(x.position)), 1e-6);
      EXPECT_LE((s.grad(x.position) - x.normal).norm(), 1e-4);
    }
  }
}

TEST(Hrbf, CubeCornerSphereHasOneCrossingAlongTheAxis) {
  const auto s = HrbfSurfaced::fit(cube_corner_samples(2));
  EXPECT_GT(s.eval(Vector3d(3, 0, 0)), 0);
  // Dense 1D sampling from the centre out to 3 e_x.
  int changes = 0;
  double prev = s.eval(Vector3d::Zero());
  for (int i = 1; i <= 3000; ++i) {
    const double f = s.eval(Vector3d(3.0 * i / 3000, 0, 0));
    if ((f > 0) != (prev > 0)) ++changes;
    prev = f;
  }
  EXPECT_EQ(changes, 1);
}

TEST(Hrbf, MirrorSymmetry) {
  const auto s = HrbfSurfaced::fit(axis_samples());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const Vector3d p(u(rng), u(rng), u(rng));
    const Vector3d q(-p.x(), p.y(), p.z());
    EXPECT_NEAR(s.eval(p), s.eval(q), 1e-9);
    const Vector3d gp = s.grad(p), gq = s.grad(q);
    EXPECT_NEAR(gp.x(), -gq.x(), 1e-9);
    EXPECT_NEAR(gp.y(), gq.y(), 1e-9);
    EXPECT_NEAR(gp.z(), gq.z(), 1e-9);
  }
}

TEST(Hrbf, ZeroSetOfSixSampleSphereIsNearRadiusOne) {
  const auto s = HrbfSurfaced::fit(axis_samples());
  const int n = 40;
  const double lo = -1.5, step = 3.0 / n;
  auto at = [&](int i, int j, int k) { return Vector3d(lo + i * step, lo + j * step, lo + k * step); };
  int crossings = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) {
        // Bracket sign changes along x and locate the crossing linearly.
        const Vector3d a = at(i, j, k), b = at(i + 1, j, k);
        const double fa = s.eval(a), fb = s.eval(b);
        if ((fa > 0) == (fb > 0)) continue;
        const Vector3d root = a + (fa / (fa - fb)) * (b - a);
        EXPECT_NEAR(root.norm(), 1.0, 0.06) << root.transpose();
        ++crossings;
      }
  EXPECT_GT(crossings, 100);
}

TEST(Hrbf, GradientMatchesFiniteDifferences) {
  const auto s = HrbfSurfaced::fit(test::ellipsoid_samples(80, Vector3d(0.6, 0.4, 0.3)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const Vector3d p(u(rng), u(rng), u(rng));
    Vector3d fd;
    for (int k = 0; k < 3; ++k) {
      Vector3d e = Vector3d::Zero();
      e[k] = h;
      fd[k] = (s.eval(p + e) - s.eval(p - e)) / (2 * h);
    }
    const Vector3d g = s.grad(p);
    EXPECT_LE((fd - g).norm() / g.norm(), 1e-5);
    EXPECT_NEAR(s.eval_with_grad(p).first, s.eval(p), 1e-15);
  }
}

TEST(Hrbf, ProjectionFixedPointAndAxis) {
  const auto s = HrbfSurfaced::fit(axis_samples());
  const Vector3d on = s.project_onto(Vector3d(0.3, 0.5, 0.6));
  EXPECT_LE((s.project_onto(on) - on).norm(), 1e-8);

  const auto r = s.project(Vector3d(2, 0, 0));
  ASSERT_TRUE(r.converged());
  EXPECT_LE(std::abs(r.point.y()) + std::abs(r.point.z()), 1e-12);
  EXPECT_LE(std::abs(s.eval(r.point)), 1e-8);
}

TEST(Hrbf, ProjectionResidualNearSurface) {
  const auto samples = test::ellipsoid_samples(100, Vector3d(0.7, 0.5, 0.4));
  const auto s = HrbfSurfaced::fit(samples);
  // Distance oracle: dense set of surface points found by bisection along rays.
  std::vector<Vector3d> cloud;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < 4000; ++i) {
    const Vector3d d = Vector3d(g(rng), g(rng), g(rng)).normalized();
    if (const auto root = s.ray_root(Vector3d::Zero(), d, 0.0, 2.0)) cloud.push_back(*root);
  }
  ASSERT_GT(cloud.size(), 3900u);
  std::uniform_real_distribution<double> box(-1.1, 1.1);
  int tested = 0;
  while (tested < 1000) {
    const Vector3d p(box(rng), box(rng), box(rng));
    double d = 1e9;
    for (const auto& c : cloud) d = std::min(d, (p - c).norm());
    if (d > 0.3) continue;
    const Vector3d q = s.project_onto(p);
    EXPECT_LE(std::abs(s.eval(q)), 1e-8 * s.bbox_diagonal());
    EXPECT_LE((s.project_onto(q) - q).norm(), 1e-7);
    ++tested;
  }
}

TEST(Hrbf, RayRoot) {
  const auto s = HrbfSurfaced::fit(axis_samples());
  const auto root = s.ray_root(Vector3d(0, 0, -3), Vector3d::UnitZ(), 0.0, 6.0);
  ASSERT_TRUE(root.has_value());
  EXPECT_LE(std::abs(s.eval(*root)), 1e-10);
  // Oracle: first sign change over a dense 1D sampling.
  double t_oracle = -1;
  for (int i = 1; i <= 60000; ++i) {
    const double t = 6.0 * i / 60000;
    if (s.eval(Vector3d(0, 0, -3 + t)) <= 0) {
      t_oracle = t;
      break;
    }
  }
  EXPECT_NEAR(root->z(), -3 + t_oracle, 1e-4);
  EXPECT_NEAR(root->z(), -1, 0.06);

  EXPECT_FALSE(s.ray_root(Vector3d(5, 5, 5), Vector3d::UnitZ(), 0.0, 10.0).has_value());
}

TEST(Hrbf, Errors) {
  auto few = axis_samples();
  few.resize(3);
  try {
    HrbfSurfaced::fit(few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
  }
  auto dup = axis_samples();
  dup.push_back(dup.front());
  try {
    HrbfSurfaced::fit(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Hrbf, FitIsBitDeterministic) {
  const auto samples = test::sphere_samples(50);
  const auto a = HrbfSurfaced::fit(samples);
  const auto b = HrbfSurfaced::fit(samples);
  ASSERT_EQ(a.alpha().size(), b.alpha().size());
  for (std::size_t j = 0; j < a.alpha().size(); ++j) {
    EXPECT_EQ(a.alpha()[j], b.alpha()[j]);
    EXPECT_EQ(a.beta()[j], b.beta()[j]);
  }
  EXPECT_EQ(a.linear(), b.linear());
  EXPECT_EQ(a.constant(), b.constant());
}

TEST(Hrbf, FloatInstantiation) {
  std::vector<OrientedSample<float>> samples;
  for (const auto& s : axis_samples()) samples.push_back({s.position.cast<float>(), s.normal.cast<float>()});
  const auto s = HrbfSurface<float>::fit(samples);
  EXPECT_LT(eval(s, Vector3<float>(Vector3<float>::Zero())), 0.0f);
  EXPECT_NEAR(eval(s, samples[0].position), 0.0f, 1e-4f);
}

}  // namespace
}  // namespace dass
