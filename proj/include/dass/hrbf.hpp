// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Variational Hermite RBF implicit surface.
//
//   f(x) = sum_j alpha_j psi(x - x_j) - <beta_j, grad psi(x - x_j)> + <a, x> + b
//
// with the triharmonic kernel psi(r) = r^3. The coefficients are the solution
// of the dense symmetric saddle-point system that enforces f(x_j) = 0 and
// grad f(x_j) = n_j, plus orthogonality of the coefficients to linear
// polynomials. Outward normals make f negative inside and positive outside.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dass/error.hpp"
#include "dass/types.hpp"

namespace dass {

template <class Scalar>
struct OrientedSample {
  Vector3<Scalar> position;
  Vector3<Scalar> normal;
};

enum class Kernel { Triharmonic };

enum class ProjectionStatus { Converged, NoConvergence, ZeroGradient };

template <class Scalar>
struct ProjectionOptions {
  int max_iterations = 50;
  /// Residual target, relative to the bounding-box diagonal of the centers.
  Scalar tolerance = Scalar(1e-11);
  /// Residual below which a stalled iteration still counts as converged.
  Scalar acceptance = Scalar(1e-8);
  /// Longest single Newton step (model units). Non-positive disables the clamp.
  Scalar trust_radius = Scalar(0);
};

template <class Scalar>
struct Projection {
  Vector3<Scalar> point;
  ProjectionStatus status = ProjectionStatus::Converged;
  int iterations = 0;
  Scalar residual = 0;

  bool converged() const { return status == ProjectionStatus::Converged; }
};

template <class Scalar>
class HrbfSurface {
 public:
  using Vec3 = Vector3<Scalar>;
  using Sample = OrientedSample<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  HrbfSurface() = default;

  static HrbfSurface fit(std::span<const Sample> samples);

  Scalar eval(const Vec3& p) const {
    Scalar value = linear_.dot(p) + constant_;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      const Vec3 d = p - centers_[j];
      const Scalar r = d.norm();
      value += alpha_[j] * r * r * r - Scalar(3) * r * beta_[j].dot(d);
    }
    return value;
  }

  Vec3 grad(const Vec3& p) const { return eval_with_grad(p).second; }

  std::pair<Scalar, Vec3> eval_with_grad(const Vec3& p) const {
    Scalar value = linear_.dot(p) + constant_;
    Vec3 g = linear_;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      const Vec3 d = p - centers_[j];
      const Scalar r = d.norm();
      const Scalar bd = beta_[j].dot(d);
      value += alpha_[j] * r * r * r - Scalar(3) * r * bd;
      g += Scalar(3) * alpha_[j] * r * d;
      if (r > Scalar(0)) g -= Scalar(3) * (r * beta_[j] + (bd / r) * d);
    }
    return {value, g};
  }

  /// Damped Newton iteration q <- q - f(q) grad f(q) / |grad f(q)|^2.
  Projection<Scalar> project(const Vec3& p, const ProjectionOptions<Scalar>& options = {}) const;

  /// Projection that throws on failure.
  Vec3 project_onto(const Vec3& p, const ProjectionOptions<Scalar>& options = {}) const {
    const auto result = project(p, options);
    if (result.status == ProjectionStatus::ZeroGradient)
      throw Error(ErrorCode::ZeroGradient, "vanishing gradient during surface projection");
    if (result.status == ProjectionStatus::NoConvergence)
      throw Error(ErrorCode::NoConvergence, "surface projection did not converge");
    return result.point;
  }

  /// First sign change of f along origin + t dir for t in [t0, t1], found by
  /// `probes` uniform samples and refined by bisection to |f| <= 1e-10.
  std::optional<Vec3> ray_root(const Vec3& origin, const Vec3& dir, Scalar t0, Scalar t1,
                               int probes = 256) const;

  const std::vector<Vec3>& centers() const { return centers_; }
  const std::vector<Scalar>& alpha() const { return alpha_; }
  const std::vector<Vec3>& beta() const { return beta_; }
  const Vec3& linear() const { return linear_; }
  Scalar constant() const { return constant_; }
  Kernel kernel() const { return Kernel::Triharmonic; }
  bool empty() const { return centers_.empty(); }

  /// Diagonal of the axis-aligned box around the centers; the length scale
  /// used by every relative tolerance.
  Scalar bbox_diagonal() const { return bbox_diagonal_; }

 private:
  std::vector<Vec3> centers_;
  std::vector<Scalar> alpha_;
  std::vector<Vec3> beta_;
  Vec3 linear_ = Vec3::Zero();
  Scalar constant_ = 0;
  Scalar bbox_diagonal_ = 0;
};

using HrbfSurfaced = HrbfSurface<double>;
using OrientedSampled = OrientedSample<double>;

template <class Scalar>
HrbfSurface<Scalar> HrbfSurface<Scalar>::fit(std::span<const Sample> samples) {
  const std::size_t n = samples.size();
  if (n < 4) throw Error(ErrorCode::TooFewSamples, "need at least 4 samples, got " + std::to_string(n));

  HrbfSurface s;
  s.centers_.reserve(n);
  std::vector<Vec3> normals;
  normals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sample = samples[i];
    const Scalar len = sample.normal.norm();
    if (!sample.position.allFinite() || !sample.normal.allFinite() || len < Scalar(1e-12))
      throw Error(ErrorCode::InvalidSample, "sample " + std::to_string(i) + " is not finite or has a null normal");
    s.centers_.push_back(sample.position);
    normals.push_back(sample.normal / len);
  }

  Vec3 lo = s.centers_.front(), hi = s.centers_.front();
  for (const auto& c : s.centers_) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  s.bbox_diagonal_ = (hi - lo).norm();

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((s.centers_[i] - s.centers_[j]).norm() <= Scalar(1e-9))
        throw Error(ErrorCode::SingularSystem,
                    "samples " + std::to_string(i) + " and " + std::to_string(j) + " coincide");

  const Eigen::Index dim = static_cast<Eigen::Index>(4 * n + 4);
  Matrix a = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  const auto poly = static_cast<Eigen::Index>(4 * n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = static_cast<Eigen::Index>(4 * i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto cj = static_cast<Eigen::Index>(4 * j);
      const Vec3 d = s.centers_[i] - s.centers_[j];
      const Scalar r = d.norm();
      a(ri, cj) = r * r * r;
      a.template block<1, 3>(ri, cj + 1) = -Scalar(3) * r * d.transpose();
      a.template block<3, 1>(ri + 1, cj) = Scalar(3) * r * d;
      if (r > Scalar(0)) {
        a.template block<3, 3>(ri + 1, cj + 1) =
            -Scalar(3) * (r * Eigen::Matrix<Scalar, 3, 3>::Identity() + d * d.transpose() / r);
      }
    }
    a.template block<1, 3>(ri, poly) = s.centers_[i].transpose();
    a(ri, poly + 3) = 1;
    a.template block<3, 3>(ri + 1, poly) = Eigen::Matrix<Scalar, 3, 3>::Identity();
    a.template block<3, 1>(poly, ri) = s.centers_[i];
    a(poly + 3, ri) = 1;
    a.template block<3, 3>(poly, ri + 1) = Eigen::Matrix<Scalar, 3, 3>::Identity();
    rhs.template segment<3>(ri + 1) = normals[i];
  }

  Eigen::PartialPivLU<Matrix> lu(a);
  const Scalar rcond = lu.rcond();
  if (!(rcond > Scalar(1e-15)))
    throw Error(ErrorCode::SingularSystem, "interpolation system is rank deficient (rcond " +
                                               std::to_string(static_cast<double>(rcond)) + ")");
  Vector x = lu.solve(rhs);
  // Two steps of iterative refinement keep the Hermite residuals well below
  // the interpolation tolerances for clustered samples.
  for (int k = 0; k < 2; ++k) x += lu.solve(rhs - a * x);
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite coefficients");

  s.alpha_.resize(n);
  s.beta_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.alpha_[j] = x(static_cast<Eigen::Index>(4 * j));
    s.beta_[j] = x.template segment<3>(static_cast<Eigen::Index>(4 * j + 1));
  }
  s.linear_ = x.template segment<3>(poly);
  s.constant_ = x(poly + 3);
  return s;
}

template <class Scalar>
Projection<Scalar> HrbfSurface<Scalar>::project(const Vec3& p, const ProjectionOptions<Scalar>& options) const {
  const Scalar scale = bbox_diagonal_ > Scalar(0) ? bbox_diagonal_ : Scalar(1);
  const Scalar tol = options.tolerance * scale;
  const Scalar accept = options.acceptance * scale;
  Projection<Scalar> out;
  Vec3 q = p;
  auto [f, g] = eval_with_grad(q);
  for (int it = 0;; ++it) {
    out.iterations = it;
    if (std::abs(f) <= tol) {
      out.point = q;
      out.residual = std::abs(f);
      out.status = ProjectionStatus::Converged;
      return out;
    }
    if (it >= options.max_iterations) break;
    const Scalar g2 = g.squaredNorm();
    if (g2 < Scalar(1e-24)) {
      out.point = q;
      out.residual = std::abs(f);
      out.status = ProjectionStatus::ZeroGradient;
      return out;
    }
    Vec3 step = (f / g2) * g;
    if (options.trust_radius > Scalar(0)) {
      const Scalar len = step.norm();
      if (len > options.trust_radius) step *= options.trust_radius / len;
    }
    if (step.norm() <= Scalar(1e-15) * scale) break;
    // Halve the step while it fails to reduce |f|.
    Vec3 next = q - step;
    auto trial = eval_with_grad(next);
    for (int k = 0; k < 12 && std::abs(trial.first) > std::abs(f); ++k) {
      step *= Scalar(0.5);
      next = q - step;
      trial = eval_with_grad(next);
    }
    q = next;
    f = trial.first;
    g = trial.second;
  }
  out.point = q;
  out.residual = std::abs(f);
  out.status = out.residual <= accept ? ProjectionStatus::Converged : ProjectionStatus::NoConvergence;
  return out;
}

template <class Scalar>
std::optional<typename HrbfSurface<Scalar>::Vec3> HrbfSurface<Scalar>::ray_root(const Vec3& origin, const Vec3& dir,
                                                                               Scalar t0, Scalar t1,
                                                                               int probes) const {
  if (probes < 2 || !(t1 > t0)) return std::nullopt;
  const Scalar dt = (t1 - t0) / Scalar(probes - 1);
  Scalar prev_t = t0;
  Scalar prev_f = eval(origin + t0 * dir);
  if (prev_f == Scalar(0)) return Vec3(origin + t0 * dir);
  for (int k = 1; k < probes; ++k) {
    const Scalar t = t0 + dt * Scalar(k);
    const Scalar f = eval(origin + t * dir);
    if (f == Scalar(0)) return Vec3(origin + t * dir);
    if ((f < 0) != (prev_f < 0)) {
      Scalar lo = prev_t, hi = t, flo = prev_f;
      Scalar mid = (lo + hi) / 2;
      for (int it = 0; it < 200; ++it) {
        mid = (lo + hi) / 2;
        const Scalar fm = eval(origin + mid * dir);
        if (std::abs(fm) <= Scalar(1e-10)) break;
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * (std::abs(lo) + std::abs(hi))) break;
      }
      return Vec3(origin + mid * dir);
    }
    prev_t = t;
    prev_f = f;
  }
  return std::nullopt;
}

// Free-function spellings of the surface queries.
template <class Scalar>
HrbfSurface<Scalar> fit(std::span<const OrientedSample<Scalar>> samples) {
  return HrbfSurface<Scalar>::fit(samples);
}
template <class Scalar>
Scalar eval(const HrbfSurface<Scalar>& s, const Vector3<Scalar>& p) {
  return s.eval(p);
}
template <class Scalar>
Vector3<Scalar> grad(const HrbfSurface<Scalar>& s, const Vector3<Scalar>& p) {
  return s.grad(p);
}
template <class Scalar>
Projection<Scalar> project_surface(const HrbfSurface<Scalar>& s, const Vector3<Scalar>& p,
                                   const ProjectionOptions<Scalar>& options = {}) {
  return s.project(p, options);
}
template <class Scalar>
std::optional<Vector3<Scalar>> ray_root(const HrbfSurface<Scalar>& s, const Vector3<Scalar>& origin,
                                        const Vector3<Scalar>& dir, Scalar t0, Scalar t1) {
  return s.ray_root(origin, dir, t0, t1);
}

}  // namespace dass
