// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Height layers over the atlas, the displaced surface and the error model
// that drives adaptation.
//
// A sketched curve contributes h exp(-25 d^4 / (4 r^4)) where d is the chart
// distance to the curve. Fragments of one stroke act as a single curve (the
// distance is taken to their union) and different strokes add up. A chart also
// sees the curves of its edge neighbours through the transitions, so heights
// agree on both sides of a seam.

#pragma once

#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dass/atlas.hpp"
#include "dass/hrbf.hpp"
#include "dass/layers.hpp"
#include "dass/mesh48.hpp"

namespace dass {

/// Falloff of one curve; exactly 0 once the exponential drops below 1e-30.
double curve_falloff(double height, double radius, double distance);

/// Minimum chart distance from `uv` to any of the curves.
double curve_distance(std::span<const HeightCurve> curves, const Vector2d& uv);

/// Height of one layer seen from its own chart only.
double height_at(const HeightLayer& layer, const Vector2d& uv);

/// Sum of all layers of `chart` at `uv`, including sketched curves of the
/// edge-adjacent charts mapped into this chart.
double composed_height(const Atlas& atlas, ChartId chart, const Vector2d& uv);

/// Central differences of composed_height in chart units.
Vector2d height_gradient(const Atlas& atlas, ChartId chart, const Vector2d& uv, double step = 1e-4);

struct CurveFragment {
  ChartId chart = 0;
  HeightCurve curve;
};

/// Maps a stroke of surface points into the atlas. Segments that change chart
/// get the seam crossing inserted at the end of one fragment and the start of
/// the next; consecutive points in charts that share no edge are bridged with
/// projected midpoints.
std::vector<CurveFragment> transport_stroke(const Atlas& atlas, const Mesh48& m, std::span<const Vector3d> stroke,
                                            const Projector& project, double height, double radius,
                                            std::uint64_t stroke_id);

/// Adds the fragments to the sketched layer of their charts (created on
/// first use).
void add_fragments(Atlas& atlas, std::span<const CurveFragment> fragments);

/// eta in E = eta(|grad h|).
using DetailEta = std::function<double(double)>;
inline double default_eta(double gradient_norm) { return std::max(2.0 * gradient_norm, 1.0); }

/// The coarse surface plus the atlas heights, with the mesh used to locate
/// points in the atlas.
class DisplacedSurface {
 public:
  DisplacedSurface(const HrbfSurfaced& surface, const Mesh48& mesh, const Atlas& atlas,
                   ProjectionOptions<double> projection = {}, DetailEta eta = default_eta);

  const HrbfSurfaced& surface() const { return *surface_; }
  const Mesh48& mesh() const { return *mesh_; }
  const Atlas& atlas() const { return *atlas_; }
  const DetailEta& eta() const { return eta_; }
  const ProjectionOptions<double>& projection() const { return projection_; }

  Vector3d project_surface(const Vector3d& p) const;
  Projector projector() const;
  /// Outward unit normal of the coarse surface.
  Vector3d normal(const Vector3d& p) const;

  /// h_p through the inverse parameterisation.
  double height(const Vector3d& p) const;
  Vector3d displace(const Vector3d& p) const;
  /// Projection onto the coarse surface followed by the displacement.
  Vector3d project_final(const Vector3d& p) const;
  double distance(const Vector3d& p) const;
  double detail_factor(const Vector3d& p) const;
  double local_error(const Vector3d& p) const { return distance(p) * detail_factor(p); }

  /// Height of a mesh vertex, read in its lowest chart.
  double vertex_height(VertexId v) const;
  /// v + h_v N_v: where the vertex is drawn.
  Vector3d displaced_vertex(VertexId v) const;

 private:
  const HrbfSurfaced* surface_;
  const Mesh48* mesh_;
  const Atlas* atlas_;
  ProjectionOptions<double> projection_;
  DetailEta eta_;
};

/// Display positions for every vertex slot (dead slots are left at zero).
std::vector<Vector3d> displaced_positions(const DisplacedSurface& ds);

enum class ErrorKind { Simple, Local };

struct ErrorSettings {
  ErrorKind kind = ErrorKind::Local;
  int samples = 6;
  std::uint64_t seed = 0;
  std::uint64_t generation = 0;
};

/// Stochastic face error. Each sample with barycentric weights w on face f
/// compares the displayed point sum w_k (v_k + h_k N_k) with the final surface
/// over the coarse point: Pi_S(sum w_k v_k) + h(uv) N, where uv = sum w_k v_k^i
/// in the face's chart. The local kind scales each distance by E(uv).
///
/// Samples follow an R2 sequence with a per-face offset drawn from (seed,
/// vertex ids, generation). Results are cached per vertex-creation stamps, so
/// one model must not outlive a change of surface or layers.
class ErrorModel {
 public:
  ErrorModel(const DisplacedSurface& ds, ErrorSettings settings);

  double face_error(const Mesh48& m, const Triangle& t) const;
  double edge_error(const Mesh48& m, Edge e) const;
  double vertex_error(const Mesh48& m, VertexId v) const;
  /// Largest sample error on the face (same samples as face_error).
  double face_max_error(const Mesh48& m, const Triangle& t) const;

  AdaptErrors adapt_errors() const;
  const ErrorSettings& settings() const { return settings_; }

  /// Barycentric sample weights used for a face with these vertex ids.
  std::vector<Vector3d> sample_weights(const Triangle& t) const;

 private:
  struct Key {
    std::uint64_t a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct FaceStats {
    double mean = 0;
    double max = 0;
  };

  FaceStats evaluate(const Mesh48& m, const Triangle& t) const;
  const FaceStats& stats(const Mesh48& m, const Triangle& t) const;
  const Vector3d& displaced(const Mesh48& m, VertexId v) const;

  const DisplacedSurface* ds_;
  ErrorSettings settings_;
  mutable std::unordered_map<Key, FaceStats, KeyHash> cache_;
  mutable std::unordered_map<std::uint64_t, Vector3d> displaced_;
};

}  // namespace dass
