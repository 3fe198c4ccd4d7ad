// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Regular k-labelled meshes and the chart atlas they induce.
//
// Labels live on mesh vertices: 0 marks a boundary vertex, i > 0 an inner
// vertex of chart i. A face belongs to chart i when one of its vertices has
// label i; the mesh is regular when every face has a non-zero label and all
// of its non-zero labels agree. Each chart is the unit square with the four
// corners of one base quad at (0,0), (1,0), (1,1), (0,1); vertices carry
// their coordinates in every chart they touch.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dass/basemesh.hpp"
#include "dass/hrbf.hpp"
#include "dass/layers.hpp"
#include "dass/mesh48.hpp"

namespace dass {

/// Square symmetry plus translation taking coordinates of chart `from` to
/// coordinates of the adjacent chart `to` across the shared base edge.
struct Transition {
  ChartId from = 0;
  ChartId to = 0;
  int quarter_turns = 0;
  Vector2d offset = Vector2d::Zero();
  Edge base_edge;
  /// Side of `from` holding the shared edge: side k joins corners k and k+1.
  int side = 0;

  Vector2d apply(const Vector2d& uv) const;
  Transition inverse() const;
};

struct Chart {
  ChartId id = 0;
  std::array<VertexId, 4> corners{};
  VertexId center = kInvalidId;
  std::vector<HeightLayer> layers;
};

class Atlas {
 public:
  std::size_t chart_count() const { return charts_.size(); }
  const Chart& chart(ChartId id) const;
  Chart& chart(ChartId id);
  const std::vector<Chart>& charts() const { return charts_; }

  const std::vector<Transition>& transitions() const { return transitions_; }
  /// Transitions from `from` to `to` (more than one when the charts share
  /// several base edges).
  std::vector<Transition> transitions_between(ChartId from, ChartId to) const;
  std::vector<ChartId> neighbours(ChartId id) const;

  void add_chart(Chart chart) { charts_.push_back(std::move(chart)); }
  void add_transition(const Transition& t) { transitions_.push_back(t); }

 private:
  std::vector<Chart> charts_;
  std::vector<Transition> transitions_;
};

struct AtlasMesh {
  Mesh48 mesh;
  Atlas atlas;
};

/// Builds M0. Base vertices are projected and labelled 0. Each quad is cut
/// along the diagonal from corner 0 to corner 2 and that diagonal is split at once: the new
/// vertex carries a fresh chart label and coordinates (1/2, 1/2), leaving four
/// triangles per quad with the quad sides as refinement edges.
AtlasMesh init_atlas(const BaseMeshPlan& base, const Projector& project);
AtlasMesh init_atlas(const BaseMeshPlan& base, const HrbfSurfaced& surface);

struct RkReport {
  bool ok = true;
  FaceId face = kInvalidId;
  std::string message;
};

RkReport validate_rk(const Mesh48& m);

/// The unique non-zero label of the face. Throws NotRegular otherwise.
Label face_label(const Mesh48& m, FaceId f);
/// The non-zero label among the endpoints, or 0 for a boundary edge.
Label edge_label(const Mesh48& m, Edge e);

/// Faces of each chart; index 0 is unused.
std::vector<std::vector<FaceId>> chart_partition(const Mesh48& m, std::size_t chart_count);

struct ChartPoint {
  ChartId chart = 0;
  Vector2d uv = Vector2d::Zero();
  FaceId face = kInvalidId;
};

/// Chart face containing `uv` (edge tolerance 1e-12), lowest face id first.
std::optional<std::pair<FaceId, Vector3d>> locate_in_chart(const Mesh48& m, ChartId chart, const Vector2d& uv);

/// Convex combination of the containing face's corners, then projected.
Vector3d phi(const Atlas& atlas, const Mesh48& m, ChartId chart, const Vector2d& uv, const Projector& project);

/// Projects onto the mesh and maps the hit barycentrically into its chart.
ChartPoint phi_inv(const Atlas& atlas, const Mesh48& m, const Vector3d& p);
/// Same, but searches the mesh point whose projection lands on `p`, so that
/// phi(phi_inv(p)) = p for points of the surface.
ChartPoint phi_inv(const Atlas& atlas, const Mesh48& m, const Vector3d& p, const Projector& project);

/// Coordinates of `uv` (chart `from`) in the adjacent chart `to`. When the
/// charts share several edges the transition of the nearest edge is used.
Vector2d transfer(const Atlas& atlas, const Vector2d& uv, ChartId from, ChartId to);

}  // namespace dass
