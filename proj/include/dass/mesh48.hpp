// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Semi-regular 4-8 triangle mesh driven by stellar operators.
//
// Every face stores its corners as (v0, v1, v2) in counter-clockwise order
// with v2 the newest vertex; (v0, v1) is the refinement edge. Splitting the
// refinement edge of a face with apex c at midpoint m yields (c, v0, m) and
// (v1, c, m), which is newest-vertex bisection: two bisections of a
// right-isosceles pair reproduce the 4-8 hierarchy.
//
// An edge split is legal when the edge is the refinement edge of each face
// that contains it (a "diamond"). Face splits are legal on any face that was
// not itself produced by a face split. A weld is legal when the vertex star is
// exactly the set of faces its split created, so welds only ever remove the
// newest level of a local hierarchy.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dass/types.hpp"

namespace dass {

struct ChartCoord {
  ChartId chart;
  Vector2d uv;
};

enum class VertexOrigin : std::uint8_t { Base, ChartCenter, EdgeSplit, FaceSplit };
enum class FaceOrigin : std::uint8_t { Base, EdgeChild, FaceChild };

struct Edge {
  VertexId a = kInvalidId;
  VertexId b = kInvalidId;

  friend bool operator==(const Edge& x, const Edge& y) {
    return (x.a == y.a && x.b == y.b) || (x.a == y.b && x.b == y.a);
  }
};

using Triangle = std::array<VertexId, 3>;

struct Face48 {
  Triangle v{kInvalidId, kInvalidId, kInvalidId};
  FaceOrigin origin = FaceOrigin::Base;
  bool alive = false;

  Edge refinement_edge() const { return {v[0], v[1]}; }
  VertexId apex() const { return v[2]; }
};

/// What a split replaced, so the matching weld can restore it exactly.
struct SplitRecord {
  std::array<Triangle, 2> parents{};
  std::array<FaceOrigin, 2> parent_origins{};
  std::uint8_t parent_count = 0;
  std::array<FaceId, 4> children{};
  std::array<Triangle, 4> child_faces{};
  std::uint8_t child_count = 0;
};

struct Vertex48 {
  Vector3d position = Vector3d::Zero();
  int level = 0;
  Label label = 0;
  /// Sorted by chart id; a boundary vertex has one entry per incident chart.
  std::vector<ChartCoord> chart_coords;
  VertexOrigin origin = VertexOrigin::Base;
  /// Vertices the position is sampled from (split edge, split face or the
  /// corners of a base quad).
  std::array<VertexId, 4> parents{kInvalidId, kInvalidId, kInvalidId, kInvalidId};
  std::uint8_t parent_count = 0;
  SplitRecord split;
  /// Unique per creation; ids are recycled, stamps are not.
  std::uint64_t stamp = 0;
  bool alive = false;

  const Vector2d* coords_in(ChartId chart) const {
    for (const auto& c : chart_coords)
      if (c.chart == chart) return &c.uv;
    return nullptr;
  }
  void set_coords(ChartId chart, const Vector2d& uv);
};

struct MeshHit {
  FaceId face = kInvalidId;
  /// Weights of the face corners in stored order.
  Vector3d weights = Vector3d::Zero();
  Vector3d point = Vector3d::Zero();
  double distance = 0;
};

/// Maps a sampled point (edge midpoint or face centroid) to its final
/// location, typically the projection onto the implicit surface.
using Projector = std::function<Vector3d(const Vector3d&)>;

inline Vector3d identity_projector(const Vector3d& p) { return p; }

class Mesh48 {
 public:
  Mesh48() = default;

  // Construction (base meshes and M0).
  VertexId add_vertex(const Vector3d& position, Label label = 0, int level = 0,
                      VertexOrigin origin = VertexOrigin::Base);
  /// (a, b, c) counter-clockwise with c the apex; (a, b) is the refinement edge.
  FaceId add_face(VertexId a, VertexId b, VertexId c);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t face_count() const { return face_count_; }
  std::size_t vertex_capacity() const { return vertices_.size(); }
  std::size_t face_capacity() const { return faces_.size(); }

  bool vertex_alive(VertexId v) const { return v < vertices_.size() && vertices_[v].alive; }
  bool face_alive(FaceId f) const { return f < faces_.size() && faces_[f].alive; }

  const Vertex48& vertex(VertexId v) const { return vertices_[v]; }
  Vertex48& vertex(VertexId v) { return vertices_[v]; }
  const Face48& face(FaceId f) const { return faces_[f]; }

  std::vector<VertexId> alive_vertices() const;
  std::vector<FaceId> alive_faces() const;

  /// Faces incident to `v`, unordered.
  const std::vector<FaceId>& star(VertexId v) const { return stars_[v]; }
  /// The one or two faces that contain edge {a, b}, lowest id first.
  std::vector<FaceId> faces_of_edge(Edge e) const;

  int face_level(FaceId f) const;
  int max_level() const;

  // Stellar operators.
  bool can_split_edge(Edge e) const;
  VertexId edge_split(Edge e, const Projector& project = identity_projector);
  bool can_split_face(FaceId f) const;
  VertexId face_split(FaceId f, const Projector& project = identity_projector);
  bool can_weld(VertexId v) const;
  void edge_weld(VertexId v);
  void face_weld(VertexId v);
  /// Inverse of whichever split created `v`.
  void weld(VertexId v);

  /// Splits `e`, first splitting coarser neighbours until `e` is a diamond.
  /// Returns the new vertex; `splits` accumulates every split performed.
  VertexId refine_edge(Edge e, const Projector& project, int* splits = nullptr);

  /// Bumped on every topological change.
  std::uint64_t revision() const { return revision_; }

  /// Position of a vertex created by a split, recomputed from its parents.
  Vector3d resample(VertexId v, const Projector& project) const;

 private:
  FaceId alloc_face(const Triangle& t, FaceOrigin origin);
  void set_face(FaceId f, const Triangle& t, FaceOrigin origin);
  void release_face(FaceId f);
  VertexId alloc_vertex();
  void unlink(FaceId f);
  void link(FaceId f);
  void check_edge(Edge e) const;

  std::vector<Vertex48> vertices_;
  std::vector<Face48> faces_;
  std::vector<std::vector<FaceId>> stars_;
  std::vector<VertexId> free_vertices_;
  std::vector<FaceId> free_faces_;
  std::size_t vertex_count_ = 0;
  std::size_t face_count_ = 0;
  std::uint64_t revision_ = 0;
  std::uint64_t next_stamp_ = 1;
};

/// Chi = V - E + F over the alive elements.
long euler_characteristic(const Mesh48& m);

/// Empty when every edge has one or two consistently oriented faces and every
/// vertex star is a single fan; otherwise a description of the first defect.
std::optional<std::string> check_manifold(const Mesh48& m);

/// Number of boundary edges (edges with a single face).
std::size_t boundary_edge_count(const Mesh48& m);

/// Midpoint of `e` mapped through `project` (the edge sampler).
Vector3d sample_edge(const Mesh48& m, Edge e, const Projector& project);

/// Closest point on the mesh. Ties resolve to the lowest face id.
MeshHit project_mesh(const Mesh48& m, const Vector3d& p);

// --- adaptation -------------------------------------------------------------

using EdgeErrorFn = std::function<double(const Mesh48&, Edge)>;
using VertexErrorFn = std::function<double(const Mesh48&, VertexId)>;
using FaceErrorFn = std::function<double(const Mesh48&, const Triangle&)>;

struct AdaptErrors {
  EdgeErrorFn edge;
  VertexErrorFn vertex;
  /// Error of the edge a weld would restore; a weld only happens when this is
  /// at most epsilon, so the next refine sweep does not undo it. Optional.
  VertexErrorFn restored_edge;
};

/// Edge error = mean of its faces, vertex error = mean of its star, both built
/// from a per-triangle error.
AdaptErrors errors_from_face_error(FaceErrorFn face_error);

struct AdaptPassStats {
  int splits = 0;
  int welds = 0;
  std::size_t vertices = 0;
};

struct AdaptResult {
  int passes = 0;
  int splits = 0;
  int welds = 0;
  std::vector<AdaptPassStats> per_pass;

  int operations() const { return splits + welds; }
};

struct AdaptOptions {
  double epsilon = 1e-3;
  int max_passes = 20;
  /// Splits that would create a vertex deeper than this are skipped.
  int max_level = 40;
};

/// One refine sweep (split every face's refinement edge whose error exceeds
/// epsilon) followed by one simplify sweep (weld every legal vertex whose
/// error is below epsilon), repeated until a pass changes nothing.
AdaptResult adapt(Mesh48& m, const AdaptErrors& errors, const AdaptOptions& options,
                  const Projector& project = identity_projector);

/// Splits the refinement edge of every current face once.
int refine_uniform(Mesh48& m, const Projector& project = identity_projector);
/// Welds every weldable vertex of the deepest level.
int simplify_uniform(Mesh48& m);

}  // namespace dass
