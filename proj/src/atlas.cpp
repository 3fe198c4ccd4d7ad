// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/atlas.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "dass/error.hpp"
#include "dass/geometry.hpp"

namespace dass {

namespace {

const std::array<Vector2d, 4> kCorners{Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1), Vector2d(0, 1)};

// Exact quarter turn counter-clockwise, `turns` times.
Vector2d rotate(const Vector2d& p, int turns) {
  switch (((turns % 4) + 4) % 4) {
    case 1: return {-p.y(), p.x()};
    case 2: return {-p.x(), -p.y()};
    case 3: return {p.y(), -p.x()};
    default: return p;
  }
}

constexpr double kEdgeTol = 1e-12;

}  // namespace

Vector2d Transition::apply(const Vector2d& uv) const { return rotate(uv, quarter_turns) + offset; }

Transition Transition::inverse() const {
  Transition t;
  t.from = to;
  t.to = from;
  t.quarter_turns = (4 - quarter_turns) % 4;
  t.offset = -rotate(offset, t.quarter_turns);
  t.base_edge = base_edge;
  // The shared side in `to` is where side `side` of `from` lands.
  const Vector2d mid = apply(0.5 * (kCorners[side] + kCorners[(side + 1) % 4]));
  for (int k = 0; k < 4; ++k)
    if ((0.5 * (kCorners[k] + kCorners[(k + 1) % 4]) - mid).norm() < 1e-9) t.side = k;
  return t;
}

const Chart& Atlas::chart(ChartId id) const {
  if (id == 0 || id > charts_.size()) throw Error(ErrorCode::InvalidId, "no chart " + std::to_string(id));
  return charts_[id - 1];
}

Chart& Atlas::chart(ChartId id) {
  if (id == 0 || id > charts_.size()) throw Error(ErrorCode::InvalidId, "no chart " + std::to_string(id));
  return charts_[id - 1];
}

std::vector<Transition> Atlas::transitions_between(ChartId from, ChartId to) const {
  std::vector<Transition> out;
  for (const auto& t : transitions_)
    if (t.from == from && t.to == to) out.push_back(t);
  return out;
}

std::vector<ChartId> Atlas::neighbours(ChartId id) const {
  std::vector<ChartId> out;
  for (const auto& t : transitions_)
    if (t.from == id && t.to != id) out.push_back(t.to);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ----------------------------------------------------------------------------

Label face_label(const Mesh48& m, FaceId f) {
  Label label = 0;
  for (VertexId v : m.face(f).v) {
    const Label l = m.vertex(v).label;
    if (l == 0) continue;
    if (label != 0 && l != label)
      throw Error(ErrorCode::NotRegular, "face " + std::to_string(f) + " mixes labels " + std::to_string(label) +
                                             " and " + std::to_string(l));
    label = l;
  }
  if (label == 0) throw Error(ErrorCode::NotRegular, "face " + std::to_string(f) + " has only boundary vertices");
  return label;
}

Label edge_label(const Mesh48& m, Edge e) {
  const Label la = m.vertex(e.a).label;
  const Label lb = m.vertex(e.b).label;
  if (la != 0 && lb != 0 && la != lb)
    throw Error(ErrorCode::NotRegular,
                "edge {" + std::to_string(e.a) + "," + std::to_string(e.b) + "} joins two different charts");
  return la != 0 ? la : lb;
}

RkReport validate_rk(const Mesh48& m) {
  RkReport report;
  for (FaceId f : m.alive_faces()) {
    Label label = 0;
    std::string problem;
    for (VertexId v : m.face(f).v) {
      const Label l = m.vertex(v).label;
      if (l == 0) continue;
      if (label != 0 && l != label) problem = "mixed non-zero labels";
      label = l;
    }
    if (problem.empty() && label == 0) problem = "no non-zero label";
    if (problem.empty()) {
      for (VertexId v : m.face(f).v)
        if (!m.vertex(v).coords_in(label)) problem = "vertex " + std::to_string(v) + " lacks coordinates in its chart";
    }
    if (!problem.empty()) {
      report.ok = false;
      report.face = f;
      report.message = "face " + std::to_string(f) + ": " + problem;
      return report;
    }
  }
  return report;
}

std::vector<std::vector<FaceId>> chart_partition(const Mesh48& m, std::size_t chart_count) {
  std::vector<std::vector<FaceId>> out(chart_count + 1);
  for (FaceId f : m.alive_faces()) {
    const Label l = face_label(m, f);
    if (l > chart_count) throw Error(ErrorCode::NotRegular, "face label beyond chart count");
    out[l].push_back(f);
  }
  return out;
}

// ----------------------------------------------------------------------------

AtlasMesh init_atlas(const BaseMeshPlan& base, const Projector& project) {
  if (base.quads.empty()) throw Error(ErrorCode::InvalidBaseMesh, "base mesh has no faces");
  AtlasMesh out;
  Mesh48& m = out.mesh;

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::size_t, int>> directed;
  for (std::size_t q = 0; q < base.quads.size(); ++q) {
    const auto& quad = base.quads[q];
    for (int k = 0; k < 4; ++k) {
      if (quad[k] >= base.vertices.size())
        throw Error(ErrorCode::InvalidBaseMesh, "quad " + std::to_string(q) + " references a missing vertex");
      for (int l = k + 1; l < 4; ++l)
        if (quad[k] == quad[l]) throw Error(ErrorCode::InvalidBaseMesh, "quad " + std::to_string(q) + " repeats a vertex");
      if (!directed.emplace(std::make_pair(quad[k], quad[(k + 1) % 4]), std::make_pair(q, k)).second)
        throw Error(ErrorCode::InvalidBaseMesh, "edge used twice in the same direction (non-manifold or mis-oriented)");
    }
  }

  for (const auto& p : base.vertices) m.add_vertex(project(p), 0, 0, VertexOrigin::Base);

  for (std::size_t q = 0; q < base.quads.size(); ++q) {
    const auto& quad = base.quads[q];
    const ChartId id = static_cast<ChartId>(q + 1);
    for (int k = 0; k < 4; ++k) m.vertex(quad[k]).set_coords(id, kCorners[k]);

    const Vector3d mid = 0.5 * (m.vertex(quad[0]).position + m.vertex(quad[2]).position);
    const VertexId c = m.add_vertex(project(mid), id, 0, VertexOrigin::ChartCenter);
    auto& vc = m.vertex(c);
    vc.set_coords(id, Vector2d(0.5, 0.5));
    vc.parents = {quad[0], quad[2], kInvalidId, kInvalidId};
    vc.parent_count = 2;
    for (int k = 0; k < 4; ++k) m.add_face(quad[k], quad[(k + 1) % 4], c);

    Chart chart;
    chart.id = id;
    for (int k = 0; k < 4; ++k) chart.corners[k] = quad[k];
    chart.center = c;
    out.atlas.add_chart(std::move(chart));
  }

  // Side k of chart i runs A -> B; the neighbour holds it as B -> A on its
  // side l. Both squares are counter-clockwise, so the map is the rotation
  // taking direction d_k onto -d_l, with d_k = R^k (1, 0).
  for (std::size_t q = 0; q < base.quads.size(); ++q) {
    const auto& quad = base.quads[q];
    for (int k = 0; k < 4; ++k) {
      const std::uint32_t a = quad[k];
      const std::uint32_t b = quad[(k + 1) % 4];
      auto it = directed.find({b, a});
      if (it == directed.end()) continue;  // open boundary
      const auto [r, l] = it->second;
      Transition t;
      t.from = static_cast<ChartId>(q + 1);
      t.to = static_cast<ChartId>(r + 1);
      t.quarter_turns = ((l + 2 - k) % 4 + 4) % 4;
      t.offset = kCorners[(l + 1) % 4] - rotate(kCorners[k], t.quarter_turns);
      t.base_edge = {a, b};
      t.side = k;
      if ((t.apply(kCorners[(k + 1) % 4]) - kCorners[l]).norm() > 1e-12)
        throw Error(ErrorCode::InvalidBaseMesh, "charts " + std::to_string(t.from) + " and " + std::to_string(t.to) +
                                                    " need a reflection to glue");
      out.atlas.add_transition(t);
    }
  }
  return out;
}

AtlasMesh init_atlas(const BaseMeshPlan& base, const HrbfSurfaced& surface) {
  return init_atlas(base, [&surface](const Vector3d& p) { return surface.project_onto(p); });
}

// ----------------------------------------------------------------------------

std::optional<std::pair<FaceId, Vector3d>> locate_in_chart(const Mesh48& m, ChartId chart, const Vector2d& uv) {
  for (FaceId f = 0; f < m.face_capacity(); ++f) {
    if (!m.face_alive(f)) continue;
    const auto& t = m.face(f).v;
    bool in_chart = false;
    for (VertexId v : t)
      if (m.vertex(v).label == chart) in_chart = true;
    if (!in_chart) continue;
    const Vector2d* a = m.vertex(t[0]).coords_in(chart);
    const Vector2d* b = m.vertex(t[1]).coords_in(chart);
    const Vector2d* c = m.vertex(t[2]).coords_in(chart);
    if (!a || !b || !c) continue;
    const auto w = barycentric_2d<double>(uv, *a, *b, *c);
    if (!w) continue;
    if ((*w).minCoeff() < -kEdgeTol) continue;
    return std::make_pair(f, *w);
  }
  return std::nullopt;
}

Vector3d phi(const Atlas& atlas, const Mesh48& m, ChartId chart, const Vector2d& uv, const Projector& project) {
  atlas.chart(chart);
  if (!(uv.x() >= -kEdgeTol && uv.x() <= 1 + kEdgeTol && uv.y() >= -kEdgeTol && uv.y() <= 1 + kEdgeTol))
    throw Error(ErrorCode::UvOutsideChart, "(" + std::to_string(uv.x()) + ", " + std::to_string(uv.y()) +
                                               ") is outside chart " + std::to_string(chart));
  const auto hit = locate_in_chart(m, chart, uv);
  if (!hit) throw Error(ErrorCode::UvOutsideChart, "no face of chart " + std::to_string(chart) + " contains the point");
  const auto& t = m.face(hit->first).v;
  const Vector3d& w = hit->second;
  for (int k = 0; k < 3; ++k)
    if (w[k] == 1.0) return project(m.vertex(t[k]).position);
  const Vector3d p = w[0] * m.vertex(t[0]).position + w[1] * m.vertex(t[1]).position + w[2] * m.vertex(t[2]).position;
  return project(p);
}

namespace {

ChartPoint chart_point(const Mesh48& m, const MeshHit& hit) {
  if (hit.face == kInvalidId) throw Error(ErrorCode::InvalidId, "empty mesh");
  ChartPoint out;
  out.face = hit.face;
  out.chart = face_label(m, hit.face);
  const auto& t = m.face(hit.face).v;
  Vector2d uv = Vector2d::Zero();
  for (int k = 0; k < 3; ++k) uv += hit.weights[k] * *m.vertex(t[k]).coords_in(out.chart);
  out.uv = uv.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

}  // namespace

ChartPoint phi_inv(const Atlas& atlas, const Mesh48& m, const Vector3d& p) {
  (void)atlas;
  return chart_point(m, project_mesh(m, p));
}

ChartPoint phi_inv(const Atlas& atlas, const Mesh48& m, const Vector3d& p, const Projector& project) {
  (void)atlas;
  MeshHit hit = project_mesh(m, p);
  if (!project || hit.face == kInvalidId) return chart_point(m, hit);
  // Fixed point of x <- Pi_M(x + p - project(x)); the map is close to the
  // identity along the mesh, so a few steps reach round-off.
  double residual = (project(hit.point) - p).norm();
  const double floor = 1e-14 * (1 + p.norm());
  for (int it = 0; it < 30 && residual > floor; ++it) {
    const MeshHit next = project_mesh(m, hit.point + (p - project(hit.point)));
    const double r = (project(next.point) - p).norm();
    if (!(r < residual)) break;
    hit = next;
    residual = r;
  }
  return chart_point(m, hit);
}

Vector2d transfer(const Atlas& atlas, const Vector2d& uv, ChartId from, ChartId to) {
  if (from == to) return uv;
  const auto candidates = atlas.transitions_between(from, to);
  if (candidates.empty())
    throw Error(ErrorCode::NotAdjacent, "charts " + std::to_string(from) + " and " + std::to_string(to) +
                                            " share no base edge");
  const Transition* best = &candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& t : candidates) {
    const double d = point_segment_distance<double, 2>(uv, kCorners[t.side], kCorners[(t.side + 1) % 4]);
    if (d < best_d) {
      best_d = d;
      best = &t;
    }
  }
  return best->apply(uv);
}

}  // namespace dass
