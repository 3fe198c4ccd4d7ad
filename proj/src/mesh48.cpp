// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/mesh48.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "dass/atlas.hpp"
#include "dass/error.hpp"
#include "dass/geometry.hpp"

namespace dass {

namespace {

bool same_triangle(const Triangle& x, const Triangle& y) {
  for (int r = 0; r < 3; ++r)
    if (x[0] == y[r] && x[1] == y[(r + 1) % 3] && x[2] == y[(r + 2) % 3]) return true;
  return false;
}

bool has_edge(const Triangle& t, Edge e) {
  for (int k = 0; k < 3; ++k)
    if (Edge{t[k], t[(k + 1) % 3]} == e) return true;
  return false;
}

std::string edge_name(Edge e) { return "{" + std::to_string(e.a) + "," + std::to_string(e.b) + "}"; }

// Chart coordinates of a point sampled at the average of `parents`, one entry
// per chart in which every parent has coordinates and which is listed in
// `charts`.
std::vector<ChartCoord> average_coords(const Mesh48& m, std::span<const VertexId> parents,
                                       std::span<const ChartId> charts) {
  std::vector<ChartCoord> out;
  for (ChartId c : charts) {
    if (std::any_of(out.begin(), out.end(), [&](const ChartCoord& x) { return x.chart == c; })) continue;
    Vector2d sum = Vector2d::Zero();
    bool complete = true;
    for (VertexId p : parents) {
      const Vector2d* uv = m.vertex(p).coords_in(c);
      if (!uv) {
        complete = false;
        break;
      }
      sum += *uv;
    }
    if (!complete) continue;
    // Exact for two parents: (u1 + u2) / 2.
    out.push_back({c, sum / static_cast<double>(parents.size())});
  }
  std::sort(out.begin(), out.end(), [](const ChartCoord& x, const ChartCoord& y) { return x.chart < y.chart; });
  return out;
}

}  // namespace

void Vertex48::set_coords(ChartId chart, const Vector2d& uv) {
  for (auto& c : chart_coords) {
    if (c.chart == chart) {
      c.uv = uv;
      return;
    }
  }
  chart_coords.push_back({chart, uv});
  std::sort(chart_coords.begin(), chart_coords.end(),
            [](const ChartCoord& x, const ChartCoord& y) { return x.chart < y.chart; });
}

VertexId Mesh48::alloc_vertex() {
  VertexId v;
  if (!free_vertices_.empty()) {
    v = free_vertices_.back();
    free_vertices_.pop_back();
    vertices_[v] = Vertex48{};
  } else {
    v = static_cast<VertexId>(vertices_.size());
    vertices_.emplace_back();
    stars_.emplace_back();
  }
  vertices_[v].alive = true;
  vertices_[v].stamp = next_stamp_++;
  ++vertex_count_;
  return v;
}

VertexId Mesh48::add_vertex(const Vector3d& position, Label label, int level, VertexOrigin origin) {
  const VertexId v = alloc_vertex();
  auto& vx = vertices_[v];
  vx.position = position;
  vx.label = label;
  vx.level = level;
  vx.origin = origin;
  ++revision_;
  return v;
}

void Mesh48::link(FaceId f) {
  for (VertexId v : faces_[f].v) stars_[v].push_back(f);
}

void Mesh48::unlink(FaceId f) {
  for (VertexId v : faces_[f].v) {
    auto& s = stars_[v];
    s.erase(std::find(s.begin(), s.end(), f));
  }
}

FaceId Mesh48::alloc_face(const Triangle& t, FaceOrigin origin) {
  FaceId f;
  if (!free_faces_.empty()) {
    f = free_faces_.back();
    free_faces_.pop_back();
  } else {
    f = static_cast<FaceId>(faces_.size());
    faces_.emplace_back();
  }
  faces_[f] = Face48{t, origin, true};
  link(f);
  ++face_count_;
  return f;
}

void Mesh48::set_face(FaceId f, const Triangle& t, FaceOrigin origin) {
  unlink(f);
  faces_[f].v = t;
  faces_[f].origin = origin;
  link(f);
}

void Mesh48::release_face(FaceId f) {
  unlink(f);
  faces_[f].alive = false;
  free_faces_.push_back(f);
  --face_count_;
}

FaceId Mesh48::add_face(VertexId a, VertexId b, VertexId c) {
  for (VertexId v : {a, b, c})
    if (!vertex_alive(v)) throw Error(ErrorCode::InvalidId, "face references unknown vertex " + std::to_string(v));
  if (a == b || b == c || a == c) throw Error(ErrorCode::InvalidBaseMesh, "face with repeated vertex");
  ++revision_;
  return alloc_face({a, b, c}, FaceOrigin::Base);
}

std::vector<VertexId> Mesh48::alive_vertices() const {
  std::vector<VertexId> out;
  out.reserve(vertex_count_);
  for (VertexId v = 0; v < vertices_.size(); ++v)
    if (vertices_[v].alive) out.push_back(v);
  return out;
}

std::vector<FaceId> Mesh48::alive_faces() const {
  std::vector<FaceId> out;
  out.reserve(face_count_);
  for (FaceId f = 0; f < faces_.size(); ++f)
    if (faces_[f].alive) out.push_back(f);
  return out;
}

std::vector<FaceId> Mesh48::faces_of_edge(Edge e) const {
  std::vector<FaceId> out;
  if (!vertex_alive(e.a) || !vertex_alive(e.b)) return out;
  for (FaceId f : stars_[e.a])
    if (has_edge(faces_[f].v, e)) out.push_back(f);
  std::sort(out.begin(), out.end());
  return out;
}

int Mesh48::face_level(FaceId f) const {
  int level = 0;
  for (VertexId v : faces_[f].v) level = std::max(level, vertices_[v].level);
  return level;
}

int Mesh48::max_level() const {
  int level = 0;
  for (const auto& v : vertices_)
    if (v.alive) level = std::max(level, v.level);
  return level;
}

void Mesh48::check_edge(Edge e) const {
  if (!vertex_alive(e.a) || !vertex_alive(e.b) || e.a == e.b)
    throw Error(ErrorCode::InvalidId, "no such edge " + edge_name(e));
}

bool Mesh48::can_split_edge(Edge e) const {
  if (!vertex_alive(e.a) || !vertex_alive(e.b) || e.a == e.b) return false;
  const auto faces = faces_of_edge(e);
  if (faces.empty() || faces.size() > 2) return false;
  for (FaceId f : faces)
    if (!(faces_[f].refinement_edge() == e)) return false;
  return true;
}

VertexId Mesh48::edge_split(Edge e, const Projector& project) {
  check_edge(e);
  if (!can_split_edge(e))
    throw Error(ErrorCode::IllegalSplit, "edge " + edge_name(e) + " is not a refinement edge of all its faces");
  const auto faces = faces_of_edge(e);

  const Label label = edge_label(*this, e);
  std::vector<ChartId> charts;
  if (label != 0) {
    charts.push_back(label);
  } else {
    for (FaceId f : faces) {
      const Label fl = face_label(*this, f);
      if (fl != 0) charts.push_back(fl);
    }
  }
  int level = 0;
  for (FaceId f : faces) level = std::max(level, face_level(f));

  const VertexId ends[2] = {e.a, e.b};
  auto coords = average_coords(*this, ends, charts);
  const Vector3d pos = project(0.5 * (vertices_[e.a].position + vertices_[e.b].position));

  const VertexId m = alloc_vertex();
  auto& vm = vertices_[m];
  vm.position = pos;
  vm.level = level + 1;
  vm.label = label;
  vm.chart_coords = std::move(coords);
  vm.origin = VertexOrigin::EdgeSplit;
  vm.parents = {e.a, e.b, kInvalidId, kInvalidId};
  vm.parent_count = 2;

  SplitRecord rec;
  rec.parent_count = static_cast<std::uint8_t>(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const FaceId f = faces[k];
    const Triangle t = faces_[f].v;  // (a, b, c) with refinement edge (a, b)
    rec.parents[k] = t;
    rec.parent_origins[k] = faces_[f].origin;
    const Triangle first{t[2], t[0], m};
    const Triangle second{t[1], t[2], m};
    set_face(f, first, FaceOrigin::EdgeChild);
    const FaceId g = alloc_face(second, FaceOrigin::EdgeChild);
    rec.children[rec.child_count] = f;
    rec.child_faces[rec.child_count++] = first;
    rec.children[rec.child_count] = g;
    rec.child_faces[rec.child_count++] = second;
  }
  vertices_[m].split = rec;
  ++revision_;
  return m;
}

bool Mesh48::can_split_face(FaceId f) const {
  return face_alive(f) && faces_[f].origin != FaceOrigin::FaceChild;
}

VertexId Mesh48::face_split(FaceId f, const Projector& project) {
  if (!face_alive(f)) throw Error(ErrorCode::InvalidId, "no such face " + std::to_string(f));
  if (!can_split_face(f)) throw Error(ErrorCode::IllegalSplit, "face " + std::to_string(f) + " was created by a face split");
  const Triangle t = faces_[f].v;
  const Label label = face_label(*this, f);
  const ChartId charts[1] = {label};
  auto coords = average_coords(*this, t, charts);
  const Vector3d pos =
      project((vertices_[t[0]].position + vertices_[t[1]].position + vertices_[t[2]].position) / 3.0);
  const int level = face_level(f) + 1;

  const VertexId n = alloc_vertex();
  auto& vn = vertices_[n];
  vn.position = pos;
  vn.level = level;
  vn.label = label;
  vn.chart_coords = std::move(coords);
  vn.origin = VertexOrigin::FaceSplit;
  vn.parents = {t[0], t[1], t[2], kInvalidId};
  vn.parent_count = 3;

  SplitRecord rec;
  rec.parent_count = 1;
  rec.parents[0] = t;
  rec.parent_origins[0] = faces_[f].origin;
  const std::array<Triangle, 3> kids{Triangle{t[0], t[1], n}, Triangle{t[1], t[2], n}, Triangle{t[2], t[0], n}};
  set_face(f, kids[0], FaceOrigin::FaceChild);
  rec.children[0] = f;
  rec.child_faces[0] = kids[0];
  for (int k = 1; k < 3; ++k) {
    rec.children[k] = alloc_face(kids[k], FaceOrigin::FaceChild);
    rec.child_faces[k] = kids[k];
  }
  rec.child_count = 3;
  vertices_[n].split = rec;
  ++revision_;
  return n;
}

bool Mesh48::can_weld(VertexId v) const {
  if (!vertex_alive(v)) return false;
  const auto& vx = vertices_[v];
  if (vx.origin != VertexOrigin::EdgeSplit && vx.origin != VertexOrigin::FaceSplit) return false;
  const auto& rec = vx.split;
  if (stars_[v].size() != rec.child_count) return false;
  for (int k = 0; k < rec.child_count; ++k) {
    const FaceId f = rec.children[k];
    if (!face_alive(f) || !same_triangle(faces_[f].v, rec.child_faces[k])) return false;
  }
  return true;
}

void Mesh48::weld(VertexId v) {
  if (!can_weld(v)) {
    std::string why = vertex_alive(v) && (vertices_[v].origin == VertexOrigin::Base ||
                                          vertices_[v].origin == VertexOrigin::ChartCenter)
                          ? "base-level vertices are permanent"
                          : "star is not the set of faces its split created";
    throw Error(ErrorCode::NotWeldable, "vertex " + std::to_string(v) + ": " + why);
  }
  const SplitRecord rec = vertices_[v].split;
  if (rec.parent_count == 1) {
    // face weld: children occupy (parent slot, new, new)
    release_face(rec.children[2]);
    release_face(rec.children[1]);
    set_face(rec.children[0], rec.parents[0], rec.parent_origins[0]);
  } else {
    // edge weld: children per parent are (parent slot, new)
    for (int k = rec.parent_count - 1; k >= 0; --k) {
      release_face(rec.children[2 * k + 1]);
      set_face(rec.children[2 * k], rec.parents[k], rec.parent_origins[k]);
    }
  }
  vertices_[v].alive = false;
  vertices_[v].chart_coords.clear();
  free_vertices_.push_back(v);
  --vertex_count_;
  ++revision_;
}

void Mesh48::edge_weld(VertexId v) {
  if (vertex_alive(v) && vertices_[v].origin != VertexOrigin::EdgeSplit)
    throw Error(ErrorCode::NotWeldable, "vertex " + std::to_string(v) + " was not created by an edge split");
  weld(v);
}

void Mesh48::face_weld(VertexId v) {
  if (vertex_alive(v) && vertices_[v].origin != VertexOrigin::FaceSplit)
    throw Error(ErrorCode::NotWeldable, "vertex " + std::to_string(v) + " was not created by a face split");
  weld(v);
}

VertexId Mesh48::refine_edge(Edge e, const Projector& project, int* splits) {
  check_edge(e);
  // Newest-vertex bisection: splitting a neighbour's refinement edge turns
  // `e` into the refinement edge of one of its children, and neighbours are
  // strictly coarser, so the recursion is bounded by the level count.
  std::vector<Edge> stack{e};
  while (!stack.empty()) {
    if (stack.size() > 128) throw Error(ErrorCode::IllegalSplit, "forced split recursion too deep at " + edge_name(e));
    const Edge cur = stack.back();
    const auto faces = faces_of_edge(cur);
    if (faces.empty()) throw Error(ErrorCode::InvalidId, "no such edge " + edge_name(cur));
    bool ready = true;
    for (FaceId f : faces) {
      const Edge ref = faces_[f].refinement_edge();
      if (!(ref == cur)) {
        stack.push_back(ref);
        ready = false;
        break;
      }
    }
    if (!ready) continue;
    const VertexId m = edge_split(cur, project);
    if (splits) ++*splits;
    stack.pop_back();
    if (stack.empty()) return m;
  }
  return kInvalidId;
}

Vector3d Mesh48::resample(VertexId v, const Projector& project) const {
  const auto& vx = vertices_[v];
  if (vx.origin == VertexOrigin::Base) return project(vx.position);
  Vector3d sum = Vector3d::Zero();
  for (int k = 0; k < vx.parent_count; ++k) sum += vertices_[vx.parents[k]].position;
  if (vx.parent_count == 2) return project(0.5 * sum);
  return project(sum / static_cast<double>(vx.parent_count));
}

// ----------------------------------------------------------------------------

long euler_characteristic(const Mesh48& m) {
  std::size_t edges = 0;
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    for (int k = 0; k < 3; ++k) {
      const Edge e{t[k], t[(k + 1) % 3]};
      const auto faces = m.faces_of_edge(e);
      // count each edge once, from its lowest-id face
      if (faces.front() == f) ++edges;
    }
  }
  return static_cast<long>(m.vertex_count()) - static_cast<long>(edges) + static_cast<long>(m.face_count());
}

std::size_t boundary_edge_count(const Mesh48& m) {
  std::size_t count = 0;
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    for (int k = 0; k < 3; ++k)
      if (m.faces_of_edge({t[k], t[(k + 1) % 3]}).size() == 1) ++count;
  }
  return count;
}

std::optional<std::string> check_manifold(const Mesh48& m) {
  std::map<std::pair<VertexId, VertexId>, int> directed;
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return "face " + std::to_string(f) + " has repeated vertices";
    for (int k = 0; k < 3; ++k) {
      if (!m.vertex_alive(t[k])) return "face " + std::to_string(f) + " references a dead vertex";
      if (++directed[{t[k], t[(k + 1) % 3]}] > 1)
        return "directed edge (" + std::to_string(t[k]) + "," + std::to_string(t[(k + 1) % 3]) +
               ") used twice: inconsistent orientation or non-manifold edge";
    }
  }
  for (VertexId v : m.alive_vertices()) {
    const auto& star = m.star(v);
    if (star.empty()) return "isolated vertex " + std::to_string(v);
    // Walk the fan: each face contributes the wedge (next, prev) around v.
    std::unordered_map<VertexId, VertexId> next;
    std::unordered_map<VertexId, int> in_degree;
    for (FaceId f : star) {
      const auto& t = m.face(f).v;
      int k = 0;
      while (t[k] != v) ++k;
      const VertexId out = t[(k + 1) % 3];
      const VertexId in = t[(k + 2) % 3];
      if (next.count(out)) return "vertex " + std::to_string(v) + " has a non-manifold fan";
      next[out] = in;
      ++in_degree[in];
    }
    VertexId start = next.begin()->first;
    for (const auto& [from, to] : next)
      if (!in_degree.count(from)) start = from;  // open fan starts at its free end
    std::size_t visited = 0;
    VertexId cur = start;
    while (visited <= star.size()) {
      auto it = next.find(cur);
      if (it == next.end()) break;
      ++visited;
      cur = it->second;
      if (cur == start) break;
    }
    if (visited != star.size()) return "vertex " + std::to_string(v) + " star is not a single fan";
  }
  return std::nullopt;
}

Vector3d sample_edge(const Mesh48& m, Edge e, const Projector& project) {
  return project(0.5 * (m.vertex(e.a).position + m.vertex(e.b).position));
}

MeshHit project_mesh(const Mesh48& m, const Vector3d& p) {
  MeshHit best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (FaceId f = 0; f < m.face_capacity(); ++f) {
    if (!m.face_alive(f)) continue;
    const auto& t = m.face(f).v;
    const auto& a = m.vertex(t[0]).position;
    const auto& b = m.vertex(t[1]).position;
    const auto& c = m.vertex(t[2]).position;
    // Cheap reject on the sphere bound before the exact query.
    const Vector3d centre = (a + b + c) / 3.0;
    const double rad = std::sqrt(std::max({(a - centre).squaredNorm(), (b - centre).squaredNorm(),
                                           (c - centre).squaredNorm()}));
    const double lower = (p - centre).norm() - rad;
    if (lower > 0 && lower * lower > best_d2) continue;
    const auto cp = closest_point_on_triangle<double>(p, a, b, c);
    const double d2 = (p - cp.point).squaredNorm();
    if (d2 < best_d2 * (1.0 - 1e-12)) {
      best_d2 = d2;
      best.face = f;
      best.weights = cp.weights;
      best.point = cp.point;
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

// ----------------------------------------------------------------------------

AdaptErrors errors_from_face_error(FaceErrorFn face_error) {
  AdaptErrors out;
  out.edge = [face_error](const Mesh48& m, Edge e) {
    const auto faces = m.faces_of_edge(e);
    double sum = 0;
    for (FaceId f : faces) sum += face_error(m, m.face(f).v);
    return faces.empty() ? 0.0 : sum / static_cast<double>(faces.size());
  };
  out.vertex = [face_error](const Mesh48& m, VertexId v) {
    const auto& star = m.star(v);
    double sum = 0;
    for (FaceId f : star) sum += face_error(m, m.face(f).v);
    return star.empty() ? 0.0 : sum / static_cast<double>(star.size());
  };
  out.restored_edge = [face_error](const Mesh48& m, VertexId v) {
    const auto& rec = m.vertex(v).split;
    double sum = 0;
    for (int k = 0; k < rec.parent_count; ++k) sum += face_error(m, rec.parents[k]);
    return rec.parent_count ? sum / rec.parent_count : 0.0;
  };
  return out;
}

AdaptResult adapt(Mesh48& m, const AdaptErrors& errors, const AdaptOptions& options, const Projector& project) {
  AdaptResult result;
  for (int pass = 0; pass < options.max_passes; ++pass) {
    AdaptPassStats stats;

    for (FaceId f : m.alive_faces()) {
      if (!m.face_alive(f)) continue;
      if (m.face_level(f) + 1 > options.max_level) continue;
      const Edge e = m.face(f).refinement_edge();
      if (!(errors.edge(m, e) > options.epsilon)) continue;
      m.refine_edge(e, project, &stats.splits);
    }

    std::vector<VertexId> candidates;
    for (VertexId v : m.alive_vertices()) {
      const auto origin = m.vertex(v).origin;
      if (origin == VertexOrigin::EdgeSplit || origin == VertexOrigin::FaceSplit) candidates.push_back(v);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](VertexId x, VertexId y) { return m.vertex(x).level > m.vertex(y).level; });
    for (VertexId v : candidates) {
      if (!m.can_weld(v)) continue;
      if (!(errors.vertex(m, v) < options.epsilon)) continue;
      if (errors.restored_edge && !(errors.restored_edge(m, v) <= options.epsilon)) continue;
      m.weld(v);
      ++stats.welds;
    }

    stats.vertices = m.vertex_count();
    result.per_pass.push_back(stats);
    result.splits += stats.splits;
    result.welds += stats.welds;
    ++result.passes;
    if (stats.splits == 0 && stats.welds == 0) break;
  }
  return result;
}

int refine_uniform(Mesh48& m, const Projector& project) {
  int splits = 0;
  // Face ids are recycled, so a slot is only visited while it still holds the
  // triangle seen at the start of the sweep.
  std::vector<std::pair<FaceId, Triangle>> current;
  for (FaceId f : m.alive_faces()) current.emplace_back(f, m.face(f).v);
  for (const auto& [f, t] : current) {
    if (!m.face_alive(f) || m.face(f).v != t) continue;
    m.refine_edge(m.face(f).refinement_edge(), project, &splits);
  }
  return splits;
}

int simplify_uniform(Mesh48& m) {
  const int level = m.max_level();
  int welds = 0;
  for (VertexId v : m.alive_vertices()) {
    if (m.vertex(v).level != level) continue;
    if (m.can_weld(v)) {
      m.weld(v);
      ++welds;
    }
  }
  return welds;
}

}  // namespace dass
