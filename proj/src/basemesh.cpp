// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/basemesh.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "dass/error.hpp"

namespace dass {

namespace {

double cross2(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

std::pair<std::uint32_t, std::uint32_t> key(std::uint32_t a, std::uint32_t b) { return {std::min(a, b), std::max(a, b)}; }

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TeselComplex TeselComplex::create(const Vector2d& lo, const Vector2d& hi, const DrawingPlane& plane) {
  if (!(hi.x() - lo.x() > 1e-12) || !(hi.y() - lo.y() > 1e-12))
    throw Error(ErrorCode::DegenerateBBox, "bounding box has zero area");
  if (plane.u_axis.cross(plane.v_axis).norm() < 1e-12)
    throw Error(ErrorCode::DegenerateBBox, "drawing plane axes are parallel");
  TeselComplex c;
  c.plane_ = plane;
  c.vertices_ = {lo, Vector2d(hi.x(), lo.y()), hi, Vector2d(lo.x(), hi.y())};
  c.tesels_.push_back(Tesel{{0, 1, 2, 3}, TeselKind::Cube});
  return c;
}

bool TeselComplex::footprint_ok(const Tesel& t) const {
  // Strictly convex: every corner turns left.
  for (int k = 0; k < 4; ++k) {
    const Vector2d& prev = vertices_[t.corners[(k + 3) % 4]];
    const Vector2d& cur = vertices_[t.corners[k]];
    const Vector2d& next = vertices_[t.corners[(k + 1) % 4]];
    if (!(cross2(cur - prev, next - cur) > 1e-12)) return false;
  }
  return true;
}

int TeselComplex::subdivide(std::uint32_t tesel, SplitAxis axis) {
  if (tesel >= tesels_.size()) throw Error(ErrorCode::InvalidId, "no tesel " + std::to_string(tesel));

  // Which tesel holds each undirected edge, by side.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<std::uint32_t, int>>> sides;
  for (std::uint32_t t = 0; t < tesels_.size(); ++t)
    for (int k = 0; k < 4; ++k)
      sides[key(tesels_[t].corners[k], tesels_[t].corners[(k + 1) % 4])].push_back({t, k});

  // Walk the loop cut: cutting side k of a tesel also cuts side k + 2, and
  // each cut side continues into the tesel on its other side.
  std::map<std::uint32_t, int> cut;  // tesel -> first cut side (0 or 1)
  std::vector<std::pair<std::uint32_t, int>> todo{{tesel, axis == SplitAxis::U ? 0 : 1}};
  while (!todo.empty()) {
    const auto [t, k] = todo.back();
    todo.pop_back();
    if (cut.count(t)) continue;
    cut[t] = k % 2;
    for (int s : {k % 2, k % 2 + 2}) {
      const auto& c = tesels_[t].corners;
      for (const auto& [other, side] : sides[key(c[s], c[(s + 1) % 4])])
        if (other != t) todo.push_back({other, side});
    }
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    auto [it, fresh] = midpoints.emplace(key(a, b), 0);
    if (fresh) {
      it->second = static_cast<std::uint32_t>(vertices_.size());
      vertices_.push_back(0.5 * (vertices_[a] + vertices_[b]));
    }
    return it->second;
  };

  for (const auto& [t, k] : cut) {
    const Tesel old = tesels_[t];
    const auto& c = old.corners;
    const std::uint32_t r0 = c[k], r1 = c[(k + 1) % 4], r2 = c[(k + 2) % 4], r3 = c[(k + 3) % 4];
    const std::uint32_t m01 = midpoint(r0, r1);
    const std::uint32_t m23 = midpoint(r2, r3);
    // Keep corner 0 of the original in the first half so corner order stays
    // recognisable after the cut.
    tesels_[t] = Tesel{{r0, m01, m23, r3}, old.kind};
    tesels_.push_back(Tesel{{m01, r1, r2, m23}, old.kind});
    if (k == 1) {
      std::rotate(tesels_[t].corners.begin(), tesels_[t].corners.begin() + 3, tesels_[t].corners.end());
      std::rotate(tesels_.back().corners.begin(), tesels_.back().corners.begin() + 3, tesels_.back().corners.end());
    }
  }
  return static_cast<int>(cut.size());
}

void TeselComplex::move_vertex(std::uint32_t vertex, const Vector2d& position) {
  if (vertex >= vertices_.size()) throw Error(ErrorCode::InvalidId, "no tesel vertex " + std::to_string(vertex));
  const Vector2d old = vertices_[vertex];
  vertices_[vertex] = position;
  for (const auto& t : tesels_) {
    if (std::find(t.corners.begin(), t.corners.end(), vertex) == t.corners.end()) continue;
    if (!footprint_ok(t)) {
      vertices_[vertex] = old;
      throw Error(ErrorCode::WouldDegenerate, "moving vertex " + std::to_string(vertex) +
                                                  " would fold or collapse a tesel footprint");
    }
  }
}

void TeselComplex::set_kind(std::uint32_t tesel, TeselKind kind) {
  if (tesel >= tesels_.size()) throw Error(ErrorCode::InvalidId, "no tesel " + std::to_string(tesel));
  tesels_[tesel].kind = kind;
}

int TeselComplex::declared_genus() const {
  return static_cast<int>(std::count_if(tesels_.begin(), tesels_.end(),
                                        [](const Tesel& t) { return t.kind == TeselKind::Torus; }));
}

std::string TeselComplex::to_text() const {
  std::ostringstream out;
  auto vec3 = [&](const Vector3d& v) { out << ' ' << fmt17(v.x()) << ' ' << fmt17(v.y()) << ' ' << fmt17(v.z()); };
  out << "plane";
  vec3(plane_.origin);
  vec3(plane_.u_axis);
  vec3(plane_.v_axis);
  out << '\n';
  for (const auto& v : vertices_) out << "v " << fmt17(v.x()) << ' ' << fmt17(v.y()) << '\n';
  for (const auto& t : tesels_)
    out << "t " << t.corners[0] << ' ' << t.corners[1] << ' ' << t.corners[2] << ' ' << t.corners[3] << ' '
        << (t.kind == TeselKind::Torus ? "torus" : "cube") << '\n';
  return out.str();
}

TeselComplex TeselComplex::from_text(const std::string& text) {
  TeselComplex c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "plane") {
      auto& p = c.plane_;
      ls >> p.origin.x() >> p.origin.y() >> p.origin.z() >> p.u_axis.x() >> p.u_axis.y() >> p.u_axis.z() >>
          p.v_axis.x() >> p.v_axis.y() >> p.v_axis.z();
    } else if (tag == "v") {
      Vector2d v;
      ls >> v.x() >> v.y();
      c.vertices_.push_back(v);
    } else if (tag == "t") {
      Tesel t;
      std::string kind;
      ls >> t.corners[0] >> t.corners[1] >> t.corners[2] >> t.corners[3] >> kind;
      t.kind = kind == "torus" ? TeselKind::Torus : TeselKind::Cube;
      c.tesels_.push_back(t);
    } else {
      throw Error(ErrorCode::ParseError, "unknown tesel record '" + tag + "'");
    }
    if (ls.fail()) throw Error(ErrorCode::ParseError, "malformed tesel record: " + line);
  }
  return c;
}

// ----------------------------------------------------------------------------

long quad_euler_characteristic(std::size_t /*vertex_count*/, const std::vector<std::array<std::uint32_t, 4>>& quads) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::set<std::uint32_t> used;
  for (const auto& q : quads)
    for (int k = 0; k < 4; ++k) {
      edges.insert(key(q[k], q[(k + 1) % 4]));
      used.insert(q[k]);
    }
  return static_cast<long>(used.size()) - static_cast<long>(edges.size()) + static_cast<long>(quads.size());
}

BaseMeshPlan lift(const TeselComplex& complex, const HrbfSurfaced& surface, const LiftOptions& options) {
  if (complex.empty()) throw Error(ErrorCode::InvalidBaseMesh, "no tesels to lift");
  if (surface.empty()) throw Error(ErrorCode::PhaseError, "lift needs a fitted surface");
  const DrawingPlane& plane = complex.plane();

  // Planar quads: cube tesels as drawn, torus tesels as a ring around a hole.
  std::vector<Vector2d> planar = complex.vertices();
  std::vector<std::array<std::uint32_t, 4>> quads;
  for (const auto& t : complex.tesels()) {
    if (t.kind == TeselKind::Cube) {
      quads.push_back(t.corners);
      continue;
    }
    Vector2d centroid = Vector2d::Zero();
    for (auto c : t.corners) centroid += planar[c];
    centroid /= 4.0;
    std::array<std::uint32_t, 4> hole{};
    for (int k = 0; k < 4; ++k) {
      hole[k] = static_cast<std::uint32_t>(planar.size());
      planar.push_back(centroid + options.hole_scale * (planar[t.corners[k]] - centroid));
    }
    for (int k = 0; k < 4; ++k)
      quads.push_back({t.corners[k], t.corners[(k + 1) % 4], hole[(k + 1) % 4], hole[k]});
  }

  // Only vertices used by a quad are lifted; ids are assigned in planar order.
  std::vector<char> used(planar.size(), 0);
  for (const auto& q : quads)
    for (auto v : q) used[v] = 1;

  const Vector3d n = plane.normal();
  const double range = options.range > 0 ? options.range : 2.0 * surface.bbox_diagonal();

  BaseMeshPlan plan;
  std::vector<std::uint32_t> front(planar.size(), kInvalidId), back(planar.size(), kInvalidId);
  std::vector<std::uint32_t> missed;
  for (std::uint32_t i = 0; i < planar.size(); ++i) {
    if (!used[i]) continue;
    const Vector3d origin = plane.to_world(planar[i]);
    for (int side = 0; side < 2; ++side) {
      const Vector3d dir = side == 0 ? n : Vector3d(-n);
      auto root = surface.ray_root(origin, dir, 0.0, range);
      const auto id = static_cast<std::uint32_t>(plan.vertices.size());
      if (!root) {
        if (!options.allow_fallback) {
          if (missed.empty() || missed.back() != i) missed.push_back(i);
        } else {
          plan.fallback_vertices.push_back(id);
        }
        root = origin;
      }
      plan.vertices.push_back(*root);
      (side == 0 ? front : back)[i] = id;
    }
  }
  if (!missed.empty()) {
    std::string list;
    for (auto v : missed) list += (list.empty() ? "" : ", ") + std::to_string(v);
    throw Error(ErrorCode::NoRootFound, "no surface root along the plane normal at planar vertices " + list);
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> directed;
  for (const auto& q : quads)
    for (int k = 0; k < 4; ++k) directed.insert({q[k], q[(k + 1) % 4]});

  for (const auto& q : quads) plan.quads.push_back({front[q[0]], front[q[1]], front[q[2]], front[q[3]]});
  for (const auto& q : quads) plan.quads.push_back({back[q[3]], back[q[2]], back[q[1]], back[q[0]]});
  for (const auto& q : quads) {
    for (int k = 0; k < 4; ++k) {
      const std::uint32_t a = q[k], b = q[(k + 1) % 4];
      if (directed.count({b, a})) continue;
      plan.quads.push_back({front[a], back[a], back[b], front[b]});
    }
  }

  const long chi = quad_euler_characteristic(plan.vertices.size(), plan.quads);
  plan.genus = static_cast<int>((2 - chi) / 2);
  plan.boundary_count = 0;
  if (plan.genus != complex.declared_genus())
    throw Error(ErrorCode::InvalidBaseMesh, "lifted genus " + std::to_string(plan.genus) +
                                                " differs from the declared genus " +
                                                std::to_string(complex.declared_genus()));
  return plan;
}

}  // namespace dass
