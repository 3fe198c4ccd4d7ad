// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/heightfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dass/error.hpp"
#include "dass/geometry.hpp"

namespace dass {

namespace {

// exp(-x) < 1e-30 beyond x = 30 ln 10, i.e. d > (30 ln 10 * 4 / 25)^(1/4) r.
const double kCutoffFactor = std::pow(30.0 * std::log(10.0) * 4.0 / 25.0, 0.25);

struct StrokeAccumulator {
  double distance = std::numeric_limits<double>::infinity();
  double height = 0;
  double radius = 0;
};

using StrokeMap = std::map<std::uint64_t, StrokeAccumulator>;

void accumulate(StrokeMap& strokes, const HeightCurve& c, const Vector2d& uv) {
  auto& acc = strokes[c.stroke];
  acc.height = c.height;
  acc.radius = c.radius;
  acc.distance = std::min(acc.distance, point_polyline_distance<double>(uv, c.points));
}

double sum_strokes(const StrokeMap& strokes) {
  double sum = 0;
  for (const auto& [id, acc] : strokes) sum += curve_falloff(acc.height, acc.radius, acc.distance);
  return sum;
}

const std::array<Vector2d, 4> kCorners{Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1), Vector2d(0, 1)};

// Distance from uv to the line through side k of the unit square, on the
// outer side only.
double outside_distance(const Vector2d& uv, int side) {
  switch (side) {
    case 0: return std::max(0.0, uv.y());
    case 1: return std::max(0.0, 1.0 - uv.x());
    case 2: return std::max(0.0, 1.0 - uv.y());
    default: return std::max(0.0, uv.x());
  }
}

// Parameter at which the segment from p (inside the unit square) leaves it.
double exit_parameter(const Vector2d& p, const Vector2d& q) {
  double t = 1.0;
  const Vector2d d = q - p;
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] > 0) t = std::min(t, (1.0 - p[axis]) / d[axis]);
    if (d[axis] < 0) t = std::min(t, (0.0 - p[axis]) / d[axis]);
  }
  return std::clamp(t, 0.0, 1.0);
}

Vector2d clamp_unit(const Vector2d& p) { return p.cwiseMax(0.0).cwiseMin(1.0); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double unit_from_bits(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

Label triangle_label(const Mesh48& m, const Triangle& t) {
  Label label = 0;
  for (VertexId v : t) {
    const Label l = m.vertex(v).label;
    if (l == 0) continue;
    if (label != 0 && label != l) throw Error(ErrorCode::NotRegular, "triangle mixes chart labels");
    label = l;
  }
  if (label == 0) throw Error(ErrorCode::NotRegular, "triangle has only boundary vertices");
  return label;
}

}  // namespace

double curve_falloff(double height, double radius, double distance) {
  if (!(radius > 0)) return 0;
  const double ratio = distance / radius;
  const double r2 = ratio * ratio;
  const double e = std::exp(-25.0 * r2 * r2 / 4.0);
  return e < 1e-30 ? 0.0 : height * e;
}

double curve_distance(std::span<const HeightCurve> curves, const Vector2d& uv) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) best = std::min(best, point_polyline_distance<double>(uv, c.points));
  return best;
}

double RasterImage::sample(const Vector2d& uv) const {
  if (width <= 0 || height <= 0) return 0;
  const double x = std::clamp(uv.x(), 0.0, 1.0) * (width - 1);
  const double y = std::clamp(uv.y(), 0.0, 1.0) * (height - 1);
  const int x0 = std::min(static_cast<int>(std::floor(x)), width - 1);
  const int y0 = std::min(static_cast<int>(std::floor(y)), height - 1);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1 - fx) * at(x0, y0) + fx * at(x1, y0);
  const double bottom = (1 - fx) * at(x0, y1) + fx * at(x1, y1);
  return (1 - fy) * top + fy * bottom;
}

double height_at(const HeightLayer& layer, const Vector2d& uv) {
  if (const auto* s = std::get_if<SketchedLayer>(&layer)) {
    StrokeMap strokes;
    for (const auto& c : s->curves) accumulate(strokes, c, uv);
    return sum_strokes(strokes);
  }
  const auto& r = std::get<RasterLayer>(layer);
  return r.scale * r.image.sample(uv);
}

double composed_height(const Atlas& atlas, ChartId chart, const Vector2d& uv) {
  double sum = 0;
  StrokeMap strokes;
  for (const auto& layer : atlas.chart(chart).layers) {
    if (const auto* s = std::get_if<SketchedLayer>(&layer)) {
      for (const auto& c : s->curves) accumulate(strokes, c, uv);
    } else {
      sum += height_at(layer, uv);
    }
  }
  for (const auto& t : atlas.transitions()) {
    if (t.from != chart) continue;
    const double gap = outside_distance(uv, t.side);
    const Vector2d mapped = t.apply(uv);
    for (const auto& layer : atlas.chart(t.to).layers) {
      const auto* s = std::get_if<SketchedLayer>(&layer);
      if (!s) continue;
      for (const auto& c : s->curves) {
        // Neighbour curves lie in the neighbour's square, at least `gap` away.
        if (gap > kCutoffFactor * c.radius) continue;
        accumulate(strokes, c, mapped);
      }
    }
  }
  return sum + sum_strokes(strokes);
}

Vector2d height_gradient(const Atlas& atlas, ChartId chart, const Vector2d& uv, double step) {
  const Vector2d du(step, 0), dv(0, step);
  return {(composed_height(atlas, chart, uv + du) - composed_height(atlas, chart, uv - du)) / (2 * step),
          (composed_height(atlas, chart, uv + dv) - composed_height(atlas, chart, uv - dv)) / (2 * step)};
}

// ----------------------------------------------------------------------------

std::vector<CurveFragment> transport_stroke(const Atlas& atlas, const Mesh48& m, std::span<const Vector3d> stroke,
                                            const Projector& project, double height, double radius,
                                            std::uint64_t stroke_id) {
  if (stroke.empty()) throw Error(ErrorCode::EmptyStroke, "stroke has no points");
  if (!(radius > 0)) throw Error(ErrorCode::InvalidLayer, "height-curve radius must be positive");

  std::vector<Vector3d> points;
  for (const auto& p : stroke)
    if (points.empty() || points.back() != p) points.push_back(p);

  auto adjacent = [&](ChartId a, ChartId b) { return a == b || !atlas.transitions_between(a, b).empty(); };

  // Chart points of the stroke, with bridging midpoints between charts that
  // do not share an edge.
  std::vector<ChartPoint> located;
  std::vector<Vector3d> where;
  std::function<void(const Vector3d&, const ChartPoint&, const Vector3d&, const ChartPoint&, int)> bridge =
      [&](const Vector3d& a, const ChartPoint& ca, const Vector3d& b, const ChartPoint& cb, int depth) {
        if (depth == 0 || adjacent(ca.chart, cb.chart)) {
          located.push_back(cb);
          where.push_back(b);
          return;
        }
        const Vector3d mid = project(0.5 * (a + b));
        const ChartPoint cm = phi_inv(atlas, m, mid, project);
        bridge(a, ca, mid, cm, depth - 1);
        bridge(mid, cm, b, cb, depth - 1);
      };
  located.push_back(phi_inv(atlas, m, points.front(), project));
  where.push_back(points.front());
  for (std::size_t k = 1; k < points.size(); ++k) {
    const ChartPoint next = phi_inv(atlas, m, points[k], project);
    const Vector3d prev_point = where.back();
    const ChartPoint prev = located.back();
    bridge(prev_point, prev, points[k], next, 12);
  }

  std::vector<CurveFragment> out;
  auto start = [&](ChartId chart, const Vector2d& uv) {
    CurveFragment f;
    f.chart = chart;
    f.curve.height = height;
    f.curve.radius = radius;
    f.curve.stroke = stroke_id;
    f.curve.points.push_back(uv);
    out.push_back(std::move(f));
  };
  auto append = [&](const Vector2d& uv) {
    auto& pts = out.back().curve.points;
    if (pts.back() != uv) pts.push_back(uv);
  };

  start(located.front().chart, located.front().uv);
  for (std::size_t k = 1; k < located.size(); ++k) {
    const ChartPoint& p = located[k - 1];
    const ChartPoint& q = located[k];
    if (q.chart == p.chart) {
      append(q.uv);
      continue;
    }
    if (!adjacent(p.chart, q.chart)) {
      start(q.chart, q.uv);
      continue;
    }
    const Vector2d q_in_p = transfer(atlas, q.uv, q.chart, p.chart);
    const Vector2d crossing = clamp_unit(p.uv + exit_parameter(p.uv, q_in_p) * (q_in_p - p.uv));
    append(crossing);
    start(q.chart, clamp_unit(transfer(atlas, crossing, p.chart, q.chart)));
    append(q.uv);
  }
  return out;
}

void add_fragments(Atlas& atlas, std::span<const CurveFragment> fragments) {
  for (const auto& f : fragments) {
    auto& layers = atlas.chart(f.chart).layers;
    SketchedLayer* target = nullptr;
    for (auto& l : layers)
      if (auto* s = std::get_if<SketchedLayer>(&l)) {
        target = s;
        break;
      }
    if (!target) {
      layers.emplace_back(SketchedLayer{});
      target = &std::get<SketchedLayer>(layers.back());
    }
    target->curves.push_back(f.curve);
  }
}

// ----------------------------------------------------------------------------

DisplacedSurface::DisplacedSurface(const HrbfSurfaced& surface, const Mesh48& mesh, const Atlas& atlas,
                                   ProjectionOptions<double> projection, DetailEta eta)
    : surface_(&surface), mesh_(&mesh), atlas_(&atlas), projection_(projection), eta_(std::move(eta)) {}

Vector3d DisplacedSurface::project_surface(const Vector3d& p) const { return surface_->project_onto(p, projection_); }

Projector DisplacedSurface::projector() const {
  return [this](const Vector3d& p) { return project_surface(p); };
}

Vector3d DisplacedSurface::normal(const Vector3d& p) const {
  const Vector3d g = surface_->grad(p);
  const double n = g.norm();
  if (!(n >= 1e-12)) throw Error(ErrorCode::ZeroGradient, "surface normal undefined");
  return g / n;
}

double DisplacedSurface::height(const Vector3d& p) const {
  const ChartPoint cp = phi_inv(*atlas_, *mesh_, p, projector());
  return composed_height(*atlas_, cp.chart, cp.uv);
}

Vector3d DisplacedSurface::displace(const Vector3d& p) const {
  const double h = height(p);
  if (h == 0) return p;
  return p + h * normal(p);
}

Vector3d DisplacedSurface::project_final(const Vector3d& p) const { return displace(project_surface(p)); }

double DisplacedSurface::distance(const Vector3d& p) const { return (p - project_final(p)).norm(); }

double DisplacedSurface::detail_factor(const Vector3d& p) const {
  const ChartPoint cp = phi_inv(*atlas_, *mesh_, project_surface(p), projector());
  return eta_(height_gradient(*atlas_, cp.chart, cp.uv).norm());
}

double DisplacedSurface::vertex_height(VertexId v) const {
  const auto& vx = mesh_->vertex(v);
  if (vx.chart_coords.empty()) return 0;
  return composed_height(*atlas_, vx.chart_coords.front().chart, vx.chart_coords.front().uv);
}

Vector3d DisplacedSurface::displaced_vertex(VertexId v) const {
  const double h = vertex_height(v);
  const Vector3d& p = mesh_->vertex(v).position;
  if (h == 0) return p;
  return p + h * normal(p);
}

std::vector<Vector3d> displaced_positions(const DisplacedSurface& ds) {
  std::vector<Vector3d> out(ds.mesh().vertex_capacity(), Vector3d::Zero());
  for (VertexId v : ds.mesh().alive_vertices()) out[v] = ds.displaced_vertex(v);
  return out;
}

// ----------------------------------------------------------------------------

std::size_t ErrorModel::KeyHash::operator()(const Key& k) const {
  return static_cast<std::size_t>(splitmix(k.a ^ splitmix(k.b ^ splitmix(k.c))));
}

ErrorModel::ErrorModel(const DisplacedSurface& ds, ErrorSettings settings) : ds_(&ds), settings_(settings) {
  if (settings_.samples < 1) throw Error(ErrorCode::InvalidLayer, "need at least one sample per face");
}

std::vector<Vector3d> ErrorModel::sample_weights(const Triangle& t) const {
  std::uint64_t h = splitmix(settings_.seed);
  for (VertexId v : t) h = splitmix(h ^ v);
  h = splitmix(h ^ settings_.generation);
  const double o1 = unit_from_bits(h);
  const double o2 = unit_from_bits(splitmix(h));
  // R2 sequence: additive recurrence on the plastic number.
  const double g = 1.32471795724474602596;
  const double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  std::vector<Vector3d> out;
  out.reserve(settings_.samples);
  for (int k = 1; k <= settings_.samples; ++k) {
    double x = o1 + k * a1;
    double y = o2 + k * a2;
    x -= std::floor(x);
    y -= std::floor(y);
    if (x + y > 1) {
      x = 1 - x;
      y = 1 - y;
    }
    out.emplace_back(1 - x - y, x, y);
  }
  return out;
}

const Vector3d& ErrorModel::displaced(const Mesh48& m, VertexId v) const {
  const auto& vx = m.vertex(v);
  auto it = displaced_.find(vx.stamp);
  if (it != displaced_.end()) return it->second;
  Vector3d p = vx.position;
  if (!vx.chart_coords.empty()) {
    const double h = composed_height(ds_->atlas(), vx.chart_coords.front().chart, vx.chart_coords.front().uv);
    if (h != 0) p += h * ds_->normal(vx.position);
  }
  return displaced_.emplace(vx.stamp, p).first->second;
}

ErrorModel::FaceStats ErrorModel::evaluate(const Mesh48& m, const Triangle& tri) const {
  Triangle t = tri;
  std::sort(t.begin(), t.end());
  const Label chart = triangle_label(m, t);
  std::array<Vector3d, 3> pos, shown;
  std::array<Vector2d, 3> uv;
  for (int k = 0; k < 3; ++k) {
    const auto& vx = m.vertex(t[k]);
    pos[k] = vx.position;
    shown[k] = displaced(m, t[k]);
    const Vector2d* c = vx.coords_in(chart);
    if (!c) throw Error(ErrorCode::NotRegular, "vertex " + std::to_string(t[k]) + " lacks chart coordinates");
    uv[k] = *c;
  }

  FaceStats s;
  const auto weights = sample_weights(t);
  for (const auto& w : weights) {
    const Vector3d base = w[0] * pos[0] + w[1] * pos[1] + w[2] * pos[2];
    const Vector2d at = w[0] * uv[0] + w[1] * uv[1] + w[2] * uv[2];
    const auto proj = ds_->surface().project(base, ds_->projection());
    const Vector3d q = proj.point;
    const double h = composed_height(ds_->atlas(), chart, at);
    const Vector3d target = h == 0 ? q : Vector3d(q + h * ds_->normal(q));
    const Vector3d drawn = w[0] * shown[0] + w[1] * shown[1] + w[2] * shown[2];
    double e = (drawn - target).norm();
    if (settings_.kind == ErrorKind::Local) e *= ds_->eta()(height_gradient(ds_->atlas(), chart, at).norm());
    s.mean += e;
    s.max = std::max(s.max, e);
  }
  s.mean /= static_cast<double>(weights.size());
  return s;
}

const ErrorModel::FaceStats& ErrorModel::stats(const Mesh48& m, const Triangle& t) const {
  std::array<std::uint64_t, 3> stamps{m.vertex(t[0]).stamp, m.vertex(t[1]).stamp, m.vertex(t[2]).stamp};
  std::sort(stamps.begin(), stamps.end());
  const Key key{stamps[0], stamps[1], stamps[2]};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, evaluate(m, t)).first->second;
}

double ErrorModel::face_error(const Mesh48& m, const Triangle& t) const { return stats(m, t).mean; }

double ErrorModel::face_max_error(const Mesh48& m, const Triangle& t) const { return stats(m, t).max; }

double ErrorModel::edge_error(const Mesh48& m, Edge e) const {
  const auto faces = m.faces_of_edge(e);
  double sum = 0;
  for (FaceId f : faces) sum += face_error(m, m.face(f).v);
  return faces.empty() ? 0.0 : sum / static_cast<double>(faces.size());
}

double ErrorModel::vertex_error(const Mesh48& m, VertexId v) const {
  const auto& star = m.star(v);
  double sum = 0;
  for (FaceId f : star) sum += face_error(m, m.face(f).v);
  return star.empty() ? 0.0 : sum / static_cast<double>(star.size());
}

AdaptErrors ErrorModel::adapt_errors() const {
  return errors_from_face_error([this](const Mesh48& m, const Triangle& t) { return face_error(m, t); });
}

}  // namespace dass
