// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/session.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "dass/error.hpp"

namespace dass {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t layer_count(const SessionState& s) {
  if (!s.model) return 0;
  std::size_t n = 0;
  for (const auto& c : s.model->atlas.charts()) n += c.layers.size();
  return n;
}

// Inverse-distance (power 4) blend of the sample displacements.
Vector3d blended_displacement(const Vector3d& x, const std::vector<OrientedSampled>& from,
                              const std::vector<OrientedSampled>& to) {
  Vector3d sum = Vector3d::Zero();
  double weight = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vector3d delta = to[i].position - from[i].position;
    const double d2 = (x - from[i].position).squaredNorm();
    if (d2 < 1e-24) return delta;
    const double w = 1.0 / (d2 * d2);
    sum += w * delta;
    weight += w;
  }
  return sum / weight;
}

}  // namespace

json ApplyReport::to_json() const {
  json j;
  j["command"] = command;
  j["mutated"] = mutated;
  j["generation"] = generation;
  j["vertices"] = vertices;
  j["faces"] = faces;
  j["discarded_layers"] = discarded_layers;
  j["notes"] = notes;
  if (adapt) {
    json passes = json::array();
    for (const auto& p : adapt->per_pass) passes.push_back({{"splits", p.splits}, {"welds", p.welds}, {"vertices", p.vertices}});
    j["adapt"] = {{"passes", passes}, {"splits", adapt->splits}, {"welds", adapt->welds}};
  }
  return j;
}

Session::Session(SessionConfig config, std::string base_dir)
    : initial_config_(config), base_dir_(std::move(base_dir)) {
  config.validate();
  state_.config = config;
}

const Mesh48& Session::mesh() const {
  if (!state_.model) throw Error(ErrorCode::PhaseError, "atlas not initialised");
  return state_.model->mesh;
}

const Atlas& Session::atlas() const {
  if (!state_.model) throw Error(ErrorCode::PhaseError, "atlas not initialised");
  return state_.model->atlas;
}

const HrbfSurfaced& Session::surface() const {
  if (!state_.surface) throw Error(ErrorCode::PhaseError, "no implicit surface yet");
  return *state_.surface;
}

ProjectionOptions<double> Session::projection() const {
  ProjectionOptions<double> p;
  p.trust_radius = state_.config.trust_radius;
  return p;
}

namespace {

ProjectionOptions<double> projection_of(const SessionState& s) {
  ProjectionOptions<double> p;
  p.trust_radius = s.config.trust_radius;
  return p;
}

Projector projector_of(const HrbfSurfaced& surface, const ProjectionOptions<double>& options) {
  return [&surface, options](const Vector3d& p) { return surface.project_onto(p, options); };
}

AdaptResult run_adapt(SessionState& s, ErrorKind kind, int max_passes) {
  auto& model = *s.model;
  const auto options = projection_of(s);
  DisplacedSurface ds(*s.surface, model.mesh, model.atlas, options);
  ErrorModel errors(ds, {kind, s.config.samples, s.config.seed, s.generation});
  AdaptOptions adapt_options;
  adapt_options.epsilon = s.config.epsilon;
  adapt_options.max_passes = max_passes;
  adapt_options.max_level = s.config.max_level;
  return adapt(model.mesh, errors.adapt_errors(), adapt_options, ds.projector());
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::PhaseError, what);
}

// Startup flow from the lift onwards, for whichever stages existed before.
void rebuild_after_surface_or_tesels(SessionState& s, ApplyReport& r) {
  if (s.base) {
    require(s.surface && s.tesels, "cannot rebuild the base mesh without a surface and tesels");
    s.base = lift(*s.tesels, *s.surface);
    r.notes.push_back("base mesh rebuilt");
  }
  if (s.model) {
    r.discarded_layers = layer_count(s);
    s.model = init_atlas(*s.base, projector_of(*s.surface, projection_of(s)));
    r.adapt = run_adapt(s, s.config.error, s.config.max_passes);
    r.notes.push_back("atlas rebuilt");
    if (r.discarded_layers) r.notes.push_back(std::to_string(r.discarded_layers) + " height layer(s) discarded");
  }
}

void move_samples(SessionState& s, const std::vector<OrientedSampled>& samples, ApplyReport& r) {
  require(s.surface.has_value(), "no implicit surface to move; use SetSamples");
  if (samples.size() != s.samples.size())
    throw Error(ErrorCode::InvalidSample, "expected " + std::to_string(s.samples.size()) + " samples, got " +
                                              std::to_string(samples.size()));
  HrbfSurfaced moved = HrbfSurfaced::fit(samples);
  const std::vector<OrientedSampled> old = s.samples;
  s.samples = samples;
  s.surface = std::move(moved);
  if (!s.model) {
    rebuild_after_surface_or_tesels(s, r);
    return;
  }

  Mesh48& m = s.model->mesh;
  const Projector project = projector_of(*s.surface, projection_of(s));
  std::vector<VertexId> derived;
  for (VertexId v : m.alive_vertices()) {
    auto& vx = m.vertex(v);
    if (vx.origin == VertexOrigin::Base) {
      vx.position = project(vx.position + blended_displacement(vx.position, old, samples));
      if (s.base && v < s.base->vertices.size()) s.base->vertices[v] = vx.position;
    } else {
      derived.push_back(v);
    }
  }
  // Parents are always on a lower level, so ascending levels see moved parents.
  std::stable_sort(derived.begin(), derived.end(),
                   [&](VertexId a, VertexId b) { return m.vertex(a).level < m.vertex(b).level; });
  for (VertexId v : derived) m.vertex(v).position = m.resample(v, project);
  r.notes.push_back("moved " + std::to_string(m.vertex_count()) + " vertices onto the edited surface");
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

ApplyReport Session::apply(const Command& command) {
  SessionState next = state_;
  ApplyReport r;
  r.command = std::string(command_name(command));
  r.mutated = is_mutating(command);
  if (r.mutated) ++next.generation;

  std::visit(
      overloaded{
          [&](const SetSamples& c) {
            next.surface = HrbfSurfaced::fit(c.samples);
            next.samples = c.samples;
            rebuild_after_surface_or_tesels(next, r);
          },
          [&](const EditTesels& c) {
            if (const auto* n = std::get_if<TeselNew>(&c.edit)) {
              next.tesels = TeselComplex::create(n->lo, n->hi, n->plane);
            } else {
              require(next.tesels.has_value(), "no tesel complex yet; start with 'EditTesels new'");
              std::visit(overloaded{
                             [&](const TeselNew&) {},
                             [&](const TeselSubdivide& s) { next.tesels->subdivide(s.tesel, s.axis); },
                             [&](const TeselMove& m) { next.tesels->move_vertex(m.vertex, m.position); },
                             [&](const TeselKindChange& k) { next.tesels->set_kind(k.tesel, k.kind); },
                         },
                         c.edit);
            }
            rebuild_after_surface_or_tesels(next, r);
          },
          [&](const Lift&) {
            require(next.surface.has_value(), "Lift needs implicit samples");
            require(next.tesels.has_value(), "Lift needs a tesel complex");
            next.base = lift(*next.tesels, *next.surface);
            if (!next.base->fallback_vertices.empty())
              r.notes.push_back(std::to_string(next.base->fallback_vertices.size()) + " vertices kept on the plane");
            if (next.model) {
              r.discarded_layers = layer_count(next);
              next.model = init_atlas(*next.base, projector_of(*next.surface, projection_of(next)));
              r.adapt = run_adapt(next, next.config.error, next.config.max_passes);
              r.notes.push_back("atlas rebuilt");
            }
          },
          [&](const InitAtlas&) {
            require(next.base.has_value(), "InitAtlas needs a lifted base mesh");
            r.discarded_layers = layer_count(next);
            next.model = init_atlas(*next.base, projector_of(*next.surface, projection_of(next)));
            r.adapt = run_adapt(next, next.config.error, next.config.max_passes);
          },
          [&](const MoveImplicitSamples& c) { move_samples(next, c.samples, r); },
          [&](const SketchHeightCurve& c) {
            require(next.model.has_value(), "sketching needs an initialised atlas");
            if (!std::isfinite(c.height)) throw Error(ErrorCode::InvalidLayer, "height must be finite");
            auto& model = *next.model;
            const auto fragments =
                transport_stroke(model.atlas, model.mesh, c.points, projector_of(*next.surface, projection_of(next)),
                                 c.height, c.radius, next.next_stroke++);
            add_fragments(model.atlas, fragments);
            r.notes.push_back("stroke split into " + std::to_string(fragments.size()) + " fragment(s)");
            r.adapt = run_adapt(next, next.config.error, next.config.max_passes);
          },
          [&](const LoadRasterLayer& c) {
            require(next.model.has_value(), "raster layers need an initialised atlas");
            if (!std::isfinite(c.scale)) throw Error(ErrorCode::InvalidLayer, "scale must be finite");
            Chart& chart = next.model->atlas.chart(c.chart);
            chart.layers.emplace_back(RasterLayer{read_pgm(resolve(base_dir_, c.path)), c.scale});
            r.adapt = run_adapt(next, next.config.error, next.config.max_passes);
          },
          [&](const SetEpsilon& c) {
            if (!(c.epsilon > 0) || !std::isfinite(c.epsilon))
              throw Error(ErrorCode::ParseError, "epsilon must be positive");
            next.config.epsilon = c.epsilon;
            if (next.model) r.adapt = run_adapt(next, next.config.error, next.config.max_passes);
          },
          [&](const Adapt& c) {
            require(next.model.has_value(), "Adapt needs an initialised atlas");
            if (c.max_passes && *c.max_passes < 1) throw Error(ErrorCode::ParseError, "passes must be at least 1");
            r.adapt = run_adapt(next, c.kind.value_or(next.config.error), c.max_passes.value_or(next.config.max_passes));
          },
          [&](const ExportObj& c) {
            require(next.model.has_value(), "nothing to export before InitAtlas");
            Session view(*this);
            view.state_ = next;
            write_obj_file(resolve(base_dir_, c.path), view.display_snapshot());
          },
      },
      command);

  if (next.model) {
    const auto report = validate_rk(next.model->mesh);
    if (!report.ok) throw Error(ErrorCode::NotRegular, report.message);
    r.vertices = next.model->mesh.vertex_count();
    r.faces = next.model->mesh.face_count();
  }
  r.generation = next.generation;
  state_ = std::move(next);
  history_.push_back(command);
  return r;
}

std::string Session::log_text() const {
  std::string out = scene_header(initial_config_);
  for (const auto& c : history_) out += to_text(c) + "\n";
  return out;
}

MeshSnapshot Session::display_snapshot() const {
  const auto& model = *state_.model;
  DisplacedSurface ds(*state_.surface, model.mesh, model.atlas, projection());
  const auto positions = displaced_positions(ds);
  return snapshot(model.mesh, positions);
}

double Session::max_face_error() const {
  if (!state_.model) return 0;
  const auto& model = *state_.model;
  DisplacedSurface ds(*state_.surface, model.mesh, model.atlas, projection());
  ErrorModel errors(ds, {state_.config.error, state_.config.samples, state_.config.seed, state_.generation});
  double worst = 0;
  for (FaceId f : model.mesh.alive_faces()) worst = std::max(worst, errors.face_error(model.mesh, model.mesh.face(f).v));
  return worst;
}

// ----------------------------------------------------------------------------

ReplayResult replay(const std::string& text, const ReplayOptions& options) {
  ReplayResult result;
  Scene scene;
  try {
    scene = parse_scene(text);
  } catch (const SceneParseError& e) {
    result.failure = ReplayFailure{e.line, 0, ErrorCode::ParseError, e.what()};
    return result;
  }
  if (options.epsilon) scene.config.epsilon = *options.epsilon;
  if (options.seed) scene.config.seed = *options.seed;
  try {
    scene.config.validate();
  } catch (const Error& e) {
    result.failure = ReplayFailure{0, 0, e.code(), e.what()};
    return result;
  }
  result.session = Session(scene.config, options.base_dir);
  for (std::size_t i = 0; i < scene.commands.size(); ++i) {
    const auto& [line, command] = scene.commands[i];
    if (options.skip_exports && std::holds_alternative<ExportObj>(command)) continue;
    try {
      result.reports.push_back(result.session.apply(command));
    } catch (const Error& e) {
      result.failure = ReplayFailure{line, i, e.code(), e.what()};
      break;
    }
  }
  return result;
}

json run_stats(const ReplayResult& result) {
  json j;
  const Session& s = result.session;
  j["generation"] = s.generation();
  j["commands"] = result.reports.size();
  json runs = json::array();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    if (!r.adapt) continue;
    json passes = json::array();
    for (const auto& p : r.adapt->per_pass) passes.push_back({{"splits", p.splits}, {"welds", p.welds}, {"vertices", p.vertices}});
    runs.push_back({{"command_index", i},
                    {"command", r.command},
                    {"passes", passes},
                    {"splits", r.adapt->splits},
                    {"welds", r.adapt->welds},
                    {"vertices", r.vertices}});
  }
  j["adapt"] = runs;
  const bool model = s.has_model();
  j["vertices"] = model ? s.mesh().vertex_count() : 0;
  j["faces"] = model ? s.mesh().face_count() : 0;
  j["charts"] = model ? s.atlas().chart_count() : 0;
  j["max_face_error"] = s.max_face_error();
  j["failure"] = nullptr;
  if (result.failure) {
    j["failure"] = {{"line", result.failure->line},
                    {"command_index", result.failure->command_index},
                    {"code", std::string(to_string(result.failure->code))},
                    {"message", result.failure->message}};
  }
  return j;
}

}  // namespace dass
