// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/command.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

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

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Whitespace tokenizer with typed reads that report what was expected.
class Tokens {
 public:
  explicit Tokens(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens_.emplace_back(line.substr(i, j - i));
      i = j;
    }
  }

  bool done() const { return at_ >= tokens_.size(); }
  std::string_view peek() const { return done() ? std::string_view{} : std::string_view(tokens_[at_]); }

  std::string word(const char* what) {
    if (done()) throw Error(ErrorCode::ParseError, std::string("missing ") + what);
    return tokens_[at_++];
  }

  /// The remainder of the line as one string (used for paths).
  std::string rest(const char* what) {
    if (done()) throw Error(ErrorCode::ParseError, std::string("missing ") + what);
    std::string out = tokens_[at_++];
    while (!done()) out += " " + tokens_[at_++];
    return out;
  }

  double real(const char* what) {
    const std::string t = word(what);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
      throw Error(ErrorCode::ParseError, std::string("expected a number for ") + what + ", got '" + t + "'");
    return v;
  }

  std::uint64_t count(const char* what) {
    const std::string t = word(what);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw Error(ErrorCode::ParseError, std::string("expected a non-negative integer for ") + what + ", got '" + t + "'");
    return v;
  }

  void finish() const {
    if (!done()) throw Error(ErrorCode::ParseError, "unexpected trailing token '" + tokens_[at_] + "'");
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t at_ = 0;
};

std::vector<OrientedSampled> read_samples(Tokens& t) {
  const auto n = t.count("sample count");
  if (n > 100000) throw Error(ErrorCode::ParseError, "sample count too large");
  std::vector<OrientedSampled> out(n);
  for (auto& s : out) {
    s.position = {t.real("x"), t.real("y"), t.real("z")};
    s.normal = {t.real("nx"), t.real("ny"), t.real("nz")};
  }
  return out;
}

void write_samples(std::ostringstream& out, const std::vector<OrientedSampled>& samples) {
  out << ' ' << samples.size();
  for (const auto& s : samples)
    out << ' ' << num(s.position.x()) << ' ' << num(s.position.y()) << ' ' << num(s.position.z()) << ' '
        << num(s.normal.x()) << ' ' << num(s.normal.y()) << ' ' << num(s.normal.z());
}

json samples_json(const std::vector<OrientedSampled>& samples) {
  json arr = json::array();
  for (const auto& s : samples)
    arr.push_back({s.position.x(), s.position.y(), s.position.z(), s.normal.x(), s.normal.y(), s.normal.z()});
  return arr;
}

double jnum(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string("expected a number for ") + what);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, std::string("non-finite ") + what);
  return v;
}

std::uint64_t jcount(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw Error(ErrorCode::ParseError, std::string("expected a non-negative integer for ") + what);
  return j.get<std::uint64_t>();
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::ParseError, std::string("missing field '") + name + "'");
  return j.at(name);
}

std::vector<OrientedSampled> samples_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "'samples' must be an array");
  std::vector<OrientedSampled> out;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 6) throw Error(ErrorCode::ParseError, "each sample is [x,y,z,nx,ny,nz]");
    OrientedSampled s;
    s.position = {jnum(row[0], "x"), jnum(row[1], "y"), jnum(row[2], "z")};
    s.normal = {jnum(row[3], "nx"), jnum(row[4], "ny"), jnum(row[5], "nz")};
    out.push_back(s);
  }
  return out;
}

Vector2d vec2_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ParseError, std::string(what) + " must be [u,v]");
  return {jnum(j[0], what), jnum(j[1], what)};
}

Vector3d vec3_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, std::string(what) + " must be [x,y,z]");
  return {jnum(j[0], what), jnum(j[1], what), jnum(j[2], what)};
}

json vec_json(const Vector2d& v) { return json::array({v.x(), v.y()}); }
json vec_json(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

bool default_plane(const DrawingPlane& p) {
  const DrawingPlane d;
  return p.origin == d.origin && p.u_axis == d.u_axis && p.v_axis == d.v_axis;
}

ErrorKind parse_kind(std::string_view s) {
  if (s == "simple") return ErrorKind::Simple;
  if (s == "local") return ErrorKind::Local;
  throw Error(ErrorCode::ParseError, "error kind must be simple or local, got '" + std::string(s) + "'");
}

const char* kind_name(ErrorKind k) { return k == ErrorKind::Simple ? "simple" : "local"; }

}  // namespace

std::string_view command_name(const Command& c) {
  static constexpr std::string_view names[] = {"SetSamples",         "EditTesels",        "Lift",
                                               "InitAtlas",          "MoveImplicitSamples", "SketchHeightCurve",
                                               "LoadRasterLayer",    "SetEpsilon",        "Adapt",
                                               "ExportObj"};
  return names[c.index()];
}

bool is_mutating(const Command& c) { return !std::holds_alternative<ExportObj>(c); }

std::string to_text(const Command& c) {
  std::ostringstream out;
  out << command_name(c);
  std::visit(overloaded{
                 [&](const SetSamples& s) { write_samples(out, s.samples); },
                 [&](const MoveImplicitSamples& s) { write_samples(out, s.samples); },
                 [&](const EditTesels& e) {
                   std::visit(overloaded{
                                  [&](const TeselNew& n) {
                                    out << " new " << num(n.lo.x()) << ' ' << num(n.lo.y()) << ' ' << num(n.hi.x())
                                        << ' ' << num(n.hi.y());
                                    if (!default_plane(n.plane)) {
                                      out << " plane";
                                      for (const Vector3d* v : {&n.plane.origin, &n.plane.u_axis, &n.plane.v_axis})
                                        out << ' ' << num(v->x()) << ' ' << num(v->y()) << ' ' << num(v->z());
                                    }
                                  },
                                  [&](const TeselSubdivide& s) {
                                    out << " subdivide " << s.tesel << ' ' << (s.axis == SplitAxis::U ? 'U' : 'V');
                                  },
                                  [&](const TeselMove& m) {
                                    out << " move " << m.vertex << ' ' << num(m.position.x()) << ' '
                                        << num(m.position.y());
                                  },
                                  [&](const TeselKindChange& k) {
                                    out << " kind " << k.tesel << ' ' << (k.kind == TeselKind::Torus ? "torus" : "cube");
                                  },
                              },
                              e.edit);
                 },
                 [&](const Lift&) {},
                 [&](const InitAtlas&) {},
                 [&](const SketchHeightCurve& s) {
                   out << ' ' << num(s.height) << ' ' << num(s.radius) << ' ' << s.points.size();
                   for (const auto& p : s.points) out << ' ' << num(p.x()) << ' ' << num(p.y()) << ' ' << num(p.z());
                 },
                 [&](const LoadRasterLayer& l) { out << ' ' << l.chart << ' ' << num(l.scale) << ' ' << l.path; },
                 [&](const SetEpsilon& s) { out << ' ' << num(s.epsilon); },
                 [&](const Adapt& a) {
                   if (a.kind) out << ' ' << kind_name(*a.kind);
                   if (a.max_passes) out << " passes " << *a.max_passes;
                 },
                 [&](const ExportObj& e) { out << ' ' << e.path; },
             },
             c);
  return out.str();
}

Command parse_command(std::string_view line) {
  Tokens t(line);
  const std::string name = t.word("command");
  Command out;
  if (name == "SetSamples") {
    out = SetSamples{read_samples(t)};
  } else if (name == "MoveImplicitSamples") {
    out = MoveImplicitSamples{read_samples(t)};
  } else if (name == "EditTesels") {
    const std::string op = t.word("tesel edit");
    if (op == "new") {
      TeselNew n;
      n.lo = {t.real("u0"), t.real("v0")};
      n.hi = {t.real("u1"), t.real("v1")};
      if (t.peek() == "plane") {
        t.word("plane");
        for (Vector3d* v : {&n.plane.origin, &n.plane.u_axis, &n.plane.v_axis}) *v = {t.real("x"), t.real("y"), t.real("z")};
      }
      out = EditTesels{n};
    } else if (op == "subdivide") {
      TeselSubdivide s;
      s.tesel = static_cast<std::uint32_t>(t.count("tesel"));
      const std::string axis = t.word("axis");
      if (axis != "U" && axis != "V") throw Error(ErrorCode::ParseError, "axis must be U or V");
      s.axis = axis == "U" ? SplitAxis::U : SplitAxis::V;
      out = EditTesels{s};
    } else if (op == "move") {
      TeselMove m;
      m.vertex = static_cast<std::uint32_t>(t.count("vertex"));
      m.position = {t.real("u"), t.real("v")};
      out = EditTesels{m};
    } else if (op == "kind") {
      TeselKindChange k;
      k.tesel = static_cast<std::uint32_t>(t.count("tesel"));
      const std::string kind = t.word("kind");
      if (kind != "cube" && kind != "torus") throw Error(ErrorCode::ParseError, "kind must be cube or torus");
      k.kind = kind == "torus" ? TeselKind::Torus : TeselKind::Cube;
      out = EditTesels{k};
    } else {
      throw Error(ErrorCode::ParseError, "unknown tesel edit '" + op + "'");
    }
  } else if (name == "Lift") {
    out = Lift{};
  } else if (name == "InitAtlas") {
    out = InitAtlas{};
  } else if (name == "SketchHeightCurve") {
    SketchHeightCurve s;
    s.height = t.real("height");
    s.radius = t.real("radius");
    const auto n = t.count("point count");
    if (n > 100000) throw Error(ErrorCode::ParseError, "point count too large");
    for (std::uint64_t k = 0; k < n; ++k) s.points.push_back({t.real("x"), t.real("y"), t.real("z")});
    out = s;
  } else if (name == "LoadRasterLayer") {
    LoadRasterLayer l;
    l.chart = static_cast<ChartId>(t.count("chart"));
    l.scale = t.real("scale");
    l.path = t.rest("path");
    out = l;
  } else if (name == "SetEpsilon") {
    out = SetEpsilon{t.real("epsilon")};
  } else if (name == "Adapt") {
    Adapt a;
    while (!t.done()) {
      const std::string w = t.word("option");
      if (w == "passes") {
        a.max_passes = static_cast<int>(t.count("passes"));
      } else {
        a.kind = parse_kind(w);
      }
    }
    out = a;
  } else if (name == "ExportObj") {
    out = ExportObj{t.rest("path")};
  } else {
    throw Error(ErrorCode::ParseError, "unknown command '" + name + "'");
  }
  t.finish();
  return out;
}

json to_json(const Command& c) {
  json j;
  j["op"] = command_name(c);
  std::visit(overloaded{
                 [&](const SetSamples& s) { j["samples"] = samples_json(s.samples); },
                 [&](const MoveImplicitSamples& s) { j["samples"] = samples_json(s.samples); },
                 [&](const EditTesels& e) {
                   std::visit(overloaded{
                                  [&](const TeselNew& n) {
                                    j["edit"] = "new";
                                    j["lo"] = vec_json(n.lo);
                                    j["hi"] = vec_json(n.hi);
                                    if (!default_plane(n.plane))
                                      j["plane"] = {{"origin", vec_json(n.plane.origin)},
                                                    {"u", vec_json(n.plane.u_axis)},
                                                    {"v", vec_json(n.plane.v_axis)}};
                                  },
                                  [&](const TeselSubdivide& s) {
                                    j["edit"] = "subdivide";
                                    j["tesel"] = s.tesel;
                                    j["axis"] = s.axis == SplitAxis::U ? "U" : "V";
                                  },
                                  [&](const TeselMove& m) {
                                    j["edit"] = "move";
                                    j["vertex"] = m.vertex;
                                    j["position"] = vec_json(m.position);
                                  },
                                  [&](const TeselKindChange& k) {
                                    j["edit"] = "kind";
                                    j["tesel"] = k.tesel;
                                    j["kind"] = k.kind == TeselKind::Torus ? "torus" : "cube";
                                  },
                              },
                              e.edit);
                 },
                 [&](const Lift&) {},
                 [&](const InitAtlas&) {},
                 [&](const SketchHeightCurve& s) {
                   j["height"] = s.height;
                   j["radius"] = s.radius;
                   json pts = json::array();
                   for (const auto& p : s.points) pts.push_back(vec_json(p));
                   j["points"] = pts;
                 },
                 [&](const LoadRasterLayer& l) {
                   j["chart"] = l.chart;
                   j["scale"] = l.scale;
                   j["path"] = l.path;
                 },
                 [&](const SetEpsilon& s) { j["epsilon"] = s.epsilon; },
                 [&](const Adapt& a) {
                   if (a.kind) j["kind"] = kind_name(*a.kind);
                   if (a.max_passes) j["passes"] = *a.max_passes;
                 },
                 [&](const ExportObj& e) { j["path"] = e.path; },
             },
             c);
  return j;
}

Command command_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "command must be a JSON object");
  const json& op = field(j, "op");
  if (!op.is_string()) throw Error(ErrorCode::ParseError, "'op' must be a string");
  const std::string name = op.get<std::string>();
  if (name == "SetSamples") return SetSamples{samples_from_json(field(j, "samples"))};
  if (name == "MoveImplicitSamples") return MoveImplicitSamples{samples_from_json(field(j, "samples"))};
  if (name == "EditTesels") {
    const json& edit = field(j, "edit");
    if (!edit.is_string()) throw Error(ErrorCode::ParseError, "'edit' must be a string");
    const std::string e = edit.get<std::string>();
    if (e == "new") {
      TeselNew n;
      n.lo = vec2_from_json(field(j, "lo"), "lo");
      n.hi = vec2_from_json(field(j, "hi"), "hi");
      if (j.contains("plane")) {
        const json& p = j["plane"];
        n.plane.origin = vec3_from_json(field(p, "origin"), "origin");
        n.plane.u_axis = vec3_from_json(field(p, "u"), "u");
        n.plane.v_axis = vec3_from_json(field(p, "v"), "v");
      }
      return EditTesels{n};
    }
    if (e == "subdivide") {
      TeselSubdivide s;
      s.tesel = static_cast<std::uint32_t>(jcount(field(j, "tesel"), "tesel"));
      const json& axis = field(j, "axis");
      if (axis != "U" && axis != "V") throw Error(ErrorCode::ParseError, "axis must be U or V");
      s.axis = axis == "U" ? SplitAxis::U : SplitAxis::V;
      return EditTesels{s};
    }
    if (e == "move") {
      TeselMove m;
      m.vertex = static_cast<std::uint32_t>(jcount(field(j, "vertex"), "vertex"));
      m.position = vec2_from_json(field(j, "position"), "position");
      return EditTesels{m};
    }
    if (e == "kind") {
      TeselKindChange k;
      k.tesel = static_cast<std::uint32_t>(jcount(field(j, "tesel"), "tesel"));
      const json& kind = field(j, "kind");
      if (kind != "cube" && kind != "torus") throw Error(ErrorCode::ParseError, "kind must be cube or torus");
      k.kind = kind == "torus" ? TeselKind::Torus : TeselKind::Cube;
      return EditTesels{k};
    }
    throw Error(ErrorCode::ParseError, "unknown tesel edit '" + e + "'");
  }
  if (name == "Lift") return Lift{};
  if (name == "InitAtlas") return InitAtlas{};
  if (name == "SketchHeightCurve") {
    SketchHeightCurve s;
    s.height = jnum(field(j, "height"), "height");
    s.radius = jnum(field(j, "radius"), "radius");
    const json& pts = field(j, "points");
    if (!pts.is_array()) throw Error(ErrorCode::ParseError, "'points' must be an array");
    for (const auto& p : pts) s.points.push_back(vec3_from_json(p, "point"));
    return s;
  }
  if (name == "LoadRasterLayer") {
    LoadRasterLayer l;
    l.chart = static_cast<ChartId>(jcount(field(j, "chart"), "chart"));
    l.scale = jnum(field(j, "scale"), "scale");
    const json& path = field(j, "path");
    if (!path.is_string()) throw Error(ErrorCode::ParseError, "'path' must be a string");
    l.path = path.get<std::string>();
    return l;
  }
  if (name == "SetEpsilon") return SetEpsilon{jnum(field(j, "epsilon"), "epsilon")};
  if (name == "Adapt") {
    Adapt a;
    if (j.contains("kind")) {
      if (!j["kind"].is_string()) throw Error(ErrorCode::ParseError, "'kind' must be a string");
      a.kind = parse_kind(j["kind"].get<std::string>());
    }
    if (j.contains("passes")) a.max_passes = static_cast<int>(jcount(j["passes"], "passes"));
    return a;
  }
  if (name == "ExportObj") {
    const json& path = field(j, "path");
    if (!path.is_string()) throw Error(ErrorCode::ParseError, "'path' must be a string");
    return ExportObj{path.get<std::string>()};
  }
  throw Error(ErrorCode::ParseError, "unknown command '" + name + "'");
}

// ----------------------------------------------------------------------------

void SessionConfig::set(std::string_view key, std::string_view value) {
  Tokens t(value);
  SessionConfig next = *this;
  if (key == "epsilon") {
    next.epsilon = t.real("epsilon");
  } else if (key == "samples") {
    next.samples = static_cast<int>(t.count("samples"));
  } else if (key == "max_passes") {
    next.max_passes = static_cast<int>(t.count("max_passes"));
  } else if (key == "max_level") {
    next.max_level = static_cast<int>(t.count("max_level"));
  } else if (key == "trust_radius") {
    next.trust_radius = t.real("trust_radius");
  } else if (key == "error") {
    next.error = parse_kind(t.word("error"));
  } else if (key == "seed") {
    next.seed = t.count("seed");
  } else {
    throw Error(ErrorCode::ParseError, "unknown config key '" + std::string(key) + "'");
  }
  t.finish();
  next.validate();
  *this = next;
}

void SessionConfig::validate() const {
  if (!(epsilon > 0)) throw Error(ErrorCode::ParseError, "epsilon must be positive");
  if (samples < 1) throw Error(ErrorCode::ParseError, "samples must be at least 1");
  if (max_passes < 1) throw Error(ErrorCode::ParseError, "max_passes must be at least 1");
  if (max_level < 1) throw Error(ErrorCode::ParseError, "max_level must be at least 1");
  if (trust_radius < 0) throw Error(ErrorCode::ParseError, "trust_radius must be non-negative");
}

std::string scene_header(const SessionConfig& config) {
  const SessionConfig d;
  std::ostringstream out;
  out << "dass-scene 1\n";
  out << "seed " << config.seed << '\n';
  if (config.epsilon != d.epsilon) out << "config epsilon " << num(config.epsilon) << '\n';
  if (config.samples != d.samples) out << "config samples " << config.samples << '\n';
  if (config.max_passes != d.max_passes) out << "config max_passes " << config.max_passes << '\n';
  if (config.max_level != d.max_level) out << "config max_level " << config.max_level << '\n';
  if (config.trust_radius != d.trust_radius) out << "config trust_radius " << num(config.trust_radius) << '\n';
  if (config.error != d.error) out << "config error " << kind_name(config.error) << '\n';
  return out.str();
}

Scene parse_scene(std::string_view text) {
  Scene scene;
  bool header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    try {
      Tokens t(line);
      const std::string_view head = t.peek();
      if (!header) {
        if (head != "dass-scene") throw Error(ErrorCode::ParseError, "expected 'dass-scene 1' header");
        t.word("header");
        if (t.count("version") != 1) throw Error(ErrorCode::ParseError, "unsupported scene version");
        t.finish();
        header = true;
      } else if (head == "seed") {
        t.word("seed");
        scene.config.seed = t.count("seed");
        t.finish();
      } else if (head == "config") {
        t.word("config");
        const std::string key = t.word("config key");
        scene.config.set(key, t.rest("config value"));
      } else {
        scene.commands.push_back({line_no, parse_command(line)});
      }
    } catch (const SceneParseError&) {
      throw;
    } catch (const Error& e) {
      throw SceneParseError(line_no, e.what());
    }
    if (end == text.size()) break;
  }
  return scene;
}

}  // namespace dass
