// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Session commands and their two encodings: one line of the text scene log,
// or one JSON object on the wire. Both carry the same fields.
//
//   dass-scene 1
//   seed 7
//   config epsilon 0.001
//   SetSamples <n> (x y z nx ny nz)*n
//   EditTesels new <u0> <v0> <u1> <v1> [plane ox oy oz ux uy uz vx vy vz]
//   EditTesels subdivide <tesel> U|V
//   EditTesels move <vertex> <u> <v>
//   EditTesels kind <tesel> cube|torus
//   Lift
//   InitAtlas
//   MoveImplicitSamples <n> (x y z nx ny nz)*n
//   SketchHeightCurve <h> <r> <n> (x y z)*n
//   LoadRasterLayer <chart> <scale> <path>
//   SetEpsilon <eps>
//   Adapt [simple|local] [passes <n>]
//   ExportObj <path>

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dass/basemesh.hpp"
#include "dass/heightfield.hpp"
#include "dass/hrbf.hpp"

namespace dass {

struct SetSamples {
  std::vector<OrientedSampled> samples;
};

struct TeselNew {
  Vector2d lo = Vector2d::Zero();
  Vector2d hi = Vector2d::Ones();
  DrawingPlane plane;
};
struct TeselSubdivide {
  std::uint32_t tesel = 0;
  SplitAxis axis = SplitAxis::U;
};
struct TeselMove {
  std::uint32_t vertex = 0;
  Vector2d position = Vector2d::Zero();
};
struct TeselKindChange {
  std::uint32_t tesel = 0;
  TeselKind kind = TeselKind::Cube;
};
struct EditTesels {
  std::variant<TeselNew, TeselSubdivide, TeselMove, TeselKindChange> edit;
};

struct Lift {};
struct InitAtlas {};

struct MoveImplicitSamples {
  std::vector<OrientedSampled> samples;
};

struct SketchHeightCurve {
  double height = 0;
  double radius = 0;
  std::vector<Vector3d> points;
};

struct LoadRasterLayer {
  ChartId chart = 0;
  double scale = 1;
  std::string path;
};

struct SetEpsilon {
  double epsilon = 1e-3;
};

struct Adapt {
  std::optional<ErrorKind> kind;
  std::optional<int> max_passes;
};

struct ExportObj {
  std::string path;
};

using Command = std::variant<SetSamples, EditTesels, Lift, InitAtlas, MoveImplicitSamples, SketchHeightCurve,
                             LoadRasterLayer, SetEpsilon, Adapt, ExportObj>;

std::string_view command_name(const Command& c);
/// Everything except ExportObj changes the session.
bool is_mutating(const Command& c);

/// Doubles are written with 17 significant digits so parsing restores them.
std::string to_text(const Command& c);
Command parse_command(std::string_view line);

nlohmann::json to_json(const Command& c);
Command command_from_json(const nlohmann::json& j);

struct SessionConfig {
  double epsilon = 1e-3;
  int samples = 6;
  int max_passes = 20;
  int max_level = 40;
  /// Largest Newton step during surface projection; 0 means unlimited.
  double trust_radius = 0;
  ErrorKind error = ErrorKind::Local;
  std::uint64_t seed = 0;

  /// Throws ParseError for unknown keys or invalid values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
};

struct SceneLine {
  std::size_t line = 0;  // 1-based
  Command command;
};

struct Scene {
  SessionConfig config;
  std::vector<SceneLine> commands;
};

/// Parses a whole scene log. Errors carry the offending 1-based line number
/// in their message and in `line`.
struct SceneParseError : Error {
  SceneParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

Scene parse_scene(std::string_view text);
std::string scene_header(const SessionConfig& config);

}  // namespace dass
