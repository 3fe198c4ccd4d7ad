// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// A modelling session: the pipeline state and the three update flows.
//
//   startup / topology (SetSamples, EditTesels, Lift, InitAtlas): rebuild
//     every stage after the one that changed; height layers do not survive.
//   surface edit (MoveImplicitSamples): refit and move the existing vertices
//     onto the new surface without adapting.
//   resolution (SketchHeightCurve, LoadRasterLayer, SetEpsilon, Adapt):
//     update layers or the threshold, then adapt.
//
// Every command runs on a copy of the state and is committed only when it
// succeeds.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dass/atlas.hpp"
#include "dass/basemesh.hpp"
#include "dass/command.hpp"
#include "dass/heightfield.hpp"
#include "dass/hrbf.hpp"
#include "dass/io.hpp"

namespace dass {

struct SessionState {
  std::vector<OrientedSampled> samples;
  std::optional<HrbfSurfaced> surface;
  std::optional<TeselComplex> tesels;
  std::optional<BaseMeshPlan> base;
  std::optional<AtlasMesh> model;
  SessionConfig config;
  std::uint64_t generation = 0;
  std::uint64_t next_stroke = 1;
};

struct ApplyReport {
  std::string command;
  bool mutated = false;
  std::uint64_t generation = 0;
  std::optional<AdaptResult> adapt;
  /// Height layers dropped by a rebuild of the atlas.
  std::size_t discarded_layers = 0;
  std::vector<std::string> notes;
  std::size_t vertices = 0;
  std::size_t faces = 0;

  nlohmann::json to_json() const;
};

class Session {
 public:
  explicit Session(SessionConfig config = {}, std::string base_dir = ".");

  /// Transactional: on failure the state is untouched and the error rethrown.
  ApplyReport apply(const Command& command);

  const SessionState& state() const { return state_; }
  std::uint64_t generation() const { return state_.generation; }
  const SessionConfig& config() const { return state_.config; }
  /// Commands applied successfully, in order.
  const std::vector<Command>& history() const { return history_; }
  /// Header plus history in scene-log form; replaying it rebuilds this state.
  std::string log_text() const;

  bool has_model() const { return state_.model.has_value(); }
  const Mesh48& mesh() const;
  const Atlas& atlas() const;
  const HrbfSurfaced& surface() const;

  ProjectionOptions<double> projection() const;
  /// Where the mesh is drawn: every vertex displaced by its height.
  MeshSnapshot display_snapshot() const;
  /// Largest face error of the current mesh under the configured error.
  double max_face_error() const;

 private:
  SessionConfig initial_config_;
  std::string base_dir_;
  SessionState state_;
  std::vector<Command> history_;
};

struct ReplayFailure {
  std::size_t line = 0;
  std::size_t command_index = 0;
  ErrorCode code = ErrorCode::ParseError;
  std::string message;
};

struct ReplayResult {
  Session session;
  std::vector<ApplyReport> reports;
  std::optional<ReplayFailure> failure;
};

struct ReplayOptions {
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  /// Directory for relative paths in the log.
  std::string base_dir = ".";
  /// Skip ExportObj commands (validation runs).
  bool skip_exports = false;
};

/// Runs a scene log. Stops at the first failing command and reports it; a
/// malformed log is reported the same way with the offending line.
ReplayResult replay(const std::string& text, const ReplayOptions& options = {});

/// Run statistics as written by `dass run --stats`.
nlohmann::json run_stats(const ReplayResult& result);

}  // namespace dass
