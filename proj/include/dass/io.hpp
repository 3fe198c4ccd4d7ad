// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// Mesh export (OBJ and the binary payload served to the UI), PGM ingestion
// and SVG chart dumps.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dass/atlas.hpp"
#include "dass/layers.hpp"
#include "dass/mesh48.hpp"

namespace dass {

/// Compacted copy of the alive part of a mesh.
struct MeshSnapshot {
  std::vector<Vector3d> positions;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<Label> labels;
};

/// `display` holds one position per vertex slot; when empty the stored
/// (undisplaced) positions are used.
MeshSnapshot snapshot(const Mesh48& m, std::span<const Vector3d> display = {});

/// Positions with 10 significant digits, 1-based faces, then one
/// "# label <index> <label>" line per vertex when `labels` is set.
void write_obj(std::ostream& out, const MeshSnapshot& mesh, bool labels = true);
void write_obj_file(const std::string& path, const MeshSnapshot& mesh, bool labels = true);

/// "DSM1", uint64 generation, uint32 vertex count, uint32 triangle count,
/// float32 xyz per vertex, uint32 triple per triangle, uint32 label per
/// vertex. Little-endian throughout.
std::string encode_mesh_binary(const MeshSnapshot& mesh, std::uint64_t generation);
struct DecodedMesh {
  std::uint64_t generation = 0;
  std::vector<std::array<float, 3>> positions;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<std::uint32_t> labels;
};
DecodedMesh decode_mesh_binary(std::string_view bytes);

/// Binary PGM (P5), 8 or 16 bit, values divided by maxval.
RasterImage parse_pgm(std::string_view bytes);
RasterImage read_pgm(const std::string& path);
std::string encode_pgm(const RasterImage& image, int maxval = 255);

/// Chart-coordinate triangulation of one chart plus its height curves.
void write_chart_svg(std::ostream& out, const Mesh48& m, const Atlas& atlas, ChartId chart, int size = 512);

std::string read_file(const std::string& path);

}  // namespace dass
