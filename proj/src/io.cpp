// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dass/error.hpp"

namespace dass {

namespace {

template <class T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::string_view bytes, std::size_t& at) {
  if (at + sizeof(T) > bytes.size()) throw Error(ErrorCode::ParseError, "truncated mesh payload");
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + at, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  at += sizeof(T);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

std::string num(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

MeshSnapshot snapshot(const Mesh48& m, std::span<const Vector3d> display) {
  MeshSnapshot s;
  std::vector<std::uint32_t> index(m.vertex_capacity(), kInvalidId);
  for (VertexId v : m.alive_vertices()) {
    index[v] = static_cast<std::uint32_t>(s.positions.size());
    s.positions.push_back(display.empty() ? m.vertex(v).position : display[v]);
    s.labels.push_back(m.vertex(v).label);
  }
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    s.triangles.push_back({index[t[0]], index[t[1]], index[t[2]]});
  }
  return s;
}

void write_obj(std::ostream& out, const MeshSnapshot& mesh, bool labels) {
  out << "# dass mesh: " << mesh.positions.size() << " vertices, " << mesh.triangles.size() << " faces\n";
  for (const auto& p : mesh.positions)
    out << "v " << num(p.x(), 10) << ' ' << num(p.y(), 10) << ' ' << num(p.z(), 10) << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (labels)
    for (std::size_t i = 0; i < mesh.labels.size(); ++i) out << "# label " << i + 1 << ' ' << mesh.labels[i] << '\n';
}

void write_obj_file(const std::string& path, const MeshSnapshot& mesh, bool labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_obj(out, mesh, labels);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::string encode_mesh_binary(const MeshSnapshot& mesh, std::uint64_t generation) {
  std::string out = "DSM1";
  out.reserve(24 + mesh.positions.size() * 16 + mesh.triangles.size() * 12);
  put_le<std::uint64_t>(out, generation);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.positions.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const auto& p : mesh.positions)
    for (int k = 0; k < 3; ++k) put_le<float>(out, static_cast<float>(p[k]));
  for (const auto& t : mesh.triangles)
    for (auto i : t) put_le<std::uint32_t>(out, i);
  for (auto l : mesh.labels) put_le<std::uint32_t>(out, l);
  return out;
}

DecodedMesh decode_mesh_binary(std::string_view bytes) {
  if (bytes.substr(0, 4) != "DSM1") throw Error(ErrorCode::ParseError, "bad mesh payload magic");
  std::size_t at = 4;
  DecodedMesh d;
  d.generation = get_le<std::uint64_t>(bytes, at);
  const auto nv = get_le<std::uint32_t>(bytes, at);
  const auto nt = get_le<std::uint32_t>(bytes, at);
  d.positions.resize(nv);
  for (auto& p : d.positions)
    for (auto& c : p) c = get_le<float>(bytes, at);
  d.triangles.resize(nt);
  for (auto& t : d.triangles)
    for (auto& i : t) i = get_le<std::uint32_t>(bytes, at);
  d.labels.resize(nv);
  for (auto& l : d.labels) l = get_le<std::uint32_t>(bytes, at);
  if (at != bytes.size()) throw Error(ErrorCode::ParseError, "trailing bytes in mesh payload");
  return d;
}

// ----------------------------------------------------------------------------

RasterImage parse_pgm(std::string_view bytes) {
  std::size_t at = 0;
  auto skip_space = [&] {
    while (at < bytes.size()) {
      if (bytes[at] == '#') {
        while (at < bytes.size() && bytes[at] != '\n') ++at;
      } else if (std::isspace(static_cast<unsigned char>(bytes[at]))) {
        ++at;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() {
    skip_space();
    if (at >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[at])))
      throw Error(ErrorCode::InvalidLayer, "malformed PGM header");
    long value = 0;
    while (at < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[at]))) {
      value = value * 10 + (bytes[at++] - '0');
      if (value > 1 << 24) throw Error(ErrorCode::InvalidLayer, "PGM header value too large");
    }
    return static_cast<int>(value);
  };

  if (bytes.substr(0, 2) != "P5") throw Error(ErrorCode::InvalidLayer, "only binary PGM (P5) is supported");
  at = 2;
  RasterImage img;
  img.width = read_int();
  img.height = read_int();
  const int maxval = read_int();
  if (at >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[at])))
    throw Error(ErrorCode::InvalidLayer, "malformed PGM header");
  ++at;
  if (img.width < 2 || img.height < 2) throw Error(ErrorCode::InvalidLayer, "raster layers need at least 2x2 pixels");
  if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::InvalidLayer, "PGM maxval out of range");
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - at < count * bpp) throw Error(ErrorCode::InvalidLayer, "PGM pixel data truncated");
  img.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned value;
    if (bpp == 1) {
      value = static_cast<unsigned char>(bytes[at + i]);
    } else {  // 16-bit samples are big-endian
      value = (static_cast<unsigned>(static_cast<unsigned char>(bytes[at + 2 * i])) << 8) |
              static_cast<unsigned char>(bytes[at + 2 * i + 1]);
    }
    img.values[i] = std::min(1.0, static_cast<double>(value) / maxval);
  }
  return img;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RasterImage read_pgm(const std::string& path) { return parse_pgm(read_file(path)); }

std::string encode_pgm(const RasterImage& image, int maxval) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" +
                    std::to_string(maxval) + "\n";
  for (double v : image.values) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (maxval < 256) {
      out.push_back(static_cast<char>(q));
    } else {
      out.push_back(static_cast<char>(q >> 8));
      out.push_back(static_cast<char>(q & 0xff));
    }
  }
  return out;
}

// ----------------------------------------------------------------------------

void write_chart_svg(std::ostream& out, const Mesh48& m, const Atlas& atlas, ChartId chart, int size) {
  const auto& c = atlas.chart(chart);
  const double pad = 0.05 * size;
  const double scale = size - 2 * pad;
  // v grows upwards in the chart, downwards in SVG.
  auto x = [&](const Vector2d& p) { return num(pad + p.x() * scale, 6); };
  auto y = [&](const Vector2d& p) { return num(pad + (1 - p.y()) * scale, 6); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  out << "<title>chart " << chart << "</title>\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << scale << "\" height=\"" << scale
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<g fill=\"none\" stroke=\"#246\" stroke-width=\"0.5\">\n";
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    bool mine = false;
    for (VertexId v : t) mine |= m.vertex(v).label == chart;
    if (!mine) continue;
    out << "<polygon points=\"";
    for (int k = 0; k < 3; ++k) {
      const Vector2d* uv = m.vertex(t[k]).coords_in(chart);
      if (!uv) continue;
      out << (k ? " " : "") << x(*uv) << ',' << y(*uv);
    }
    out << "\"/>\n";
  }
  out << "</g>\n<g fill=\"none\" stroke=\"#c30\" stroke-width=\"2\">\n";
  for (const auto& layer : c.layers) {
    const auto* s = std::get_if<SketchedLayer>(&layer);
    if (!s) continue;
    for (const auto& curve : s->curves) {
      out << "<polyline points=\"";
      for (std::size_t k = 0; k < curve.points.size(); ++k)
        out << (k ? " " : "") << x(curve.points[k]) << ',' << y(curve.points[k]);
      out << "\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
}

}  // namespace dass
