// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dass/service.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "httplib.h"

#include "dass/error.hpp"
#include "dass/geometry.hpp"

namespace dass {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response error_response(int status, std::string_view code, const std::string& message, std::uint64_t generation) {
  return json_response(status, {{"error", code}, {"message", message}, {"generation", generation}});
}

int status_for(ErrorCode code) { return code == ErrorCode::PhaseError ? 409 : 422; }

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t at = 0;
  while (at < path.size()) {
    while (at < path.size() && path[at] == '/') ++at;
    const std::size_t end = path.find('/', at);
    const std::size_t stop = end == std::string_view::npos ? path.size() : end;
    if (stop > at) parts.push_back(path.substr(at, stop - at));
    at = stop;
  }
  return parts;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

Vector3d vec3(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_array() || j[name].size() != 3)
    throw Error(ErrorCode::ParseError, std::string("'") + name + "' must be an array of 3 numbers");
  Vector3d v;
  for (int k = 0; k < 3; ++k) {
    if (!j[name][k].is_number()) throw Error(ErrorCode::ParseError, std::string("'") + name + "' must be numeric");
    v[k] = j[name][k].get<double>();
  }
  return v;
}

json to_json(const Vector2d& v) { return json::array({v.x(), v.y()}); }
json to_json(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Service::Service(std::string base_dir) : base_dir_(std::move(base_dir)) {}

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<Service::Entry> Service::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::handle(std::string_view method, std::string_view path, const QueryParams& query,
                         const std::string& body) {
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "sessions") return error_response(404, "NotFound", "no such route", 0);
  if (parts.size() == 1) {
    if (method != "POST") return error_response(405, "MethodNotAllowed", "use POST /sessions", 0);
    return create(body);
  }
  const auto entry = find(std::string(parts[1]));
  if (!entry) return error_response(404, "UnknownSession", "unknown session " + std::string(parts[1]), 0);

  std::lock_guard lock(entry->mutex);
  const std::string_view what = parts.size() > 2 ? parts[2] : std::string_view();
  if (parts.size() == 3 && what == "commands" && method == "POST") return post_command(*entry, body);
  if (parts.size() == 3 && what == "mesh" && method == "GET") return get_mesh(*entry, query);
  if (parts.size() == 4 && what == "charts" && method == "GET") return get_chart(*entry, parts[3]);
  if (parts.size() == 3 && what == "pick" && method == "POST") return pick(*entry, body);
  if (parts.size() == 3 && what == "log" && method == "GET")
    return {200, "text/plain; charset=utf-8", entry->session.log_text()};
  if (parts.size() == 2 && method == "GET")
    return json_response(200, {{"id", parts[1]},
                               {"generation", entry->session.generation()},
                               {"last_error", entry->last_error},
                               {"commands", entry->session.history().size()}});
  return error_response(404, "NotFound", "no such route", entry->session.generation());
}

Response Service::create(const std::string& body) {
  SessionConfig config;
  try {
    if (!body.empty()) {
      const json j = json::parse(body);
      if (!j.is_object()) throw Error(ErrorCode::ParseError, "body must be a JSON object");
      if (j.contains("config")) {
        if (!j["config"].is_object()) throw Error(ErrorCode::ParseError, "'config' must be an object");
        for (const auto& [key, value] : j["config"].items())
          config.set(key, value.is_string() ? value.get<std::string>() : value.dump());
      }
      config.validate();
    }
  } catch (const json::exception& e) {
    return error_response(422, "ParseError", e.what(), 0);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what(), 0);
  }

  std::lock_guard lock(mutex_);
  const std::string id = "s" + std::to_string(next_id_++);
  auto entry = std::make_shared<Entry>();
  entry->session = Session(config, base_dir_);
  sessions_.emplace(id, entry);
  return json_response(201, {{"id", id}, {"generation", 0}});
}

Response Service::post_command(Entry& e, const std::string& body) {
  Session& s = e.session;
  try {
    const Command command = command_from_json(json::parse(body));
    if (std::holds_alternative<ExportObj>(command))
      throw Error(ErrorCode::ParseError, "ExportObj is not available over HTTP; download the mesh instead");
    const ApplyReport report = s.apply(command);
    e.last_error.clear();
    return json_response(200, report.to_json());
  } catch (const json::exception& ex) {
    e.last_error = ex.what();
    return error_response(422, "ParseError", ex.what(), s.generation());
  } catch (const Error& ex) {
    e.last_error = ex.what();
    return error_response(status_for(ex.code()), to_string(ex.code()), ex.what(), s.generation());
  }
}

Response Service::get_mesh(Entry& e, const QueryParams& query) {
  const Session& s = e.session;
  if (!s.has_model()) return error_response(409, "PhaseError", "no mesh before InitAtlas", s.generation());
  if (const auto it = query.find("since"); it != query.end()) {
    const auto since = parse_u64(it->second);
    if (!since) return error_response(422, "ParseError", "'since' must be a generation number", s.generation());
    if (*since == s.generation()) return {204, "application/octet-stream", ""};
  }
  const MeshSnapshot mesh = s.display_snapshot();
  if (const auto it = query.find("format"); it != query.end() && it->second == "json") {
    json positions = json::array();
    for (const auto& p : mesh.positions) positions.push_back(to_json(p));
    return json_response(200, {{"generation", s.generation()},
                               {"positions", positions},
                               {"triangles", mesh.triangles},
                               {"labels", mesh.labels}});
  }
  return {200, "application/octet-stream", encode_mesh_binary(mesh, s.generation())};
}

Response Service::get_chart(Entry& e, std::string_view chart_text) {
  const Session& s = e.session;
  if (!s.has_model()) return error_response(409, "PhaseError", "no charts before InitAtlas", s.generation());
  const auto id = parse_u64(chart_text);
  if (!id || *id == 0 || *id > s.atlas().chart_count())
    return error_response(404, "InvalidId", "no chart " + std::string(chart_text), s.generation());
  const auto chart_id = static_cast<ChartId>(*id);
  const Chart& chart = s.atlas().chart(chart_id);
  const Mesh48& m = s.mesh();

  json neighbours = json::array();
  for (const auto& t : s.atlas().transitions())
    if (t.from == chart_id)
      neighbours.push_back({{"chart", t.to}, {"side", t.side}, {"quarter_turns", t.quarter_turns}, {"offset", to_json(t.offset)}});

  json layers = json::array();
  for (const auto& layer : chart.layers) {
    if (const auto* sk = std::get_if<SketchedLayer>(&layer)) {
      json curves = json::array();
      for (const auto& c : sk->curves) {
        json points = json::array();
        for (const auto& p : c.points) points.push_back(to_json(p));
        curves.push_back({{"points", points}, {"height", c.height}, {"radius", c.radius}, {"stroke", c.stroke}});
      }
      layers.push_back({{"type", "sketched"}, {"curves", curves}});
    } else if (const auto* r = std::get_if<RasterLayer>(&layer)) {
      layers.push_back({{"type", "raster"},
                        {"width", r->image.width},
                        {"height", r->image.height},
                        {"scale", r->scale},
                        {"extent", {{0, 0}, {1, 1}}}});
    }
  }

  // Chart-space triangulation for drawing.
  std::unordered_map<VertexId, std::uint32_t> index;
  json uvs = json::array();
  json triangles = json::array();
  const auto partition = chart_partition(m, s.atlas().chart_count());
  for (FaceId f : partition[chart_id]) {
    std::array<std::uint32_t, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      const VertexId v = m.face(f).v[k];
      auto [it, fresh] = index.try_emplace(v, static_cast<std::uint32_t>(uvs.size()));
      if (fresh) uvs.push_back(to_json(*m.vertex(v).coords_in(chart_id)));
      tri[k] = it->second;
    }
    triangles.push_back(tri);
  }

  json corners = json::array();
  for (VertexId v : chart.corners) corners.push_back(to_json(m.vertex(v).position));
  return json_response(200, {{"id", chart_id},
                             {"generation", s.generation()},
                             {"corners", corners},
                             {"neighbours", neighbours},
                             {"layers", layers},
                             {"uv", uvs},
                             {"triangles", triangles}});
}

Response Service::pick(Entry& e, const std::string& body) {
  const Session& s = e.session;
  if (!s.has_model()) return error_response(409, "PhaseError", "nothing to pick before InitAtlas", s.generation());
  try {
    const json j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "body must be a JSON object");
    const Vector3d origin = vec3(j, "origin");
    const Vector3d dir = vec3(j, "dir");
    if (!(dir.norm() > 0)) throw Error(ErrorCode::ParseError, "'dir' must be non-zero");
    const auto hit = surface_hit(s, origin, dir);
    if (!hit) return json_response(200, {{"hit", false}, {"generation", s.generation()}});
    return json_response(200, {{"hit", true},
                               {"generation", s.generation()},
                               {"point", to_json(hit->point)},
                               {"mesh_point", to_json(hit->mesh_point)},
                               {"face", hit->face},
                               {"chart", hit->chart},
                               {"uv", to_json(hit->uv)},
                               {"residual", hit->residual}});
  } catch (const json::exception& ex) {
    return error_response(422, "ParseError", ex.what(), s.generation());
  } catch (const Error& ex) {
    return error_response(status_for(ex.code()), to_string(ex.code()), ex.what(), s.generation());
  }
}

std::optional<SurfaceHit> surface_hit(const Session& session, const Vector3d& origin, const Vector3d& dir) {
  const Mesh48& m = session.mesh();
  double best = std::numeric_limits<double>::infinity();
  FaceId best_face = kInvalidId;
  for (FaceId f : m.alive_faces()) {
    const auto& t = m.face(f).v;
    const auto hit = ray_triangle(origin, dir, m.vertex(t[0]).position, m.vertex(t[1]).position,
                                  m.vertex(t[2]).position);
    if (hit && hit->first < best) {
      best = hit->first;
      best_face = f;
    }
  }
  if (best_face == kInvalidId) return std::nullopt;

  SurfaceHit hit;
  hit.face = best_face;
  hit.mesh_point = origin + best * dir;
  hit.point = session.surface().project_onto(hit.mesh_point, session.projection());
  hit.residual = session.surface().eval(hit.point);
  const auto project = [&](const Vector3d& x) { return session.surface().project_onto(x, session.projection()); };
  const ChartPoint cp = phi_inv(session.atlas(), m, hit.point, project);
  hit.chart = cp.chart;
  hit.uv = cp.uv;
  return hit;
}

std::pair<std::string, int> parse_address(std::string_view address) {
  std::string host = "127.0.0.1";
  int port = 8080;
  const auto colon = address.rfind(':');
  const std::string_view h = colon == std::string_view::npos ? address : address.substr(0, colon);
  if (!h.empty()) host = std::string(h);
  if (colon != std::string_view::npos) {
    const std::string_view p = address.substr(colon + 1);
    const auto value = parse_u64(p);
    if (!value || *value > 65535) throw Error(ErrorCode::ParseError, "bad port in address '" + std::string(address) + "'");
    port = static_cast<int>(*value);
  }
  return {host, port};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    QueryParams query(req.params.begin(), req.params.end());
    Response r;
    try {
      r = service.handle(req.method, req.path, query, req.body);
    } catch (const std::exception& e) {
      r = error_response(500, "Internal", e.what(), 0);
    }
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.content_type);
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  auto& server = impl_->server;
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port) ? port : -1;
  if (bound <= 0) throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() {
  if (!impl_->server.listen_after_bind()) throw Error(ErrorCode::IoError, "server stopped unexpectedly");
}

void HttpServer::stop() { impl_->server.stop(); }

void run_server(Service& service, const std::string& host, int port) {
  HttpServer server(service);
  server.bind(host, port);
  server.serve();
}

}  // namespace dass
