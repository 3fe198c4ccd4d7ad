// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// HTTP session service for the browser client.
//
//   POST /sessions                      -> {"id", "generation"}
//   POST /sessions/{id}/commands        command JSON -> apply report
//   GET  /sessions/{id}/mesh?since=g    binary mesh payload (204 if unchanged),
//                                       ?format=json for a JSON copy
//   GET  /sessions/{id}/charts/{c}      chart corners, neighbours and layers
//   POST /sessions/{id}/pick            {"origin", "dir"} -> surface hit
//   GET  /sessions/{id}/log             scene log of the session
//
// Errors: 404 unknown session or route, 409 phase error, 422 invalid command
// or one the model rejects. Bodies are {"error", "message", "generation"}.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "dass/session.hpp"

namespace dass {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using QueryParams = std::multimap<std::string, std::string>;

class Service {
 public:
  /// Relative raster paths are resolved against `base_dir`.
  explicit Service(std::string base_dir = ".");

  /// Thread-safe. Commands on one session are serialised; different
  /// sessions run independently.
  Response handle(std::string_view method, std::string_view path, const QueryParams& query,
                  const std::string& body);

  std::size_t session_count() const;

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    std::string last_error;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  Response create(const std::string& body);
  Response post_command(Entry& e, const std::string& body);
  Response get_mesh(Entry& e, const QueryParams& query);
  Response get_chart(Entry& e, std::string_view chart);
  Response pick(Entry& e, const std::string& body);

  std::string base_dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Closest hit of the ray origin + t dir (t > 0) with the coarse mesh,
/// refined onto the implicit surface.
struct SurfaceHit {
  Vector3d point = Vector3d::Zero();
  Vector3d mesh_point = Vector3d::Zero();
  FaceId face = kInvalidId;
  ChartId chart = 0;
  Vector2d uv = Vector2d::Zero();
  double residual = 0;
};
std::optional<SurfaceHit> surface_hit(const Session& session, const Vector3d& origin, const Vector3d& dir);

/// "host:port", "host" or ":port"; defaults 127.0.0.1 and 8080.
std::pair<std::string, int> parse_address(std::string_view address);

/// HTTP front end for a Service, with permissive CORS for the browser client.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws IoError.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving `service` on the address.
void run_server(Service& service, const std::string& host, int port);

}  // namespace dass
