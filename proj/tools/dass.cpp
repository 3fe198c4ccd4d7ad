// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

// dass run <scene.log> --out mesh.obj [--eps X] [--seed N] [--stats stats.json]
// dass validate <scene.log>
// dass serve [--addr host:port]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "dass/error.hpp"
#include "dass/io.hpp"
#include "dass/service.hpp"
#include "dass/session.hpp"

namespace {

void report_failure(const std::string& scene, const dass::ReplayFailure& f) {
  std::cerr << scene << ":" << f.line << ": command " << f.command_index + 1 << " failed: " << f.message << "\n";
}

std::string scene_dir(const std::string& scene) {
  const auto parent = std::filesystem::path(scene).parent_path();
  return parent.empty() ? "." : parent.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive sketch-based modelling kernel"};
  app.require_subcommand(1);

  std::string scene;
  std::string out;
  std::string stats;
  std::string charts_dir;
  double eps = 0;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Replay a scene log and export the final mesh");
  run->add_option("scene", scene, "Scene log")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "OBJ output path")->required();
  auto* eps_opt = run->add_option("--eps", eps, "Override the error threshold")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Override the sampling seed");
  run->add_option("--stats", stats, "Write run statistics as JSON");
  run->add_option("--charts-dir", charts_dir, "Write one SVG per chart into this directory");

  auto* validate = app.add_subcommand("validate", "Check that a scene log parses and replays");
  validate->add_option("scene", scene, "Scene log")->required()->check(CLI::ExistingFile);

  std::string addr;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--addr", addr, "Bind address host:port (default $DASS_ADDR or 127.0.0.1:8080)");
  std::string root = ".";
  serve->add_option("--root", root, "Directory for relative raster paths");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *validate) {
      dass::ReplayOptions options;
      options.base_dir = scene_dir(scene);
      if (*eps_opt) options.epsilon = eps;
      if (*seed_opt) options.seed = seed;
      // The final mesh goes to --out; exports inside the log are not replayed.
      options.skip_exports = true;
      const auto result = dass::replay(dass::read_file(scene), options);
      if (result.failure) {
        report_failure(scene, *result.failure);
        return 1;
      }
      if (*validate) {
        std::cout << "ok: " << result.reports.size() << " commands, generation " << result.session.generation()
                  << "\n";
        return 0;
      }
      if (!result.session.has_model()) {
        std::cerr << scene << ": scene never reaches InitAtlas; nothing to export\n";
        return 1;
      }
      dass::write_obj_file(out, result.session.display_snapshot());
      if (!stats.empty()) {
        std::ofstream s(stats, std::ios::binary);
        if (!s) throw dass::Error(dass::ErrorCode::IoError, "cannot write " + stats);
        s << dass::run_stats(result).dump(2) << "\n";
      }
      if (!charts_dir.empty()) {
        std::filesystem::create_directories(charts_dir);
        const auto& atlas = result.session.atlas();
        for (dass::ChartId c = 1; c <= atlas.chart_count(); ++c) {
          std::ofstream svg(std::filesystem::path(charts_dir) / ("chart_" + std::to_string(c) + ".svg"));
          dass::write_chart_svg(svg, result.session.mesh(), atlas, c);
        }
      }
      std::cout << "wrote " << out << " (" << result.session.mesh().vertex_count() << " vertices, "
                << result.session.mesh().face_count() << " faces)\n";
      return 0;
    }
    if (*serve) {
      if (addr.empty()) {
        const char* env = std::getenv("DASS_ADDR");
        addr = env ? env : "127.0.0.1:8080";
      }
      const auto [host, port] = dass::parse_address(addr);
      dass::Service service(root);
      std::cout << "listening on " << host << ":" << port << std::endl;
      dass::run_server(service, host, port);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
