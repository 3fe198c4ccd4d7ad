// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "dass/io.hpp"
#include "dass/session.hpp"

namespace dass {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int status = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string("\"") + DASS_CLI + "\" " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buffer[512];
  while (const std::size_t n = fread(buffer, 1, sizeof buffer, pipe)) r.output.append(buffer, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("dass_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                     "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, ValidateReportsFailingLine) {
  const fs::path dir = temp_dir();
  {
    std::ofstream(dir / "bad.log") << "dass-scene 1\n# nothing sampled yet\nLift\n";
  }
  const CliResult bad = run_cli("validate \"" + (dir / "bad.log").string() + "\"");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.output.find("bad.log:3:"), std::string::npos) << bad.output;
  EXPECT_NE(bad.output.find("PhaseError"), std::string::npos) << bad.output;

  const CliResult good = run_cli(std::string("validate \"") + DASS_SCENES_DIR + "/duck.log\"");
  EXPECT_EQ(good.status, 0) << good.output;
  EXPECT_EQ(good.output.rfind("ok: ", 0), 0u) << good.output;
  fs::remove_all(dir);
}

TEST(Cli, RunMatchesLibraryReplay) {
  const fs::path dir = temp_dir();
  const std::string scene = "dass-scene 1\nseed 4\nconfig epsilon 0.004\n"
                            "SetSamples 6 0.5 0 0 1 0 0 -0.5 0 0 -1 0 0 0 0.5 0 0 1 0 0 -0.5 0 0 -1 0 0 0 0.5 0 0 1 "
                            "0 0 -0.5 0 0 -1\n"
                            "EditTesels new -0.2 -0.2 0.2 0.2\nLift\nInitAtlas\n";
  {
    std::ofstream(dir / "scene.log") << scene;
  }
  const CliResult r = run_cli("run \"" + (dir / "scene.log").string() + "\" --out \"" + (dir / "out.obj").string() +
                        "\" --stats \"" + (dir / "stats.json").string() + "\" --charts-dir \"" +
                        (dir / "charts").string() + "\"");
  ASSERT_EQ(r.status, 0) << r.output;

  std::ostringstream expected;
  write_obj(expected, replay(scene).session.display_snapshot());
  EXPECT_EQ(read_file((dir / "out.obj").string()), expected.str());
  const auto stats = nlohmann::json::parse(read_file((dir / "stats.json").string()));
  EXPECT_EQ(stats["charts"], 6);
  EXPECT_TRUE(stats["failure"].is_null());
  for (int c = 1; c <= 6; ++c) EXPECT_TRUE(fs::exists(dir / "charts" / ("chart_" + std::to_string(c) + ".svg")));

  const CliResult missing = run_cli("run \"" + (dir / "none.log").string() + "\" --out x.obj");
  EXPECT_NE(missing.status, 0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dass
