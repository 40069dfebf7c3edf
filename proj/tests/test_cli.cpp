// Copyright 2026 The Levelflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "levelflow/job.hpp"
#include "support/cli_helpers.hpp"
#include "support/test_helpers.hpp"

using namespace levelflow;
using lftest::run_command;

namespace {

std::string cli() { return std::string("\"") + lftest::cli_path() + "\""; }

nlohmann::json load_schema() {
  std::ifstream in(std::string(LEVELFLOW_SOURCE_DIR) + "/docs/report-schema.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("exit codes are a function of the verdict") {
  REQUIRE(exit_code_for(Verdict::kEquivalent) == 0);
  REQUIRE(exit_code_for(Verdict::kNotEquivalent) == 1);
  REQUIRE(exit_code_for(Verdict::kInconclusive) == 2);
}

TEST_CASE("check exit codes across the standard fields") {
  auto check = [&](const std::string& args) {
    return run_command(cli() + " check " + args).exit_code;
  };
  REQUIRE(check("--expr \"y\" --window -1 1 -1 1 --grid 64 64") == 0);
  REQUIRE(check("--expr \"x^2 + y^2\" --grid 64 64") == 1);
  REQUIRE(check("--expr \"x^2 - y^2\" --grid 129 129") == 1);
  REQUIRE(check("--expr \"y - x^3\" --grid 64 64") == 0);
  // configuration errors are exit 2
  REQUIRE(check("--expr \"y +\"") == 2);
  REQUIRE(check("--expr \"y\" --window 1 1 0 1") == 2);
  REQUIRE(check("") == 2);
}

TEST_CASE("check report validates against the shipped schema") {
  const auto schema = load_schema();
  for (const char* args :
       {"--expr \"y\" --window -1 1 -1 1 --grid 64 64",
        "--expr \"x^2 + y^2\" --grid 64 64"}) {
    const auto result = run_command(cli() + " check " + std::string(args));
    const auto report = nlohmann::json::parse(result.out);
    const auto errors = lftest::check_against_def(report, schema, "check_report");
    for (const auto& e : errors) UNSCOPED_INFO(e);
    REQUIRE(errors.empty());
  }
}

TEST_CASE("straighten writes a chart and a schema-valid report") {
  const auto schema = load_schema();
  const std::string chart_path = "/tmp/levelflow_test_chart.txt";
  std::remove(chart_path.c_str());
  const auto result = run_command(
      cli() + " straighten --expr \"y\" --window -1 1 -1 1 --grid 64 64 --out " +
      chart_path);
  REQUIRE(result.exit_code == 0);
  const auto report = nlohmann::json::parse(result.out);
  const auto errors =
      lftest::check_against_def(report, schema, "straighten_report");
  for (const auto& e : errors) UNSCOPED_INFO(e);
  REQUIRE(errors.empty());
  std::ifstream chart(chart_path);
  REQUIRE(chart.good());
  std::string header;
  std::getline(chart, header);
  REQUIRE(header == "levelflow-chart 1");
}

TEST_CASE("straighten exit codes: hypothesis failure and numeric gate") {
  REQUIRE(run_command(cli() + " straighten --expr \"x^2 - y^2\" --grid 129 129 "
                               "--out /tmp/levelflow_saddle.txt")
              .exit_code == 1);
  // an absurdly tight residual tolerance trips the numeric gate
  REQUIRE(run_command(cli() + " straighten --expr \"y - x^2\" --grid 129 129 "
                               "--tol-verify 1e-12 --out /tmp/levelflow_tight.txt")
              .exit_code == 3);
}

TEST_CASE("json and svg outputs are byte-deterministic") {
  const std::string args = " check --expr \"y - x^2\" --grid 65 65";
  const auto a = run_command(cli() + args);
  const auto b = run_command(cli() + args);
  REQUIRE(a.out == b.out);

  const std::string render =
      " render --expr \"y - x^2\" --grid 65 65 --levels 10 --out ";
  REQUIRE(run_command(cli() + render + "/tmp/levelflow_r1.svg").exit_code == 0);
  REQUIRE(run_command(cli() + render + "/tmp/levelflow_r2.svg").exit_code == 0);
  std::ifstream f1("/tmp/levelflow_r1.svg"), f2("/tmp/levelflow_r2.svg");
  const std::string s1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  REQUIRE_FALSE(s1.empty());
  REQUIRE(s1 == s2);
}

TEST_CASE("job files load with flag precedence") {
  // A gentle parabola whose in-window levels all stay connected, so the
  // job-file check passes as-is.
  const std::string path = "/tmp/levelflow_job.json";
  {
    std::ofstream out(path);
    out << R"({"expr": "y - 0.2*x^2", "window": [-1, 1, -1, 1], "grid": [65, 65],
               "levels": 16, "strips": 4,
               "tolerances": {"verify": 0.05}, "out": "/tmp/levelflow_job_chart.txt"})";
  }
  const JobConfig cfg = load_job_file(path);
  REQUIRE(cfg.expr == "y - 0.2*x^2");
  REQUIRE(cfg.grid_nx == 65);
  REQUIRE(cfg.levels == 16);
  REQUIRE(cfg.strips == 4);
  REQUIRE(cfg.tol_verify.has_value());
  REQUIRE(*cfg.tol_verify == 0.05);
  REQUIRE_FALSE(cfg.tol_trace.has_value());

  // flags override the job file
  const auto flagged = run_command(cli() + " check --job " + path +
                                   " --expr \"x^2 + y^2\"");
  REQUIRE(flagged.exit_code == 1);
  const auto from_file = run_command(cli() + " check --job " + path);
  REQUIRE(from_file.exit_code == 0);
}

TEST_CASE("render overlays a serialized chart") {
  const std::string chart_path = "/tmp/levelflow_overlay_chart.txt";
  REQUIRE(run_command(cli() + " straighten --expr \"y - x^2\" --grid 129 129 "
                               "--strips 4 --out " + chart_path)
              .exit_code == 0);
  const auto r = run_command(cli() + " render --expr \"y - x^2\" --grid 65 65 "
                                      "--levels 8 --strips 4 " + chart_path +
                             " --out /tmp/levelflow_overlay.svg");
  REQUIRE(r.exit_code == 0);
  std::ifstream svg("/tmp/levelflow_overlay.svg");
  const std::string body((std::istreambuf_iterator<char>(svg)),
                         std::istreambuf_iterator<char>());
  REQUIRE(body.find("stroke-dasharray") != std::string::npos);  // sections
  REQUIRE(body.find("#7a1fa2") != std::string::npos);           // chart seams
}
