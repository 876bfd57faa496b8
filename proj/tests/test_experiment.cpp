// Copyright 2026 The symsec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "symsec/error.hpp"
#include "symsec/experiment.hpp"

using namespace symsec;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec s = default_spec(SweepVar::PB);
  s.grid = {26.0, 30.0};
  s.methods = {"proposed", "zf"};
  s.realizations = 2;
  s.master_seed = 7;
  s.threads = 1;
  return s;
}

int count_lines(const std::string &text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("sweep variable names round-trip") {
  for (SweepVar v : {SweepVar::PB, SweepVar::PS, SweepVar::M, SweepVar::Q, SweepVar::Delta})
    CHECK(parse_sweep_var(sweep_var_name(v)) == v);
  CHECK_THROWS_AS(parse_sweep_var("power"), Error);
}

TEST_CASE("default grids") {
  CHECK(default_grid(SweepVar::PB) == std::vector<double>{20, 22, 24, 26, 28, 30});
  CHECK(default_grid(SweepVar::PS) == std::vector<double>{10, 12, 14, 16, 18, 20});
  CHECK(default_grid(SweepVar::M) == std::vector<double>{3, 4, 5, 6});
  CHECK(default_grid(SweepVar::Q).size() == 10);
  CHECK(default_grid(SweepVar::Delta).front() == 0.0);
}

TEST_CASE("grid point sets only the swept parameter") {
  ExperimentSpec s = default_spec(SweepVar::PS);
  const ExperimentSpec p = at_grid_point(s, 14.0);
  CHECK(p.p_s_db == 14.0);
  CHECK(p.p_b_db == s.p_b_db);
  const PowerBudget b = budget_of(p);
  CHECK(b.p_s == doctest::Approx(std::pow(10.0, 1.4)));
  CHECK(b.p_b == doctest::Approx(1000.0));
}

TEST_CASE("spec JSON round-trip and strict keys") {
  ExperimentSpec s = tiny_spec();
  s.sweep = SweepVar::Q;
  s.grid = {0.2, 0.4};
  const std::string j = spec_to_json(s);
  const ExperimentSpec r = spec_from_json(j);
  CHECK(spec_to_json(r) == j);
  CHECK(r.sweep == SweepVar::Q);
  CHECK(r.methods == s.methods);
  CHECK_THROWS_AS(spec_from_json(R"({"realisations": 3})"), Error);
  CHECK_THROWS_AS(spec_from_json("{not json"), Error);
}

TEST_CASE("validation rejects bad specs") {
  ExperimentSpec s = tiny_spec();
  s.realizations = 0;
  CHECK_THROWS_AS(validate(s), Error);
  s = tiny_spec();
  s.methods = {"mrt"};
  CHECK_THROWS_AS(validate(s), Error);
  s = tiny_spec();
  s.sweep = SweepVar::M;
  s.grid = {2.5};
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("Delta keeps the true channels and perturbs only the estimates") {
  ExperimentSpec s = default_spec(SweepVar::Delta);
  const ChannelSet a = realization_channels(at_grid_point(s, 0.0), 3);
  const ChannelSet b = realization_channels(at_grid_point(s, 0.05), 3);
  for (int k = 0; k < a.n_beams(); ++k) {
    CHECK((a.links(k).h_e_true - b.links(k).h_e_true).norm() == 0.0);
    CHECK((a.links(k).g_su - b.links(k).g_su).norm() == 0.0);
    CHECK((a.links(k).g_e_true - a.links(k).g_e_est).norm() == 0.0);
    const double dg = (b.links(k).g_e_true - b.links(k).g_e_est).norm();
    CHECK(dg > 0.0);
    CHECK(dg <= 0.05 * (1 + 1e-12));
  }
}

TEST_CASE("empty method list gives a header-only CSV") {
  ExperimentSpec s = tiny_spec();
  s.methods.clear();
  const SweepResult r = run_sweep(s);
  const std::string csv = format_csv(r);
  CHECK(count_lines(csv) == 1);
  CHECK(csv.rfind("sweep_var,method,value,", 0) == 0);
}

TEST_CASE("sweep shape, determinism and CSV round-trip") {
  const ExperimentSpec s = tiny_spec();
  const SweepResult r1 = run_sweep(s);
  REQUIRE(r1.cells.size() == 4);
  CHECK(r1.runs.size() == 8);
  CHECK(count_lines(format_csv(r1)) == 5);
  for (const RunRecord &rec : r1.runs) {
    if (!rec.feasible) continue;
    CHECK(rec.sat_power <= budget_of(at_grid_point(s, s.grid[rec.grid_index])).p_s * (1 + 1e-4));
    CHECK(rec.tu_margin >= -1e-4);
  }

  ExperimentSpec s2 = s;
  s2.threads = 2;
  const SweepResult r2 = run_sweep(s2);
  CHECK(format_csv(r1) == format_csv(r2));

  const SweepResult back = parse_csv(format_csv(r1));
  CHECK(format_csv(back) == format_csv(r1));
  CHECK(back.cell(1, 0).method == "proposed");
  CHECK(back.cell(1, 0).value == 30.0);

  // More BS power never hurts the proposed design on average here.
  CHECK(r1.cell(1, 0).mean_sum_r_su >= r1.cell(0, 0).mean_sum_r_su - 0.05);
}

TEST_CASE("malformed CSV is rejected") {
  CHECK_THROWS_AS(parse_csv("a,b\n"), Error);
  CHECK_THROWS_AS(parse_csv("sweep_var,method,value,mean_sum_R_su,stderr,mean_tu_margin,infeasible,mean_iters\n"
                            "P_B,proposed,x,1,0,0,0,3\n"),
                  Error);
}

TEST_CASE("plot script and atomic write") {
  SweepResult r;
  r.sweep = SweepVar::Q;
  r.grid = {0.5};
  r.methods = {"proposed", "pa_an"};
  r.cells = {{0.5, "proposed", 1.0, 0.1, 0.2, 0, 3, 2}, {0.5, "pa_an", 0.8, 0.1, 0.2, 0, 3, 2}};
  const std::string script = format_plot_script(r, "q.csv");
  CHECK(script.find("'q.csv'") != std::string::npos);
  CHECK(script.find("strcol(2) eq 'proposed'") != std::string::npos);
  CHECK(script.find("strcol(2) eq 'pa_an'") != std::string::npos);
  CHECK(script.find("yerrorlines") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "symsec_test_experiment";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  emit_csv(r, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == format_csv(r));
  CHECK(!std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(emit_csv(r, (dir / "missing" / "x.csv").string()), Error);
  std::filesystem::remove_all(dir);
}
