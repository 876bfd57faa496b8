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
#include <vector>

#include "symsec/symsec.h"

namespace {

std::string config_json(const symsec_config *cfg) {
  size_t need = 0;
  REQUIRE(symsec_config_to_json(cfg, nullptr, 0, &need) == SYMSEC_OK);
  std::vector<char> buf(need);
  REQUIRE(symsec_config_to_json(cfg, buf.data(), buf.size(), &need) == SYMSEC_OK);
  return buf.data();
}

}  // namespace

TEST_CASE("config defaults and round-trip") {
  symsec_config *cfg = nullptr;
  REQUIRE(symsec_config_parse(nullptr, &cfg) == SYMSEC_OK);
  const std::string j = config_json(cfg);
  symsec_config *again = nullptr;
  REQUIRE(symsec_config_parse(j.c_str(), &again) == SYMSEC_OK);
  CHECK(config_json(again) == j);
  symsec_config_free(again);

  char small[4];
  size_t need = 0;
  CHECK(symsec_config_to_json(cfg, small, sizeof small, &need) == SYMSEC_E_BUFFER_TOO_SMALL);
  CHECK(need == j.size() + 1);
  symsec_config_free(cfg);
}

TEST_CASE("errors carry codes and messages") {
  symsec_config *cfg = nullptr;
  CHECK(symsec_config_parse("{\"bogus\": 1}", &cfg) == SYMSEC_E_INVALID_PARAMETER);
  CHECK(cfg == nullptr);
  CHECK(std::string(symsec_last_error()).find("bogus") != std::string::npos);
  CHECK(symsec_config_parse("{", &cfg) != SYMSEC_OK);
  CHECK(symsec_config_load("/nonexistent/cfg.json", &cfg) == SYMSEC_E_IO);
  CHECK(symsec_config_parse(nullptr, nullptr) == SYMSEC_E_NULL_ARGUMENT);
  CHECK(std::string(symsec_error_name(SYMSEC_E_INFEASIBLE)) == "infeasible");
  symsec_config_free(nullptr);
  symsec_channels_free(nullptr);
  symsec_solution_free(nullptr);
  symsec_sweep_free(nullptr);
}

TEST_CASE("draw, solve and inspect") {
  symsec_config *cfg = nullptr;
  REQUIRE(symsec_config_parse(nullptr, &cfg) == SYMSEC_OK);
  symsec_channels *ch = nullptr;
  REQUIRE(symsec_channels_draw(cfg, 11, 0, &ch) == SYMSEC_OK);
  int k = 0, n = 0, m = 0;
  REQUIRE(symsec_channels_dims(ch, &k, &n, &m) == SYMSEC_OK);
  CHECK(k == 3);
  CHECK(n > 0);
  CHECK(m == 4);

  symsec_solution *sol = nullptr;
  CHECK(symsec_solve(cfg, ch, "mrt", &sol) == SYMSEC_E_INVALID_PARAMETER);
  CHECK(sol == nullptr);
  REQUIRE(symsec_solve(cfg, ch, "proposed", &sol) == SYMSEC_OK);
  double obj = 0, rate = 0, margin = 0;
  int iters = 0;
  REQUIRE(symsec_solution_objective(sol, &obj) == SYMSEC_OK);
  REQUIRE(symsec_solution_sum_rate(sol, 0, &rate) == SYMSEC_OK);
  REQUIRE(symsec_solution_tu_margin(sol, &margin) == SYMSEC_OK);
  REQUIRE(symsec_solution_iterations(sol, &iters) == SYMSEC_OK);
  CHECK(obj > 0);
  CHECK(rate >= obj - 1e-6);
  CHECK(margin >= -1e-4);
  CHECK(iters >= 1);
  size_t need = 0;
  REQUIRE(symsec_solution_to_json(sol, nullptr, 0, &need) == SYMSEC_OK);
  std::string js(need, '\0');
  REQUIRE(symsec_solution_to_json(sol, js.data(), js.size(), &need) == SYMSEC_OK);
  CHECK(js.find("\"proposed\"") != std::string::npos);
  symsec_solution_free(sol);
  symsec_channels_free(ch);
  symsec_config_free(cfg);
}

TEST_CASE("small sweep through the C interface") {
  const char *json = R"({"sweep": "Q", "grid": [0.5], "methods": ["proposed"], "realizations": 1, "threads": 1})";
  symsec_config *cfg = nullptr;
  REQUIRE(symsec_config_parse(json, &cfg) == SYMSEC_OK);
  symsec_sweep *sw = nullptr;
  REQUIRE(symsec_sweep_run(cfg, &sw) == SYMSEC_OK);
  int bad = -1;
  REQUIRE(symsec_sweep_infeasible(sw, &bad) == SYMSEC_OK);
  CHECK(bad == 0);
  size_t need = 0;
  REQUIRE(symsec_sweep_to_csv(sw, nullptr, 0, &need) == SYMSEC_OK);
  std::string csv(need, '\0');
  REQUIRE(symsec_sweep_to_csv(sw, csv.data(), csv.size(), &need) == SYMSEC_OK);
  csv.resize(need - 1);
  CHECK(csv.find("Q,proposed,0.5,") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "symsec_test_capi";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "q.csv").string();
  REQUIRE(symsec_sweep_write_csv(sw, path.c_str()) == SYMSEC_OK);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  REQUIRE(symsec_sweep_write_plot(sw, (dir / "q.gp").string().c_str(), "q.csv") == SYMSEC_OK);
  CHECK(std::filesystem::exists(dir / "q.gp"));
  std::filesystem::remove_all(dir);
  symsec_sweep_free(sw);
  symsec_config_free(cfg);
}
