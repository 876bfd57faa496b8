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


// symsec command-line front end, built on the C interface.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symsec/symsec.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitInfeasible = 2;

struct Fatal {
  std::string message;
};

void check(int rc, const std::string &what) {
  if (rc != SYMSEC_OK)
    throw Fatal{what + ": " + symsec_error_name(rc) + ": " + symsec_last_error()};
}

// Calls a sized-buffer getter twice.
template <typename F>
std::string fetch(F &&get, const std::string &what) {
  size_t need = 0;
  check(get(nullptr, 0, &need), what);
  std::string s(need, '\0');
  check(get(s.data(), s.size(), &need), what);
  s.resize(need - 1);
  return s;
}

struct Options {
  std::string config;
  std::string out;
  std::string methods;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t realization = 0;
  std::string sweep;
};

class Config {
 public:
  explicit Config(const Options &opt) {
    if (!opt.config.empty()) {
      check(symsec_config_load(opt.config.c_str(), &cfg_), "loading config");
    } else {
      const std::string json = opt.sweep.empty() ? "" : "{\"sweep\": \"" + opt.sweep + "\"}";
      check(symsec_config_parse(json.c_str(), &cfg_), "default config");
    }
    if (opt.seed_set) check(symsec_config_set_seed(cfg_, opt.seed), "--seed");
    if (!opt.methods.empty()) check(symsec_config_set_methods(cfg_, opt.methods.c_str()), "--method");
  }
  ~Config() { symsec_config_free(cfg_); }
  Config(const Config &) = delete;
  Config &operator=(const Config &) = delete;
  const symsec_config *get() const { return cfg_; }

 private:
  symsec_config *cfg_ = nullptr;
};

std::vector<std::string> split_methods(const std::string &list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string m;
  while (std::getline(ss, m, ','))
    if (!m.empty()) out.push_back(m);
  return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Fatal{"cannot write '" + path.string() + "'"};
}

void make_out_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Fatal{"cannot create '" + dir + "': " + ec.message()};
}

int cmd_gen(const Options &opt) {
  Config cfg(opt);
  const std::string json =
      fetch([&](char *b, size_t c, size_t *n) { return symsec_config_to_json(cfg.get(), b, c, n); }, "config");
  if (opt.out.empty()) {
    std::cout << json << "\n";
  } else {
    make_out_dir(opt.out);
    write_text(std::filesystem::path(opt.out) / "config.json", json + "\n");
  }
  return kExitOk;
}

int cmd_solve(const Options &opt) {
  Config cfg(opt);
  const std::string methods = opt.methods.empty() ? "proposed" : opt.methods;
  symsec_channels *ch = nullptr;
  const std::uint64_t seed = opt.seed_set ? opt.seed : 1;
  check(symsec_channels_draw(cfg.get(), seed, opt.realization, &ch), "drawing channels");
  if (!opt.out.empty()) make_out_dir(opt.out);
  int status = kExitOk;
  for (const std::string &m : split_methods(methods)) {
    symsec_solution *sol = nullptr;
    const int rc = symsec_solve(cfg.get(), ch, m.c_str(), &sol);
    if (rc == SYMSEC_E_INFEASIBLE || rc == SYMSEC_E_SOLVER) {
      std::cerr << m << ": " << symsec_error_name(rc) << ": " << symsec_last_error() << "\n";
      status = kExitInfeasible;
      continue;
    }
    if (rc != SYMSEC_OK) symsec_channels_free(ch);
    check(rc, m);
    const std::string report = fetch(
        [&](char *b, size_t c, size_t *n) { return symsec_solution_report(sol, 1, b, c, n); }, "report");
    std::cout << report << "\n";
    if (!opt.out.empty()) {
      const std::string js =
          fetch([&](char *b, size_t c, size_t *n) { return symsec_solution_to_json(sol, b, c, n); }, "solution");
      write_text(std::filesystem::path(opt.out) / ("solution_" + m + ".json"), js + "\n");
    }
    symsec_solution_free(sol);
  }
  symsec_channels_free(ch);
  return status;
}

int cmd_sweep(const Options &opt) {
  Config cfg(opt);
  const std::string dir = opt.out.empty() ? "." : opt.out;
  make_out_dir(dir);
  symsec_sweep *sw = nullptr;
  check(symsec_sweep_run(cfg.get(), &sw), "sweep");
  const auto csv = std::filesystem::path(dir) / "sweep.csv";
  const auto gp = std::filesystem::path(dir) / "sweep.gp";
  int rc = symsec_sweep_write_csv(sw, csv.string().c_str());
  if (rc == SYMSEC_OK) rc = symsec_sweep_write_plot(sw, gp.string().c_str(), "sweep.csv");
  int infeasible = 0;
  symsec_sweep_infeasible(sw, &infeasible);
  symsec_sweep_free(sw);
  check(rc, "writing results");
  std::cerr << "wrote " << csv.string() << " and " << gp.string() << "\n";
  if (infeasible > 0) {
    std::cerr << infeasible << " infeasible run(s)\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_verify(const Options &opt) {
  Config cfg(opt);
  const std::string methods = opt.methods.empty() ? "proposed" : opt.methods;
  const std::uint64_t seed = opt.seed_set ? opt.seed : 1;
  symsec_channels *ch = nullptr;
  check(symsec_channels_draw(cfg.get(), seed, opt.realization, &ch), "drawing channels");
  bool all_pass = true, infeasible = false;
  for (const std::string &m : split_methods(methods)) {
    symsec_solution *sol = nullptr;
    const int rc = symsec_solve(cfg.get(), ch, m.c_str(), &sol);
    if (rc == SYMSEC_E_INFEASIBLE || rc == SYMSEC_E_SOLVER) {
      std::cerr << m << ": " << symsec_error_name(rc) << ": " << symsec_last_error() << "\n";
      infeasible = true;
      continue;
    }
    if (rc != SYMSEC_OK) symsec_channels_free(ch);
    check(rc, m);
    int passed = 0;
    const std::string rep = fetch(
        [&](char *b, size_t c, size_t *n) { return symsec_solution_verify(sol, &passed, b, c, n); }, "verify");
    symsec_solution_free(sol);
    std::cout << "{\"method\": \"" << m << "\", \"checks\": " << rep << "}\n";
    std::cerr << m << ": " << (passed ? "PASS" : "FAIL") << "\n";
    all_pass = all_pass && passed;
  }
  symsec_channels_free(ch);
  if (!all_pass) return kExitFatal;
  return infeasible ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Secrecy beamforming for integrated satellite-terrestrial downlinks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App *sub, bool with_methods) {
    sub->add_option("--config", opt.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed")->each([&](const std::string &) { opt.seed_set = true; });
    sub->add_option("--out", opt.out, "output directory");
    if (with_methods) sub->add_option("--method", opt.methods, "comma-separated: proposed,pa_an,zf");
  };

  CLI::App *gen = app.add_subcommand("gen", "print a default config");
  gen->add_option("--sweep", opt.sweep, "sweep variable: P_B, P_S, M, Q, Delta");
  add_common(gen, false);
  CLI::App *solve = app.add_subcommand("solve", "solve one channel realization and print the secrecy report");
  add_common(solve, true);
  solve->add_option("--realization", opt.realization, "realization index");
  CLI::App *sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep; writes sweep.csv and sweep.gp");
  add_common(sweep, true);
  CLI::App *verify = app.add_subcommand("verify", "tightness, rank and power-minimization checks on one instance");
  add_common(verify, true);
  verify->add_option("--realization", opt.realization, "realization index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt);
    if (solve->parsed()) return cmd_solve(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (verify->parsed()) return cmd_verify(opt);
  } catch (const Fatal &f) {
    std::cerr << "error: " << f.message << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
