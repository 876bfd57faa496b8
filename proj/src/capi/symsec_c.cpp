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


#include "symsec/symsec.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "json.hpp"
#include "symsec/error.hpp"
#include "symsec/experiment.hpp"

struct symsec_config {
  symsec::ExperimentSpec spec;
};

struct symsec_channels {
  symsec::ChannelSet ch;
};

struct symsec_solution {
  symsec::BeamformingSolution sol;
  symsec::ChannelSet ch;
  symsec::PowerBudget budget;
  symsec::ScaConfig cfg;
};

struct symsec_sweep {
  symsec::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string &msg) {
  g_last_error = msg;
  return code;
}

int code_of(symsec::ErrorCode c) {
  switch (c) {
    case symsec::ErrorCode::InvalidParameter: return SYMSEC_E_INVALID_PARAMETER;
    case symsec::ErrorCode::InvalidInput: return SYMSEC_E_INVALID_INPUT;
    case symsec::ErrorCode::Unsupported: return SYMSEC_E_UNSUPPORTED;
    case symsec::ErrorCode::InfeasibleQ: return SYMSEC_E_INFEASIBLE;
    case symsec::ErrorCode::SolverFailure: return SYMSEC_E_SOLVER;
    case symsec::ErrorCode::Io: return SYMSEC_E_IO;
  }
  return SYMSEC_E_INTERNAL;
}

// Runs f, mapping exceptions to error codes.
template <typename F>
int guarded(F &&f) {
  try {
    g_last_error.clear();
    f();
    return SYMSEC_OK;
  } catch (const symsec::Error &e) {
    return set_error(code_of(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return set_error(SYMSEC_E_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return set_error(SYMSEC_E_INTERNAL, e.what());
  }
}

int copy_out(const std::string &s, char *buf, size_t cap, size_t *needed) {
  if (needed) *needed = s.size() + 1;
  if (cap == 0 && buf == nullptr) return SYMSEC_OK;
  if (buf == nullptr) return set_error(SYMSEC_E_NULL_ARGUMENT, "buffer is NULL");
  if (cap < s.size() + 1) return set_error(SYMSEC_E_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return SYMSEC_OK;
}

#define SYMSEC_REQUIRE_ARG(p) \
  if ((p) == nullptr) return set_error(SYMSEC_E_NULL_ARGUMENT, #p " is NULL")

}  // namespace

extern "C" {

const char *symsec_version(void) { return "1.0.0"; }

const char *symsec_error_name(int code) {
  switch (code) {
    case SYMSEC_OK: return "ok";
    case SYMSEC_E_INVALID_PARAMETER: return "invalid-parameter";
    case SYMSEC_E_INVALID_INPUT: return "invalid-input";
    case SYMSEC_E_UNSUPPORTED: return "unsupported";
    case SYMSEC_E_INFEASIBLE: return "infeasible";
    case SYMSEC_E_SOLVER: return "solver-failure";
    case SYMSEC_E_IO: return "io";
    case SYMSEC_E_NULL_ARGUMENT: return "null-argument";
    case SYMSEC_E_BUFFER_TOO_SMALL: return "buffer-too-small";
    case SYMSEC_E_INTERNAL: return "internal";
    default: return "unknown";
  }
}

const char *symsec_last_error(void) { return g_last_error.c_str(); }

int symsec_config_parse(const char *json, symsec_config **out) {
  SYMSEC_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<symsec_config>();
    if (json != nullptr && *json != '\0') cfg->spec = symsec::spec_from_json(json);
    *out = cfg.release();
  });
}

int symsec_config_load(const char *path, symsec_config **out) {
  SYMSEC_REQUIRE_ARG(path);
  SYMSEC_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<symsec_config>();
    cfg->spec = symsec::load_spec(path);
    *out = cfg.release();
  });
}

int symsec_config_to_json(const symsec_config *cfg, char *buf, size_t cap, size_t *needed) {
  SYMSEC_REQUIRE_ARG(cfg);
  std::string s;
  const int rc = guarded([&] { s = symsec::spec_to_json(cfg->spec); });
  return rc != SYMSEC_OK ? rc : copy_out(s, buf, cap, needed);
}

int symsec_config_set_seed(symsec_config *cfg, uint64_t seed) {
  SYMSEC_REQUIRE_ARG(cfg);
  cfg->spec.master_seed = seed;
  return SYMSEC_OK;
}

int symsec_config_set_methods(symsec_config *cfg, const char *methods) {
  SYMSEC_REQUIRE_ARG(cfg);
  SYMSEC_REQUIRE_ARG(methods);
  return guarded([&] {
    symsec::ExperimentSpec spec = cfg->spec;
    spec.methods.clear();
    std::stringstream ss(methods);
    std::string m;
    while (std::getline(ss, m, ','))
      if (!m.empty()) spec.methods.push_back(m);
    symsec::validate(spec);
    cfg->spec = std::move(spec);
  });
}

void symsec_config_free(symsec_config *cfg) { delete cfg; }

int symsec_channels_draw(const symsec_config *cfg, uint64_t seed, uint64_t realization, symsec_channels **out) {
  SYMSEC_REQUIRE_ARG(cfg);
  SYMSEC_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    auto ch = std::make_unique<symsec_channels>();
    ch->ch = symsec::draw_channel_set(cfg->spec.channel, seed, realization);
    *out = ch.release();
  });
}

int symsec_channels_dims(const symsec_channels *ch, int *n_beams, int *n_sat, int *n_antennas) {
  SYMSEC_REQUIRE_ARG(ch);
  if (n_beams) *n_beams = ch->ch.n_beams();
  if (n_sat) *n_sat = ch->ch.n_sat();
  if (n_antennas) *n_antennas = ch->ch.n_antennas();
  return SYMSEC_OK;
}

void symsec_channels_free(symsec_channels *ch) { delete ch; }

int symsec_solve(const symsec_config *cfg, const symsec_channels *ch, const char *method, symsec_solution **out) {
  SYMSEC_REQUIRE_ARG(cfg);
  SYMSEC_REQUIRE_ARG(ch);
  SYMSEC_REQUIRE_ARG(method);
  SYMSEC_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<symsec_solution>();
    s->ch = ch->ch;
    s->budget = symsec::budget_of(cfg->spec);
    s->cfg = cfg->spec.sca;
    s->sol = symsec::solve_method(method, s->ch, s->budget, s->cfg);
    *out = s.release();
  });
}

int symsec_solution_objective(const symsec_solution *sol, double *out) {
  SYMSEC_REQUIRE_ARG(sol);
  SYMSEC_REQUIRE_ARG(out);
  *out = sol->sol.objective;
  return SYMSEC_OK;
}

int symsec_solution_sum_rate(const symsec_solution *sol, int use_true_eve, double *out) {
  SYMSEC_REQUIRE_ARG(sol);
  SYMSEC_REQUIRE_ARG(out);
  return guarded([&] { *out = symsec::realized_rates(sol->sol, sol->ch, sol->budget, use_true_eve != 0).sum_r_su; });
}

int symsec_solution_tu_margin(const symsec_solution *sol, double *out) {
  SYMSEC_REQUIRE_ARG(sol);
  SYMSEC_REQUIRE_ARG(out);
  return guarded([&] {
    const auto rep = symsec::verify_tightness(sol->sol, sol->ch, sol->budget, sol->cfg);
    *out = *std::min_element(rep.tu_margin.begin(), rep.tu_margin.end());
  });
}

int symsec_solution_iterations(const symsec_solution *sol, int *out) {
  SYMSEC_REQUIRE_ARG(sol);
  SYMSEC_REQUIRE_ARG(out);
  *out = static_cast<int>(sol->sol.trace.iterations.size());
  return SYMSEC_OK;
}

int symsec_solution_report(const symsec_solution *sol, int use_true_eve, char *buf, size_t cap, size_t *needed) {
  SYMSEC_REQUIRE_ARG(sol);
  std::string s;
  const int rc = guarded([&] {
    const auto rep = symsec::realized_rates(sol->sol, sol->ch, sol->budget, use_true_eve != 0);
    nlohmann::json j;
    j["method"] = sol->sol.method;
    j["eve_channels"] = use_true_eve ? "true" : "estimated";
    j["sum_r_su"] = rep.sum_r_su;
    j["beams"] = nlohmann::json::array();
    for (const auto &b : rep.beams)
      j["beams"].push_back({{"gamma_su", b.gamma_su},
                            {"gamma_tu", b.gamma_tu},
                            {"gamma_se", b.gamma_se},
                            {"gamma_te", b.gamma_te},
                            {"r_su", b.r_su},
                            {"r_tu", b.r_tu}});
    s = j.dump(2);
  });
  return rc != SYMSEC_OK ? rc : copy_out(s, buf, cap, needed);
}

int symsec_solution_verify(const symsec_solution *sol, int *passed, char *buf, size_t cap, size_t *needed) {
  SYMSEC_REQUIRE_ARG(sol);
  SYMSEC_REQUIRE_ARG(passed);
  std::string s;
  const int rc = guarded([&] {
    const auto &bf = sol->sol;
    nlohmann::json j;
    bool ok = true;
    double min_rank = 1.0;
    for (double r : bf.rank_w) min_rank = std::min(min_rank, r);
    for (double r : bf.rank_f) min_rank = std::min(min_rank, r);
    j["min_rank_metric"] = min_rank;
    j["rank_one"] = min_rank >= 0.999;
    ok = ok && min_rank >= 0.999;

    const auto tr = symsec::verify_tightness(bf, sol->ch, sol->budget, sol->cfg);
    const double margin = *std::min_element(tr.tu_margin.begin(), tr.tu_margin.end());
    j["tu_margin"] = margin;
    j["tu_constraint_met"] = margin >= -1e-4;
    ok = ok && margin >= -1e-4;
    j["converged"] = bf.converged;
    j["max_relative_residual"] = tr.max_relative;
    if (bf.method == "proposed") {
      const bool tight = !bf.converged || tr.max_relative <= 1e-4;
      j["tight"] = tight;
      ok = ok && tight;
      const auto p3 = symsec::solve_power_min(sol->ch, sol->budget, sol->cfg, bf, bf.objective_nats);
      const double p_ref = symsec::total_power(bf), p_min = symsec::total_power(p3);
      j["power_min"] = {{"phi", bf.objective_nats},
                        {"objective", p3.objective_nats},
                        {"power", p_min},
                        {"reference_power", p_ref}};
      const bool eq = p3.objective_nats >= bf.objective_nats - 1e-6 && p_min <= p_ref + 1e-6;
      j["power_min_consistent"] = eq;
      ok = ok && eq;
    }
    j["passed"] = ok;
    *passed = ok ? 1 : 0;
    s = j.dump(2);
  });
  return rc != SYMSEC_OK ? rc : copy_out(s, buf, cap, needed);
}

int symsec_solution_to_json(const symsec_solution *sol, char *buf, size_t cap, size_t *needed) {
  SYMSEC_REQUIRE_ARG(sol);
  std::string s;
  const int rc = guarded([&] { s = symsec::to_json(sol->sol); });
  return rc != SYMSEC_OK ? rc : copy_out(s, buf, cap, needed);
}

void symsec_solution_free(symsec_solution *sol) { delete sol; }

int symsec_sweep_run(const symsec_config *cfg, symsec_sweep **out) {
  SYMSEC_REQUIRE_ARG(cfg);
  SYMSEC_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    auto sw = std::make_unique<symsec_sweep>();
    sw->result = symsec::run_sweep(cfg->spec);
    *out = sw.release();
  });
}

int symsec_sweep_infeasible(const symsec_sweep *sw, int *out) {
  SYMSEC_REQUIRE_ARG(sw);
  SYMSEC_REQUIRE_ARG(out);
  *out = sw->result.infeasible_total();
  return SYMSEC_OK;
}

int symsec_sweep_to_csv(const symsec_sweep *sw, char *buf, size_t cap, size_t *needed) {
  SYMSEC_REQUIRE_ARG(sw);
  return copy_out(symsec::format_csv(sw->result), buf, cap, needed);
}

int symsec_sweep_write_csv(const symsec_sweep *sw, const char *path) {
  SYMSEC_REQUIRE_ARG(sw);
  SYMSEC_REQUIRE_ARG(path);
  return guarded([&] { symsec::emit_csv(sw->result, path); });
}

int symsec_sweep_write_plot(const symsec_sweep *sw, const char *path, const char *csv_name) {
  SYMSEC_REQUIRE_ARG(sw);
  SYMSEC_REQUIRE_ARG(path);
  SYMSEC_REQUIRE_ARG(csv_name);
  return guarded([&] { symsec::emit_plot_script(sw->result, path, csv_name); });
}

void symsec_sweep_free(symsec_sweep *sw) { delete sw; }

}  // extern "C"
