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


#include "symsec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "symsec/benchmarks.hpp"
#include "symsec/error.hpp"

namespace symsec {

namespace {

using nlohmann::json;

constexpr double kLog2E = 1.44269504088896340736;

double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

bool is_method(const std::string &m) { return m == "proposed" || m == "pa_an" || m == "zf"; }

// Rejects keys outside `allowed`, so a misspelt option is not silently ignored.
void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where) {
  require(j.is_object(), ErrorCode::InvalidParameter, where + " must be a JSON object");
  for (const auto &item : j.items())
    require(allowed.count(item.key()) != 0, ErrorCode::InvalidParameter,
            "unknown key '" + item.key() + "' in " + where);
}

template <typename T>
void read(const json &j, const char *key, T &out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &e) {
    fail(ErrorCode::InvalidParameter, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string fmt6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double worst_margin(const SinrReport &s, const ScaConfig &cfg) {
  std::vector<double> q;
  for (std::size_t k = 0; k < s.tu.size(); ++k) q.push_back(q_tu_nats(cfg, static_cast<int>(k)) * kLog2E);
  const auto m = tu_margins(s, q);
  return *std::min_element(m.begin(), m.end());
}

RunRecord run_one(const ExperimentSpec &point, const ChannelSet &ch, const std::string &method) {
  RunRecord rec;
  const PowerBudget budget = budget_of(point);
  try {
    const BeamformingSolution sol = solve_method(method, ch, budget, point.sca);
    rec.feasible = true;
    rec.sum_r_su = realized_rates(sol, ch, budget, true).sum_r_su;
    rec.tu_margin = worst_margin(realized_sinrs(sol, ch, budget, false), point.sca);
    rec.tu_margin_true = worst_margin(realized_sinrs(sol, ch, budget, true), point.sca);
    for (const auto &w : sol.W) rec.sat_power += trace_re(w);
    for (std::size_t k = 0; k < sol.F.size(); ++k) {
      double p = trace_re(sol.F[k]);
      if (sol.an) p += (1.0 - sol.ell[k]) * budget.p_b * (sol.an->an_basis[k] * sol.an->v[k]).squaredNorm();
      rec.bs_power_max = std::max(rec.bs_power_max, p);
    }
    rec.objective = sol.objective;
    rec.iterations = static_cast<int>(sol.trace.iterations.size());
    rec.converged = sol.converged;
    for (std::size_t t = 1; t < sol.trace.iterations.size(); ++t)
      if (sol.trace.iterations[t].objective < sol.trace.iterations[t - 1].objective - 1e-7) rec.ascent = false;
  } catch (const std::exception &e) {
    rec.feasible = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

const char *sweep_var_name(SweepVar v) {
  switch (v) {
    case SweepVar::PB: return "P_B";
    case SweepVar::PS: return "P_S";
    case SweepVar::M: return "M";
    case SweepVar::Q: return "Q";
    case SweepVar::Delta: return "Delta";
  }
  return "?";
}

SweepVar parse_sweep_var(const std::string &name) {
  for (SweepVar v : {SweepVar::PB, SweepVar::PS, SweepVar::M, SweepVar::Q, SweepVar::Delta})
    if (name == sweep_var_name(v)) return v;
  fail(ErrorCode::InvalidParameter, "unknown sweep variable '" + name + "' (P_B, P_S, M, Q, Delta)");
}

std::vector<double> default_grid(SweepVar v) {
  switch (v) {
    case SweepVar::PB: return {20, 22, 24, 26, 28, 30};
    case SweepVar::PS: return {10, 12, 14, 16, 18, 20};
    case SweepVar::M: return {3, 4, 5, 6};
    case SweepVar::Q: return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case SweepVar::Delta: return {0.0, 0.01, 0.02, 0.05};
  }
  return {};
}

ExperimentSpec default_spec(SweepVar v) {
  ExperimentSpec s;
  s.sweep = v;
  s.grid = default_grid(v);
  return s;
}

void validate(const ExperimentSpec &spec) {
  validate(spec.channel);
  validate(budget_of(spec));
  validate(spec.sca, spec.channel.n_beams);
  require(!spec.grid.empty(), ErrorCode::InvalidParameter, "sweep grid must not be empty");
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    require(std::isfinite(spec.grid[i]), ErrorCode::InvalidParameter, "sweep grid values must be finite");
    require(i == 0 || spec.grid[i] > spec.grid[i - 1], ErrorCode::InvalidParameter,
            "sweep grid must be strictly increasing");
  }
  require(spec.realizations >= 1, ErrorCode::InvalidParameter, "realizations must be >= 1");
  require(spec.threads >= 0, ErrorCode::InvalidParameter, "threads must be >= 0");
  std::set<std::string> seen;
  for (const auto &m : spec.methods) {
    require(is_method(m), ErrorCode::InvalidParameter, "unknown method '" + m + "' (proposed, pa_an, zf)");
    require(seen.insert(m).second, ErrorCode::InvalidParameter, "method '" + m + "' listed twice");
  }
  const bool benchmarks = seen.count("pa_an") || seen.count("zf");
  for (double g : spec.grid) {
    switch (spec.sweep) {
      case SweepVar::M:
        require(g == std::round(g) && g >= 1, ErrorCode::InvalidParameter, "M grid values must be positive integers");
        require(!benchmarks || g >= 3, ErrorCode::InvalidParameter, "pa_an and zf need M >= 3");
        break;
      case SweepVar::Q:
      case SweepVar::Delta:
        require(g >= 0, ErrorCode::InvalidParameter, "Q and Delta grid values must be >= 0");
        break;
      default:
        break;
    }
  }
  if (spec.sweep != SweepVar::M)
    require(!benchmarks || spec.channel.n_antennas >= 3, ErrorCode::InvalidParameter, "pa_an and zf need M >= 3");
}

ExperimentSpec at_grid_point(const ExperimentSpec &spec, double value) {
  ExperimentSpec p = spec;
  switch (spec.sweep) {
    case SweepVar::PB: p.p_b_db = value; break;
    case SweepVar::PS: p.p_s_db = value; break;
    case SweepVar::M: p.channel.n_antennas = static_cast<int>(std::lround(value)); break;
    case SweepVar::Q: p.sca.q_tu = {value}; break;
    case SweepVar::Delta: p.channel.csi.delta_bound = value; break;
  }
  return p;
}

PowerBudget budget_of(const ExperimentSpec &spec) {
  PowerBudget b;
  b.p_s = db_to_linear(spec.p_s_db);
  b.p_b = db_to_linear(spec.p_b_db);
  return b;
}

std::string spec_to_json(const ExperimentSpec &spec) {
  const auto &c = spec.channel;
  const auto &g = c.geometry;
  json j;
  j["sweep"] = sweep_var_name(spec.sweep);
  j["grid"] = spec.grid;
  j["methods"] = spec.methods;
  j["realizations"] = spec.realizations;
  j["master_seed"] = spec.master_seed;
  j["threads"] = spec.threads;
  j["n_beams"] = c.n_beams;
  j["n_antennas"] = c.n_antennas;
  j["p_s_db"] = spec.p_s_db;
  j["p_b_db"] = spec.p_b_db;
  j["q_tu"] = spec.sca.q_tu;
  j["csi_delta"] = c.csi.delta_bound;
  j["noise_floor_dbw"] = c.noise_floor_dbw;
  std::vector<double> angles;
  for (double a : g.elevation_angles_rad) angles.push_back(rad_to_deg(a));
  j["geometry"] = {{"satellite_height_m", g.satellite_height_m},
                   {"carrier_freq_hz", g.carrier_freq_hz},
                   {"beam_center_offsets_m", g.beam_center_offsets_m},
                   {"elevation_angles_deg", angles},
                   {"inter_beam_spacing_deg", rad_to_deg(g.inter_beam_spacing_rad)},
                   {"bs_user_distances_m", g.bs_user_distances_m}};
  j["satellite"] = {{"max_beam_gain_db", linear_to_db(c.satellite.max_beam_gain)},
                    {"angle_3db_deg", rad_to_deg(c.satellite.angle_3db_rad)},
                    {"rain_mu", c.satellite.rain_mu},
                    {"rain_delta_sq", c.satellite.rain_delta_sq}};
  j["terrestrial"] = {{"ref_power_gain_db", linear_to_db(c.terrestrial.ref_power_gain)},
                      {"nakagami_m", c.terrestrial.nakagami_m},
                      {"nakagami_omega", c.terrestrial.nakagami_omega}};
  const auto &s = spec.sca.solver;
  j["sca"] = {{"epsilon", spec.sca.epsilon},
              {"max_sca_iters", spec.sca.max_sca_iters},
              {"rank_tol", spec.sca.rank_tol},
              {"solver",
               {{"tol", s.tol},
                {"max_iters", s.max_iters},
                {"alpha", s.alpha},
                {"scale", s.scale},
                {"adaptive_scale", s.adaptive_scale},
                {"equilibration_passes", s.equilibration_passes},
                {"anderson_memory", s.anderson_memory}}}};
  return j.dump(2) + "\n";
}

ExperimentSpec spec_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorCode::InvalidParameter, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"sweep", "grid", "methods", "realizations", "master_seed", "threads", "n_beams", "n_antennas", "p_s_db",
              "p_b_db", "q_tu", "csi_delta", "noise_floor_dbw", "geometry", "satellite", "terrestrial", "sca"},
             "config");
  ExperimentSpec spec;
  auto &c = spec.channel;
  if (j.contains("sweep")) {
    std::string name;
    read(j, "sweep", name);
    spec.sweep = parse_sweep_var(name);
    spec.grid = default_grid(spec.sweep);
  }
  read(j, "grid", spec.grid);
  read(j, "methods", spec.methods);
  read(j, "realizations", spec.realizations);
  read(j, "master_seed", spec.master_seed);
  read(j, "threads", spec.threads);
  read(j, "n_beams", c.n_beams);
  read(j, "n_antennas", c.n_antennas);
  read(j, "p_s_db", spec.p_s_db);
  read(j, "p_b_db", spec.p_b_db);
  if (j.contains("q_tu")) {
    if (j["q_tu"].is_array())
      read(j, "q_tu", spec.sca.q_tu);
    else {
      double q = 0;
      read(j, "q_tu", q);
      spec.sca.q_tu = {q};
    }
  }
  read(j, "csi_delta", c.csi.delta_bound);
  read(j, "noise_floor_dbw", c.noise_floor_dbw);
  if (j.contains("geometry")) {
    const json &g = j["geometry"];
    check_keys(g,
               {"satellite_height_m", "carrier_freq_hz", "beam_center_offsets_m", "elevation_angles_deg",
                "inter_beam_spacing_deg", "bs_user_distances_m"},
               "geometry");
    auto &geo = c.geometry;
    read(g, "satellite_height_m", geo.satellite_height_m);
    read(g, "carrier_freq_hz", geo.carrier_freq_hz);
    read(g, "beam_center_offsets_m", geo.beam_center_offsets_m);
    if (g.contains("elevation_angles_deg")) {
      std::array<double, 3> deg{};
      read(g, "elevation_angles_deg", deg);
      for (int i = 0; i < 3; ++i) geo.elevation_angles_rad[i] = deg_to_rad(deg[i]);
    }
    if (g.contains("inter_beam_spacing_deg")) {
      double deg = 0;
      read(g, "inter_beam_spacing_deg", deg);
      geo.inter_beam_spacing_rad = deg_to_rad(deg);
    }
    read(g, "bs_user_distances_m", geo.bs_user_distances_m);
  }
  if (j.contains("satellite")) {
    const json &s = j["satellite"];
    check_keys(s, {"max_beam_gain_db", "angle_3db_deg", "rain_mu", "rain_delta_sq"}, "satellite");
    if (s.contains("max_beam_gain_db")) {
      double db = 0;
      read(s, "max_beam_gain_db", db);
      c.satellite.max_beam_gain = db_to_linear(db);
    }
    if (s.contains("angle_3db_deg")) {
      double deg = 0;
      read(s, "angle_3db_deg", deg);
      c.satellite.angle_3db_rad = deg_to_rad(deg);
    }
    read(s, "rain_mu", c.satellite.rain_mu);
    read(s, "rain_delta_sq", c.satellite.rain_delta_sq);
  }
  if (j.contains("terrestrial")) {
    const json &t = j["terrestrial"];
    check_keys(t, {"ref_power_gain_db", "nakagami_m", "nakagami_omega"}, "terrestrial");
    if (t.contains("ref_power_gain_db")) {
      double db = 0;
      read(t, "ref_power_gain_db", db);
      c.terrestrial.ref_power_gain = db_to_linear(db);
    }
    read(t, "nakagami_m", c.terrestrial.nakagami_m);
    read(t, "nakagami_omega", c.terrestrial.nakagami_omega);
  }
  if (j.contains("sca")) {
    const json &s = j["sca"];
    check_keys(s, {"epsilon", "max_sca_iters", "rank_tol", "solver"}, "sca");
    read(s, "epsilon", spec.sca.epsilon);
    read(s, "max_sca_iters", spec.sca.max_sca_iters);
    read(s, "rank_tol", spec.sca.rank_tol);
    if (s.contains("solver")) {
      const json &o = s["solver"];
      check_keys(o, {"tol", "max_iters", "alpha", "scale", "adaptive_scale", "equilibration_passes", "anderson_memory"},
                 "sca.solver");
      auto &st = spec.sca.solver;
      read(o, "tol", st.tol);
      read(o, "max_iters", st.max_iters);
      read(o, "alpha", st.alpha);
      read(o, "scale", st.scale);
      read(o, "adaptive_scale", st.adaptive_scale);
      read(o, "equilibration_passes", st.equilibration_passes);
      read(o, "anderson_memory", st.anderson_memory);
    }
  }
  validate(spec);
  return spec;
}

ExperimentSpec load_spec(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

BeamformingSolution solve_method(const std::string &method, const ChannelSet &ch, const PowerBudget &budget,
                                 const ScaConfig &cfg) {
  if (method == "proposed") return sca_solve(ch, budget, cfg);
  if (method == "pa_an") return solve_pa(ch, budget, cfg);
  if (method == "zf") return zf_baseline(ch, budget, cfg);
  fail(ErrorCode::InvalidParameter, "unknown method '" + method + "'");
}

ChannelSet realization_channels(const ExperimentSpec &point, std::uint64_t r) {
  return draw_channel_set(point.channel, point.master_seed, r);
}

const SweepCell &SweepResult::cell(int grid_index, int method_index) const {
  return cells.at(static_cast<std::size_t>(grid_index) * methods.size() + static_cast<std::size_t>(method_index));
}

int SweepResult::infeasible_total() const {
  int n = 0;
  for (const auto &c : cells) n += c.infeasible;
  return n;
}

SweepResult run_sweep(const ExperimentSpec &spec) {
  validate(spec);
  const int n_real = spec.realizations;
  std::vector<std::vector<RunRecord>> per_real(static_cast<std::size_t>(n_real));
  auto work = [&](int r) {
    auto &out = per_real[static_cast<std::size_t>(r)];
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
      const ExperimentSpec point = at_grid_point(spec, spec.grid[g]);
      const ChannelSet ch = realization_channels(point, static_cast<std::uint64_t>(r));
      for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        RunRecord rec = run_one(point, ch, spec.methods[m]);
        rec.grid_index = static_cast<int>(g);
        rec.method_index = static_cast<int>(m);
        rec.realization = static_cast<std::uint64_t>(r);
        out.push_back(std::move(rec));
      }
    }
  };
  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, n_real);
  if (threads == 1) {
    for (int r = 0; r < n_real; ++r) work(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = next++; r < n_real; r = next++) work(r);
      });
    for (auto &th : pool) th.join();
  }

  // Ordered reduce: realization order fixes the summation order.
  SweepResult res;
  res.sweep = spec.sweep;
  res.grid = spec.grid;
  res.methods = spec.methods;
  for (auto &v : per_real)
    for (auto &rec : v) res.runs.push_back(std::move(rec));
  for (std::size_t g = 0; g < spec.grid.size(); ++g)
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      SweepCell c;
      c.value = spec.grid[g];
      c.method = spec.methods[m];
      double sum = 0, sum_margin = 0, sum_iters = 0;
      std::vector<double> rates;
      for (const auto &rec : res.runs) {
        if (rec.grid_index != static_cast<int>(g) || rec.method_index != static_cast<int>(m)) continue;
        if (!rec.feasible) {
          ++c.infeasible;
          continue;
        }
        rates.push_back(rec.sum_r_su);
        sum += rec.sum_r_su;
        sum_margin += rec.tu_margin;
        sum_iters += rec.iterations;
      }
      c.feasible = static_cast<int>(rates.size());
      if (c.feasible > 0) {
        c.mean_sum_r_su = sum / c.feasible;
        c.mean_tu_margin = sum_margin / c.feasible;
        c.mean_iters = sum_iters / c.feasible;
      }
      if (c.feasible > 1) {
        double ss = 0;
        for (double x : rates) ss += (x - c.mean_sum_r_su) * (x - c.mean_sum_r_su);
        c.stderr_sum_r_su = std::sqrt(ss / (c.feasible - 1)) / std::sqrt(static_cast<double>(c.feasible));
      }
      res.cells.push_back(c);
    }
  return res;
}

std::string format_csv(const SweepResult &result) {
  std::string out = "sweep_var,method,value,mean_sum_R_su,stderr,mean_tu_margin,infeasible,mean_iters\n";
  for (const auto &c : result.cells) {
    out += sweep_var_name(result.sweep);
    out += ',' + c.method + ',' + fmt6(c.value) + ',' + fmt6(c.mean_sum_r_su) + ',' + fmt6(c.stderr_sum_r_su) + ',' +
           fmt6(c.mean_tu_margin) + ',' + std::to_string(c.infeasible) + ',' + fmt6(c.mean_iters) + '\n';
  }
  return out;
}

SweepResult parse_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) &&
              line == "sweep_var,method,value,mean_sum_R_su,stderr,mean_tu_margin,infeasible,mean_iters",
          ErrorCode::InvalidInput, "unexpected CSV header");
  SweepResult res;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    require(f.size() == 8, ErrorCode::InvalidInput, "CSV row needs 8 fields: " + line);
    try {
      res.sweep = parse_sweep_var(f[0]);
      SweepCell c;
      c.method = f[1];
      c.value = std::stod(f[2]);
      c.mean_sum_r_su = std::stod(f[3]);
      c.stderr_sum_r_su = std::stod(f[4]);
      c.mean_tu_margin = std::stod(f[5]);
      c.infeasible = std::stoi(f[6]);
      c.mean_iters = std::stod(f[7]);
      if (std::find(res.grid.begin(), res.grid.end(), c.value) == res.grid.end()) res.grid.push_back(c.value);
      if (std::find(res.methods.begin(), res.methods.end(), c.method) == res.methods.end())
        res.methods.push_back(c.method);
      res.cells.push_back(c);
    } catch (const std::logic_error &) {
      fail(ErrorCode::InvalidInput, "malformed CSV row: " + line);
    }
  }
  return res;
}

void write_file_atomic(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::Io, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move output into '" + path + "'");
  }
}

void emit_csv(const SweepResult &result, const std::string &path) { write_file_atomic(path, format_csv(result)); }

std::string format_plot_script(const SweepResult &result, const std::string &csv_name) {
  std::string xlabel;
  switch (result.sweep) {
    case SweepVar::PB: xlabel = "BS transmission power P_B (dB)"; break;
    case SweepVar::PS: xlabel = "Satellite transmission power P_S (dB)"; break;
    case SweepVar::M: xlabel = "Number of BS antennas M"; break;
    case SweepVar::Q: xlabel = "TU secrecy rate constraint Q (bit/s/Hz)"; break;
    case SweepVar::Delta: xlabel = "CSI error bound Delta (normalized)"; break;
  }
  const std::string stem = std::filesystem::path(csv_name).stem().string();
  std::string s;
  s += "# gnuplot script; run from the directory holding " + csv_name + "\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 900,600 noenhanced\n";
  s += "set output '" + stem + ".png'\n";
  s += "set xlabel '" + xlabel + "'\n";
  s += "set ylabel 'Mean sum secrecy rate of SUs (bit/s/Hz)'\n";
  s += "set grid\n";
  s += "set key left top\n";
  if (result.methods.empty()) {
    s += "# no methods in the sweep\n";
    return s;
  }
  s += "plot";
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    const std::string &name = result.methods[m];
    s += (m == 0 ? " " : ", \\\n     ");
    s += "'" + csv_name + "' skip 1 using 3:(strcol(2) eq '" + name + "' ? $4 : 1/0):5 with yerrorlines title '" +
         name + "'";
  }
  s += "\n";
  return s;
}

void emit_plot_script(const SweepResult &result, const std::string &path, const std::string &csv_name) {
  write_file_atomic(path, format_plot_script(result, csv_name));
}

}  // namespace symsec
