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


#pragma once

// Seeded Monte-Carlo sweeps over one system parameter, for the proposed
// design and the two benchmarks, with CSV and gnuplot output.

#include <cstdint>
#include <string>
#include <vector>

#include "symsec/sca.hpp"

namespace symsec {

enum class SweepVar { PB, PS, M, Q, Delta };

const char *sweep_var_name(SweepVar v);  // P_B, P_S, M, Q, Delta
SweepVar parse_sweep_var(const std::string &name);

struct ExperimentSpec {
  ChannelConfig channel;
  double p_s_db = 20.0;  // relative to the unit noise power
  double p_b_db = 30.0;
  ScaConfig sca;         // q_tu holds the base Q
  SweepVar sweep = SweepVar::PB;
  std::vector<double> grid{20, 22, 24, 26, 28, 30};
  std::vector<std::string> methods{"proposed", "pa_an", "zf"};
  int realizations = 20;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

void validate(const ExperimentSpec &spec);

// Default grids: P_B 20..30 dB step 2, P_S 10..20 dB step 2, M 3..6,
// Q 0.1..1.0 step 0.1, Delta {0, 0.01, 0.02, 0.05} in normalized channel
// units (channels are divided by the noise amplitude).
std::vector<double> default_grid(SweepVar v);

ExperimentSpec default_spec(SweepVar v = SweepVar::PB);

// Spec with the sweep variable set to `value`.
ExperimentSpec at_grid_point(const ExperimentSpec &spec, double value);
PowerBudget budget_of(const ExperimentSpec &spec);

std::string spec_to_json(const ExperimentSpec &spec);
ExperimentSpec spec_from_json(const std::string &text);
ExperimentSpec load_spec(const std::string &path);

// One method on one channel set.
BeamformingSolution solve_method(const std::string &method, const ChannelSet &ch, const PowerBudget &budget,
                                 const ScaConfig &cfg);

// Channel set of realization r at a grid point.
ChannelSet realization_channels(const ExperimentSpec &point, std::uint64_t r);

struct RunRecord {
  int grid_index = 0;
  int method_index = 0;
  std::uint64_t realization = 0;
  bool feasible = false;
  std::string error;
  double sum_r_su = 0;        // true Eve channels
  double tu_margin = 0;       // worst beam, estimated Eve channels
  double tu_margin_true = 0;  // worst beam, true Eve channels
  double sat_power = 0;
  double bs_power_max = 0;    // largest per-BS power
  double objective = 0;       // SCA surrogate, bit/s/Hz
  int iterations = 0;
  bool converged = false;
  bool ascent = true;         // trace nondecreasing within 1e-7
};

struct SweepCell {
  double value = 0;
  std::string method;
  double mean_sum_r_su = 0;
  double stderr_sum_r_su = 0;
  double mean_tu_margin = 0;
  int infeasible = 0;
  double mean_iters = 0;
  int feasible = 0;
};

struct SweepResult {
  SweepVar sweep = SweepVar::PB;
  std::vector<double> grid;
  std::vector<std::string> methods;
  std::vector<SweepCell> cells;  // grid-major, methods in spec order
  std::vector<RunRecord> runs;   // realization-major

  const SweepCell &cell(int grid_index, int method_index) const;
  int infeasible_total() const;
};

SweepResult run_sweep(const ExperimentSpec &spec);

// CSV text: sweep_var,method,value,mean_sum_R_su,stderr,mean_tu_margin,infeasible,mean_iters
std::string format_csv(const SweepResult &result);
SweepResult parse_csv(const std::string &text);
void emit_csv(const SweepResult &result, const std::string &path);

// gnuplot script reading `csv_name` from its own directory.
std::string format_plot_script(const SweepResult &result, const std::string &csv_name);
void emit_plot_script(const SweepResult &result, const std::string &path, const std::string &csv_name);

// Writes via a temporary file and rename.
void write_file_atomic(const std::string &path, const std::string &content);

}  // namespace symsec
