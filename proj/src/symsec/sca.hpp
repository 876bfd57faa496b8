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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "symsec/conic.hpp"
#include "symsec/ratemodel.hpp"

namespace symsec {

struct ScaConfig {
  double epsilon = 1e-3;        // exit when |R^t - R^{t-1}| < epsilon (bit/s/Hz)
  int max_sca_iters = 50;
  std::vector<double> q_tu{0.5};  // bit/s/Hz; one value per beam, or one value for all
  double rank_tol = 1e-3;
  conic::SolverSettings solver;
};

void validate(const ScaConfig &cfg, int n_beams);

// Threshold of beam k in nats.
double q_tu_nats(const ScaConfig &cfg, int k);

struct BeamScalars {
  double s = 0, mu = 0, q = 0, v = 0, tau = 0, eta = 0, alpha = 0;
};

struct Anchors {
  std::vector<double> mu, q, eta;
};

struct ScaPoint {
  std::vector<BeamScalars> scalars;
  Anchors anchors;
  std::vector<CMat> W, F;
};

// e^x >= slope * x + intercept, tangent at the anchor.
struct TaylorBound {
  double slope = 1;
  double intercept = 1;
  double operator()(double x) const { return slope * x + intercept; }
};

TaylorBound taylor_lower_bound(double anchor);

// Start point: uniform satellite power, full-power BS beams with the
// estimated Eve direction removed; anchors are the logs of the affine sides.
ScaPoint init_linearization(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg);

conic::ConicProgram build_p2(const ChannelSet &ch, const ScaPoint &point, const PowerBudget &budget,
                             const ScaConfig &cfg);

struct ScaIteration {
  double objective = 0;  // bit/s/Hz
  conic::SolverState state = conic::SolverState::Optimal;
  int solver_iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double wall_ms = 0;
  bool accepted = true;  // false: the previous point was kept
};

struct ScaTrace {
  std::vector<ScaIteration> iterations;
};

struct BeamformingSolution {
  std::string method = "proposed";  // proposed | pa_an | zf
  std::vector<CMat> W, F;
  std::vector<CVec> w, f;
  std::vector<double> rank_w, rank_f;
  std::vector<double> ell;                 // pa_an only
  std::optional<AnBenchmarkParams> an;     // pa_an only
  std::vector<BeamScalars> scalars;
  Anchors anchors;                         // anchors the scalars were computed at
  // Largest relative residual of the s and v exponential constraints at the
  // raw conic solver output of the last accepted subproblem.
  double solver_exp_residual = 0;
  double objective_nats = 0;
  double objective = 0;  // bit/s/Hz
  bool converged = false;
  double blend = 1.0;    // power-min only: share of the power-min point kept by the safeguard
  ScaTrace trace;
};

// SCA loop: repeated convexified subproblems until the objective settles.
BeamformingSolution sca_solve(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg);

struct RankOne {
  CVec vector;
  double metric = 1;
};

RankOne extract_rank_one(const CMat &x);

struct BeamTightness {
  std::array<double, 4> residual{};   // e^{s,v,tau,alpha} minus affine side
  std::array<double, 4> relative{};   // |residual| / (1 + affine side)
  bool tight = true;
};

struct TightnessReport {
  std::vector<BeamTightness> beams;
  std::vector<double> tu_margin;  // bit/s/Hz, estimated Eve channels
  double max_relative = 0;
  bool all_tight = true;
};

TightnessReport verify_tightness(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                                 const ScaConfig &cfg);

// Power minimization: minimum total power keeping the secrecy objective at phi_star (nats),
// with the anchors of `reference`.
BeamformingSolution solve_power_min(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg,
                                    const BeamformingSolution &reference, double phi_star);

double total_power(const BeamformingSolution &sol);

// Rates realized by the solution's vectors (for pa_an through the AN model).
SecrecyReport realized_rates(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                             bool use_true_eve);
SinrReport realized_sinrs(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                          bool use_true_eve);

std::string to_json(const BeamformingSolution &sol);

}  // namespace symsec
