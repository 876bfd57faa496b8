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

#include <iosfwd>
#include <vector>

#include "symsec/chanmodel.hpp"

namespace symsec {

struct BeamformerSet {
  std::vector<CVec> w;  // satellite, length N each
  std::vector<CVec> f;  // BS, length M each
};

struct PowerBudget {
  double p_s = 100.0;
  double p_b = 1000.0;
  double noise_su = 1.0;
  double noise_tu = 1.0;
  double noise_e = 1.0;
};

void validate(const PowerBudget &budget);

// Linear SINRs per beam.
struct SinrReport {
  std::vector<double> su, tu, se, te;
};

struct BeamSecrecy {
  double gamma_su = 0, gamma_tu = 0, gamma_se = 0, gamma_te = 0;
  double r_su = 0, r_tu = 0;  // bit/s/Hz, clamped at 0
};

struct SecrecyReport {
  std::vector<BeamSecrecy> beams;
  double sum_r_su = 0;
};

// Gram-form beamformers (W_k, F_k), used for SDR matrices.
struct CovarianceSet {
  std::vector<CMat> W;
  std::vector<CMat> F;
};

CovarianceSet to_covariances(const BeamformerSet &bf);

SinrReport compute_sinrs(const ChannelSet &ch, const BeamformerSet &bf, const PowerBudget &budget,
                         bool use_true_eve);

// Same SINRs evaluated through Tr(H W) products.
SinrReport compute_sinrs(const ChannelSet &ch, const CovarianceSet &cov, const PowerBudget &budget,
                         bool use_true_eve);

SecrecyReport secrecy_rates(const SinrReport &sinrs);

// Sum of unclamped SU secrecy rates written as a log of products of ratios.
double sum_secrecy_product_form(const SinrReport &sinrs);

// Unclamped TU secrecy rate minus its threshold, per beam.
std::vector<double> tu_margins(const SinrReport &sinrs, const std::vector<double> &q_tu);

// ---- MRT + artificial-noise benchmark model -------------------------------

struct AnBenchmarkParams {
  std::vector<double> ell;      // power split in [0, 1]
  std::vector<CVec> f_mrt;      // unit norm
  std::vector<CMat> an_basis;   // orthonormal columns, null of {g_tu, g_su}
  std::vector<CVec> v;          // AN coefficients in basis coordinates
};

// (1 - ell) P_B |g_e^H O v|^2, the AN power seen by the Eve of beam k.
double an_power_at_eve(const CVec &g_e, const AnBenchmarkParams &params, int k, double p_b);

SinrReport compute_sinrs_an(const ChannelSet &ch, const std::vector<CVec> &w, const AnBenchmarkParams &params,
                            const PowerBudget &budget, bool use_true_eve);

inline SecrecyReport secrecy_rates_an(const SinrReport &sinrs) { return secrecy_rates(sinrs); }

// CSV: beam,gamma_su,gamma_tu,gamma_se,gamma_te,R_su,R_tu
void write_csv(std::ostream &os, const SecrecyReport &report);

}  // namespace symsec
