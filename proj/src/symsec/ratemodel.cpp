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

#include "symsec/ratemodel.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "symsec/error.hpp"

namespace symsec {

namespace {

double abs2(cplx z) { return std::norm(z); }

void check_dims(const ChannelSet &ch, std::size_t nw, std::size_t nf) {
  require(static_cast<int>(nw) == ch.n_beams() && static_cast<int>(nf) == ch.n_beams(), ErrorCode::InvalidInput,
          "beamformer count must equal the number of beams");
}

}  // namespace

void validate(const PowerBudget &b) {
  require(b.p_s > 0 && b.p_b > 0, ErrorCode::InvalidParameter, "power budgets must be > 0");
  require(b.noise_su > 0 && b.noise_tu > 0 && b.noise_e > 0, ErrorCode::InvalidParameter,
          "noise powers must be > 0");
}

CovarianceSet to_covariances(const BeamformerSet &bf) {
  CovarianceSet cov;
  for (const auto &w : bf.w) cov.W.push_back(gram(w));
  for (const auto &f : bf.f) cov.F.push_back(gram(f));
  return cov;
}

SinrReport compute_sinrs(const ChannelSet &ch, const BeamformerSet &bf, const PowerBudget &budget,
                         bool use_true_eve) {
  check_dims(ch, bf.w.size(), bf.f.size());
  const int n = ch.n_beams();
  for (int k = 0; k < n; ++k)
    require(bf.w[k].size() == ch.n_sat() && bf.f[k].size() == ch.n_antennas(), ErrorCode::InvalidInput,
            "beamformer length does not match the channel dimensions");
  // Satellite power delivered by beam i's own weights along user channels
  // of beam i, following the indexing of the received-signal model.
  std::vector<double> p_su(n), p_tu(n), p_e(n);
  for (int i = 0; i < n; ++i) {
    const auto &l = ch.links(i);
    const CVec &he = use_true_eve ? l.h_e_true : l.h_e_est;
    p_su[i] = abs2(l.h_su.dot(bf.w[i]));
    p_tu[i] = abs2(l.h_tu.dot(bf.w[i]));
    p_e[i] = abs2(he.dot(bf.w[i]));
  }
  double sum_su = 0, sum_tu = 0, sum_e = 0;
  for (int i = 0; i < n; ++i) {
    sum_su += p_su[i];
    sum_tu += p_tu[i];
    sum_e += p_e[i];
  }
  SinrReport r;
  for (int k = 0; k < n; ++k) {
    const auto &l = ch.links(k);
    const CVec &ge = use_true_eve ? l.g_e_true : l.g_e_est;
    const double bs_su = abs2(l.g_su.dot(bf.f[k]));
    const double bs_tu = abs2(l.g_tu.dot(bf.f[k]));
    const double bs_e = abs2(ge.dot(bf.f[k]));
    r.su.push_back(p_su[k] / (sum_su - p_su[k] + bs_su + budget.noise_su));
    r.tu.push_back(bs_tu / (sum_tu + budget.noise_tu));
    r.se.push_back(p_e[k] / (sum_e - p_e[k] + bs_e + budget.noise_e));
    r.te.push_back(bs_e / (sum_e + budget.noise_e));
  }
  return r;
}

SinrReport compute_sinrs(const ChannelSet &ch, const CovarianceSet &cov, const PowerBudget &budget,
                         bool use_true_eve) {
  check_dims(ch, cov.W.size(), cov.F.size());
  const int n = ch.n_beams();
  std::vector<double> t_su(n), t_tu(n), t_e(n);
  for (int i = 0; i < n; ++i) {
    const auto &g = ch.grams(i);
    const CMat he = use_true_eve ? gram(ch.links(i).h_e_true) : g.H_e;
    t_su[i] = trace_product(g.H_su, cov.W[i]);
    t_tu[i] = trace_product(g.H_tu, cov.W[i]);
    t_e[i] = trace_product(he, cov.W[i]);
  }
  SinrReport r;
  double all_su = 0, all_tu = 0, all_e = 0;
  for (int i = 0; i < n; ++i) {
    all_su += t_su[i];
    all_tu += t_tu[i];
    all_e += t_e[i];
  }
  for (int k = 0; k < n; ++k) {
    const auto &g = ch.grams(k);
    const CMat ge = use_true_eve ? gram(ch.links(k).g_e_true) : g.G_e;
    const double f_su = trace_product(g.G_su, cov.F[k]);
    const double f_tu = trace_product(g.G_tu, cov.F[k]);
    const double f_e = trace_product(ge, cov.F[k]);
    r.su.push_back(t_su[k] / (all_su - t_su[k] + f_su + budget.noise_su));
    r.tu.push_back(f_tu / (all_tu + budget.noise_tu));
    r.se.push_back(t_e[k] / (all_e - t_e[k] + f_e + budget.noise_e));
    r.te.push_back(f_e / (all_e + budget.noise_e));
  }
  return r;
}

SecrecyReport secrecy_rates(const SinrReport &s) {
  SecrecyReport rep;
  for (std::size_t k = 0; k < s.su.size(); ++k) {
    require(s.su[k] >= 0 && s.tu[k] >= 0 && s.se[k] >= 0 && s.te[k] >= 0, ErrorCode::InvalidInput,
            "SINRs must be >= 0");
    BeamSecrecy b;
    b.gamma_su = s.su[k];
    b.gamma_tu = s.tu[k];
    b.gamma_se = s.se[k];
    b.gamma_te = s.te[k];
    b.r_su = std::max(0.0, std::log2(1.0 + s.su[k]) - std::log2(1.0 + s.se[k]));
    b.r_tu = std::max(0.0, std::log2(1.0 + s.tu[k]) - std::log2(1.0 + s.te[k]));
    rep.sum_r_su += b.r_su;
    rep.beams.push_back(b);
  }
  return rep;
}

double sum_secrecy_product_form(const SinrReport &s) {
  double legit = 1.0, eve = 1.0;
  for (std::size_t k = 0; k < s.su.size(); ++k) {
    legit *= 1.0 + s.su[k];
    eve *= 1.0 + s.se[k];
  }
  return std::log2(legit) - std::log2(eve);
}

std::vector<double> tu_margins(const SinrReport &s, const std::vector<double> &q_tu) {
  std::vector<double> out;
  for (std::size_t k = 0; k < s.tu.size(); ++k) {
    const double q = q_tu.empty() ? 0.0 : q_tu[std::min(k, q_tu.size() - 1)];
    out.push_back(std::log2(1.0 + s.tu[k]) - std::log2(1.0 + s.te[k]) - q);
  }
  return out;
}

double an_power_at_eve(const CVec &g_e, const AnBenchmarkParams &p, int k, double p_b) {
  if (p.an_basis.empty() || p.an_basis[k].cols() == 0) return 0.0;
  const CVec an = p.an_basis[k] * p.v[k];
  return (1.0 - p.ell[k]) * p_b * abs2(g_e.dot(an));
}

SinrReport compute_sinrs_an(const ChannelSet &ch, const std::vector<CVec> &w, const AnBenchmarkParams &p,
                            const PowerBudget &budget, bool use_true_eve) {
  const int n = ch.n_beams();
  require(static_cast<int>(w.size()) == n && static_cast<int>(p.ell.size()) == n &&
              static_cast<int>(p.f_mrt.size()) == n,
          ErrorCode::InvalidInput, "AN benchmark parameters need one entry per beam");
  for (double l : p.ell)
    require(l >= 0.0 && l <= 1.0, ErrorCode::InvalidInput, "power split ell must lie in [0, 1]");
  std::vector<double> p_su(n), p_tu(n), p_e(n);
  double sum_su = 0, sum_tu = 0, sum_e = 0;
  for (int i = 0; i < n; ++i) {
    const auto &l = ch.links(i);
    const CVec &he = use_true_eve ? l.h_e_true : l.h_e_est;
    p_su[i] = abs2(l.h_su.dot(w[i]));
    p_tu[i] = abs2(l.h_tu.dot(w[i]));
    p_e[i] = abs2(he.dot(w[i]));
    sum_su += p_su[i];
    sum_tu += p_tu[i];
    sum_e += p_e[i];
  }
  SinrReport r;
  for (int k = 0; k < n; ++k) {
    const auto &l = ch.links(k);
    const CVec &ge = use_true_eve ? l.g_e_true : l.g_e_est;
    const double sig = p.ell[k] * budget.p_b;
    const double leak_su = sig * abs2(l.g_su.dot(p.f_mrt[k]));
    const double to_tu = sig * abs2(l.g_tu.dot(p.f_mrt[k]));
    const double leak_e = sig * abs2(ge.dot(p.f_mrt[k]));
    const double an_e = an_power_at_eve(ge, p, k, budget.p_b);
    r.su.push_back(p_su[k] / (sum_su - p_su[k] + leak_su + budget.noise_su));
    r.tu.push_back(to_tu / (sum_tu + budget.noise_tu));
    r.se.push_back(p_e[k] / (sum_e - p_e[k] + leak_e + an_e + budget.noise_e));
    r.te.push_back(leak_e / (sum_e + an_e + budget.noise_e));
  }
  return r;
}

void write_csv(std::ostream &os, const SecrecyReport &report) {
  os << "beam,gamma_su,gamma_tu,gamma_se,gamma_te,R_su,R_tu\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(10);
  for (std::size_t k = 0; k < report.beams.size(); ++k) {
    const auto &b = report.beams[k];
    os << k << ',' << b.gamma_su << ',' << b.gamma_tu << ',' << b.gamma_se << ',' << b.gamma_te << ',' << b.r_su
       << ',' << b.r_tu << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace symsec
