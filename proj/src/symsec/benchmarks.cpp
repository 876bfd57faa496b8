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


#include "symsec/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "symsec/error.hpp"
#include "symsec/secrecy_program.hpp"

namespace symsec {

namespace {

using conic::Affine;
using conic::HermitianBlock;
using conic::ProgramBuilder;

// Received powers of the BS beam of beam k at unit power split, and the AN
// power at Eve when the whole BS budget goes to noise.
struct BsConstants {
  double su = 0, tu = 0, e = 0, an_e = 0;
};

// Satellite beamformers W_k (stored divided by P_S) with BS contributions
// that are constant, or linear in a per-beam power split ell_k in [0, 1].
class FixedBsModel : public detail::SecrecyModel {
 public:
  FixedBsModel(const ChannelSet &ch, const PowerBudget &budget, std::vector<BsConstants> bs, bool split)
      : ch_(ch), budget_(budget), bs_(std::move(bs)), split_(split) {}

  std::vector<detail::BeamAffines> add_decision(ProgramBuilder &pb) override {
    const int n = ch_.n_beams();
    w_.clear();
    ell_.clear();
    for (int k = 0; k < n; ++k) w_.push_back(pb.add_hermitian("W" + std::to_string(k), ch_.n_sat()));
    if (split_)
      for (int k = 0; k < n; ++k) ell_.push_back(pb.add_var("ell[" + std::to_string(k) + "]"));

    std::vector<Affine> t_su(n), t_e(n);
    Affine all_su, all_tu, all_e, power_s;
    for (int i = 0; i < n; ++i) {
      const auto &g = ch_.grams(i);
      t_su[i] = conic::trace_product(budget_.p_s * g.H_su, w_[i]);
      t_e[i] = conic::trace_product(budget_.p_s * g.H_e, w_[i]);
      all_su += t_su[i];
      all_tu += conic::trace_product(budget_.p_s * g.H_tu, w_[i]);
      all_e += t_e[i];
      power_s += conic::trace(w_[i]);
    }
    std::vector<detail::BeamAffines> out(n);
    for (int k = 0; k < n; ++k) {
      const BsConstants &c = bs_[k];
      // ell c for the useful BS signal, (1 - ell) a for the noise.
      auto sig = [&](double v) { return split_ ? Affine::var(ell_[k], v) : Affine(v); };
      const Affine an = split_ ? Affine(c.an_e) - Affine::var(ell_[k], c.an_e) : Affine();
      auto &a = out[k];
      a.S = all_su + sig(c.su) + Affine(budget_.noise_su);
      a.MU = all_su - t_su[k] + sig(c.su) + Affine(budget_.noise_su);
      a.QE = all_e + sig(c.e) + an + Affine(budget_.noise_e);
      a.V = all_e - t_e[k] + sig(c.e) + an + Affine(budget_.noise_e);
      a.T = all_tu + sig(c.tu) + Affine(budget_.noise_tu);
      a.ET = all_tu + Affine(budget_.noise_tu);
      a.AL = all_e + an + Affine(budget_.noise_e);
    }
    pb.add_nonneg(Affine(1.0) - power_s);
    for (int idx : ell_) {
      pb.add_nonneg(Affine::var(idx));
      pb.add_nonneg(Affine(1.0) - Affine::var(idx));
    }
    for (const auto &b : w_) pb.add_psd(b);
    return out;
  }

  void project(Vec &x) const override {
    double tw = 0;
    for (const auto &b : w_) {
      detail::clip_psd(b, x);
      tw += detail::block_trace(b, x);
    }
    if (tw > 1.0)
      for (const auto &b : w_) detail::scale_block(b, 1.0 / tw, x);
    for (int idx : ell_) x(idx) = std::clamp(x(idx), 0.0, 1.0);
  }

  void initial_point(Vec &x, double satellite_share, int /*variant*/) const override {
    const int n = ch_.n_beams();
    const double ws = satellite_share / (static_cast<double>(n) * n);
    for (const auto &b : w_) conic::hermitian_to_vars(b, ws * CMat::Identity(b.n, b.n), x);
    for (int idx : ell_) x(idx) = 1.0;
  }

  Affine power() const override {
    Affine p;
    for (const auto &b : w_) p += budget_.p_s * conic::trace(b);
    if (split_) {
      // The noise takes the rest, so the BS always radiates P_B.
      p += Affine(budget_.p_b * static_cast<double>(ell_.size()));
    } else {
      p += Affine(budget_.p_b * ch_.n_beams());
    }
    return p;
  }

  int n_beams() const override { return ch_.n_beams(); }

  std::vector<detail::GainBlock> gain_blocks() const override {
    std::vector<detail::GainBlock> out;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      const auto &g = ch_.grams(static_cast<int>(k));
      out.push_back({w_[k], {g.H_su, g.H_tu, g.H_e}});
    }
    return out;
  }

  void decode(const Vec &x, std::vector<CMat> &w, std::vector<double> &ell) const {
    w.clear();
    ell.clear();
    for (const auto &b : w_) w.push_back(budget_.p_s * conic::hermitian_from_vars(b, x));
    for (int idx : ell_) ell.push_back(std::clamp(x(idx), 0.0, 1.0));
  }

 private:
  const ChannelSet &ch_;
  PowerBudget budget_;
  std::vector<BsConstants> bs_;
  bool split_;
  std::vector<HermitianBlock> w_;
  std::vector<int> ell_;
};

double abs2(cplx z) { return std::norm(z); }

// Constants of a unit BS beam f per beam, estimated Eve channels.
std::vector<BsConstants> beam_constants(const ChannelSet &ch, const std::vector<CVec> &f, double p_b) {
  std::vector<BsConstants> out;
  for (int k = 0; k < ch.n_beams(); ++k) {
    const auto &l = ch.links(k);
    BsConstants c;
    c.su = p_b * abs2(l.g_su.dot(f[k]));
    c.tu = p_b * abs2(l.g_tu.dot(f[k]));
    c.e = p_b * abs2(l.g_e_est.dot(f[k]));
    out.push_back(c);
  }
  return out;
}

std::vector<BsConstants> pa_constants(const ChannelSet &ch, const AnBenchmarkParams &an, double p_b) {
  require(static_cast<int>(an.f_mrt.size()) == ch.n_beams() && an.an_basis.size() == an.f_mrt.size() &&
              an.v.size() == an.f_mrt.size(),
          ErrorCode::InvalidInput, "AN parameters need one entry per beam");
  std::vector<BsConstants> out = beam_constants(ch, an.f_mrt, p_b);
  for (int k = 0; k < ch.n_beams(); ++k)
    out[k].an_e = p_b * abs2(ch.links(k).g_e_est.dot(an.an_basis[k] * an.v[k]));
  return out;
}

void check_antennas(const ChannelSet &ch) {
  require(ch.n_antennas() >= 3, ErrorCode::Unsupported, "the benchmarks need at least 3 BS antennas");
}

}  // namespace

CVec mrt_vector(const CVec &g_tu) {
  const double n = g_tu.norm();
  require(g_tu.size() > 0 && n > 0 && std::isfinite(n), ErrorCode::InvalidInput, "MRT needs a nonzero channel");
  return g_tu / n;
}

CMat an_basis(const CVec &g_tu, const CVec &g_su, bool *degenerate) {
  const auto m = g_tu.size();
  require(g_su.size() == m, ErrorCode::InvalidInput, "channels must have the same length");
  require(m >= 3, ErrorCode::Unsupported, "the AN basis needs at least 3 antennas");
  require(g_tu.norm() > 0 && g_su.norm() > 0, ErrorCode::InvalidInput, "AN basis needs nonzero channels");
  const CVec u = g_tu / g_tu.norm();
  const CVec rest = g_su - u * u.dot(g_su);
  const bool parallel = rest.norm() < 1e-6 * g_su.norm();  // sine of the angle
  if (degenerate) *degenerate = parallel;
  CMat span(m, parallel ? 1 : 2);
  span.col(0) = g_tu;
  if (parallel)
    std::clog << "symsec: warning: TU and SU channels are nearly parallel; AN basis only avoids the TU\n";
  else
    span.col(1) = g_su;
  Eigen::HouseholderQR<CMat> qr(span);
  const CMat q = qr.householderQ() * CMat::Identity(m, m);
  return q.rightCols(m - span.cols());
}

CVec zf_vector(const CVec &g_tu, const CVec &g_e) {
  require(g_tu.size() == g_e.size(), ErrorCode::InvalidInput, "channels must have the same length");
  CVec p = g_tu;
  const double ne = g_e.norm();
  if (ne > 0) {
    const CVec u = g_e / ne;
    p -= u * u.dot(g_tu);
  }
  const double np = p.norm();
  require(np > 1e-12 * g_tu.norm() && np > 0, ErrorCode::InvalidInput,
          "TU channel lies along the Eve channel; no zero-forcing beam exists");
  return p / np;
}

AnBenchmarkParams make_an_params(const ChannelSet &ch, const PaOptions &opt) {
  check_antennas(ch);
  AnBenchmarkParams p;
  for (int k = 0; k < ch.n_beams(); ++k) {
    const auto &l = ch.links(k);
    p.f_mrt.push_back(mrt_vector(l.g_tu));
    const CMat b = an_basis(l.g_tu, l.g_su);
    CVec v;
    if (opt.an_seed) {
      Rng rng = make_stream(*opt.an_seed, static_cast<std::uint64_t>(k), 0x414e);
      std::normal_distribution<double> nd;
      v.resize(b.cols());
      for (int i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
    } else {
      v = b.adjoint() * l.g_e_est;
    }
    if (v.norm() <= 1e-300) v = CVec::Unit(b.cols(), 0);
    p.v.push_back(v / v.norm());
    p.an_basis.push_back(b);
    p.ell.push_back(1.0);
  }
  return p;
}

PaPoint init_pa_point(const ChannelSet &ch, const AnBenchmarkParams &an, const PowerBudget &budget,
                      const ScaConfig &cfg) {
  validate(budget);
  validate(cfg, ch.n_beams());
  FixedBsModel model(ch, budget, pa_constants(ch, an, budget.p_b), true);
  ProgramBuilder pb;
  const auto aff = model.add_decision(pb);
  Vec x = Vec::Zero(pb.n_vars());
  model.initial_point(x, 1.0, 0);
  PaPoint p;
  p.anchors = detail::exact_anchors(aff, x);
  p.scalars = detail::closed_form(aff, x, p.anchors, cfg).scalars;
  model.decode(x, p.W, p.ell);
  return p;
}

conic::ConicProgram build_p5(const ChannelSet &ch, const AnBenchmarkParams &an, const PaPoint &point,
                             const PowerBudget &budget, const ScaConfig &cfg) {
  validate(budget);
  validate(cfg, ch.n_beams());
  const auto n = static_cast<std::size_t>(ch.n_beams());
  require(point.anchors.mu.size() == n && point.anchors.q.size() == n && point.anchors.eta.size() == n,
          ErrorCode::InvalidInput, "anchors need one value per beam");
  for (std::size_t k = 0; k < n; ++k)
    require(std::isfinite(point.anchors.mu[k]) && std::isfinite(point.anchors.q[k]) &&
                std::isfinite(point.anchors.eta[k]),
            ErrorCode::InvalidInput, "anchors must be finite");
  FixedBsModel model(ch, budget, pa_constants(ch, an, budget.p_b), true);
  return detail::build_program(model, point.anchors, cfg);
}

BeamformingSolution solve_pa(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg,
                             const PaOptions &opt) {
  validate(budget);
  AnBenchmarkParams an = make_an_params(ch, opt);
  FixedBsModel model(ch, budget, pa_constants(ch, an, budget.p_b), true);
  const detail::EngineResult res = detail::run_sca(model, cfg);
  BeamformingSolution sol;
  sol.method = "pa_an";
  model.decode(res.x, sol.W, sol.ell);
  for (int k = 0; k < ch.n_beams(); ++k) sol.F.push_back(sol.ell[k] * budget.p_b * gram(an.f_mrt[k]));
  detail::finish_solution(sol, res, cfg);
  for (int k = 0; k < ch.n_beams(); ++k) sol.f[k] = std::sqrt(sol.ell[k] * budget.p_b) * an.f_mrt[k];
  an.ell = sol.ell;
  sol.an = an;
  return sol;
}

BeamformingSolution zf_baseline(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg) {
  validate(budget);
  check_antennas(ch);
  std::vector<CVec> f_zf;
  for (int k = 0; k < ch.n_beams(); ++k) f_zf.push_back(zf_vector(ch.links(k).g_tu, ch.links(k).g_e_est));
  FixedBsModel model(ch, budget, beam_constants(ch, f_zf, budget.p_b), false);
  const detail::EngineResult res = detail::run_sca(model, cfg);
  BeamformingSolution sol;
  sol.method = "zf";
  std::vector<double> unused;
  model.decode(res.x, sol.W, unused);
  for (int k = 0; k < ch.n_beams(); ++k) sol.F.push_back(budget.p_b * gram(f_zf[k]));
  detail::finish_solution(sol, res, cfg);
  for (int k = 0; k < ch.n_beams(); ++k) sol.f[k] = std::sqrt(budget.p_b) * f_zf[k];
  return sol;
}

}  // namespace symsec
