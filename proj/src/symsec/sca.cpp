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

#include "symsec/sca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "symsec/error.hpp"
#include "symsec/secrecy_program.hpp"

namespace symsec {

namespace {

constexpr double kLog2E = 1.44269504088896340736;
constexpr double kLn2 = 0.69314718055994530942;

using conic::Affine;
using conic::HermitianBlock;
using conic::ProgramBuilder;

// Decision variables of the rate program: W_k (N x N) and F_k (M x M), stored divided by
// P_S and P_B so both budgets read 1 in the program.
class P2Model : public detail::SecrecyModel {
 public:
  P2Model(const ChannelSet &ch, const PowerBudget &budget) : ch_(ch), budget_(budget) {}

  std::vector<detail::BeamAffines> add_decision(ProgramBuilder &pb) override {
    const int n = ch_.n_beams();
    w_.clear();
    f_.clear();
    for (int k = 0; k < n; ++k) w_.push_back(pb.add_hermitian("W" + std::to_string(k), ch_.n_sat()));
    for (int k = 0; k < n; ++k) f_.push_back(pb.add_hermitian("F" + std::to_string(k), ch_.n_antennas()));

    std::vector<Affine> t_su(n), t_tu(n), t_e(n);
    Affine all_su, all_tu, all_e, power_s;
    for (int i = 0; i < n; ++i) {
      const auto &g = ch_.grams(i);
      t_su[i] = conic::trace_product(budget_.p_s * g.H_su, w_[i]);
      t_tu[i] = conic::trace_product(budget_.p_s * g.H_tu, w_[i]);
      t_e[i] = conic::trace_product(budget_.p_s * g.H_e, w_[i]);
      all_su += t_su[i];
      all_tu += t_tu[i];
      all_e += t_e[i];
      power_s += conic::trace(w_[i]);
    }
    std::vector<detail::BeamAffines> out(n);
    for (int k = 0; k < n; ++k) {
      const auto &g = ch_.grams(k);
      const Affine f_su = conic::trace_product(budget_.p_b * g.G_su, f_[k]);
      const Affine f_tu = conic::trace_product(budget_.p_b * g.G_tu, f_[k]);
      const Affine f_e = conic::trace_product(budget_.p_b * g.G_e, f_[k]);
      auto &a = out[k];
      a.S = all_su + f_su + Affine(budget_.noise_su);
      a.MU = all_su - t_su[k] + f_su + Affine(budget_.noise_su);
      a.QE = all_e + f_e + Affine(budget_.noise_e);
      a.V = all_e - t_e[k] + f_e + Affine(budget_.noise_e);
      a.T = all_tu + f_tu + Affine(budget_.noise_tu);
      a.ET = all_tu + Affine(budget_.noise_tu);
      a.AL = all_e + Affine(budget_.noise_e);
    }
    pb.add_nonneg(Affine(1.0) - power_s);
    for (int k = 0; k < n; ++k) pb.add_nonneg(Affine(1.0) - conic::trace(f_[k]));
    for (const auto &b : w_) pb.add_psd(b);
    for (const auto &b : f_) pb.add_psd(b);
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
    for (const auto &b : f_) {
      detail::clip_psd(b, x);
      const double tf = detail::block_trace(b, x);
      if (tf > 1.0) detail::scale_block(b, 1.0 / tf, x);
    }
  }

  // Variant 0: isotropic BS covariances. Variant 1: full-power BS beams on
  // g_tu with the estimated Eve direction removed, so some start is
  // TU-feasible whenever the zero-forcing baseline's is.
  void initial_point(Vec &x, double satellite_share, int variant) const override {
    const int n = ch_.n_beams();
    const double ws = satellite_share / (static_cast<double>(n) * n);
    for (const auto &b : w_) conic::hermitian_to_vars(b, ws * CMat::Identity(b.n, b.n), x);
    for (std::size_t k = 0; k < f_.size(); ++k) {
      const auto &b = f_[k];
      CMat f = 1.0 / b.n * CMat::Identity(b.n, b.n);
      if (variant == 1) {
        const auto &l = ch_.links(static_cast<int>(k));
        CVec d = l.g_tu;
        const double ge = l.g_e_est.squaredNorm();
        if (ge > 0) d -= l.g_e_est * (l.g_e_est.dot(l.g_tu) / ge);
        if (d.norm() > 0 && d.norm() > 1e-9 * l.g_tu.norm()) f = (d / d.norm()) * (d / d.norm()).adjoint();
      }
      conic::hermitian_to_vars(b, f, x);
    }
  }

  int start_variants() const override { return 2; }

  Affine power() const override {
    Affine p;
    for (const auto &b : w_) p += budget_.p_s * conic::trace(b);
    for (const auto &b : f_) p += budget_.p_b * conic::trace(b);
    return p;
  }

  int n_beams() const override { return ch_.n_beams(); }

  void encode(const std::vector<CMat> &w, const std::vector<CMat> &f, Vec &x) const {
    for (std::size_t k = 0; k < w_.size(); ++k) conic::hermitian_to_vars(w_[k], w[k] / budget_.p_s, x);
    for (std::size_t k = 0; k < f_.size(); ++k) conic::hermitian_to_vars(f_[k], f[k] / budget_.p_b, x);
  }

  std::vector<detail::GainBlock> gain_blocks() const override {
    std::vector<detail::GainBlock> out;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      const auto &g = ch_.grams(static_cast<int>(k));
      out.push_back({w_[k], {g.H_su, g.H_tu, g.H_e}});
    }
    for (std::size_t k = 0; k < f_.size(); ++k) {
      const auto &g = ch_.grams(static_cast<int>(k));
      out.push_back({f_[k], {g.G_su, g.G_tu, g.G_e}});
    }
    return out;
  }

  void decode(const Vec &x, std::vector<CMat> &w, std::vector<CMat> &f) const {
    w.clear();
    f.clear();
    for (const auto &b : w_) w.push_back(budget_.p_s * conic::hermitian_from_vars(b, x));
    for (const auto &b : f_) f.push_back(budget_.p_b * conic::hermitian_from_vars(b, x));
  }

 private:
  const ChannelSet &ch_;
  PowerBudget budget_;
  std::vector<HermitianBlock> w_, f_;
};

struct Assembled {
  conic::ConicProgram prog;
  std::vector<detail::BeamAffines> aff;
  std::vector<detail::ScalarVars> sv;
};

Assembled assemble(detail::SecrecyModel &model, const Anchors &anchors, const ScaConfig &cfg, bool min_power,
                   double phi_star) {
  ProgramBuilder pb;
  Assembled out;
  out.aff = model.add_decision(pb);
  const int n = static_cast<int>(out.aff.size());
  Affine secrecy;
  for (int k = 0; k < n; ++k) {
    const std::string tag = "[" + std::to_string(k) + "]";
    detail::ScalarVars v{pb.add_var("s" + tag),   pb.add_var("mu" + tag),  pb.add_var("q" + tag),
                         pb.add_var("v" + tag),   pb.add_var("tau" + tag), pb.add_var("eta" + tag),
                         pb.add_var("alpha" + tag)};
    out.sv.push_back(v);
    secrecy += Affine::var(v.s) - Affine::var(v.mu) - Affine::var(v.q) + Affine::var(v.v);
  }
  for (int k = 0; k < n; ++k) {
    const auto &a = out.aff[k];
    const auto &v = out.sv[k];
    const TaylorBound bm = taylor_lower_bound(anchors.mu[k]);
    const TaylorBound bq = taylor_lower_bound(anchors.q[k]);
    const TaylorBound be = taylor_lower_bound(anchors.eta[k]);
    // e^x <= y written as e^(x - c) <= e^-c y, with c the nearest anchor,
    // keeps each triple O(1) for the solver.
    auto add_shifted = [&pb](int var, double c, const Affine &y) {
      pb.add_exp(Affine::var(var) - Affine(c), Affine(1.0), std::exp(-c) * y);
    };
    add_shifted(v.s, anchors.mu[k], a.S);
    add_shifted(v.v, anchors.q[k], a.V);
    add_shifted(v.tau, anchors.eta[k], a.T);
    add_shifted(v.alpha, anchors.q[k], a.AL);
    // slope x + intercept >= affine, divided through by the slope e^anchor
    pb.add_nonneg(Affine::var(v.mu) + Affine(bm.intercept / bm.slope) - (1.0 / bm.slope) * a.MU);
    pb.add_nonneg(Affine::var(v.q) + Affine(bq.intercept / bq.slope) - (1.0 / bq.slope) * a.QE);
    pb.add_nonneg(Affine::var(v.eta) + Affine(be.intercept / be.slope) - (1.0 / be.slope) * a.ET);
    pb.add_nonneg(Affine(-q_tu_nats(cfg, k)) - Affine::var(v.eta) - Affine::var(v.q) + Affine::var(v.tau) +
                  Affine::var(v.alpha));
  }
  if (min_power) {
    pb.set_objective(model.power());
    pb.add_nonneg(secrecy - Affine(phi_star));
  } else {
    pb.set_objective(-1.0 * secrecy);
  }
  out.prog = pb.build();
  return out;
}

Anchors anchors_of(const detail::Evaluated &ev) {
  Anchors a;
  for (const auto &s : ev.scalars) {
    a.mu.push_back(s.mu);
    a.q.push_back(s.q);
    a.eta.push_back(s.eta);
  }
  return a;
}

double exp_residual(const std::vector<detail::BeamAffines> &aff, const std::vector<detail::ScalarVars> &sv,
                    const Vec &x) {
  double worst = 0;
  for (std::size_t k = 0; k < aff.size(); ++k) {
    const double S = aff[k].S.eval(x), V = aff[k].V.eval(x);
    worst = std::max(worst, std::abs(std::exp(x(sv[k].s)) - S) / (1.0 + std::abs(S)));
    worst = std::max(worst, std::abs(std::exp(x(sv[k].v)) - V) / (1.0 + std::abs(V)));
  }
  return worst;
}

void write_scalars(const detail::Evaluated &ev, const std::vector<detail::ScalarVars> &sv, Vec &x) {
  for (std::size_t k = 0; k < sv.size(); ++k) {
    const auto &s = ev.scalars[k];
    x(sv[k].s) = s.s;
    x(sv[k].mu) = s.mu;
    x(sv[k].q) = s.q;
    x(sv[k].v) = s.v;
    x(sv[k].tau) = s.tau;
    x(sv[k].eta) = s.eta;
    x(sv[k].alpha) = s.alpha;
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void validate(const ScaConfig &cfg, int n_beams) {
  require(cfg.epsilon > 0, ErrorCode::InvalidParameter, "epsilon must be > 0");
  require(cfg.max_sca_iters >= 1, ErrorCode::InvalidParameter, "max_sca_iters must be >= 1");
  require(cfg.rank_tol > 0 && cfg.rank_tol < 1, ErrorCode::InvalidParameter, "rank_tol must lie in (0, 1)");
  require(cfg.q_tu.size() == 1 || static_cast<int>(cfg.q_tu.size()) == n_beams, ErrorCode::InvalidParameter,
          "q_tu needs one value or one value per beam");
  for (double q : cfg.q_tu) require(q >= 0 && std::isfinite(q), ErrorCode::InvalidParameter, "q_tu must be >= 0");
}

double q_tu_nats(const ScaConfig &cfg, int k) {
  const double q = cfg.q_tu.size() == 1 ? cfg.q_tu[0] : cfg.q_tu.at(static_cast<std::size_t>(k));
  return q * kLn2;
}

TaylorBound taylor_lower_bound(double anchor) {
  require(std::isfinite(anchor), ErrorCode::InvalidInput, "Taylor anchor must be finite");
  const double e = std::exp(anchor);
  return {e, e * (1.0 - anchor)};
}

namespace detail {

Anchors exact_anchors(const std::vector<BeamAffines> &aff, const Vec &x) {
  Anchors a;
  for (const auto &b : aff) {
    a.mu.push_back(std::log(b.MU.eval(x)));
    a.q.push_back(std::log(b.QE.eval(x)));
    a.eta.push_back(std::log(b.ET.eval(x)));
  }
  return a;
}

conic::ConicProgram build_program(SecrecyModel &model, const Anchors &anchors, const ScaConfig &cfg) {
  return assemble(model, anchors, cfg, false, 0.0).prog;
}

Evaluated closed_form(const std::vector<BeamAffines> &aff, const Vec &x, const Anchors &anchors,
                      const ScaConfig &cfg) {
  Evaluated ev;
  for (std::size_t k = 0; k < aff.size(); ++k) {
    const auto &a = aff[k];
    BeamScalars s;
    s.s = std::log(a.S.eval(x));
    s.v = std::log(a.V.eval(x));
    s.tau = std::log(a.T.eval(x));
    s.alpha = std::log(a.AL.eval(x));
    s.mu = anchors.mu[k] + a.MU.eval(x) * std::exp(-anchors.mu[k]) - 1.0;
    s.q = anchors.q[k] + a.QE.eval(x) * std::exp(-anchors.q[k]) - 1.0;
    s.eta = anchors.eta[k] + a.ET.eval(x) * std::exp(-anchors.eta[k]) - 1.0;
    ev.objective += s.s - s.mu - s.q + s.v;
    ev.tu_slack.push_back(-(s.eta + s.q - s.tau - s.alpha) - q_tu_nats(cfg, static_cast<int>(k)));
    ev.scalars.push_back(s);
  }
  return ev;
}

namespace {

// Least-trace PSD matrix with the gains of x0; gains below dead_tol (relative
// to the trace) are held at exactly zero by confining the result to their
// common null space, X = B Z B^H. Returns false when the small program does
// not reproduce the gains.
bool least_trace_same_gains(const CMat &x0, const std::vector<CMat> &gains, double dead_tol, CMat &out) {
  const int n = static_cast<int>(x0.rows());
  const double tr0 = x0.diagonal().real().sum();
  std::vector<CMat> live;
  CMat dead = CMat::Zero(n, n);
  for (const CMat &g : gains) {
    const double nrm = g.norm();
    if (!(nrm > 0)) continue;
    const CMat gn = g / nrm;
    if ((gn * x0).trace().real() <= dead_tol * tr0)
      dead += gn;
    else
      live.push_back(gn);
  }
  Eigen::SelfAdjointEigenSolver<CMat> ed(dead);
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (ed.eigenvalues()(i) <= 1e-9) keep.push_back(i);
  if (keep.empty()) return false;
  const int r = static_cast<int>(keep.size());
  CMat basis(n, r);
  for (int j = 0; j < r; ++j) basis.col(j) = ed.eigenvectors().col(keep[static_cast<std::size_t>(j)]);

  // Z scaled by 1/tr0 keeps the small program O(1)
  ProgramBuilder pb;
  const HermitianBlock z = pb.add_hermitian("Z", r);
  std::vector<double> targets;
  for (const CMat &gn : live) {
    targets.push_back((gn * x0).trace().real() / tr0);
    pb.add_eq(conic::trace_product(basis.adjoint() * gn * basis, z) - Affine(targets.back()));
  }
  pb.add_psd(z);
  pb.set_objective(conic::trace(z));
  conic::SolverSettings st;
  st.tol = 1e-9;
  st.max_iters = 20000;
  const conic::SolveResult sr = conic::solve(pb.build(), st);
  if (sr.status.state != conic::SolverState::Optimal && sr.status.state != conic::SolverState::MaxIters) return false;
  if (sr.x.size() != pb.n_vars() || !sr.x.allFinite()) return false;

  // The minimizer is rank one; polish its dominant direction y so that
  // |g^H y|^2 hits every target to rounding (minimum-norm Gauss-Newton).
  Eigen::SelfAdjointEigenSolver<CMat> es(conic::hermitian_from_vars(z, sr.x));
  const double lmax = es.eigenvalues()(r - 1);
  if (!(lmax > 0)) return false;
  CVec y = std::sqrt(lmax) * es.eigenvectors().col(r - 1);
  std::vector<CMat> gz;
  for (const CMat &gn : live) gz.push_back(basis.adjoint() * gn * basis);
  const int k = static_cast<int>(gz.size());
  auto residual = [&](const CVec &v, Vec &f) {
    f.resize(k);
    for (int j = 0; j < k; ++j) f(j) = (v.adjoint() * gz[static_cast<std::size_t>(j)] * v)(0, 0).real() - targets[static_cast<std::size_t>(j)];
  };
  Vec f;
  residual(y, f);
  for (int it = 0; it < 30 && k > 0; ++it) {
    if (f.cwiseAbs().maxCoeff() <= 1e-15) break;
    // d/dy of y^H G y along real coordinates (Re y, Im y) is 2 (Re Gy, Im Gy)
    Mat jac(k, 2 * r);
    for (int j = 0; j < k; ++j) {
      const CVec gy = gz[static_cast<std::size_t>(j)] * y;
      jac.row(j).head(r) = 2.0 * gy.real().transpose();
      jac.row(j).tail(r) = 2.0 * gy.imag().transpose();
    }
    const Mat jjt = jac * jac.transpose();
    Eigen::LDLT<Mat> ldlt(jjt);
    if (ldlt.info() != Eigen::Success) return false;
    const Vec step = -jac.transpose() * ldlt.solve(f);
    CVec dy(r);
    for (int i = 0; i < r; ++i) dy(i) = cplx(step(i), step(r + i));
    y += dy;
    residual(y, f);
  }
  for (int j = 0; j < k; ++j)
    if (std::abs(f(j)) > 1e-12 * (1.0 + targets[static_cast<std::size_t>(j)])) return false;
  const CVec yb = basis * y;
  if (yb.squaredNorm() > 1.0 + 1e-9) return false;
  out = tr0 * (yb * yb.adjoint());
  return true;
}

}  // namespace

void least_power_blocks(const SecrecyModel &model, Vec &x, const std::function<bool(const Vec &)> &acceptable) {
  for (const GainBlock &gb : model.gain_blocks()) {
    const CMat x0 = conic::hermitian_from_vars(gb.block, x);
    if (!(x0.diagonal().real().sum() > 1e-14)) continue;
    // first treat near-zero gains as zero, then only exact ones
    for (double dead_tol : {1e-6, 1e-12}) {
      CMat y;
      if (!least_trace_same_gains(x0, gb.gains, dead_tol, y)) continue;
      Vec cand = x;
      conic::hermitian_to_vars(gb.block, y, cand);
      if (acceptable(cand)) {
        x = cand;
        break;
      }
    }
  }
}

void clip_psd(const HermitianBlock &blk, Vec &x) {
  const CMat m = conic::hermitian_from_vars(blk, x);
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.eigenvalues()(0) >= 0) return;
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  const CMat p = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  conic::hermitian_to_vars(blk, p, x);
}

double block_trace(const HermitianBlock &blk, const Vec &x) {
  double t = 0;
  for (int i = 0; i < blk.n; ++i) t += x(blk.re(i, i));
  return t;
}

void scale_block(const HermitianBlock &blk, double factor, Vec &x) {
  x.segment(blk.offset, blk.count()) *= factor;
}

namespace {

double min_slack(const Evaluated &ev) { return *std::min_element(ev.tu_slack.begin(), ev.tu_slack.end()); }

// The replacement may not lose objective or TU slack beyond rounding.
bool keeps_rates(const Evaluated &next, const Evaluated &prev) {
  if (next.objective < prev.objective - 1e-8 * (1.0 + std::abs(prev.objective))) return false;
  for (std::size_t k = 0; k < prev.tu_slack.size(); ++k)
    if (next.tu_slack[k] < std::min(prev.tu_slack[k], 0.0) - 1e-8) return false;
  return true;
}

}  // namespace

namespace {

EngineResult run_sca_from(SecrecyModel &model, const ScaConfig &cfg, int variant) {
  EngineResult res;
  // Layout probe: build once at dummy anchors to size x.
  Anchors zero{std::vector<double>(model.n_beams(), 0.0), std::vector<double>(model.n_beams(), 0.0),
               std::vector<double>(model.n_beams(), 0.0)};
  Assembled probe = assemble(model, zero, cfg, false, 0.0);
  // Start from the first point meeting every TU row: at its own anchors the
  // first subproblem is then feasible (tangency). Failing that, the point
  // closest to feasibility.
  Vec x;
  Anchors anchors;
  Evaluated ev;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (double share : {1.0, 0.3, 0.1, 0.03, 0.01, 0.0}) {
    Vec xs = Vec::Zero(probe.prog.n());
    model.initial_point(xs, share, variant);
    const Anchors as = exact_anchors(probe.aff, xs);
    const Evaluated es = closed_form(probe.aff, xs, as, cfg);
    const double slack = min_slack(es);
    if (slack > best_slack) {
      best_slack = slack;
      x = xs;
      anchors = as;
      ev = es;
    }
    if (slack >= 0) break;
  }
  write_scalars(ev, probe.sv, x);
  double r_prev = ev.objective * kLog2E;

  conic::WarmStart warm;
  bool have_warm = false;
  Anchors used = anchors;
  for (int t = 1; t <= cfg.max_sca_iters; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    Assembled as = assemble(model, anchors, cfg, false, 0.0);
    const conic::SolveResult sr = conic::solve(as.prog, cfg.solver, have_warm ? &warm : nullptr);
    ScaIteration it;
    it.state = sr.status.state;
    it.solver_iterations = sr.status.iterations;
    it.primal_residual = sr.status.primal_residual;
    it.dual_residual = sr.status.dual_residual;
    // An iteration-capped solve still yields a usable point: it is projected
    // and polished below, and the safeguard rejects it if it does not help.
    const bool usable = sr.status.state == conic::SolverState::Optimal ||
                        (sr.status.state == conic::SolverState::MaxIters && sr.x.size() == x.size() &&
                         sr.x.allFinite());
    if (!usable) {
      if (t == 1 && sr.status.state == conic::SolverState::Infeasible)
        fail(ErrorCode::InfeasibleQ, "first SCA subproblem is infeasible for the requested Q_tu");
      fail(ErrorCode::SolverFailure,
           std::string("SCA subproblem ended with status ") + conic::state_name(sr.status.state));
    }
    Vec cand = sr.x;
    const double raw_res = exp_residual(as.aff, as.sv, cand);
    model.project(cand);
    const Evaluated ev_old = closed_form(as.aff, x, anchors, cfg);
    // The solver meets the TU rows only to its tolerance. Slack and objective
    // are concave in x, so moving back towards the previous point restores
    // the rows without losing ascent.
    const double floor = std::min(0.0, min_slack(ev_old));
    if (min_slack(closed_form(as.aff, cand, anchors, cfg)) < floor) {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (min_slack(closed_form(as.aff, x + mid * (cand - x), anchors, cfg)) >= floor)
          lo = mid;
        else
          hi = mid;
      }
      cand = x + lo * (cand - x);
    }
    const Evaluated ev_new = closed_form(as.aff, cand, anchors, cfg);
    // The previous point is feasible for this subproblem (tangency), so a
    // worse candidate can only come from solver inaccuracy; keep the old one.
    it.accepted = (t == 1) || ev_new.objective >= ev_old.objective;
    if (it.accepted) {
      x = cand;
      ev = ev_new;
      res.solver_exp_residual = raw_res;
    } else {
      ev = ev_old;
    }
    write_scalars(ev, as.sv, x);
    used = anchors;
    res.aff = as.aff;
    it.objective = ev.objective * kLog2E;
    it.wall_ms = elapsed_ms(t0);
    res.trace.iterations.push_back(it);
    warm = {sr.x, sr.y, sr.s};
    have_warm = true;
    const bool done = std::abs(it.objective - r_prev) < cfg.epsilon;
    r_prev = it.objective;
    if (done) {
      res.converged = true;
      break;
    }
    anchors = anchors_of(ev);
  }
  // Equal-rate points differ only in wasted power; keep the least.
  if (!res.aff.empty()) {
    least_power_blocks(model, x, [&](const Vec &xc) {
      return keeps_rates(closed_form(res.aff, xc, used, cfg), ev);
    });
    ev = closed_form(res.aff, x, used, cfg);
    write_scalars(ev, probe.sv, x);
  }
  res.x = x;
  res.eval = ev;
  res.anchors = used;
  return res;
}

}  // namespace

// Later start variants are tried only when the first subproblem from the
// previous one is infeasible.
EngineResult run_sca(SecrecyModel &model, const ScaConfig &cfg) {
  validate(cfg, model.n_beams());
  for (int variant = 0;; ++variant) {
    try {
      return run_sca_from(model, cfg, variant);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::InfeasibleQ || variant + 1 >= model.start_variants()) throw;
    }
  }
}

EngineResult run_power_min(SecrecyModel &model, const ScaConfig &cfg, const Vec &x_ref, const Anchors &anchors,
                           double phi_star) {
  validate(cfg, model.n_beams());
  const auto t0 = std::chrono::steady_clock::now();
  Assembled as = assemble(model, anchors, cfg, true, phi_star);
  require(x_ref.size() == as.prog.n(), ErrorCode::InvalidInput, "reference point does not match the program");
  conic::SolverSettings st = cfg.solver;
  const conic::SolveResult sr = conic::solve(as.prog, st);
  // An iteration-capped iterate only enters through the safeguarded blend.
  const bool usable = sr.status.state == conic::SolverState::Optimal ||
                      (sr.status.state == conic::SolverState::MaxIters && sr.x.size() == x_ref.size() &&
                       sr.x.allFinite());
  if (!usable)
    fail(sr.status.state == conic::SolverState::Infeasible ? ErrorCode::InfeasibleQ : ErrorCode::SolverFailure,
         std::string("power minimization ended with status ") + conic::state_name(sr.status.state));

  EngineResult res;
  res.aff = as.aff;
  res.anchors = anchors;
  res.solver_exp_residual = exp_residual(as.aff, as.sv, sr.x);
  Vec cand = sr.x;
  model.project(cand);

  const conic::Affine power = model.power();
  const Evaluated ev_ref = closed_form(as.aff, x_ref, anchors, cfg);
  double ref_violation = 0;
  for (double s : ev_ref.tu_slack) ref_violation = std::max(ref_violation, -s);
  const double p_ref = power.eval(x_ref);
  // Accept a point of the segment from the reference when it keeps the
  // secrecy level, the TU rows and the power of the reference.
  auto admissible = [&](const Vec &x) {
    const Evaluated ev = closed_form(as.aff, x, anchors, cfg);
    double viol = 0;
    for (double s : ev.tu_slack) viol = std::max(viol, -s);
    return ev.objective >= phi_star - 1e-7 && viol <= ref_violation + 1e-9 && power.eval(x) <= p_ref + 1e-9;
  };
  double theta = 1.0;
  if (!admissible(cand)) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (admissible((1.0 - mid) * x_ref + mid * cand))
        lo = mid;
      else
        hi = mid;
    }
    theta = lo;
  }
  Vec x = (1.0 - theta) * x_ref + theta * cand;
  res.eval = closed_form(as.aff, x, anchors, cfg);
  {
    const Evaluated before = res.eval;
    least_power_blocks(model, x, [&](const Vec &xc) {
      return keeps_rates(closed_form(as.aff, xc, anchors, cfg), before);
    });
    res.eval = closed_form(as.aff, x, anchors, cfg);
  }
  write_scalars(res.eval, as.sv, x);
  res.x = x;
  res.blend = theta;
  res.converged = true;
  ScaIteration it;
  it.objective = res.eval.objective * kLog2E;
  it.state = sr.status.state;
  it.solver_iterations = sr.status.iterations;
  it.primal_residual = sr.status.primal_residual;
  it.dual_residual = sr.status.dual_residual;
  it.wall_ms = elapsed_ms(t0);
  res.trace.iterations.push_back(it);
  return res;
}

void finish_solution(BeamformingSolution &sol, const EngineResult &res, const ScaConfig &cfg) {
  (void)cfg;
  sol.scalars = res.eval.scalars;
  sol.anchors = res.anchors;
  sol.objective_nats = res.eval.objective;
  sol.objective = res.eval.objective * kLog2E;
  sol.converged = res.converged;
  sol.trace = res.trace;
  sol.solver_exp_residual = res.solver_exp_residual;
  sol.blend = res.blend;
  sol.w.clear();
  sol.f.clear();
  sol.rank_w.clear();
  sol.rank_f.clear();
  for (const auto &m : sol.W) {
    RankOne r = extract_rank_one(m);
    sol.w.push_back(r.vector);
    sol.rank_w.push_back(r.metric);
  }
  for (const auto &m : sol.F) {
    RankOne r = extract_rank_one(m);
    sol.f.push_back(r.vector);
    sol.rank_f.push_back(r.metric);
  }
}

}  // namespace detail

ScaPoint init_linearization(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg) {
  validate(budget);
  validate(cfg, ch.n_beams());
  P2Model model(ch, budget);
  ProgramBuilder pb;
  const auto aff = model.add_decision(pb);
  Vec x = Vec::Zero(pb.n_vars());
  model.initial_point(x, 1.0, 0);
  ScaPoint p;
  p.anchors = detail::exact_anchors(aff, x);
  p.scalars = detail::closed_form(aff, x, p.anchors, cfg).scalars;
  model.decode(x, p.W, p.F);
  return p;
}

conic::ConicProgram build_p2(const ChannelSet &ch, const ScaPoint &point, const PowerBudget &budget,
                             const ScaConfig &cfg) {
  validate(budget);
  validate(cfg, ch.n_beams());
  const auto n = static_cast<std::size_t>(ch.n_beams());
  require(point.anchors.mu.size() == n && point.anchors.q.size() == n && point.anchors.eta.size() == n,
          ErrorCode::InvalidInput, "anchors need one value per beam");
  for (std::size_t k = 0; k < n; ++k)
    require(std::isfinite(point.anchors.mu[k]) && std::isfinite(point.anchors.q[k]) &&
                std::isfinite(point.anchors.eta[k]),
            ErrorCode::InvalidInput, "anchors must be finite");
  P2Model model(ch, budget);
  return detail::build_program(model, point.anchors, cfg);
}

BeamformingSolution sca_solve(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg) {
  validate(budget);
  P2Model model(ch, budget);
  const detail::EngineResult res = detail::run_sca(model, cfg);
  BeamformingSolution sol;
  sol.method = "proposed";
  model.decode(res.x, sol.W, sol.F);
  detail::finish_solution(sol, res, cfg);
  return sol;
}

BeamformingSolution solve_power_min(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg,
                                    const BeamformingSolution &reference, double phi_star) {
  validate(budget);
  require(reference.method == "proposed", ErrorCode::Unsupported, "power minimization applies to the proposed design");
  require(static_cast<int>(reference.W.size()) == ch.n_beams() && reference.F.size() == reference.W.size(),
          ErrorCode::InvalidInput, "reference solution does not match the channel set");
  P2Model model(ch, budget);
  ProgramBuilder probe;
  model.add_decision(probe);
  const int n_scalar = 7 * ch.n_beams();
  Vec x_ref = Vec::Zero(probe.n_vars() + n_scalar);
  model.encode(reference.W, reference.F, x_ref);
  const detail::EngineResult res = detail::run_power_min(model, cfg, x_ref, reference.anchors, phi_star);
  BeamformingSolution sol;
  sol.method = "proposed";
  model.decode(res.x, sol.W, sol.F);
  detail::finish_solution(sol, res, cfg);
  return sol;
}

RankOne extract_rank_one(const CMat &x) {
  require(x.rows() == x.cols(), ErrorCode::InvalidInput, "extract_rank_one expects a square matrix");
  const int n = static_cast<int>(x.rows());
  RankOne out;
  const double tr = x.diagonal().real().sum();
  if (tr <= 1e-12) {
    out.vector = CVec::Zero(n);
    out.metric = 1.0;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(x));
  const Vec &lam = es.eigenvalues();
  const double lmax = lam(n - 1);
  // Fix the phase so the first significant entry is real and positive.
  auto normalized = [&](int col) {
    CVec u = es.eigenvectors().col(col);
    for (int i = 0; i < n; ++i)
      if (std::abs(u(i)) > 1e-12) {
        u *= std::conj(u(i)) / std::abs(u(i));
        break;
      }
    return u;
  };
  CVec best = normalized(n - 1);
  for (int c = n - 2; c >= 0 && lmax - lam(c) <= 1e-9; --c) {
    const CVec u = normalized(c);
    for (int i = 0; i < n; ++i) {
      if (std::abs(u(i)) <= 1e-12 && std::abs(best(i)) <= 1e-12) continue;
      if (u(i).real() > best(i).real()) best = u;
      break;
    }
  }
  out.vector = std::sqrt(std::max(lmax, 0.0)) * best;
  out.metric = std::max(lmax, 0.0) / tr;
  return out;
}

SinrReport realized_sinrs(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                          bool use_true_eve) {
  if (sol.method == "pa_an") {
    require(sol.an.has_value(), ErrorCode::InvalidInput, "pa_an solution lacks its AN parameters");
    AnBenchmarkParams p = *sol.an;
    p.ell = sol.ell;
    return compute_sinrs_an(ch, sol.w, p, budget, use_true_eve);
  }
  return compute_sinrs(ch, BeamformerSet{sol.w, sol.f}, budget, use_true_eve);
}

SecrecyReport realized_rates(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                             bool use_true_eve) {
  return secrecy_rates(realized_sinrs(sol, ch, budget, use_true_eve));
}

double total_power(const BeamformingSolution &sol) {
  double p = 0;
  for (const auto &m : sol.W) p += trace_re(m);
  for (const auto &m : sol.F) p += trace_re(m);
  return p;
}

TightnessReport verify_tightness(const BeamformingSolution &sol, const ChannelSet &ch, const PowerBudget &budget,
                                 const ScaConfig &cfg) {
  const int n = ch.n_beams();
  require(static_cast<int>(sol.W.size()) == n && static_cast<int>(sol.F.size()) == n &&
              static_cast<int>(sol.scalars.size()) == n,
          ErrorCode::InvalidInput, "solution does not match the channel set");
  std::vector<double> t_su(n), t_tu(n), t_e(n);
  double all_su = 0, all_tu = 0, all_e = 0;
  for (int i = 0; i < n; ++i) {
    const auto &g = ch.grams(i);
    t_su[i] = trace_product(g.H_su, sol.W[i]);
    t_tu[i] = trace_product(g.H_tu, sol.W[i]);
    t_e[i] = trace_product(g.H_e, sol.W[i]);
    all_su += t_su[i];
    all_tu += t_tu[i];
    all_e += t_e[i];
  }
  TightnessReport rep;
  for (int k = 0; k < n; ++k) {
    const auto &g = ch.grams(k);
    const double an = (sol.method == "pa_an" && sol.an) ? [&] {
      AnBenchmarkParams p = *sol.an;
      p.ell = sol.ell;
      return an_power_at_eve(ch.links(k).g_e_est, p, k, budget.p_b);
    }()
                                                        : 0.0;
    const double f_su = trace_product(g.G_su, sol.F[k]);
    const double f_tu = trace_product(g.G_tu, sol.F[k]);
    const double f_e = trace_product(g.G_e, sol.F[k]);
    const std::array<double, 4> side{all_su + f_su + budget.noise_su, all_e - t_e[k] + f_e + an + budget.noise_e,
                                     all_tu + f_tu + budget.noise_tu, all_e + an + budget.noise_e};
    const auto &s = sol.scalars[k];
    const std::array<double, 4> val{s.s, s.v, s.tau, s.alpha};
    BeamTightness bt;
    for (int j = 0; j < 4; ++j) {
      bt.residual[j] = std::exp(val[j]) - side[j];
      bt.relative[j] = std::abs(bt.residual[j]) / (1.0 + std::abs(side[j]));
      rep.max_relative = std::max(rep.max_relative, bt.relative[j]);
      if (bt.relative[j] > 1e-4) bt.tight = false;
    }
    rep.all_tight = rep.all_tight && bt.tight;
    rep.beams.push_back(bt);
  }
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) q[k] = q_tu_nats(cfg, k) * kLog2E;
  rep.tu_margin = tu_margins(realized_sinrs(sol, ch, budget, false), q);
  return rep;
}

namespace {

nlohmann::json interleave(const CMat &m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j).real());
      row.push_back(m(i, j).imag());
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json interleave(const CVec &v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    out.push_back(v(i).real());
    out.push_back(v(i).imag());
  }
  return out;
}

}  // namespace

std::string to_json(const BeamformingSolution &sol) {
  nlohmann::json j;
  j["method"] = sol.method;
  j["objective"] = sol.objective;
  j["objective_nats"] = sol.objective_nats;
  j["converged"] = sol.converged;
  j["blend"] = sol.blend;
  j["solver_exp_residual"] = sol.solver_exp_residual;
  for (const char *key : {"W", "F", "w", "f"}) j[key] = nlohmann::json::array();
  for (const auto &m : sol.W) j["W"].push_back(interleave(m));
  for (const auto &m : sol.F) j["F"].push_back(interleave(m));
  for (const auto &v : sol.w) j["w"].push_back(interleave(v));
  for (const auto &v : sol.f) j["f"].push_back(interleave(v));
  j["rank_w"] = sol.rank_w;
  j["rank_f"] = sol.rank_f;
  if (!sol.ell.empty()) j["ell"] = sol.ell;
  nlohmann::json sc = nlohmann::json::array();
  for (const auto &s : sol.scalars)
    sc.push_back({{"s", s.s}, {"mu", s.mu}, {"q", s.q}, {"v", s.v}, {"tau", s.tau}, {"eta", s.eta},
                  {"alpha", s.alpha}});
  j["scalars"] = sc;
  j["anchors"] = {{"mu", sol.anchors.mu}, {"q", sol.anchors.q}, {"eta", sol.anchors.eta}};
  nlohmann::json tr = nlohmann::json::array();
  for (const auto &it : sol.trace.iterations)
    tr.push_back({{"objective", it.objective},
                  {"status", conic::state_name(it.state)},
                  {"solver_iterations", it.solver_iterations},
                  {"primal_residual", it.primal_residual},
                  {"dual_residual", it.dual_residual},
                  {"wall_ms", it.wall_ms},
                  {"accepted", it.accepted}});
  j["trace"] = tr;
  return j.dump(2);
}

}  // namespace symsec
