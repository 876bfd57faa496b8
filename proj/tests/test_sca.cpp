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

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "symsec/error.hpp"
#include "symsec/sca.hpp"

using namespace symsec;

namespace {

// Worst violation of s = b - A x in K, per cone family.
double cone_violation(const conic::ConicProgram &prog, const Vec &x) {
  const Vec s = prog.b - prog.A * x;
  double worst = 0;
  int row = 0;
  for (const auto &blk : prog.cones.blocks) {
    switch (blk.kind) {
      case conic::ConeKind::Zero:
        for (int i = 0; i < blk.size; ++i) worst = std::max(worst, std::abs(s(row + i)));
        break;
      case conic::ConeKind::NonNeg:
        for (int i = 0; i < blk.size; ++i) worst = std::max(worst, -s(row + i));
        break;
      case conic::ConeKind::Psd: {
        const Mat m = conic::smat(s.segment(row, blk.rows()), blk.size);
        worst = std::max(worst, -Eigen::SelfAdjointEigenSolver<Mat>(m).eigenvalues()(0));
        break;
      }
      case conic::ConeKind::Exp:
        for (int i = 0; i < blk.size; ++i) {
          const Eigen::Vector3d v = s.segment<3>(row + 3 * i);
          if (!conic::in_expcone(v, 1e-9)) worst = std::max(worst, v(1) * std::exp(v(0) / v(1)) - v(2));
        }
        break;
    }
    row += blk.rows();
  }
  return worst;
}

Vec encode_point(const conic::ConicProgram &prog, const ScaPoint &p, const PowerBudget &budget) {
  Vec x = Vec::Zero(prog.n());
  const std::size_t n = p.W.size();
  for (std::size_t k = 0; k < n; ++k) {
    conic::hermitian_to_vars(prog.hermitian_blocks[k], p.W[k] / budget.p_s, x);
    conic::hermitian_to_vars(prog.hermitian_blocks[n + k], p.F[k] / budget.p_b, x);
  }
  std::map<std::string, int> index;
  for (int i = 0; i < prog.n(); ++i) index[prog.vars[i].name] = i;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string t = "[" + std::to_string(k) + "]";
    const auto &s = p.scalars[k];
    x(index.at("s" + t)) = s.s;
    x(index.at("mu" + t)) = s.mu;
    x(index.at("q" + t)) = s.q;
    x(index.at("v" + t)) = s.v;
    x(index.at("tau" + t)) = s.tau;
    x(index.at("eta" + t)) = s.eta;
    x(index.at("alpha" + t)) = s.alpha;
  }
  return x;
}

ChannelSet zero_channels(int n, int m) {
  BeamLinks l;
  l.h_su = l.h_tu = l.h_e_true = l.h_e_est = CVec::Zero(n);
  l.g_su = l.g_tu = l.g_e_true = l.g_e_est = CVec::Zero(m);
  return ChannelSet(std::vector<BeamLinks>(static_cast<std::size_t>(n), l));
}

}  // namespace

TEST_CASE("Taylor bound of the exponential") {
  const TaylorBound b0 = taylor_lower_bound(0.0);
  CHECK(b0.slope == 1.0);
  CHECK(b0.intercept == 1.0);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), x = u(rng);
    const TaylorBound b = taylor_lower_bound(a);
    REQUIRE(std::exp(x) >= b(x) - 1e-12 * std::exp(x));
  }
  for (double a : {-3.0, 0.5, 7.0}) CHECK(taylor_lower_bound(a)(a) == doctest::Approx(std::exp(a)).epsilon(1e-14));
  CHECK_THROWS_AS(taylor_lower_bound(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("initial linearization point") {
  const ChannelSet ch = draw_channel_set(ChannelConfig{}, 3, 0);
  const PowerBudget budget;
  const ScaConfig cfg;
  const ScaPoint p = init_linearization(ch, budget, cfg);
  double tw = 0;
  for (const auto &w : p.W) tw += trace_re(w);
  CHECK(tw == doctest::Approx(budget.p_s).epsilon(1e-12));
  for (const auto &f : p.F) CHECK(trace_re(f) == doctest::Approx(budget.p_b).epsilon(1e-12));
  for (int k = 0; k < 3; ++k) {
    // Interference-plus-noise at SU k, evaluated from the channel vectors.
    double mu = 1.0;
    for (int i = 0; i < 3; ++i)
      if (i != k) mu += (ch.links(i).h_su.adjoint() * p.W[i] * ch.links(i).h_su)(0).real();
    mu += (ch.links(k).g_su.adjoint() * p.F[k] * ch.links(k).g_su)(0).real();
    CHECK(std::exp(p.anchors.mu[k]) == doctest::Approx(mu).epsilon(1e-12));
  }
  const ScaPoint z = init_linearization(zero_channels(2, 3), budget, cfg);
  for (int k = 0; k < 2; ++k) {
    CHECK(z.anchors.mu[k] == 0.0);
    CHECK(z.anchors.q[k] == 0.0);
    CHECK(z.anchors.eta[k] == 0.0);
  }
}

TEST_CASE("rate program structure and feasibility of its own anchor point") {
  const ChannelSet ch = draw_channel_set(ChannelConfig{}, 3, 1);
  const PowerBudget budget;
  ScaConfig cfg;
  cfg.q_tu = {0.0};
  const ScaPoint p = init_linearization(ch, budget, cfg);
  const conic::ConicProgram prog = build_p2(ch, p, budget, cfg);
  const int n = 3;
  int nonneg = 0, psd = 0, exp = 0;
  for (const auto &b : prog.cones.blocks) {
    if (b.kind == conic::ConeKind::NonNeg) nonneg += b.size;
    if (b.kind == conic::ConeKind::Psd) ++psd;
    if (b.kind == conic::ConeKind::Exp) exp += b.size;
  }
  CHECK(exp == 4 * n);
  CHECK(nonneg == 4 * n + 1 + n);
  CHECK(psd == 2 * n);
  CHECK(cone_violation(prog, encode_point(prog, p, budget)) < 1e-9);

  ScaPoint bad = p;
  bad.anchors.mu[0] = std::nan("");
  CHECK_THROWS_AS(build_p2(ch, bad, budget, cfg), Error);
}

TEST_CASE("blind Eve: the v and q scalars meet at zero") {
  ChannelSet ch = draw_channel_set(ChannelConfig{.n_beams = 1, .n_antennas = 2}, 5, 0);
  BeamLinks l = ch.links(0);
  l.h_e_true = l.h_e_est = CVec::Zero(1);
  l.g_e_true = l.g_e_est = CVec::Zero(2);
  ch = ChannelSet({l});
  ScaConfig cfg;
  cfg.q_tu = {0.0};
  const BeamformingSolution sol = sca_solve(ch, PowerBudget{}, cfg);
  CHECK(sol.scalars[0].v == doctest::Approx(0.0));
  CHECK(sol.scalars[0].q == doctest::Approx(sol.scalars[0].v));
}

TEST_CASE("infinite epsilon stops after one subproblem") {
  const ChannelSet ch = draw_channel_set(ChannelConfig{}, 3, 2);
  ScaConfig cfg;
  cfg.epsilon = std::numeric_limits<double>::infinity();
  const BeamformingSolution sol = sca_solve(ch, PowerBudget{}, cfg);
  CHECK(sol.trace.iterations.size() == 1);
  CHECK(sol.converged);
}

TEST_CASE("SCA ascent, rank one, tightness and feasibility") {
  const PowerBudget budget;
  const ScaConfig cfg;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    CAPTURE(seed);
    const ChannelSet ch = draw_channel_set(ChannelConfig{}, 17, seed);
    const BeamformingSolution sol = sca_solve(ch, budget, cfg);
    CHECK(sol.converged);
    for (std::size_t t = 1; t < sol.trace.iterations.size(); ++t)
      CHECK(sol.trace.iterations[t].objective >= sol.trace.iterations[t - 1].objective - 1e-7);
    for (double r : sol.rank_w) CHECK(r >= 0.999);
    for (double r : sol.rank_f) CHECK(r >= 0.999);
    const TightnessReport tr = verify_tightness(sol, ch, budget, cfg);
    CHECK(tr.max_relative <= 1e-4);
    for (double m : tr.tu_margin) CHECK(m >= -1e-6);
    double pw = 0;
    for (const auto &w : sol.W) pw += trace_re(w);
    CHECK(pw <= budget.p_s * (1 + 1e-6));
    for (const auto &f : sol.F) CHECK(trace_re(f) <= budget.p_b * (1 + 1e-6));
    // The Taylor rows make the SDR objective a lower bound on the secrecy of
    // the extracted vectors, tight up to the last SCA step.
    const double realized = sum_secrecy_product_form(realized_sinrs(sol, ch, budget, false));
    CHECK(realized >= sol.objective - 1e-9);
    CHECK(realized <= sol.objective + cfg.epsilon);
  }
}

TEST_CASE("zero TU thresholds are always feasible") {
  ScaConfig cfg;
  cfg.q_tu = {0.0};
  cfg.epsilon = 1e-2;
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    CHECK_NOTHROW(sca_solve(draw_channel_set(ChannelConfig{}, 23, seed), PowerBudget{}, cfg));
}

TEST_CASE("unreachable TU threshold is reported as infeasible") {
  ScaConfig cfg;
  cfg.q_tu = {60.0};
  try {
    sca_solve(draw_channel_set(ChannelConfig{}, 23, 0), PowerBudget{}, cfg);
    FAIL("expected an infeasibility error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::InfeasibleQ);
  }
}

TEST_CASE("rank-one extraction") {
  CVec v(3);
  v << cplx(0.0, 2.0), cplx(1.0, -1.0), cplx(0.5, 0.0);
  const RankOne r = extract_rank_one(gram(v));
  CHECK(r.metric == doctest::Approx(1.0).epsilon(1e-12));
  const cplx phase = r.vector.dot(v) / v.squaredNorm();
  CHECK(std::abs(phase) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((r.vector * phase - v).norm() < 1e-10);
  const CMat half = 0.5 * (gram(CVec::Unit(2, 0)) + gram(CVec::Unit(2, 1)));
  CHECK(extract_rank_one(half).metric == doctest::Approx(0.5));
  CHECK(extract_rank_one(CMat::Zero(2, 2)).vector.norm() == 0.0);
}

TEST_CASE("tightness flags a non-optimal point") {
  const ChannelSet ch = draw_channel_set(ChannelConfig{}, 3, 3);
  const PowerBudget budget;
  const ScaConfig cfg;
  const ScaPoint p = init_linearization(ch, budget, cfg);
  BeamformingSolution sol;
  sol.W = p.W;
  sol.F = p.F;
  sol.scalars = p.scalars;
  for (const auto &m : sol.W) sol.w.push_back(extract_rank_one(m).vector);
  for (const auto &m : sol.F) sol.f.push_back(extract_rank_one(m).vector);
  CHECK(verify_tightness(sol, ch, budget, cfg).all_tight);
  for (auto &s : sol.scalars) s.s -= 1.0;
  const TightnessReport tr = verify_tightness(sol, ch, budget, cfg);
  CHECK_FALSE(tr.all_tight);
  CHECK(tr.max_relative > 0.1);
}

TEST_CASE("power minimization keeps the secrecy level") {
  const ChannelSet ch = draw_channel_set(ChannelConfig{}, 29, 0);
  const PowerBudget budget;
  ScaConfig cfg;
  const BeamformingSolution ref = sca_solve(ch, budget, cfg);
  const BeamformingSolution p3 = solve_power_min(ch, budget, cfg, ref, ref.objective_nats);
  CHECK(p3.objective_nats >= ref.objective_nats - 1e-6);
  CHECK(total_power(p3) <= total_power(ref) + 1e-6);
  for (double r : p3.rank_w) CHECK(r >= 0.999);
  for (double r : p3.rank_f) CHECK(r >= 0.999);

  // A vacuous secrecy level leaves only the TU rows, which at fixed anchors
  // still need BS power; the minimum drops far below the reference.
  cfg.q_tu = {0.0};
  const BeamformingSolution ref0 = sca_solve(ch, budget, cfg);
  const BeamformingSolution at_phi = solve_power_min(ch, budget, cfg, ref0, ref0.objective_nats);
  const BeamformingSolution low = solve_power_min(ch, budget, cfg, ref0, -10.0);
  CHECK(total_power(low) <= total_power(at_phi) + 1e-6);
  CHECK(total_power(low) <= 0.1 * total_power(ref0));
}
