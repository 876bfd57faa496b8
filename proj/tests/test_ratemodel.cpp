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

#include <cmath>
#include <sstream>
#include <vector>

#include "symsec/benchmarks.hpp"
#include "symsec/error.hpp"
#include "symsec/ratemodel.hpp"

using namespace symsec;

namespace {

ChannelSet small_set(int n, int m, unsigned seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  auto draw = [&](int len) {
    CVec v(len);
    for (int i = 0; i < len; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v;
  };
  std::vector<BeamLinks> links;
  for (int k = 0; k < n; ++k) {
    BeamLinks l;
    l.h_su = draw(n);
    l.h_tu = draw(n);
    l.h_e_true = draw(n);
    l.h_e_est = l.h_e_true + 0.1 * draw(n);
    l.g_su = draw(m);
    l.g_tu = draw(m);
    l.g_e_true = draw(m);
    l.g_e_est = l.g_e_true + 0.1 * draw(m);
    links.push_back(l);
  }
  return ChannelSet(links);
}

BeamformerSet random_bf(int n, int m, unsigned seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  BeamformerSet bf;
  for (int k = 0; k < n; ++k) {
    CVec w(n), f(m);
    for (int i = 0; i < n; ++i) w(i) = cplx(nd(rng), nd(rng)) * 0.5;
    for (int i = 0; i < m; ++i) f(i) = cplx(nd(rng), nd(rng)) * 0.5;
    bf.w.push_back(w);
    bf.f.push_back(f);
  }
  return bf;
}

}  // namespace

TEST_CASE("zero beamformers give zero SINRs") {
  const ChannelSet ch = small_set(3, 4, 1);
  BeamformerSet bf{std::vector<CVec>(3, CVec::Zero(3)), std::vector<CVec>(3, CVec::Zero(4))};
  const SinrReport s = compute_sinrs(ch, bf, PowerBudget{}, false);
  for (int k = 0; k < 3; ++k) {
    CHECK(s.su[k] == 0.0);
    CHECK(s.tu[k] == 0.0);
    CHECK(s.se[k] == 0.0);
    CHECK(s.te[k] == 0.0);
  }
}

TEST_CASE("single beam with unit SU power and no BS signal") {
  BeamLinks l;
  l.h_su = CVec::Ones(1);
  l.h_tu = CVec::Ones(1);
  l.h_e_true = l.h_e_est = CVec::Ones(1);
  l.g_su = l.g_tu = l.g_e_true = l.g_e_est = CVec::Ones(2);
  const ChannelSet ch({l});
  BeamformerSet bf{{CVec::Ones(1)}, {CVec::Zero(2)}};
  const SinrReport s = compute_sinrs(ch, bf, PowerBudget{}, false);
  CHECK(s.su[0] == doctest::Approx(1.0));
  CHECK(s.tu[0] == 0.0);
}

TEST_CASE("vector and Gram evaluations agree") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = small_set(3, 4, seed);
    const BeamformerSet bf = random_bf(3, 4, 100 + seed);
    for (bool truth : {false, true}) {
      const SinrReport a = compute_sinrs(ch, bf, PowerBudget{}, truth);
      const SinrReport b = compute_sinrs(ch, to_covariances(bf), PowerBudget{}, truth);
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(a.su[k] - b.su[k]) <= 1e-10 * (1 + a.su[k]));
        CHECK(std::abs(a.tu[k] - b.tu[k]) <= 1e-10 * (1 + a.tu[k]));
        CHECK(std::abs(a.se[k] - b.se[k]) <= 1e-10 * (1 + a.se[k]));
        CHECK(std::abs(a.te[k] - b.te[k]) <= 1e-10 * (1 + a.te[k]));
      }
    }
  }
}

TEST_CASE("SU SINR matches a direct evaluation of the received-signal model") {
  const ChannelSet ch = small_set(2, 3, 4);
  const BeamformerSet bf = random_bf(2, 3, 5);
  const SinrReport s = compute_sinrs(ch, bf, PowerBudget{}, false);
  // Beam 0: own term |h_su,0^H w_0|^2, interference |h_su,1^H w_1|^2 and the
  // co-channel BS signal |g_su,0^H f_0|^2.
  const double own = std::norm(ch.links(0).h_su.dot(bf.w[0]));
  const double other = std::norm(ch.links(1).h_su.dot(bf.w[1]));
  const double bs = std::norm(ch.links(0).g_su.dot(bf.f[0]));
  CHECK(s.su[0] == doctest::Approx(own / (other + bs + 1.0)).epsilon(1e-12));
  const double eve_bs = std::norm(ch.links(0).g_e_est.dot(bf.f[0]));
  const double eve_sat = std::norm(ch.links(0).h_e_est.dot(bf.w[0])) + std::norm(ch.links(1).h_e_est.dot(bf.w[1]));
  CHECK(s.te[0] == doctest::Approx(eve_bs / (eve_sat + 1.0)).epsilon(1e-12));
}

TEST_CASE("secrecy rates") {
  SinrReport s;
  s.su = {3.0, 2.0};
  s.se = {1.0, 2.0};
  s.tu = {0.5, 0.5};
  s.te = {0.0, 1.0};
  const SecrecyReport r = secrecy_rates(s);
  CHECK(r.beams[0].r_su == doctest::Approx(1.0));
  CHECK(r.beams[1].r_su == 0.0);
  CHECK(r.beams[1].r_tu == 0.0);
  CHECK(r.sum_r_su == doctest::Approx(1.0));

  for (unsigned seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = small_set(3, 4, seed);
    const SinrReport sr = compute_sinrs(ch, random_bf(3, 4, seed + 7), PowerBudget{}, false);
    double direct = 0;
    for (int k = 0; k < 3; ++k) direct += std::log2(1 + sr.su[k]) - std::log2(1 + sr.se[k]);
    CHECK(sum_secrecy_product_form(sr) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("TU margins") {
  SinrReport s;
  s.tu = {3.0};
  s.te = {1.0};
  s.su = s.se = {0.0};
  const auto m = tu_margins(s, {0.5});
  CHECK(m[0] == doctest::Approx(0.5));
}

TEST_CASE("AN model limits") {
  const ChannelSet ch = small_set(3, 4, 12);
  const PowerBudget budget;
  AnBenchmarkParams p = make_an_params(ch);
  const BeamformerSet bf = random_bf(3, 4, 13);

  // Full split on the useful signal: the AN model equals the standard model
  // with f_k = sqrt(P_B) f_mrt.
  BeamformerSet mrt = bf;
  for (int k = 0; k < 3; ++k) mrt.f[k] = std::sqrt(budget.p_b) * p.f_mrt[k];
  const SinrReport a = compute_sinrs_an(ch, bf.w, p, budget, true);
  const SinrReport b = compute_sinrs(ch, mrt, budget, true);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.su[k] == doctest::Approx(b.su[k]).epsilon(1e-12));
    CHECK(a.tu[k] == doctest::Approx(b.tu[k]).epsilon(1e-12));
    CHECK(a.se[k] == doctest::Approx(b.se[k]).epsilon(1e-12));
    CHECK(a.te[k] == doctest::Approx(b.te[k]).epsilon(1e-12));
    CHECK(an_power_at_eve(ch.links(k).g_e_est, p, k, budget.p_b) == 0.0);
  }
  const SecrecyReport ra = secrecy_rates_an(a), rb = secrecy_rates(b);
  CHECK(ra.sum_r_su == doctest::Approx(rb.sum_r_su).epsilon(1e-12));

  // All power on noise: nothing reaches the TU, Eve's TU SINR is zero.
  p.ell.assign(3, 0.0);
  const SinrReport z = compute_sinrs_an(ch, bf.w, p, budget, true);
  for (int k = 0; k < 3; ++k) {
    CHECK(z.tu[k] == 0.0);
    CHECK(z.te[k] == 0.0);
    CHECK(an_power_at_eve(ch.links(k).g_e_est, p, k, budget.p_b) > 0.0);
  }

  // v = 0 with ell = 1 is the same substitution.
  p.ell.assign(3, 1.0);
  for (auto &v : p.v) v.setZero();
  const SinrReport c = compute_sinrs_an(ch, bf.w, p, budget, false);
  const SinrReport d = compute_sinrs(ch, mrt, budget, false);
  for (int k = 0; k < 3; ++k) CHECK(c.se[k] == doctest::Approx(d.se[k]).epsilon(1e-12));

  p.ell[1] = 1.5;
  CHECK_THROWS_AS(compute_sinrs_an(ch, bf.w, p, budget, false), Error);
}

TEST_CASE("CSV report") {
  SinrReport s;
  s.su = {3.0};
  s.se = {1.0};
  s.tu = {1.0};
  s.te = {0.0};
  std::ostringstream os;
  write_csv(os, secrecy_rates(s));
  CHECK(os.str() == "beam,gamma_su,gamma_tu,gamma_se,gamma_te,R_su,R_tu\n0,3,1,1,0,1,1\n");
}
