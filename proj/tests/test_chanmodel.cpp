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

#include <algorithm>
#include <cmath>
#include <vector>

#include "symsec/chanmodel.hpp"
#include "symsec/error.hpp"

using namespace symsec;

namespace {

// Power series of J_n, independent of the library Bessel functions.
double bessel_series(int n, double x) {
  double term = std::pow(x / 2.0, n) / std::tgamma(n + 1.0);
  double sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= -(x * x / 4.0) / (m * static_cast<double>(m + n));
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("fspl at nadir from 600 km at 2 GHz") {
  const double g = fspl(2e9, 0.0, 600e3);
  // (c / (4 pi f h))^2 evaluated by hand: 3.952384e-16, -154.03 dB.
  CHECK(g == doctest::Approx(3.952384484e-16).epsilon(1e-8));
  CHECK(10.0 * std::log10(g) == doctest::Approx(-154.0314).epsilon(1e-5));
  CHECK(fspl(2e9, 300e3, 400e3) == doctest::Approx(fspl(2e9, 0.0, 500e3)).epsilon(1e-14));
  CHECK(fspl(2e9, 0.0, 1200e3) == doctest::Approx(g / 4.0).epsilon(1e-14));
  CHECK_THROWS_AS(fspl(0.0, 0.0, 1.0), Error);
}

TEST_CASE("beam gain limits and 3 dB point") {
  const double G = db_to_linear(46.6);
  const double a3 = deg_to_rad(0.4);
  CHECK(beam_gain(G, 0.0, a3) == doctest::Approx(G / 16.0).epsilon(1e-12));
  CHECK(beam_gain(G, 1e-12, a3) == doctest::Approx(G / 16.0).epsilon(1e-8));
  const double u = 2.07123;
  const double shape = bessel_series(1, u) / (2 * u) - 36.0 * bessel_series(3, u) / (u * u);
  CHECK(beam_gain(G, a3, a3) == doctest::Approx(G * shape * shape).epsilon(1e-10));
  CHECK(beam_gain(G, a3, a3) == doctest::Approx(49548.0222908).epsilon(1e-9));
  CHECK(beam_gain(2 * G, 0.003, a3) == doctest::Approx(2 * beam_gain(G, 0.003, a3)).epsilon(1e-14));
}

TEST_CASE("rain attenuation") {
  Rng rng(7);
  const double q = 3.0;
  for (int i = 0; i < 5; ++i)
    CHECK(draw_rain_attenuation(rng, std::log(q), 0.0) == doctest::Approx(std::pow(10.0, -q / 10.0)).epsilon(1e-14));
  // beta_dB is log-normal: its mean is exp(mu + delta^2 / 2).
  const double mu = -3.152, d2 = 1.6;
  double sum_db = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double beta = draw_rain_attenuation(rng, mu, d2);
    REQUIRE(beta > 0.0);
    REQUIRE(beta <= 1.0);
    sum_db += -10.0 * std::log10(beta);
  }
  // Standard error of the mean is about 0.6 %.
  CHECK(sum_db / n == doctest::Approx(std::exp(mu + d2 / 2.0)).epsilon(0.03));
}

TEST_CASE("satellite channel magnitudes") {
  SatChannelParams p;
  const std::vector<double> angles{0.0, 0.001, 0.004};
  Rng a(11), b(11);
  const CVec h1 = draw_satellite_channel(a, 1e-15, angles, p);
  const CVec h2 = draw_satellite_channel(b, 1e-15, angles, p);
  CHECK(h1 == h2);
  // Recover beta from the first entry, then every entry obeys C_L b_i beta.
  const double beta = std::norm(h1(0)) / (1e-15 * beam_gain(p.max_beam_gain, 0.0, p.angle_3db_rad));
  for (int i = 0; i < 3; ++i)
    CHECK(std::norm(h1(i)) ==
          doctest::Approx(1e-15 * beam_gain(p.max_beam_gain, angles[i], p.angle_3db_rad) * beta).epsilon(1e-12));

  // beta -> 1 when beta_dB -> 0, and all angles zero give C_L G / 16 each.
  p.rain_mu = -60.0;
  p.rain_delta_sq = 0.0;
  const std::vector<double> zeros(3, 0.0);
  const CVec h3 = draw_satellite_channel(a, 2e-16, zeros, p);
  for (int i = 0; i < 3; ++i) CHECK(std::norm(h3(i)) == doctest::Approx(2e-16 * p.max_beam_gain / 16.0).epsilon(1e-12));
}

TEST_CASE("terrestrial channel statistics") {
  TerrChannelParams p;
  Rng rng(5);
  const int n = 40000;
  auto mean_power = [&](double r, const TerrChannelParams &q) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += draw_terrestrial_channel(rng, r, q, 4).squaredNorm() / 4.0;
    return s / n;
  };
  const double m100 = mean_power(100.0, p);
  CHECK(m100 == doctest::Approx(p.ref_power_gain * 1e-8 * p.nakagami_omega).epsilon(0.02));
  CHECK(mean_power(200.0, p) == doctest::Approx(m100 / 16.0).epsilon(0.03));

  // Gamma(m, Omega/m) has variance Omega^2 / m.
  auto sample_var = [&](double m) {
    TerrChannelParams q = p;
    q.ref_power_gain = 1.0;
    q.nakagami_m = m;
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::norm(draw_terrestrial_channel(rng, 1.0, q, 1)(0)));
    double mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / (n - 1);
  };
  const double v_half = sample_var(0.5), v_four = sample_var(4.0);
  CHECK(v_half > v_four);
  CHECK(v_half == doctest::Approx(2.0).epsilon(0.1));
  CHECK(v_four == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("CSI error ball") {
  Rng rng(9);
  CVec h = CVec::Random(3);
  const CsiDraw exact = apply_csi_error(rng, h, 0.0);
  CHECK(exact.estimate == h);
  const double delta = 0.2;
  const int n = 10000;
  std::vector<double> radii;
  for (int i = 0; i < n; ++i) {
    const CsiDraw d = apply_csi_error(rng, h, delta);
    REQUIRE((h - d.estimate).norm() <= delta * (1 + 1e-12));
    radii.push_back(d.error.norm());
  }
  // Uniform in the complex 3-ball (real dimension 6): P(r <= t) = (t / delta)^6.
  std::sort(radii.begin(), radii.end());
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double cdf = std::pow(radii[i] / delta, 6.0);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  // 1 % critical value of the Kolmogorov-Smirnov statistic.
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("gram identities") {
  CVec e1 = CVec::Unit(3, 0);
  CMat g = gram(e1);
  CHECK(g(0, 0) == cplx(1.0, 0.0));
  CHECK(g.cwiseAbs().sum() == doctest::Approx(1.0));
  CVec v = CVec::Random(4);
  CHECK(trace_re(gram(v)) == doctest::Approx(v.squaredNorm()).epsilon(1e-14));
  const cplx c(0.3, -1.2);
  CHECK((gram(c * v) - std::norm(c) * gram(v)).norm() < 1e-13);
}

TEST_CASE("channel set draws are reproducible and M sweeps keep the satellite side") {
  ChannelConfig cfg;
  const ChannelSet a = draw_channel_set(cfg, 42, 3);
  const ChannelSet b = draw_channel_set(cfg, 42, 3);
  CHECK(a.n_beams() == 3);
  CHECK(a.n_sat() == 3);
  CHECK(a.n_antennas() == 4);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.links(k).h_su == b.links(k).h_su);
    CHECK(a.links(k).g_e_est == b.links(k).g_e_est);
  }
  ChannelConfig wide = cfg;
  wide.n_antennas = 6;
  const ChannelSet c = draw_channel_set(wide, 42, 3);
  CHECK(c.n_antennas() == 6);
  for (int k = 0; k < 3; ++k) CHECK(c.links(k).h_su == a.links(k).h_su);
  CHECK(draw_channel_set(cfg, 42, 4).links(0).h_su != a.links(0).h_su);
  // Without CSI error the estimate is the truth.
  CHECK(a.links(0).g_e_est == a.links(0).g_e_true);
  ChannelConfig bad = cfg;
  bad.n_beams = 0;
  CHECK_THROWS_AS(draw_channel_set(bad, 1, 0), Error);
}
