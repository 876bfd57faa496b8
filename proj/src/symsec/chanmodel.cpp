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

#include "symsec/chanmodel.hpp"

#include <cmath>
#include <string>

#include "symsec/error.hpp"

namespace symsec {

namespace {

void check_positive(double v, const char *name) {
  require(std::isfinite(v) && v > 0.0, ErrorCode::InvalidParameter, std::string(name) + " must be > 0");
}

CVec unit_phase_scaled(Rng &rng, const Vec &amplitude) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  CVec out(amplitude.size());
  for (Eigen::Index i = 0; i < amplitude.size(); ++i) out(i) = amplitude(i) * std::polar(1.0, -phase(rng));
  return out;
}

}  // namespace

void validate(const ChannelConfig &cfg) {
  const auto &g = cfg.geometry;
  check_positive(g.satellite_height_m, "satellite_height_m");
  check_positive(g.carrier_freq_hz, "carrier_freq_hz");
  require(cfg.n_beams >= 1, ErrorCode::InvalidParameter, "n_beams must be >= 1");
  require(cfg.n_antennas >= 1, ErrorCode::InvalidParameter, "n_antennas must be >= 1");
  for (double d : g.beam_center_offsets_m)
    require(std::isfinite(d) && d >= 0.0, ErrorCode::InvalidParameter, "beam_center_offsets_m must be >= 0");
  require(g.beam_center_offsets_m.empty() ||
              static_cast<int>(g.beam_center_offsets_m.size()) == cfg.n_beams,
          ErrorCode::InvalidParameter, "beam_center_offsets_m needs one entry per beam");
  for (double a : g.elevation_angles_rad)
    require(a >= 0.0 && a < kPi / 2, ErrorCode::InvalidParameter, "elevation angles must lie in [0, pi/2)");
  require(g.inter_beam_spacing_rad >= 0.0, ErrorCode::InvalidParameter, "inter_beam_spacing_rad must be >= 0");
  for (double r : g.bs_user_distances_m) check_positive(r, "bs_user_distances_m");
  check_positive(cfg.satellite.max_beam_gain, "max_beam_gain");
  check_positive(cfg.satellite.angle_3db_rad, "angle_3db_rad");
  require(cfg.satellite.rain_delta_sq >= 0.0, ErrorCode::InvalidParameter, "rain_delta_sq must be >= 0");
  check_positive(cfg.terrestrial.ref_power_gain, "ref_power_gain");
  require(cfg.terrestrial.nakagami_m >= 0.5, ErrorCode::InvalidParameter, "nakagami_m must be >= 0.5");
  check_positive(cfg.terrestrial.nakagami_omega, "nakagami_omega");
  require(cfg.csi.delta_bound >= 0.0, ErrorCode::InvalidParameter, "delta_bound must be >= 0");
  require(std::isfinite(cfg.noise_floor_dbw), ErrorCode::InvalidParameter, "noise_floor_dbw must be finite");
}

double fspl(double freq_hz, double d, double h) {
  require(freq_hz > 0.0, ErrorCode::InvalidParameter, "frequency must be > 0");
  require(h > 0.0, ErrorCode::InvalidParameter, "satellite height must be > 0");
  require(d >= 0.0, ErrorCode::InvalidParameter, "beam offset must be >= 0");
  const double lambda = kSpeedOfLight / freq_hz;
  const double k = lambda / (4.0 * kPi);
  return k * k / (d * d + h * h);
}

double beam_gain(double max_gain, double alpha, double alpha_3db) {
  require(max_gain > 0.0 && alpha_3db > 0.0 && alpha >= 0.0, ErrorCode::InvalidParameter,
          "beam_gain needs G > 0, alpha_3db > 0, alpha >= 0");
  const double u = 2.07123 * std::sin(alpha) / std::sin(alpha_3db);
  // J1(u)/(2u) -> 1/4 and J3(u)/u^2 -> u/48 as u -> 0.
  if (u < 1e-6) {
    const double shape = 0.25 - 36.0 * u / 48.0;
    return max_gain * shape * shape;
  }
  const double shape = std::cyl_bessel_j(1.0, u) / (2.0 * u) - 36.0 * std::cyl_bessel_j(3.0, u) / (u * u);
  return max_gain * shape * shape;
}

double draw_rain_attenuation(Rng &rng, double mu, double delta_sq) {
  require(delta_sq >= 0.0, ErrorCode::InvalidParameter, "rain variance must be >= 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double x = mu + std::sqrt(delta_sq) * normal(rng);
  const double beta_db = std::exp(x);
  return std::pow(10.0, -beta_db / 10.0);
}

CVec draw_satellite_channel(Rng &rng, double path_gain, std::span<const double> angles_rad,
                            const SatChannelParams &params) {
  require(!angles_rad.empty(), ErrorCode::InvalidParameter, "satellite channel needs at least one beam");
  const double beta = draw_rain_attenuation(rng, params.rain_mu, params.rain_delta_sq);
  Vec amplitude(static_cast<Eigen::Index>(angles_rad.size()));
  for (std::size_t i = 0; i < angles_rad.size(); ++i) {
    const double b = beam_gain(params.max_beam_gain, angles_rad[i], params.angle_3db_rad);
    amplitude(static_cast<Eigen::Index>(i)) = std::sqrt(path_gain * b * beta);
  }
  return unit_phase_scaled(rng, amplitude);
}

std::vector<double> link_angles(const GeometryConfig &geometry, int n_beams, int beam, UserRole role) {
  const double offset = geometry.elevation_angles_rad[static_cast<int>(role)];
  std::vector<double> angles(static_cast<std::size_t>(n_beams));
  for (int i = 0; i < n_beams; ++i)
    angles[static_cast<std::size_t>(i)] = std::abs(offset + (beam - i) * geometry.inter_beam_spacing_rad);
  return angles;
}

double beam_center_offset(const GeometryConfig &geometry, int n_beams, int beam) {
  if (!geometry.beam_center_offsets_m.empty()) return geometry.beam_center_offsets_m.at(static_cast<std::size_t>(beam));
  const double theta = (beam - 0.5 * (n_beams - 1)) * geometry.inter_beam_spacing_rad;
  return geometry.satellite_height_m * std::tan(std::abs(theta));
}

CVec draw_satellite_channel(Rng &rng, const GeometryConfig &geometry, const SatChannelParams &params,
                            int n_beams, int beam, UserRole role) {
  require(n_beams >= 1, ErrorCode::InvalidParameter, "n_beams must be >= 1");
  const double c_l = fspl(geometry.carrier_freq_hz, beam_center_offset(geometry, n_beams, beam),
                          geometry.satellite_height_m);
  const auto angles = link_angles(geometry, n_beams, beam, role);
  return draw_satellite_channel(rng, c_l, angles, params);
}

CVec draw_terrestrial_channel(Rng &rng, double r, const TerrChannelParams &params, int m_antennas) {
  require(r > 0.0, ErrorCode::InvalidParameter, "BS distance must be > 0");
  require(m_antennas >= 1, ErrorCode::InvalidParameter, "antenna count must be >= 1");
  const double large_scale = params.ref_power_gain * std::pow(r, -4.0);
  std::gamma_distribution<double> power(params.nakagami_m, params.nakagami_omega / params.nakagami_m);
  Vec amplitude(m_antennas);
  for (int i = 0; i < m_antennas; ++i) amplitude(i) = std::sqrt(large_scale * power(rng));
  return unit_phase_scaled(rng, amplitude);
}

CsiDraw apply_csi_error(Rng &rng, const CVec &true_channel, double delta) {
  require(delta >= 0.0, ErrorCode::InvalidParameter, "CSI error bound must be >= 0");
  const Eigen::Index len = true_channel.size();
  CsiDraw out{true_channel, CVec::Zero(len)};
  if (delta == 0.0 || len == 0) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  CVec dir(len);
  for (Eigen::Index i = 0; i < len; ++i) dir(i) = cplx(normal(rng), normal(rng));
  const double nrm = dir.norm();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double radius = delta * std::pow(unif(rng), 1.0 / (2.0 * static_cast<double>(len)));
  out.error = dir * (radius / nrm);
  out.estimate = true_channel - out.error;
  return out;
}

ChannelSet::ChannelSet(std::vector<BeamLinks> links) : links_(std::move(links)) {
  require(!links_.empty(), ErrorCode::InvalidInput, "ChannelSet needs at least one beam");
  n_sat_ = static_cast<int>(links_.front().h_su.size());
  n_ant_ = static_cast<int>(links_.front().g_su.size());
  grams_.reserve(links_.size());
  for (const auto &l : links_) {
    for (const CVec *v : {&l.h_su, &l.h_tu, &l.h_e_true, &l.h_e_est})
      require(v->size() == n_sat_, ErrorCode::InvalidInput, "satellite vectors must share length N");
    for (const CVec *v : {&l.g_su, &l.g_tu, &l.g_e_true, &l.g_e_est})
      require(v->size() == n_ant_, ErrorCode::InvalidInput, "BS vectors must share length M");
    grams_.push_back(BeamGrams{gram(l.h_su), gram(l.h_tu), gram(l.h_e_est), gram(l.g_su), gram(l.g_tu),
                               gram(l.g_e_est)});
  }
}

ChannelSet ChannelSet::with_terrestrial(const std::vector<BeamLinks> &terrestrial) const {
  require(terrestrial.size() == links_.size(), ErrorCode::InvalidInput, "beam count mismatch");
  auto links = links_;
  for (std::size_t k = 0; k < links.size(); ++k) {
    links[k].g_su = terrestrial[k].g_su;
    links[k].g_tu = terrestrial[k].g_tu;
    links[k].g_e_true = terrestrial[k].g_e_true;
    links[k].g_e_est = terrestrial[k].g_e_est;
  }
  return ChannelSet(std::move(links));
}

ChannelSet draw_channel_set(const ChannelConfig &cfg, Rng &sat_rng, Rng &terr_rng) {
  validate(cfg);
  const double scale = 1.0 / std::sqrt(db_to_linear(cfg.noise_floor_dbw));
  const auto &geo = cfg.geometry;
  std::vector<BeamLinks> links(static_cast<std::size_t>(cfg.n_beams));
  for (int k = 0; k < cfg.n_beams; ++k) {
    auto &l = links[static_cast<std::size_t>(k)];
    l.h_su = scale * draw_satellite_channel(sat_rng, geo, cfg.satellite, cfg.n_beams, k, UserRole::SU);
    l.h_tu = scale * draw_satellite_channel(sat_rng, geo, cfg.satellite, cfg.n_beams, k, UserRole::TU);
    l.h_e_true = scale * draw_satellite_channel(sat_rng, geo, cfg.satellite, cfg.n_beams, k, UserRole::Eve);
  }
  for (int k = 0; k < cfg.n_beams; ++k) {
    auto &l = links[static_cast<std::size_t>(k)];
    const auto &r = geo.bs_user_distances_m;
    l.g_su = scale * draw_terrestrial_channel(terr_rng, r[0], cfg.terrestrial, cfg.n_antennas);
    l.g_tu = scale * draw_terrestrial_channel(terr_rng, r[1], cfg.terrestrial, cfg.n_antennas);
    l.g_e_true = scale * draw_terrestrial_channel(terr_rng, r[2], cfg.terrestrial, cfg.n_antennas);
  }
  // CSI errors come last on each stream, so the true channels do not depend
  // on the error bound (paired Delta sweeps).
  for (auto &l : links) l.h_e_est = apply_csi_error(sat_rng, l.h_e_true, cfg.csi.delta_bound).estimate;
  for (auto &l : links) l.g_e_est = apply_csi_error(terr_rng, l.g_e_true, cfg.csi.delta_bound).estimate;
  return ChannelSet(std::move(links));
}

ChannelSet draw_channel_set(const ChannelConfig &cfg, std::uint64_t master_seed, std::uint64_t realization) {
  Rng sat = make_stream(master_seed, realization, 0);
  Rng terr = make_stream(master_seed, realization, 1000 + static_cast<std::uint64_t>(cfg.n_antennas));
  return draw_channel_set(cfg, sat, terr);
}

}  // namespace symsec
