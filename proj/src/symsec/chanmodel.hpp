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
#include <span>
#include <vector>

#include "symsec/linalg.hpp"

namespace symsec {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Satellite and BS placement. Users of beam k sit at angular offsets
// elevation_angles_rad = {SU, TU, Eve} from the centre of beam k; beam
// centres are spaced inter_beam_spacing_rad apart on a line, so the angle
// between user u of beam k and the centre of beam i is
// |offset_u + (k - i) * spacing|.
struct GeometryConfig {
  double satellite_height_m = 600e3;
  double carrier_freq_hz = 2e9;
  // Empty: derived from the angular layout (beam centres relative to the
  // middle of the coverage).
  std::vector<double> beam_center_offsets_m;
  std::array<double, 3> elevation_angles_rad{deg_to_rad(0.2), deg_to_rad(0.25), deg_to_rad(0.3)};
  double inter_beam_spacing_rad = deg_to_rad(0.8);
  // Horizontal BS distance to {SU, TU, Eve}, identical in every beam.
  std::array<double, 3> bs_user_distances_m{100.0, 100.0, 120.0};
};

struct SatChannelParams {
  double max_beam_gain = db_to_linear(46.6);
  double angle_3db_rad = deg_to_rad(0.4);
  double rain_mu = -3.152;
  double rain_delta_sq = 1.6;
};

struct TerrChannelParams {
  double ref_power_gain = db_to_linear(-38.46);
  double nakagami_m = 2.0;
  double nakagami_omega = 1.0;
};

struct CsiErrorModel {
  double delta_bound = 0.0;
};

// Everything needed to draw one ChannelSet. Channel vectors are divided by
// sqrt(noise power) so the receivers see unit noise.
struct ChannelConfig {
  GeometryConfig geometry;
  SatChannelParams satellite;
  TerrChannelParams terrestrial;
  CsiErrorModel csi;
  double noise_floor_dbw = -100.0;
  int n_beams = 3;
  int n_antennas = 4;
};

void validate(const ChannelConfig &cfg);

enum class UserRole { SU = 0, TU = 1, Eve = 2 };

// ---- Link-level primitives -------------------------------------------------

// Free-space loss (lambda / 4 pi)^2 / (d^2 + h^2).
double fspl(double freq_hz, double d, double h);

// G (J1(u)/(2u) - 36 J3(u)/u^2)^2 with u = 2.07123 sin(alpha)/sin(alpha_3db).
double beam_gain(double max_gain, double alpha, double alpha_3db);

// beta = 10^(-beta_dB/10) with ln(beta_dB) ~ Normal(mu, delta_sq).
double draw_rain_attenuation(Rng &rng, double mu, double delta_sq);

// h = sqrt(C_L b_i beta) exp(-j theta_i); one beta per call.
CVec draw_satellite_channel(Rng &rng, double path_gain, std::span<const double> angles_rad,
                            const SatChannelParams &params);

// Per-feed angles of user `role` in beam `beam`.
std::vector<double> link_angles(const GeometryConfig &geometry, int n_beams, int beam, UserRole role);

// d for beam `beam` (explicit list or derived).
double beam_center_offset(const GeometryConfig &geometry, int n_beams, int beam);

CVec draw_satellite_channel(Rng &rng, const GeometryConfig &geometry, const SatChannelParams &params,
                            int n_beams, int beam, UserRole role);

// g = sqrt(C0 r^-4) g0, |g0_i|^2 ~ Gamma(m, Omega/m), uniform phase.
CVec draw_terrestrial_channel(Rng &rng, double r, const TerrChannelParams &params, int m_antennas);

struct CsiDraw {
  CVec estimate;
  CVec error;
};

// Error uniform in the complex ball of radius delta; estimate = truth - error.
CsiDraw apply_csi_error(Rng &rng, const CVec &true_channel, double delta);

// ---- ChannelSet ------------------------------------------------------------

struct BeamLinks {
  CVec h_su, h_tu, h_e_true, h_e_est;  // satellite, length N
  CVec g_su, g_tu, g_e_true, g_e_est;  // BS, length M
};

struct BeamGrams {
  CMat H_su, H_tu, H_e;  // H_e from the estimate
  CMat G_su, G_tu, G_e;  // G_e from the estimate
};

// Immutable after construction.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(std::vector<BeamLinks> links);

  int n_beams() const { return static_cast<int>(links_.size()); }
  int n_sat() const { return n_sat_; }
  int n_antennas() const { return n_ant_; }

  const BeamLinks &links(int k) const { return links_.at(k); }
  const BeamGrams &grams(int k) const { return grams_.at(k); }

  // Copy with the BS vectors of every beam replaced (M sweeps).
  ChannelSet with_terrestrial(const std::vector<BeamLinks> &terrestrial) const;

 private:
  std::vector<BeamLinks> links_;
  std::vector<BeamGrams> grams_;
  int n_sat_ = 0;
  int n_ant_ = 0;
};

// Satellite draws use `sat_rng`, BS draws use `terr_rng`; passing separate
// streams lets M sweeps redraw only the terrestrial side.
ChannelSet draw_channel_set(const ChannelConfig &cfg, Rng &sat_rng, Rng &terr_rng);

// Draw with the stream layout used by the experiment harness.
ChannelSet draw_channel_set(const ChannelConfig &cfg, std::uint64_t master_seed, std::uint64_t realization);

}  // namespace symsec
