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

// Comparison schemes: joint satellite BF + BS power split with MRT and
// artificial noise, and satellite BF over a fixed Eve-nulling BS beam.

#include <cstdint>
#include <optional>

#include "symsec/sca.hpp"

namespace symsec {

// g / ||g||.
CVec mrt_vector(const CVec &g_tu);

// Orthonormal basis of the complement of span{g_tu, g_su} (M x (M-2)). When
// the two channels are within 1e-6 rad of parallel only g_tu is removed
// (M x (M-1)) and *degenerate is set.
CMat an_basis(const CVec &g_tu, const CVec &g_su, bool *degenerate = nullptr);

// Unit vector along the part of g_tu orthogonal to g_e.
CVec zf_vector(const CVec &g_tu, const CVec &g_e);

struct PaOptions {
  // Unset: v_k points the noise at the estimated Eve inside the null space,
  // v_k = B^H g_e / ||B^H g_e||. Set: v_k is a uniform random unit vector
  // drawn from this seed, one per beam.
  std::optional<std::uint64_t> an_seed;
};

// Fixed per-realization part of the AN benchmark: f_mrt, basis, v_k; ell = 1.
AnBenchmarkParams make_an_params(const ChannelSet &ch, const PaOptions &opt = {});

struct PaPoint {
  std::vector<BeamScalars> scalars;
  Anchors anchors;
  std::vector<CMat> W;
  std::vector<double> ell;
};

// Start of Algorithm 2: uniform satellite power, ell = 1.
PaPoint init_pa_point(const ChannelSet &ch, const AnBenchmarkParams &an, const PowerBudget &budget,
                      const ScaConfig &cfg);

conic::ConicProgram build_p5(const ChannelSet &ch, const AnBenchmarkParams &an, const PaPoint &point,
                             const PowerBudget &budget, const ScaConfig &cfg);

BeamformingSolution solve_pa(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg,
                             const PaOptions &opt = {});

BeamformingSolution zf_baseline(const ChannelSet &ch, const PowerBudget &budget, const ScaConfig &cfg);

}  // namespace symsec
