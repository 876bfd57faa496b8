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

// Shared machinery for the SCA programs. The proposed design (rate and
// power programs), the ZF baseline and the PA/AN benchmark differ only in
// their decision variables; the log-domain scalars, exponential cones,
// Taylor rows and the TU secrecy row are common.

#include <functional>
#include <memory>
#include <vector>

#include "symsec/conic.hpp"
#include "symsec/sca.hpp"

namespace symsec::detail {

// Affine sides of the seven scalar definitions of one beam.
struct BeamAffines {
  conic::Affine S, MU, QE, V, T, ET, AL;
};

struct ScalarVars {
  int s, mu, q, v, tau, eta, alpha;
};

// A matrix variable together with the Hermitian gains Tr(G X) through which
// it enters the program; nothing else about X matters besides its trace.
struct GainBlock {
  conic::HermitianBlock block;
  std::vector<CMat> gains;
};

class SecrecyModel {
 public:
  virtual ~SecrecyModel() = default;

  // Adds the decision variables with their power rows and cones; returns the
  // affine sides per beam. Called once per program build; the variable
  // layout must not change between calls.
  virtual std::vector<BeamAffines> add_decision(conic::ProgramBuilder &pb) = 0;
  // Pushes the decision variables of x into their feasible set.
  virtual void project(Vec &x) const = 0;
  // Uniform start with the satellite power scaled by satellite_share.
  // Start `variant` (0 .. start_variants() - 1) with the given satellite share.
  virtual void initial_point(Vec &x, double satellite_share, int variant) const = 0;
  virtual int start_variants() const { return 1; }
  virtual conic::Affine power() const = 0;
  virtual int n_beams() const = 0;
  virtual std::vector<GainBlock> gain_blocks() const { return {}; }
};

struct Evaluated {
  std::vector<BeamScalars> scalars;
  std::vector<double> tu_slack;  // -(eta + q - tau - alpha) - Q, nats
  double objective = 0;          // nats
};

// Scalars at their best values for fixed decision variables.
Evaluated closed_form(const std::vector<BeamAffines> &aff, const Vec &x, const Anchors &anchors,
                      const ScaConfig &cfg);

struct EngineResult {
  Vec x;
  std::vector<BeamAffines> aff;
  Evaluated eval;
  Anchors anchors;
  ScaTrace trace;
  bool converged = false;
  double solver_exp_residual = 0;
  double blend = 1.0;
};

EngineResult run_sca(SecrecyModel &model, const ScaConfig &cfg);

// Anchors equal to the exact logs of the linearized sides at x.
Anchors exact_anchors(const std::vector<BeamAffines> &aff, const Vec &x);

// The SCA subproblem of `model` at `anchors` (secrecy maximization).
conic::ConicProgram build_program(SecrecyModel &model, const Anchors &anchors, const ScaConfig &cfg);

EngineResult run_power_min(SecrecyModel &model, const ScaConfig &cfg, const Vec &x_ref, const Anchors &anchors,
                           double phi_star);

// Projection of one Hermitian block onto the PSD cone, in place.
// Replaces each gain block by the least-trace PSD matrix with the same gains,
// one block at a time, keeping a replacement only if acceptable() agrees.
// Every affine side keeps its value, so rates are unchanged and power can
// only drop; such a matrix is rank one for up to three gains.
void least_power_blocks(const SecrecyModel &model, Vec &x, const std::function<bool(const Vec &)> &acceptable);

void clip_psd(const conic::HermitianBlock &blk, Vec &x);
// Trace of a Hermitian block.
double block_trace(const conic::HermitianBlock &blk, const Vec &x);
void scale_block(const conic::HermitianBlock &blk, double factor, Vec &x);

// Fills the solution fields shared by every method.
void finish_solution(BeamformingSolution &sol, const EngineResult &res, const ScaConfig &cfg);

}  // namespace symsec::detail
