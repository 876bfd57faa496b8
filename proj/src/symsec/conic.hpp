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

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "symsec/linalg.hpp"

namespace symsec::conic {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class ConeKind { Zero, NonNeg, Psd, Exp };

// Zero(dim), NonNeg(dim), Psd(side), Exp(count of 3-dim cones).
struct ConeBlock {
  ConeKind kind;
  int size;

  int rows() const;
};

struct ConeSpec {
  std::vector<ConeBlock> blocks;

  int rows() const;
};

// Rows of a PSD block hold svec(X): the lower triangle column by column with
// off-diagonal entries scaled by sqrt(2), so <svec X, svec Y> = Tr(X Y).
int svec_size(int side);
int svec_index(int side, int row, int col);
Vec svec(const Mat &x);
Mat smat(const Eigen::Ref<const Vec> &v, int side);

// Hermitian matrix stored as n^2 real unknowns: Re X_ii, then Re/Im X_ij for
// i < j. The PSD row block holds svec of the real embedding
// [Re X, -Im X; Im X, Re X] of side 2n.
struct HermitianBlock {
  int offset = 0;  // first variable index
  int n = 0;

  int count() const { return n * n; }
  int re(int i, int j) const;  // variable index of Re X_ij
  int im(int i, int j) const;  // variable index of Im X_ij, i != j; -1 on the diagonal
};

struct VarInfo {
  std::string name;
};

// min c'x  s.t.  A x + s = b,  s in K.
struct ConicProgram {
  Vec c;
  SpMat A;
  Vec b;
  ConeSpec cones;
  std::vector<VarInfo> vars;
  std::vector<HermitianBlock> hermitian_blocks;  // variable map of embedded blocks

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(b.size()); }
};

void validate(const ConicProgram &prog);

// Sparse affine function sum(coef * x[idx]) + constant.
struct Affine {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  Affine() = default;
  explicit Affine(double c) : constant(c) {}
  static Affine var(int idx, double coef = 1.0) {
    Affine a;
    a.terms.emplace_back(idx, coef);
    return a;
  }

  Affine &operator+=(const Affine &o);
  Affine &operator-=(const Affine &o);
  Affine &operator*=(double s);
  Affine &operator+=(double c) {
    constant += c;
    return *this;
  }
  double eval(const Eigen::Ref<const Vec> &x) const;
};

Affine operator+(Affine a, const Affine &b);
Affine operator-(Affine a, const Affine &b);
Affine operator*(double s, Affine a);

// Re Tr(H X) for Hermitian constant H and Hermitian variable block X.
Affine trace_product(const CMat &h, const HermitianBlock &x);
Affine trace(const HermitianBlock &x);

// Collects rows per cone family, then assembles them in the order
// Zero, NonNeg, Psd..., Exp.
class ProgramBuilder {
 public:
  int add_var(std::string name);
  HermitianBlock add_hermitian(const std::string &name, int n);

  void set_objective(const Affine &objective);  // constant part is dropped

  void add_eq(const Affine &expr);              // expr == 0
  void add_nonneg(const Affine &expr);          // expr >= 0
  void add_exp(const Affine &x, const Affine &y, const Affine &z);  // (x, y, z) in K_exp
  void add_psd(const HermitianBlock &block);    // X >= 0 through the real embedding

  int n_vars() const { return static_cast<int>(names_.size()); }
  ConicProgram build() const;

 private:
  std::vector<std::string> names_;
  Affine objective_;
  std::vector<Affine> zero_, nonneg_, exp_;
  std::vector<HermitianBlock> psd_;
};

// Averages the two real copies of an embedded 2n x 2n matrix into X.
CMat hermitian_from_embedding(const Mat &embedded);
Mat real_embedding(const CMat &x);
CMat hermitian_from_vars(const HermitianBlock &block, const Eigen::Ref<const Vec> &x);
void hermitian_to_vars(const HermitianBlock &block, const CMat &value, Eigen::Ref<Vec> x);

// ---- Cone projections ------------------------------------------------------

Mat project_psd(const Mat &x);  // throws on non-symmetric input
void project_psd_svec(Eigen::Ref<Vec> v, int side);

// Euclidean projection onto closure{(x,y,z): y > 0, y exp(x/y) <= z}.
// rho_hint, when given, seeds the search with a previous boundary ray x/y
// and receives the ray of this projection (NaN when none applies).
Eigen::Vector3d project_expcone(const Eigen::Vector3d &v, double *rho_hint = nullptr);
// Projection onto the dual cone K* = {(u,v,w): u < 0, -u exp(v/u) <= e w} closure.
Eigen::Vector3d project_expcone_dual(const Eigen::Vector3d &v, double *rho_hint = nullptr);
bool in_expcone(const Eigen::Vector3d &v, double tol);
bool in_expcone_dual(const Eigen::Vector3d &v, double tol);

// Projection of v onto K (dual = false) or K* (dual = true). exp_hints, if
// not null, holds one rho_hint per 3-dim exponential cone.
void project_cone(const ConeSpec &cones, Eigen::Ref<Vec> v, bool dual, double *exp_hints = nullptr);

// ---- Solver ----------------------------------------------------------------

enum class SolverState { Optimal, MaxIters, Infeasible, Unbounded };

const char *state_name(SolverState s);

struct SolverStatus {
  SolverState state = SolverState::MaxIters;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
  int iterations = 0;
};

struct SolverSettings {
  double tol = 1e-6;
  int max_iters = 50000;
  double alpha = 1.6;          // over-relaxation
  double scale = 0.1;          // initial primal/dual balance (inverse dual weight)
  int equilibration_passes = 25;
  int check_every = 10;
  int anderson_memory = 0;     // 0 disables acceleration
  bool adaptive_scale = true;
  int adapt_interval = 100;    // minimum iterations between scale updates
  double adapt_factor = 3.0;   // rebalance when residuals differ by more
};

struct WarmStart {
  Vec x, y, s;
};

struct SolveResult {
  Vec x;
  Vec y;
  Vec s;
  SolverStatus status;
  double objective = 0;  // c'x
};

SolveResult solve(const ConicProgram &prog, const SolverSettings &settings = {},
                  const WarmStart *warm = nullptr);

// Plain-text problem file; see docs in README.
void write_program(std::ostream &os, const ConicProgram &prog);
ConicProgram read_program(std::istream &is);

}  // namespace symsec::conic
