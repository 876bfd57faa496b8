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

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "symsec/conic.hpp"
#include "symsec/error.hpp"

namespace symsec::conic {

namespace {

constexpr double kE = 2.718281828459045235;

// Grid abscissae for the 1-D search over rho; sinh spacing covers both the
// region near zero and the far tails (|rho| up to ~430).
const std::array<double, 81> &rho_grid() {
  static const std::array<double, 81> grid = [] {
    std::array<double, 81> g{};
    for (int j = 0; j < 81; ++j) g[static_cast<std::size_t>(j)] = std::sinh(0.17 * (j - 40));
    return g;
  }();
  return grid;
}

// Unit vector along a(rho) = (rho, 1, e^rho), evaluated without overflow.
Eigen::Vector3d unit_ray(double rho) {
  Eigen::Vector3d a;
  if (rho > 0) {
    const double e = std::exp(-rho);
    a << rho * e, e, 1.0;
  } else {
    a << rho, 1.0, std::exp(rho);
  }
  return a / a.norm();
}

double ray_score(const Eigen::Vector3d &v, double rho) { return v.dot(unit_ray(rho)); }

// g(rho) = h(rho) e^{-|rho|} and g'(rho). The projection ray is where h
// changes sign from negative to positive.
void kkt_residual(const Eigen::Vector3d &v, double rho, double &h, double &dh) {
  const double r = v(0), s = v(1), t = v(2);
  const double poly = rho * rho - rho + 1.0;
  if (rho > 0) {
    const double e1 = std::exp(-rho), e2 = e1 * e1;
    h = ((rho - 1) * r + s) - (r - rho * s) * e2 - poly * t * e1;
    dh = (rho * r + s) + (r - (rho - 1) * s) * e2 - (2 * rho - 1) * t * e1 - h;
  } else {
    const double e1 = std::exp(rho), e2 = e1 * e1;
    h = ((rho - 1) * r + s) * e2 - (r - rho * s) - poly * t * e1;
    dh = (rho * r + s) * e2 + (r - (rho - 1) * s) - (2 * rho - 1) * t * e1 + h;
  }
}

double refine_root(const Eigen::Vector3d &v, double lo, double hi) {
  double h = 0, dh = 0;
  double rho = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(rho)); ++it) {
    kkt_residual(v, rho, h, dh);
    if (h == 0) return rho;
    if (h < 0)
      lo = rho;
    else
      hi = rho;
    double next = (dh != 0) ? rho - h / dh : 0.5 * (lo + hi);
    if (std::abs(next - rho) <= 1e-14 * (1.0 + std::abs(rho)) && next > lo && next < hi) return next;
    // fall back to bisection when Newton leaves the bracket or stalls
    if (!(next > lo && next < hi) || (it % 4 == 3)) next = 0.5 * (lo + hi);
    rho = next;
  }
  return rho;
}

// Unit outward normal of K at the ray rho; orthogonal to unit_ray(rho).
Eigen::Vector3d unit_normal(double rho) {
  Eigen::Vector3d n;
  if (rho > 0)
    n << 1.0, 1.0 - rho, -std::exp(-rho);
  else
    n << std::exp(rho), (1.0 - rho) * std::exp(rho), -1.0;
  return n / n.norm();
}

// Newton from a nearby ray. Accepts only when v splits into a nonnegative
// multiple of the ray plus a nonnegative multiple of the normal, which is
// the Moreau decomposition and hence the unique projection.
bool project_from_hint(const Eigen::Vector3d &v, double rho, Eigen::Vector3d &out, double &rho_out) {
  double h = 0, dh = 0;
  for (int it = 0; it < 12; ++it) {
    kkt_residual(v, rho, h, dh);
    if (!(dh > 0)) return false;
    const double step = h / dh;
    rho -= step;
    if (!std::isfinite(rho)) return false;
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(rho))) {
      const Eigen::Vector3d a = unit_ray(rho), n = unit_normal(rho);
      const double pa = v.dot(a), pn = v.dot(n);
      if (pa < 0 || pn < 0) return false;
      if ((v - pa * a - pn * n).norm() > 1e-11 * (1.0 + v.norm())) return false;
      out = pa * a;
      rho_out = rho;
      return true;
    }
  }
  return false;
}

bool in_primal(const Eigen::Vector3d &v) {
  const double r = v(0), s = v(1), t = v(2);
  if (s > 0 && t > 0) return r <= s * std::log(t / s);
  return s == 0 && r <= 0 && t >= 0;
}

bool in_polar(const Eigen::Vector3d &v) {
  // -v in K*: (u,w,z) = -v with u < 0, -u e^{w/u} <= e z
  const double r = v(0), s = v(1), t = v(2);
  if (r > 0 && t < 0) return s / r <= 1.0 + std::log(-t / r);
  return r == 0 && s <= 0 && t <= 0;
}

}  // namespace

Mat project_psd(const Mat &x) {
  require(x.rows() == x.cols(), ErrorCode::InvalidInput, "project_psd expects a square matrix");
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  require((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::InvalidInput,
          "project_psd expects a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (x + x.transpose()));
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  Mat out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Fixed-size path for the small blocks that dominate the solver loop.
template <int N>
void project_psd_fixed(Eigen::Ref<Vec> v) {
  using MatN = Eigen::Matrix<double, N, N>;
  MatN x;
  int k = 0;
  for (int c = 0; c < N; ++c)
    for (int r = c; r < N; ++r) {
      const double val = (r == c) ? v(k) : v(k) / kSqrt2;
      x(r, c) = val;
      x(c, r) = val;
      ++k;
    }
  Eigen::SelfAdjointEigenSolver<MatN> es(x);
  const auto &lam = es.eigenvalues();
  if (lam(0) >= 0) return;
  if (lam(N - 1) <= 0) {
    v.setZero();
    return;
  }
  // subtract the negative part
  const auto &u = es.eigenvectors();
  for (int j = 0; j < N && lam(j) < 0; ++j) x.noalias() -= lam(j) * u.col(j) * u.col(j).transpose();
  k = 0;
  for (int c = 0; c < N; ++c)
    for (int r = c; r < N; ++r) v(k++) = (r == c) ? x(r, c) : kSqrt2 * 0.5 * (x(r, c) + x(c, r));
}

}  // namespace

void project_psd_svec(Eigen::Ref<Vec> v, int side) {
  switch (side) {
    case 1: v(0) = std::max(v(0), 0.0); return;
    case 2: project_psd_fixed<2>(v); return;
    case 3: project_psd_fixed<3>(v); return;
    case 4: project_psd_fixed<4>(v); return;
    case 6: project_psd_fixed<6>(v); return;
    case 8: project_psd_fixed<8>(v); return;
    default: break;
  }
  const Mat x = smat(v, side);
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  const Vec &lam = es.eigenvalues();
  if (lam(0) >= 0) return;
  if (lam(side - 1) <= 0) {
    v.setZero();
    return;
  }
  Mat u = es.eigenvectors();
  Mat p = u * lam.cwiseMax(0.0).asDiagonal() * u.transpose();
  v = svec(p);
}

Eigen::Vector3d project_expcone(const Eigen::Vector3d &v, double *rho_hint) {
  const double hint = rho_hint != nullptr ? *rho_hint : NAN;
  if (rho_hint != nullptr) *rho_hint = NAN;
  if (in_primal(v)) return v;
  if (in_polar(v)) return Eigen::Vector3d::Zero();
  const double r = v(0), s = v(1), t = v(2);
  const Eigen::Vector3d face(std::min(r, 0.0), 0.0, std::max(t, 0.0));
  if (r <= 0 && s <= 0) return face;
  if (std::isfinite(hint)) {
    Eigen::Vector3d out;
    double rho_out = 0;
    if (project_from_hint(v, hint, out, rho_out)) {
      *rho_hint = rho_out;
      return out;
    }
  }

  const auto &grid = rho_grid();
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double sc = ray_score(v, grid[j]);
    if (sc > best_score) {
      best_score = sc;
      best = j;
    }
  }
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  double rho = grid[best];
  // Optimum beyond the grid: walk outward geometrically until the score drops.
  if (best == 0 || best + 1 == grid.size()) {
    double score = best_score;
    for (int k = 0; k < 60; ++k) {
      const double next = 2.0 * rho;
      const double sc = ray_score(v, next);
      if (sc <= score) break;
      rho = next;
      score = sc;
    }
    best_score = score;
    lo = std::min(2.0 * rho, rho / 2.0);
    hi = std::max(2.0 * rho, rho / 2.0);
  }
  const double refined = refine_root(v, lo, hi);
  if (ray_score(v, refined) >= best_score) rho = refined;
  const Eigen::Vector3d a = unit_ray(rho);
  const Eigen::Vector3d candidate = std::max(v.dot(a), 0.0) * a;
  if ((candidate - v).norm() <= (face - v).norm()) {
    if (rho_hint != nullptr) *rho_hint = rho;
    return candidate;
  }
  return face;
}

Eigen::Vector3d project_expcone_dual(const Eigen::Vector3d &v, double *rho_hint) {
  // Moreau: proj_{K*}(v) = v + proj_K(-v)
  return v + project_expcone(-v, rho_hint);
}

bool in_expcone(const Eigen::Vector3d &v, double tol) {
  // log form keeps the absolute error small near the boundary
  const double r = v(0), s = v(1), t = v(2);
  if (s > 0 && t > 0 && r <= s * std::log(t / s) + tol) return true;
  return s >= -tol && r <= tol && t >= -tol;
}

bool in_expcone_dual(const Eigen::Vector3d &v, double tol) {
  // (u,w,z) in K* iff (-w, -u, e z) in K
  return in_expcone(Eigen::Vector3d(-v(1), -v(0), kE * v(2)), tol);
}

void project_cone(const ConeSpec &cones, Eigen::Ref<Vec> v, bool dual, double *exp_hints) {
  int off = 0;
  for (const auto &blk : cones.blocks) {
    const int rows = blk.rows();
    switch (blk.kind) {
      case ConeKind::Zero:
        if (!dual) v.segment(off, rows).setZero();
        break;
      case ConeKind::NonNeg:
        v.segment(off, rows) = v.segment(off, rows).cwiseMax(0.0);
        break;
      case ConeKind::Psd:
        project_psd_svec(v.segment(off, rows), blk.size);
        break;
      case ConeKind::Exp:
        for (int k = 0; k < blk.size; ++k) {
          const Eigen::Vector3d p = v.segment<3>(off + 3 * k);
          double *hint = exp_hints != nullptr ? exp_hints++ : nullptr;
          v.segment<3>(off + 3 * k) = dual ? project_expcone_dual(p, hint) : project_expcone(p, hint);
        }
        break;
    }
    off += rows;
  }
}

}  // namespace symsec::conic
