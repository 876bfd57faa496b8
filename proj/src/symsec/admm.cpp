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
#include <cmath>
#include <deque>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "symsec/conic.hpp"
#include "symsec/error.hpp"

namespace symsec::conic {

namespace {

constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 1e4;

struct Scaling {
  Vec d;  // rows
  Vec e;  // columns
  double sigma_b = 1.0;
  double sigma_c = 1.0;
};

// Ruiz equilibration. Rows inside a PSD or Exp block share one factor so the
// scaled cone is the same cone.
Scaling equilibrate(const ConicProgram &prog, int passes, SpMat &a_hat) {
  const int m = prog.m(), n = prog.n();
  Scaling sc;
  sc.d = Vec::Ones(m);
  sc.e = Vec::Ones(n);
  a_hat = prog.A;
  for (int pass = 0; pass < passes; ++pass) {
    Vec row = Vec::Zero(m), col = Vec::Zero(n);
    for (int j = 0; j < a_hat.outerSize(); ++j)
      for (SpMat::InnerIterator it(a_hat, j); it; ++it) {
        const double v = std::abs(it.value());
        row(it.row()) = std::max(row(it.row()), v);
        col(j) = std::max(col(j), v);
      }
    int off = 0;
    for (const auto &blk : prog.cones.blocks) {
      const int r = blk.rows();
      if (blk.kind == ConeKind::Psd || blk.kind == ConeKind::Exp) {
        const int width = blk.kind == ConeKind::Exp ? 3 : r;
        for (int s = off; s < off + r; s += width) {
          const double mean = row.segment(s, width).mean();
          row.segment(s, width).setConstant(mean);
        }
      }
      off += r;
    }
    Vec dr(m), ec(n);
    for (int i = 0; i < m; ++i) dr(i) = row(i) > 1e-12 ? 1.0 / std::sqrt(row(i)) : 1.0;
    for (int j = 0; j < n; ++j) ec(j) = col(j) > 1e-12 ? 1.0 / std::sqrt(col(j)) : 1.0;
    Vec d_new = (sc.d.array() * dr.array()).cwiseMax(kMinScale).cwiseMin(kMaxScale);
    Vec e_new = (sc.e.array() * ec.array()).cwiseMax(kMinScale).cwiseMin(kMaxScale);
    dr = d_new.array() / sc.d.array();
    ec = e_new.array() / sc.e.array();
    sc.d = d_new;
    sc.e = e_new;
    a_hat = dr.asDiagonal() * a_hat * ec.asDiagonal();
    if ((dr.array() - 1.0).abs().maxCoeff() < 1e-3 && (ec.array() - 1.0).abs().maxCoeff() < 1e-3) break;
  }
  return sc;
}

// Anderson acceleration (type II) on the fixed-point map z -> T(z).
class Anderson {
 public:
  Anderson(int dim, int memory) : dim_(dim), mem_(memory) {}

  // Given the current iterate z and its image fz, returns the extrapolated next iterate.
  Vec step(const Vec &z, const Vec &fz) {
    const Vec g = fz - z;
    if (have_prev_) {
      dg_.push_back(g - g_prev_);
      df_.push_back(fz - f_prev_);
      if (static_cast<int>(dg_.size()) > mem_) {
        dg_.pop_front();
        df_.pop_front();
      }
    }
    g_prev_ = g;
    f_prev_ = fz;
    have_prev_ = true;
    const int k = static_cast<int>(dg_.size());
    if (k == 0) return fz;
    Mat dgm(dim_, k), dfm(dim_, k);
    for (int i = 0; i < k; ++i) {
      dgm.col(i) = dg_[static_cast<std::size_t>(i)];
      dfm.col(i) = df_[static_cast<std::size_t>(i)];
    }
    Mat gram = dgm.transpose() * dgm;
    const double reg = 1e-10 * (1.0 + gram.diagonal().maxCoeff());
    gram.diagonal().array() += reg;
    const Vec gamma = gram.ldlt().solve(dgm.transpose() * g);
    if (!gamma.allFinite()) {
      reset();
      return fz;
    }
    return fz - dfm * gamma;
  }

  void reset() {
    dg_.clear();
    df_.clear();
    have_prev_ = false;
  }

 private:
  int dim_;
  int mem_;
  bool have_prev_ = false;
  Vec g_prev_, f_prev_;
  std::deque<Vec> dg_, df_;
};

}  // namespace

const char *state_name(SolverState s) {
  switch (s) {
    case SolverState::Optimal: return "optimal";
    case SolverState::MaxIters: return "max-iters";
    case SolverState::Infeasible: return "infeasible";
    case SolverState::Unbounded: return "unbounded";
  }
  return "unknown";
}

SolveResult solve(const ConicProgram &prog, const SolverSettings &st, const WarmStart *warm) {
  validate(prog);
  require(st.tol > 0 && st.max_iters >= 1 && st.alpha > 0 && st.alpha < 2 && st.scale > 0,
          ErrorCode::InvalidParameter, "invalid solver settings");
  const int m = prog.m(), n = prog.n();
  const int l = n + m + 1;

  SpMat a;
  Scaling sc = equilibrate(prog, st.equilibration_passes, a);
  const SpMat at = a.transpose();
  Vec b = sc.d.cwiseProduct(prog.b);
  Vec c = sc.e.cwiseProduct(prog.c);
  sc.sigma_b = 1.0 / std::max(b.norm(), 1e-3);
  sc.sigma_c = 1.0 / std::max(c.norm(), 1e-3);
  b *= sc.sigma_b;
  c *= sc.sigma_c;

  // Douglas-Rachford on the homogeneous embedding in the metric
  // R = diag(rho_x I, R_y, 1). R_y is 1/scale on cone rows and stiffer on
  // equality rows; it is constant inside each cone, so projecting in the R
  // metric is the plain Euclidean projection.
  constexpr double kRhoX = 1e-6;
  constexpr double kZeroWeight = 1e3;
  Vec row_weight(m);
  {
    int off = 0;
    for (const auto &blk : prog.cones.blocks) {
      row_weight.segment(off, blk.rows()).setConstant(blk.kind == ConeKind::Zero ? kZeroWeight : 1.0);
      off += blk.rows();
    }
  }
  Vec ry(m);
  Eigen::LLT<Mat> llt;
  Vec gx, gy;
  double hg = 0;
  double scale = st.scale;

  // (R + Q) u = z with Q the skew embedding operator, split as
  // [rho_x I, A'; -A, R_y] (x, y) = rhs - tau (c, b).
  auto solve_m = [&](const Vec &zx, const Vec &zy, Vec &x, Vec &y) {
    x = llt.solve(zx - at * (zy.cwiseQuotient(ry)));
    y = (zy + a * x).cwiseQuotient(ry);
  };
  auto factor = [&]() {
    ry = row_weight.cwiseInverse() / scale;
    Mat k = Mat(at * ry.cwiseInverse().asDiagonal() * a);
    k.diagonal().array() += kRhoX;
    llt.compute(k);
    require(llt.info() == Eigen::Success, ErrorCode::SolverFailure, "factorization failed");
    solve_m(c, b, gx, gy);
    hg = c.dot(gx) + b.dot(gy);
  };
  factor();

  auto metric = [&](Vec &r) {
    r.resize(l);
    r.head(n).setConstant(kRhoX);
    r.segment(n, m) = ry;
    r(l - 1) = 1.0;
  };
  Vec rdiag;
  metric(rdiag);

  // u = (x, y, tau) lies in the cone; v = (r, s, kappa) is the dual slack.
  Vec u = Vec::Zero(l), v = Vec::Zero(l);
  u(l - 1) = 1.0;
  v(l - 1) = 1.0;
  if (warm != nullptr && warm->x.size() == n && warm->y.size() == m && warm->s.size() == m) {
    u.head(n) = warm->x.cwiseQuotient(sc.e) * sc.sigma_b;
    u.segment(n, m) = warm->y.cwiseQuotient(sc.d) * sc.sigma_c;
    v.segment(n, m) = warm->s.cwiseProduct(sc.d) * sc.sigma_b;
    v(l - 1) = 0.0;
  }
  Vec w = u + v.cwiseQuotient(rdiag);

  int n_exp = 0;
  for (const auto &blk : prog.cones.blocks)
    if (blk.kind == ConeKind::Exp) n_exp += blk.size;
  std::vector<double> exp_hints(static_cast<std::size_t>(n_exp), NAN);

  const double nb = prog.b.norm(), nc = prog.c.norm();
  SolveResult res;
  Vec ut(l), zx, zy, q(l), un(l), vn(l);

  // One sweep: w -> w + alpha (u - u~). Leaves u (cone iterate) and v (slack
  // built from the same projection, so u'v = 0 exactly) in un/vn.
  auto fixed_point = [&](const Vec &win, Vec &wout) {
    const Vec rw = rdiag.cwiseProduct(win);
    solve_m(rw.head(n), rw.segment(n, m), zx, zy);
    const double t = (rw(l - 1) + c.dot(zx) + b.dot(zy)) / (1.0 + hg);
    ut.head(n) = zx - t * gx;
    ut.segment(n, m) = zy - t * gy;
    ut(l - 1) = t;
    q = 2.0 * ut - win;
    un = q;
    project_cone(prog.cones, un.segment(n, m), true, exp_hints.data());
    un(l - 1) = std::max(un(l - 1), 0.0);
    vn = rdiag.cwiseProduct(un - q);
    vn.head(n).setZero();
    wout = win + st.alpha * (un - ut);
  };

  auto unscale = [&](const Vec &uu, const Vec &vv, double tau, Vec &x, Vec &y, Vec &s) {
    x = uu.head(n).cwiseProduct(sc.e) / (tau * sc.sigma_b);
    y = uu.segment(n, m).cwiseProduct(sc.d) / (tau * sc.sigma_c);
    s = vv.segment(n, m).cwiseQuotient(sc.d) / (tau * sc.sigma_b);
  };

  const bool accel = st.anderson_memory > 0;
  Anderson aa(l, std::max(st.anderson_memory, 1));
  Vec wn(l);
  double last_res = INFINITY;
  int since_reset = 0;
  int last_adapt = 0;
  int adapt_wait = st.adapt_interval;
  double log_ratio = 0;
  int n_ratio = 0;

  for (int it = 1; it <= st.max_iters; ++it) {
    fixed_point(w, wn);
    if (accel) {
      const double fres = (wn - w).norm();
      if (fres > last_res && since_reset > 0) {
        // the previous extrapolation did not reduce the residual
        aa.reset();
        since_reset = 0;
      }
      last_res = fres;
      w = aa.step(w, wn);
      ++since_reset;
      if (!w.allFinite()) {
        w = wn;
        aa.reset();
        since_reset = 0;
      }
    } else {
      w = wn;
    }

    if (it % st.check_every != 0 && it != st.max_iters) continue;
    const double tau = un(l - 1), kappa = vn(l - 1);
    res.status.iterations = it;
    if (tau > 1e-12 * std::max(1.0, kappa)) {
      Vec x, y, s;
      unscale(un, vn, tau, x, y, s);
      const Vec ax = prog.A * x;
      const Vec aty = prog.A.transpose() * y;
      const double pres = (ax + s - prog.b).norm() / (1.0 + nb);
      const double dres = (aty + prog.c).norm() / (1.0 + nc);
      const double cx = prog.c.dot(x), by = prog.b.dot(y);
      const double gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
      res.status.primal_residual = pres;
      res.status.dual_residual = dres;
      res.status.gap = gap;
      res.x = x;
      res.y = y;
      res.s = s;
      res.objective = cx;
      if (pres <= st.tol && dres <= st.tol && gap <= st.tol) {
        res.status.state = SolverState::Optimal;
        return res;
      }
      if (st.adaptive_scale) {
        // the termination residuals decide the balance; the log-ratio is
        // averaged between updates so a transient does not trigger a
        // rescale, and the wait doubles after every update.
        const double rp = pres, rd = dres;
        if (rp > 0 && rd > 0) {
          log_ratio += std::log(rp / rd);
          ++n_ratio;
        }
        if (it - last_adapt >= adapt_wait && n_ratio > 0) {
          const double f = std::exp(0.5 * log_ratio / n_ratio);
          if (f > st.adapt_factor || f < 1.0 / st.adapt_factor) {
            scale = std::clamp(scale * f, 1e-6, 1e6);
            factor();
            metric(rdiag);
            // keep (u, v) and re-express w in the new metric
            w = un + vn.cwiseQuotient(rdiag);
            aa.reset();
            since_reset = 0;
            last_res = INFINITY;
            adapt_wait *= 2;
          }
          last_adapt = it;
          log_ratio = 0;
          n_ratio = 0;
        }
      }
    }
    // certificates from the unnormalized embedding variables
    const Vec yc = un.segment(n, m).cwiseProduct(sc.d);
    const double by = prog.b.dot(yc);
    if (by < 0) {
      const double r = (prog.A.transpose() * yc).norm() / -by;
      if (r <= st.tol) {
        res.status.state = SolverState::Infeasible;
        res.y = yc / -by;
        return res;
      }
    }
    const Vec xc = un.head(n).cwiseProduct(sc.e);
    const double cx = prog.c.dot(xc);
    if (cx < 0) {
      const Vec sc_s = vn.segment(n, m).cwiseQuotient(sc.d);
      const double r = (prog.A * xc + sc_s).norm() / -cx;
      if (r <= st.tol) {
        res.status.state = SolverState::Unbounded;
        res.x = xc / -cx;
        return res;
      }
    }
  }
  res.status.state = SolverState::MaxIters;
  return res;
}

}  // namespace symsec::conic
