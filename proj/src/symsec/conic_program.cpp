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

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "symsec/conic.hpp"
#include "symsec/error.hpp"

namespace symsec::conic {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

int pair_index(int n, int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); }

// Entry (p, q) of the real embedding as an affine function of the block.
Affine embedding_entry(const HermitianBlock &x, int p, int q) {
  const int n = x.n;
  const bool lower_p = p >= n, lower_q = q >= n;
  const int i = lower_p ? p - n : p;
  const int j = lower_q ? q - n : q;
  if (lower_p == lower_q) return Affine::var(x.re(i, j));
  // lower-left block is Im X, upper-right is -Im X
  const double sign = lower_p ? 1.0 : -1.0;
  if (i == j) return Affine{};
  if (i < j) return Affine::var(x.im(i, j), sign);
  return Affine::var(x.im(j, i), -sign);
}

void compact(Affine &a) {
  std::map<int, double> acc;
  for (const auto &[idx, coef] : a.terms) acc[idx] += coef;
  a.terms.clear();
  for (const auto &[idx, coef] : acc)
    if (coef != 0.0) a.terms.emplace_back(idx, coef);
}

}  // namespace

int ConeBlock::rows() const {
  switch (kind) {
    case ConeKind::Zero:
    case ConeKind::NonNeg: return size;
    case ConeKind::Psd: return svec_size(size);
    case ConeKind::Exp: return 3 * size;
  }
  return 0;
}

int ConeSpec::rows() const {
  int total = 0;
  for (const auto &b : blocks) total += b.rows();
  return total;
}

int svec_size(int side) { return side * (side + 1) / 2; }

int svec_index(int side, int row, int col) {
  if (row < col) std::swap(row, col);
  // column-major lower triangle
  return col * side - col * (col - 1) / 2 + (row - col);
}

Vec svec(const Mat &x) {
  const int n = static_cast<int>(x.rows());
  Vec v(svec_size(n));
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r) v(k++) = (r == c) ? x(r, c) : kSqrt2 * x(r, c);
  return v;
}

Mat smat(const Eigen::Ref<const Vec> &v, int n) {
  Mat x(n, n);
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r) {
      const double val = (r == c) ? v(k) : v(k) / kSqrt2;
      x(r, c) = val;
      x(c, r) = val;
      ++k;
    }
  return x;
}

int HermitianBlock::re(int i, int j) const {
  if (i == j) return offset + i;
  if (i > j) std::swap(i, j);
  return offset + n + 2 * pair_index(n, i, j);
}

int HermitianBlock::im(int i, int j) const {
  if (i == j) return -1;
  require(i < j, ErrorCode::InvalidInput, "HermitianBlock::im expects i < j");
  return offset + n + 2 * pair_index(n, i, j) + 1;
}

Affine &Affine::operator+=(const Affine &o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

Affine &Affine::operator-=(const Affine &o) {
  for (const auto &[idx, coef] : o.terms) terms.emplace_back(idx, -coef);
  constant -= o.constant;
  return *this;
}

Affine &Affine::operator*=(double s) {
  for (auto &t : terms) t.second *= s;
  constant *= s;
  return *this;
}

double Affine::eval(const Eigen::Ref<const Vec> &x) const {
  double v = constant;
  for (const auto &[idx, coef] : terms) v += coef * x(idx);
  return v;
}

Affine operator+(Affine a, const Affine &b) { return a += b; }
Affine operator-(Affine a, const Affine &b) { return a -= b; }
Affine operator*(double s, Affine a) { return a *= s; }

Affine trace_product(const CMat &h, const HermitianBlock &x) {
  require(h.rows() == x.n && h.cols() == x.n, ErrorCode::InvalidInput, "trace_product dimension mismatch");
  Affine a;
  for (int i = 0; i < x.n; ++i) a.terms.emplace_back(x.re(i, i), h(i, i).real());
  for (int i = 0; i < x.n; ++i)
    for (int j = i + 1; j < x.n; ++j) {
      a.terms.emplace_back(x.re(i, j), 2.0 * h(i, j).real());
      a.terms.emplace_back(x.im(i, j), 2.0 * h(i, j).imag());
    }
  return a;
}

Affine trace(const HermitianBlock &x) {
  Affine a;
  for (int i = 0; i < x.n; ++i) a.terms.emplace_back(x.re(i, i), 1.0);
  return a;
}

int ProgramBuilder::add_var(std::string name) {
  names_.push_back(std::move(name));
  return static_cast<int>(names_.size()) - 1;
}

HermitianBlock ProgramBuilder::add_hermitian(const std::string &name, int n) {
  HermitianBlock blk{n_vars(), n};
  for (int i = 0; i < n; ++i) names_.push_back(name + ".re(" + std::to_string(i) + "," + std::to_string(i) + ")");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::string ij = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      names_.push_back(name + ".re" + ij);
      names_.push_back(name + ".im" + ij);
    }
  return blk;
}

void ProgramBuilder::set_objective(const Affine &objective) { objective_ = objective; }
void ProgramBuilder::add_eq(const Affine &expr) { zero_.push_back(expr); }
void ProgramBuilder::add_nonneg(const Affine &expr) { nonneg_.push_back(expr); }

void ProgramBuilder::add_exp(const Affine &x, const Affine &y, const Affine &z) {
  exp_.push_back(x);
  exp_.push_back(y);
  exp_.push_back(z);
}

void ProgramBuilder::add_psd(const HermitianBlock &block) { psd_.push_back(block); }

ConicProgram ProgramBuilder::build() const {
  ConicProgram prog;
  const int n = n_vars();
  prog.c = Vec::Zero(n);
  for (const auto &[idx, coef] : objective_.terms) prog.c(idx) += coef;
  for (const auto &name : names_) prog.vars.push_back({name});

  std::vector<Affine> rows;
  rows.insert(rows.end(), zero_.begin(), zero_.end());
  rows.insert(rows.end(), nonneg_.begin(), nonneg_.end());
  if (!zero_.empty()) prog.cones.blocks.push_back({ConeKind::Zero, static_cast<int>(zero_.size())});
  if (!nonneg_.empty()) prog.cones.blocks.push_back({ConeKind::NonNeg, static_cast<int>(nonneg_.size())});
  for (const auto &blk : psd_) {
    const int side = 2 * blk.n;
    for (int c = 0; c < side; ++c)
      for (int r = c; r < side; ++r) {
        Affine e = embedding_entry(blk, r, c);
        if (r != c) e *= kSqrt2;
        rows.push_back(std::move(e));
      }
    prog.cones.blocks.push_back({ConeKind::Psd, side});
    prog.hermitian_blocks.push_back(blk);
  }
  rows.insert(rows.end(), exp_.begin(), exp_.end());
  if (!exp_.empty()) prog.cones.blocks.push_back({ConeKind::Exp, static_cast<int>(exp_.size() / 3)});

  const int m = static_cast<int>(rows.size());
  prog.b = Vec::Zero(m);
  std::vector<Eigen::Triplet<double, int>> trip;
  for (int i = 0; i < m; ++i) {
    Affine r = rows[static_cast<std::size_t>(i)];
    compact(r);
    prog.b(i) = r.constant;
    for (const auto &[idx, coef] : r.terms) {
      require(idx >= 0 && idx < n, ErrorCode::InvalidInput, "row references an unknown variable");
      trip.emplace_back(i, idx, -coef);
    }
  }
  prog.A.resize(m, n);
  prog.A.setFromTriplets(trip.begin(), trip.end());
  prog.A.makeCompressed();
  return prog;
}

void validate(const ConicProgram &prog) {
  require(prog.A.rows() == prog.m() && prog.A.cols() == prog.n(), ErrorCode::InvalidInput,
          "A dimensions do not match b and c");
  require(prog.cones.rows() == prog.m(), ErrorCode::InvalidInput, "cone dimension does not match the row count");
  for (const auto &blk : prog.cones.blocks) require(blk.size >= 1, ErrorCode::InvalidInput, "cone sizes must be >= 1");
  require(prog.c.allFinite() && prog.b.allFinite(), ErrorCode::InvalidInput, "b and c must be finite");
}

CMat hermitian_from_embedding(const Mat &e) {
  const int n = static_cast<int>(e.rows()) / 2;
  require(e.rows() == 2 * n && e.cols() == 2 * n, ErrorCode::InvalidInput, "embedding must be 2n x 2n");
  const Mat re = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  const Mat im = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  CMat x(n, n);
  x.real() = re;
  x.imag() = im;
  return hermitian_part(x);
}

Mat real_embedding(const CMat &x) {
  const int n = static_cast<int>(x.rows());
  Mat e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = x.real();
  e.bottomRightCorner(n, n) = x.real();
  e.bottomLeftCorner(n, n) = x.imag();
  e.topRightCorner(n, n) = -x.imag();
  return e;
}

CMat hermitian_from_vars(const HermitianBlock &b, const Eigen::Ref<const Vec> &x) {
  CMat out(b.n, b.n);
  for (int i = 0; i < b.n; ++i) out(i, i) = x(b.re(i, i));
  for (int i = 0; i < b.n; ++i)
    for (int j = i + 1; j < b.n; ++j) {
      out(i, j) = cplx(x(b.re(i, j)), x(b.im(i, j)));
      out(j, i) = std::conj(out(i, j));
    }
  return out;
}

void hermitian_to_vars(const HermitianBlock &b, const CMat &v, Eigen::Ref<Vec> x) {
  for (int i = 0; i < b.n; ++i) x(b.re(i, i)) = v(i, i).real();
  for (int i = 0; i < b.n; ++i)
    for (int j = i + 1; j < b.n; ++j) {
      const cplx z = 0.5 * (v(i, j) + std::conj(v(j, i)));
      x(b.re(i, j)) = z.real();
      x(b.im(i, j)) = z.imag();
    }
}

// Format:
//   symsec-conic 1
//   <m> <n> <nnz> <ncones> <nhermitian>
//   cones: one line per block "Z|L|S|E <size>"
//   c: n lines; b: m lines; A: nnz lines "<row> <col> <value>"
//   vars: n lines with the variable name
//   hermitian: one line per block "<offset> <n>"
void write_program(std::ostream &os, const ConicProgram &prog) {
  validate(prog);
  os << "symsec-conic 1\n";
  os << prog.m() << ' ' << prog.n() << ' ' << prog.A.nonZeros() << ' ' << prog.cones.blocks.size() << ' '
     << prog.hermitian_blocks.size() << '\n';
  for (const auto &blk : prog.cones.blocks) {
    const char tag = blk.kind == ConeKind::Zero ? 'Z' : blk.kind == ConeKind::NonNeg ? 'L'
                     : blk.kind == ConeKind::Psd ? 'S' : 'E';
    os << tag << ' ' << blk.size << '\n';
  }
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "c\n";
  for (int j = 0; j < prog.n(); ++j) os << num(prog.c(j)) << '\n';
  os << "b\n";
  for (int i = 0; i < prog.m(); ++i) os << num(prog.b(i)) << '\n';
  os << "A\n";
  for (int col = 0; col < prog.A.outerSize(); ++col)
    for (SpMat::InnerIterator it(prog.A, col); it; ++it) os << it.row() << ' ' << it.col() << ' ' << num(it.value()) << '\n';
  os << "vars\n";
  for (int j = 0; j < prog.n(); ++j) os << (j < static_cast<int>(prog.vars.size()) ? prog.vars[j].name : "x" + std::to_string(j)) << '\n';
  os << "hermitian\n";
  for (const auto &h : prog.hermitian_blocks) os << h.offset << ' ' << h.n << '\n';
}

ConicProgram read_program(std::istream &is) {
  auto bad = [](const std::string &what) { fail(ErrorCode::InvalidInput, "malformed conic program file: " + what); };
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "symsec-conic" || version != 1) bad("header");
  long m = 0, n = 0, nnz = 0, ncones = 0, nherm = 0;
  if (!(is >> m >> n >> nnz >> ncones >> nherm) || m < 0 || n < 0 || nnz < 0) bad("dimensions");
  ConicProgram prog;
  for (long k = 0; k < ncones; ++k) {
    char tag = 0;
    int size = 0;
    if (!(is >> tag >> size)) bad("cone list");
    ConeKind kind;
    switch (tag) {
      case 'Z': kind = ConeKind::Zero; break;
      case 'L': kind = ConeKind::NonNeg; break;
      case 'S': kind = ConeKind::Psd; break;
      case 'E': kind = ConeKind::Exp; break;
      default: bad(std::string("cone tag ") + tag); return prog;
    }
    prog.cones.blocks.push_back({kind, size});
  }
  std::string section;
  auto expect = [&](const char *name) {
    if (!(is >> section) || section != name) bad(std::string("section ") + name);
  };
  expect("c");
  prog.c.resize(n);
  for (long j = 0; j < n; ++j)
    if (!(is >> prog.c(j))) bad("c values");
  expect("b");
  prog.b.resize(m);
  for (long i = 0; i < m; ++i)
    if (!(is >> prog.b(i))) bad("b values");
  expect("A");
  std::vector<Eigen::Triplet<double, int>> trip;
  for (long k = 0; k < nnz; ++k) {
    int r = 0, c = 0;
    double v = 0;
    if (!(is >> r >> c >> v) || r < 0 || r >= m || c < 0 || c >= n) bad("A triplet");
    trip.emplace_back(r, c, v);
  }
  prog.A.resize(m, n);
  prog.A.setFromTriplets(trip.begin(), trip.end());
  prog.A.makeCompressed();
  expect("vars");
  std::string line;
  std::getline(is, line);
  for (long j = 0; j < n; ++j) {
    if (!std::getline(is, line)) bad("variable names");
    prog.vars.push_back({line});
  }
  expect("hermitian");
  for (long k = 0; k < nherm; ++k) {
    HermitianBlock h;
    if (!(is >> h.offset >> h.n)) bad("hermitian map");
    prog.hermitian_blocks.push_back(h);
  }
  validate(prog);
  return prog;
}

}  // namespace symsec::conic
