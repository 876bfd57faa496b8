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

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace symsec {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Rng = std::mt19937_64;

// Independent generator for (master seed, stream index, substream). The
// three values are mixed with splitmix64 so neighbouring indices give
// uncorrelated streams.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t substream = 0);

// v v^H.
CMat gram(const CVec &v);

// Hermitian part (X + X^H)/2.
CMat hermitian_part(const CMat &x);

inline double trace_re(const CMat &x) { return x.diagonal().real().sum(); }

// Re Tr(A B) for Hermitian A, B.
inline double trace_product(const CMat &a, const CMat &b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace symsec
