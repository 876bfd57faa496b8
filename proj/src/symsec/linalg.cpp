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

#include "symsec/linalg.hpp"
#include "symsec/error.hpp"

namespace symsec {

namespace {

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const char *error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Unsupported: return "unsupported-configuration";
    case ErrorCode::InfeasibleQ: return "infeasible-q";
    case ErrorCode::SolverFailure: return "solver-failure";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t substream) {
  std::uint64_t state = master_seed;
  std::uint64_t a = splitmix64(state);
  state ^= index * 0xd1b54a32d192ed03ULL;
  std::uint64_t b = splitmix64(state);
  state ^= substream * 0x8cb92ba72f3d8dd7ULL;
  std::uint64_t c = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Rng(seq);
}

CMat gram(const CVec &v) { return v * v.adjoint(); }

CMat hermitian_part(const CMat &x) { return 0.5 * (x + x.adjoint()); }

}  // namespace symsec
