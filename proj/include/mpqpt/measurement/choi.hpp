// Copyright 2026 The mpqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Choi states in the interleaved layout: site 2j is the ancilla partner of
// system qubit j, which lives on site 2j + 1.

#include <cmath>
#include <numbers>
#include <vector>

#include "mpqpt/tensor/operations.hpp"

namespace mpqpt {

inline Index ancilla_site(Index qubit) { return 2 * qubit; }
inline Index system_site(Index qubit) { return 2 * qubit + 1; }
inline bool is_system_site(Index site) { return site % 2 == 1; }

/// Product of n Bell pairs (|00> + |11>)/sqrt(2), bond dimension 2 inside
/// each pair and 1 between pairs.
inline MatrixProductState bell_input(Index n) {
  if (n < 1) throw RangeError("bell_input: need n >= 1");
  std::vector<SiteTensor> sites;
  for (Index j = 0; j < n; ++j) {
    SiteTensor a(1, 2, 2), s(2, 2, 1);
    for (Index p = 0; p < 2; ++p) {
      a(0, p, p) = 1.0 / std::numbers::sqrt2;
      s(p, p, 0) = 1.0;
    }
    sites.push_back(std::move(a));
    sites.push_back(std::move(s));
  }
  return MatrixProductState(std::move(sites));
}

inline std::vector<Index> system_sites(Index n) {
  std::vector<Index> out;
  for (Index j = 0; j < n; ++j) out.push_back(system_site(j));
  return out;
}

/// |psi_U> = (1 (x) U)|Phi>, normalized, with the compression report.
inline CompressedState choi_state(const MatrixProductOperator& u, const Truncation& trunc = {}) {
  const Index n = u.length();
  ApplyOptions opts;
  opts.truncation = trunc;
  opts.normalize = true;
  return apply_mpo(u, bell_input(n), system_sites(n), opts);
}

inline CompressedState choi_state(const MatrixProductOperator& u, Index max_bond, double svd_tol = kDefaultSvdTol) {
  return choi_state(u, Truncation::bond(max_bond, svd_tol));
}

}  // namespace mpqpt
