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

#include "mpqpt/measurement/choi.hpp"
#include "mpqpt/measurement/dataset.hpp"

namespace mpqpt {

/// p(s) = tr[rho_window Pi^s] for one setting.
inline std::vector<double> exact_distribution(const MatrixProductState& psi, const ObservableSpec& spec) {
  validate(spec, psi.length());
  return pauli_outcome_distribution(reduced_density(psi, spec.k, spec.width()).matrix, spec.alphas);
}

/// Measures every width-r setting on the Choi state `psi` of an n-qubit
/// channel. shots == kExactShots stores exact distributions.
inline MeasurementDataset measure_ancilla_assisted(const MatrixProductState& psi, Index r, std::uint64_t shots,
                                                   std::uint64_t seed) {
  if (psi.length() % 2 != 0) throw DimensionError("measure: Choi state needs an even number of sites");
  MeasurementDataset d{psi.length() / 2, r, shots, Provenance::ancilla_assisted, seed, {}};
  const auto axes = all_axis_strings(r);
  std::uint64_t stream = 0;
  for (const auto& w : all_window_densities(psi, r))
    for (const auto& a : axes) {
      ObservableSpec spec{w.start, a};
      d.tables.push_back(make_table(spec, pauli_outcome_distribution(w.matrix, a), shots, seed, stream++));
    }
  return d;
}

}  // namespace mpqpt
