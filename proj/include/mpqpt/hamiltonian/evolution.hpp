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

#include <cmath>
#include <vector>

#include "mpqpt/circuit/circuit_mpo.hpp"
#include "mpqpt/hamiltonian/hamiltonian.hpp"

namespace mpqpt {

enum class EvolutionMethod { automatic, dense, trotter };

struct EvolutionSpec {
  NearestNeighbourHamiltonian hamiltonian;
  double t = 0.0;
  EvolutionMethod method = EvolutionMethod::automatic;
  /// Trotter step; 0 selects |t| / 200.
  double step = 0.0;
  Truncation truncation{};
};

struct EvolutionResult {
  MatrixProductOperator op;
  /// Normalized Frobenius bound on the compression error.
  double truncation_error = 0.0;
  /// Operator-norm bound on the splitting error (0 for the dense method).
  double trotter_error_bound = 0.0;
};

/// Qubit count up to which `automatic` uses the dense exponential.
inline constexpr Index kDenseEvolutionCap = 12;

/// e^{-i h t} for a Hermitian matrix.
inline Matrix hermitian_exp(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(es.eigenvalues().size());
  for (Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -es.eigenvalues()[k] * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix evolve_dense_matrix(const NearestNeighbourHamiltonian& h, double t) {
  validate(h);
  return hermitian_exp(to_dense(h), t);
}

namespace detail {

// Triangle-inequality bound on |[X, [X, Y]]| where X sums the bonds of parity
// `parity` and Y the others: 4 |h_x||h_a||h_b| over overlapping triples.
inline double nested_commutator_bound(const std::vector<double>& norms, Index parity) {
  const Index bonds = static_cast<Index>(norms.size());
  double total = 0.0;
  for (Index a = parity; a < bonds; a += 2)
    for (Index b : {a - 1, a + 1}) {
      if (b < 0 || b >= bonds) continue;
      const Index lo = std::min(a, b), hi = std::max(a, b);
      for (Index x = parity; x < bonds; x += 2) {
        if (x < lo - 1 || x > hi + 1) continue;
        total += 4.0 * norms[static_cast<std::size_t>(x)] * norms[static_cast<std::size_t>(a)] *
                 norms[static_cast<std::size_t>(b)];
      }
    }
  return total;
}

}  // namespace detail

/// Second-order splitting of H = A + B (A: bonds 0, 2, ...; B: bonds 1, 3,
/// ...) as a gate list A(d/2) B(d) A(d) ... B(d) A(d/2).
inline Circuit trotter_circuit(const NearestNeighbourHamiltonian& h, double t, Index steps) {
  validate(h);
  if (steps < 1) throw RangeError("trotter_circuit: need at least one step");
  const double d = t / static_cast<double>(steps);
  const Index bonds = h.n - 1;
  std::vector<Matrix> half, full;
  for (const auto& term : h.terms) {
    half.push_back(hermitian_exp(term, d / 2));
    full.push_back(hermitian_exp(term, d));
  }
  Circuit c(h.n);
  auto layer = [&](Index parity, const std::vector<Matrix>& unitaries) {
    for (Index i = parity; i < bonds; i += 2)
      c.add(gates::pair("U2", unitaries[static_cast<std::size_t>(i)], i, i + 1));
  };
  layer(0, half);
  for (Index s = 0; s < steps; ++s) {
    layer(1, full);
    layer(0, s + 1 == steps ? half : full);
  }
  return c;
}

inline EvolutionResult evolve(const EvolutionSpec& spec) {
  const auto& h = spec.hamiltonian;
  validate(h);
  if (!std::isfinite(spec.t)) throw RangeError("evolve: time must be finite");
  EvolutionMethod method = spec.method;
  if (method == EvolutionMethod::automatic)
    method = h.n <= kDenseEvolutionCap ? EvolutionMethod::dense : EvolutionMethod::trotter;

  EvolutionResult out;
  if (spec.t == 0.0) {
    out.op = MatrixProductOperator::identity(h.n);
    return out;
  }
  if (method == EvolutionMethod::dense) {
    if (h.n > kDenseEvolutionCap) throw CapExceeded("evolve: dense method above the dense evolution cap");
    double err = 0.0;
    out.op = mpo_from_dense(evolve_dense_matrix(h, spec.t), spec.truncation, &err);
    out.truncation_error = err / std::sqrt(std::ldexp(1.0, static_cast<int>(h.n)));
    return out;
  }

  const double step = spec.step > 0.0 ? spec.step : std::abs(spec.t) / 200.0;
  const auto steps = static_cast<Index>(std::ceil(std::abs(spec.t) / step - 1e-9));
  auto r = circuit_to_mpo(trotter_circuit(h, spec.t, std::max<Index>(steps, 1)), spec.truncation);
  out.op = std::move(r.op);
  out.truncation_error = r.error_bound;

  std::vector<double> norms;
  for (const auto& term : h.terms) norms.push_back(hermitian_norm(term));
  const double d = std::abs(spec.t) / static_cast<double>(std::max<Index>(steps, 1));
  // |e^{-i(A+B)d} - e^{-iAd/2} e^{-iBd} e^{-iAd/2}| <= d^3 (|[B,[B,A]]| / 12 + |[A,[A,B]]| / 24)
  const double per_step = d * d * d *
                          (detail::nested_commutator_bound(norms, 1) / 12.0 +
                           detail::nested_commutator_bound(norms, 0) / 24.0);
  out.trotter_error_bound = static_cast<double>(std::max<Index>(steps, 1)) * per_step;
  return out;
}

}  // namespace mpqpt
