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
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mpqpt/common.hpp"
#include "mpqpt/random.hpp"
#include "mpqpt/tensor/linalg.hpp"

namespace mpqpt {

enum class Family { heisenberg, ising_critical, random_nn, custom };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::heisenberg: return "heisenberg";
    case Family::ising_critical: return "ising_critical";
    case Family::random_nn: return "random_nn";
    case Family::custom: return "custom";
  }
  return "custom";
}

inline Family parse_family(const std::string& s) {
  if (s == "heisenberg") return Family::heisenberg;
  if (s == "ising_critical" || s == "ising") return Family::ising_critical;
  if (s == "random_nn" || s == "random") return Family::random_nn;
  if (s == "custom") return Family::custom;
  throw RangeError("unknown Hamiltonian family '" + s + "'");
}

inline constexpr double kHermiticityTol = 1e-12;

namespace pauli {

inline Matrix identity() { return Matrix::Identity(2, 2); }
inline Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
/// Pauli matrix by index: 0 = 1, 1 = x, 2 = y, 3 = z.
inline Matrix by_index(int a) {
  switch (a) {
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: return identity();
  }
}

}  // namespace pauli

/// H = sum_i h_i with h_i a Hermitian 4x4 term on qubits (i, i+1), indexed
/// 2*b_i + b_{i+1}.
struct NearestNeighbourHamiltonian {
  Index n = 0;
  std::vector<Matrix> terms;
  Family family = Family::custom;
  std::optional<std::uint64_t> seed;
  /// Upper bound J on the operator norm of every term.
  double coupling_bound = 0.0;
};

inline void validate(const NearestNeighbourHamiltonian& h) {
  if (h.n < 2) throw RangeError("Hamiltonian: need at least two qubits");
  if (static_cast<Index>(h.terms.size()) != h.n - 1) throw DimensionError("Hamiltonian: need n - 1 bond terms");
  for (const auto& t : h.terms) {
    if (t.rows() != 4 || t.cols() != 4) throw DimensionError("Hamiltonian: terms must be 4x4");
    if ((t - t.adjoint()).norm() > kHermiticityTol) throw PreconditionError("Hamiltonian: term is not Hermitian");
  }
}

/// Wraps raw terms; J is taken as the largest term norm.
inline NearestNeighbourHamiltonian make_custom(std::vector<Matrix> terms) {
  NearestNeighbourHamiltonian h;
  h.n = static_cast<Index>(terms.size()) + 1;
  h.terms = std::move(terms);
  validate(h);
  for (const auto& t : h.terms) h.coupling_bound = std::max(h.coupling_bound, hermitian_norm(t));
  return h;
}

/// Named families. Fields on single sites are split evenly between the two
/// bonds touching the site, with the full field on the bond of a chain end.
inline NearestNeighbourHamiltonian build_family(Family family, Index n, std::optional<std::uint64_t> seed = {}) {
  if (n < 2) throw RangeError("build_family: need n >= 2");
  std::vector<Matrix> terms;
  const Matrix id = pauli::identity();
  switch (family) {
    case Family::heisenberg: {
      const Matrix t = kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y()) + kron(pauli::z(), pauli::z());
      terms.assign(static_cast<std::size_t>(n - 1), t);
      break;
    }
    case Family::ising_critical: {
      for (Index i = 0; i + 1 < n; ++i) {
        const double wl = i == 0 ? 1.0 : 0.5;
        const double wr = i + 2 == n ? 1.0 : 0.5;
        terms.push_back(-kron(pauli::x(), pauli::x()) - wl * kron(pauli::z(), id) - wr * kron(id, pauli::z()));
      }
      break;
    }
    case Family::random_nn: {
      if (!seed) throw PreconditionError("build_family: the random family requires a seed");
      PhiloxEngine rng(*seed, 0x48616d);
      for (Index i = 0; i + 1 < n; ++i) {
        Matrix m(4, 4);
        for (Index a = 0; a < 4; ++a)
          for (Index b = 0; b < 4; ++b) {
            const double re = 2.0 * rng.uniform() - 1.0;
            const double im = 2.0 * rng.uniform() - 1.0;
            m(a, b) = cplx(re, im);
          }
        terms.push_back(0.5 * (m + m.adjoint()));
      }
      break;
    }
    case Family::custom: throw PreconditionError("build_family: custom Hamiltonians are built from raw terms");
  }
  auto h = make_custom(std::move(terms));
  h.family = family;
  if (family == Family::random_nn) h.seed = seed;
  return h;
}

/// Dense 2^n x 2^n matrix.
inline Matrix to_dense(const NearestNeighbourHamiltonian& h, Index cap = kDenseOperatorCap) {
  if (h.n > cap)
    throw CapExceeded("to_dense: " + std::to_string(h.n) + " qubits exceeds the dense operator cap of " +
                      std::to_string(cap));
  const Index dim = pow2(h.n);
  Matrix out = Matrix::Zero(dim, dim);
  for (Index i = 0; i + 1 < h.n; ++i) {
    const Index left = pow2(i);
    const Index right = pow2(h.n - i - 2);
    const Matrix& t = h.terms[static_cast<std::size_t>(i)];
    for (Index l = 0; l < left; ++l)
      for (Index r = 0; r < right; ++r)
        for (Index a = 0; a < 4; ++a)
          for (Index b = 0; b < 4; ++b) out((l * 4 + a) * right + r, (l * 4 + b) * right + r) += t(a, b);
  }
  return out;
}

/// y = H x on a dense state vector without forming H.
inline Vector apply_dense(const NearestNeighbourHamiltonian& h, const Vector& x) {
  Vector y = Vector::Zero(x.size());
  for (Index i = 0; i + 1 < h.n; ++i) {
    const Index left = pow2(i);
    const Index right = pow2(h.n - i - 2);
    const Matrix& t = h.terms[static_cast<std::size_t>(i)];
    for (Index l = 0; l < left; ++l)
      for (Index r = 0; r < right; ++r)
        for (Index a = 0; a < 4; ++a) {
          cplx acc = 0.0;
          for (Index b = 0; b < 4; ++b) acc += t(a, b) * x[(l * 4 + b) * right + r];
          y[(l * 4 + a) * right + r] += acc;
        }
  }
  return y;
}

namespace detail {

/// Extremal eigenvalues by Lanczos with full reorthogonalization.
inline std::pair<double, double> lanczos_extremes(const NearestNeighbourHamiltonian& h, Index max_iter = 200,
                                                  double tol = 1e-12) {
  const Index dim = pow2(h.n);
  PhiloxEngine rng(0x4c616e637a6f73ull);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  v.normalize();
  std::vector<Vector> basis{v};
  std::vector<double> alpha, beta;
  double lo = 0.0, hi = 0.0;
  for (Index it = 0; it < std::min(max_iter, dim); ++it) {
    Vector w = apply_dense(h, basis.back());
    alpha.push_back(basis.back().dot(w).real());
    for (const auto& b : basis) w -= b * b.dot(w);
    for (const auto& b : basis) w -= b * b.dot(w);
    const double nb = w.norm();
    RealMatrix tri = RealMatrix::Zero(static_cast<Index>(alpha.size()), static_cast<Index>(alpha.size()));
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      tri(static_cast<Index>(k), static_cast<Index>(k)) = alpha[k];
      if (k + 1 < alpha.size()) tri(static_cast<Index>(k), static_cast<Index>(k + 1)) = tri(static_cast<Index>(k + 1), static_cast<Index>(k)) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(tri, Eigen::EigenvaluesOnly);
    const double new_lo = es.eigenvalues().minCoeff();
    const double new_hi = es.eigenvalues().maxCoeff();
    const bool converged = it > 2 && std::abs(new_lo - lo) < tol * std::abs(new_lo) + tol &&
                           std::abs(new_hi - hi) < tol * std::abs(new_hi) + tol;
    lo = new_lo;
    hi = new_hi;
    if (converged || nb < 1e-13) break;
    beta.push_back(nb);
    basis.push_back(w / nb);
  }
  return {lo, hi};
}

}  // namespace detail

struct NormInfo {
  double norm = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  /// 1 / norm.
  double time_unit() const {
    if (norm == 0.0) throw PreconditionError("time_unit: Hamiltonian has zero norm");
    return 1.0 / norm;
  }
};

/// Largest absolute eigenvalue. Dense diagonalization up to `dense_cap`
/// qubits, Lanczos on dense vectors above it (bounded by the state cap).
inline NormInfo operator_norm(const NearestNeighbourHamiltonian& h, Index dense_cap = 10) {
  validate(h);
  NormInfo info;
  if (h.n <= dense_cap) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(to_dense(h), Eigen::EigenvaluesOnly);
    info.min_eigenvalue = es.eigenvalues().minCoeff();
    info.max_eigenvalue = es.eigenvalues().maxCoeff();
  } else {
    if (h.n > kDenseStateCap) throw CapExceeded("operator_norm: chain exceeds the dense vector cap");
    std::tie(info.min_eigenvalue, info.max_eigenvalue) = detail::lanczos_extremes(h);
  }
  info.norm = std::max(std::abs(info.min_eigenvalue), std::abs(info.max_eigenvalue));
  return info;
}

}  // namespace mpqpt
