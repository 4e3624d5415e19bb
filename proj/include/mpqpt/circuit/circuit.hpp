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

// Qubits are numbered 0..n-1; qubit 0 is the most significant bit of dense
// indices. Gates are applied first to last, so the circuit unitary is
// G_{N-1} ... G_1 G_0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mpqpt/common.hpp"

namespace mpqpt {

inline constexpr double kUnitarityTol = 1e-12;

/// One- or two-qubit gate. For a two-qubit gate the 4x4 matrix is indexed by
/// 2*b_left + b_right (the left site is the more significant bit).
struct Gate {
  std::string name;
  std::vector<double> params;
  Matrix matrix;
  Index left = 0;
  Index right = 0;  // equals `left` for single-qubit gates

  bool two_qubit() const { return right != left; }
};

namespace gates {

inline Matrix hadamard() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::numbers::sqrt2;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

/// diag(1, 1, 1, e^{i phi}): rotation of the target conditioned on the control.
inline Matrix controlled_phase(double phi) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, phi);
  return m;
}

inline double unitarity_error(const Matrix& g) {
  return (g.adjoint() * g - Matrix::Identity(g.rows(), g.cols())).norm();
}

inline Gate single(std::string name, const Matrix& m, Index site, std::vector<double> params = {}) {
  return Gate{std::move(name), std::move(params), m, site, site};
}

inline Gate pair(std::string name, const Matrix& m, Index left, Index right, std::vector<double> params = {}) {
  return Gate{std::move(name), std::move(params), m, left, right};
}

inline Gate h(Index k) { return single("H", hadamard(), k); }
inline Gate cn(Index control, Index target) { return pair("CN", cnot(), control, target); }
inline Gate cr(Index control, Index target, double phi) {
  return pair("CR", controlled_phase(phi), control, target, {phi});
}

}  // namespace gates

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(Index n) : n_(n) {
    if (n < 1) throw RangeError("Circuit: need at least one qubit");
  }

  /// Validates and appends a gate.
  Circuit& add(Gate g) {
    const Index dim = g.two_qubit() ? 4 : 2;
    if (g.matrix.rows() != dim || g.matrix.cols() != dim)
      throw DimensionError("gate '" + g.name + "': matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
    if (g.left < 0 || g.right >= n_ || g.right < g.left)
      throw RangeError("gate '" + g.name + "': sites (" + std::to_string(g.left) + ", " + std::to_string(g.right) +
                       ") invalid for " + std::to_string(n_) + " qubits");
    if (gates::unitarity_error(g.matrix) > kUnitarityTol) throw PreconditionError("gate '" + g.name + "' is not unitary");
    gates_.push_back(std::move(g));
    return *this;
  }

  Index qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

 private:
  Index n_ = 0;
  std::vector<Gate> gates_;
};

struct DepthProfile {
  std::vector<Index> depths;  // d_i for the cut between qubits i and i+1
  Index max_depth = 0;
};

/// d_i counts the two-qubit gates whose span straddles the cut i|i+1.
inline DepthProfile depth_profile(const Circuit& c) {
  DepthProfile p;
  p.depths.assign(static_cast<std::size_t>(std::max<Index>(c.qubits() - 1, 0)), 0);
  for (const auto& g : c.gates())
    for (Index i = g.left; i < g.right; ++i) ++p.depths[static_cast<std::size_t>(i)];
  for (Index d : p.depths) p.max_depth = std::max(p.max_depth, d);
  return p;
}

/// H on qubit 0 followed by CN(i, i+1) for i = 0..n-2.
inline Circuit build_ghz(Index n) {
  Circuit c(n);
  c.add(gates::h(0));
  for (Index i = 0; i + 1 < n; ++i) c.add(gates::cn(i, i + 1));
  return c;
}

/// Quantum Fourier transform without the terminal qubit reversal. Conditional
/// rotations CR(k, k+j) with j > `cutoff` are dropped.
inline Circuit build_qft_approx(Index n, Index cutoff) {
  if (cutoff < 0) throw RangeError("build_qft_approx: cutoff must be non-negative");
  Circuit c(n);
  for (Index k = 0; k < n; ++k) {
    c.add(gates::h(k));
    for (Index j = 1; k + j < n; ++j)
      if (j <= cutoff) c.add(gates::cr(k, k + j, std::numbers::pi / static_cast<double>(pow2(j))));
  }
  return c;
}

inline Circuit build_qft(Index n) { return build_qft_approx(n, std::max<Index>(n - 1, 0)); }

/// Operator-norm bound n*pi/2^c on the distance between the exact and the
/// truncated transform.
inline double qft_approx_error_bound(Index n, Index cutoff) {
  if (n < 1 || cutoff < 0) throw RangeError("qft_approx_error_bound: need n >= 1 and c >= 0");
  return static_cast<double>(n) * std::numbers::pi / std::ldexp(1.0, static_cast<int>(cutoff));
}

}  // namespace mpqpt
