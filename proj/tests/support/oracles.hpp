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

// Test-only generators and dense reference computations. Nothing here calls
// into the tensor-network code paths it is used to check.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mpqpt/circuit/circuit.hpp"
#include "mpqpt/tensor/mpo.hpp"
#include "mpqpt/tensor/mps.hpp"

namespace mpqpt::testing {

using Rng = std::mt19937_64;

inline cplx gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = gaussian(rng);
  return m;
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
inline Matrix random_unitary(Index dim, Rng& rng) {
  Matrix z = random_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Matrix random_hermitian(Index dim, Rng& rng) {
  Matrix m = random_matrix(dim, dim, rng);
  return 0.5 * (m + m.adjoint());
}

/// Random MPS with uniform bulk bond dimension (capped by the edge limits).
inline MatrixProductState random_mps(Index length, Index bond, Rng& rng, bool normalize = true) {
  std::vector<SiteTensor> sites;
  for (Index k = 0; k < length; ++k) {
    const Index left = std::min<Index>(bond, std::min(pow2(k), pow2(length - k)));
    const Index right = std::min<Index>(bond, std::min(pow2(k + 1), pow2(length - k - 1)));
    SiteTensor t(left, 2, right);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = gaussian(rng);
    sites.push_back(std::move(t));
  }
  MatrixProductState psi(std::move(sites));
  if (!normalize) return psi;
  return normalized(psi);
}

inline MatrixProductOperator random_mpo(Index length, Index bond, Rng& rng) {
  std::vector<SiteTensor> sites;
  for (Index k = 0; k < length; ++k) {
    const Index left = k == 0 ? 1 : bond;
    const Index right = k == length - 1 ? 1 : bond;
    SiteTensor t(left, 4, right);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = gaussian(rng);
    sites.push_back(std::move(t));
  }
  return MatrixProductOperator(std::move(sites));
}

/// Dense partial trace keeping [start, start + width) of a big-endian state.
inline Matrix dense_partial_trace(const Vector& psi, Index length, Index start, Index width) {
  const Index dw = pow2(width);
  const Index right = pow2(length - start - width);
  const Index left = pow2(start);
  Matrix rho = Matrix::Zero(dw, dw);
  for (Index l = 0; l < left; ++l)
    for (Index r = 0; r < right; ++r)
      for (Index a = 0; a < dw; ++a)
        for (Index b = 0; b < dw; ++b)
          rho(a, b) += psi[(l * dw + a) * right + r] * std::conj(psi[(l * dw + b) * right + r]);
  return rho / psi.squaredNorm();
}

/// Embeds a k-qubit operator acting on consecutive qubits starting at `first`.
inline Matrix embed(const Matrix& op, Index n, Index first) {
  Index k = 0;
  while (pow2(k) < op.rows()) ++k;
  Matrix left = Matrix::Identity(pow2(first), pow2(first));
  Matrix right = Matrix::Identity(pow2(n - first - k), pow2(n - first - k));
  Matrix out(pow2(n), pow2(n));
  // kron(left, kron(op, right))
  Matrix inner(op.rows() * right.rows(), op.cols() * right.cols());
  for (Index i = 0; i < op.rows(); ++i)
    for (Index j = 0; j < op.cols(); ++j)
      inner.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) = op(i, j) * right;
  out.setZero();
  for (Index i = 0; i < left.rows(); ++i) out.block(i * inner.rows(), i * inner.cols(), inner.rows(), inner.cols()) = inner;
  return out;
}

inline Matrix pauli(char a) {
  Matrix m(2, 2);
  switch (a) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    default: m = Matrix::Identity(2, 2);
  }
  return m;
}

inline Matrix dense_kron_all(const std::vector<Matrix>& ops) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& op : ops) {
    Matrix next(out.rows() * op.rows(), out.cols() * op.cols());
    for (Index i = 0; i < out.rows(); ++i)
      for (Index j = 0; j < out.cols(); ++j)
        next.block(i * op.rows(), j * op.cols(), op.rows(), op.cols()) = out(i, j) * op;
    out = std::move(next);
  }
  return out;
}

/// Dense Choi vector in the interleaved (ancilla, system) layout:
/// amplitude at (i_1 j_1 i_2 j_2 ...) is <j|U|i> / 2^{n/2}.
inline Vector dense_choi(const Matrix& u) {
  Index n = 0;
  while (pow2(n) < u.rows()) ++n;
  Vector v = Vector::Zero(pow2(2 * n));
  for (Index i = 0; i < pow2(n); ++i)
    for (Index j = 0; j < pow2(n); ++j) {
      Index idx = 0;
      for (Index k = 0; k < n; ++k) {
        const Index ib = (i >> (n - 1 - k)) & 1;
        const Index jb = (j >> (n - 1 - k)) & 1;
        idx = (idx << 2) | (ib << 1) | jb;
      }
      v[idx] = u(j, i) / std::sqrt(static_cast<double>(pow2(n)));
    }
  return v;
}

/// Full 2^n x 2^n matrix of a k-qubit gate acting on `sites` (any order, the
/// first listed site is the most significant bit of the gate index).
inline Matrix dense_gate(const Matrix& g, Index n, const std::vector<Index>& sites) {
  const Index dim = pow2(n);
  const Index k = static_cast<Index>(sites.size());
  Matrix out = Matrix::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    Index in = 0;
    for (Index s : sites) in = (in << 1) | ((col >> (n - 1 - s)) & 1);
    for (Index o = 0; o < pow2(k); ++o) {
      Index row = col;
      for (Index m = 0; m < k; ++m) {
        const Index pos = n - 1 - sites[static_cast<std::size_t>(m)];
        row = (row & ~(Index{1} << pos)) | (((o >> (k - 1 - m)) & 1) << pos);
      }
      out(row, col) += g(o, in);
    }
  }
  return out;
}

/// |tr(a^dagger b)|^2 / d^2.
inline double dense_process_fidelity(const Matrix& a, const Matrix& b) {
  const double d = static_cast<double>(a.rows());
  return std::norm((a.adjoint() * b).trace()) / (d * d);
}

inline double dense_operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

/// Ordered product of the dense gate matrices.
inline Matrix dense_circuit(const Circuit& c) {
  const Index n = c.qubits();
  Matrix u = Matrix::Identity(pow2(n), pow2(n));
  for (const auto& g : c.gates()) {
    std::vector<Index> sites{g.left};
    if (g.two_qubit()) sites.push_back(g.right);
    u = dense_gate(g.matrix, n, sites) * u;
  }
  return u;
}

inline Index bit_reverse(Index y, Index n) {
  Index r = 0;
  for (Index k = 0; k < n; ++k) r |= ((y >> k) & 1) << (n - 1 - k);
  return r;
}

/// DFT with the output register read in reversed bit order.
inline Matrix reversed_output_dft(Index n) {
  const Index dim = pow2(n);
  Matrix m(dim, dim);
  for (Index y = 0; y < dim; ++y)
    for (Index x = 0; x < dim; ++x) {
      const double angle =
          2.0 * std::numbers::pi * static_cast<double>((x * bit_reverse(y, n)) % dim) / static_cast<double>(dim);
      m(y, x) = std::polar(1.0 / std::sqrt(static_cast<double>(dim)), angle);
    }
  return m;
}

}  // namespace mpqpt::testing
