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
#include <string>
#include <utility>
#include <vector>

#include "mpqpt/tensor/chain.hpp"

namespace mpqpt {

/// Fused physical index of an operator site.
inline constexpr Index op_index(Index out, Index in) { return 2 * out + in; }

/// Open-boundary matrix product operator on qubits. Site k has shape
/// (D_{k-1}, 4, D_k) with fused physical index op_index(out, in).
class MatrixProductOperator {
 public:
  MatrixProductOperator() = default;
  explicit MatrixProductOperator(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
    chain::validate(sites_, 4);
  }

  static MatrixProductOperator identity(Index n) {
    if (n < 1) throw RangeError("identity: need at least one site");
    std::vector<SiteTensor> sites;
    for (Index k = 0; k < n; ++k) {
      SiteTensor t(1, 4, 1);
      t(0, op_index(0, 0), 0) = 1.0;
      t(0, op_index(1, 1), 0) = 1.0;
      sites.push_back(std::move(t));
    }
    return MatrixProductOperator(std::move(sites));
  }

  /// Tensor product of single-qubit 2x2 operators.
  static MatrixProductOperator product(const std::vector<Matrix>& ops) {
    std::vector<SiteTensor> sites;
    for (const auto& op : ops) {
      if (op.rows() != 2 || op.cols() != 2) throw DimensionError("product: single-site operators must be 2x2");
      SiteTensor t(1, 4, 1);
      for (Index o = 0; o < 2; ++o)
        for (Index i = 0; i < 2; ++i) t(0, op_index(o, i), 0) = op(o, i);
      sites.push_back(std::move(t));
    }
    return MatrixProductOperator(std::move(sites));
  }

  Index length() const { return static_cast<Index>(sites_.size()); }
  const SiteTensor& site(Index k) const { return sites_.at(static_cast<std::size_t>(k)); }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  std::vector<Index> bond_dims() const { return chain::bond_dims(sites_); }
  Index max_bond() const {
    Index m = 1;
    for (Index d : bond_dims()) m = std::max(m, d);
    return m;
  }

 private:
  std::vector<SiteTensor> sites_;
};

/// Slice W^{out,in} of an operator site.
inline SiteTensor::ConstSlice op_slice(const SiteTensor& t, Index out, Index in) { return t.slice(op_index(out, in)); }

inline MatrixProductOperator scaled(const MatrixProductOperator& op, cplx factor) {
  auto sites = op.sites();
  chain::scale(sites, factor);
  return MatrixProductOperator(std::move(sites));
}

/// Hermitian adjoint: conjugate entries and swap out/in.
inline MatrixProductOperator adjoint(const MatrixProductOperator& op) {
  std::vector<SiteTensor> sites;
  for (const auto& t : op.sites()) {
    SiteTensor a(t.left_dim(), 4, t.right_dim());
    for (Index o = 0; o < 2; ++o)
      for (Index i = 0; i < 2; ++i) a.slice(op_index(o, i)) = t.slice(op_index(i, o)).conjugate();
    sites.push_back(std::move(a));
  }
  return MatrixProductOperator(std::move(sites));
}

inline cplx trace(const MatrixProductOperator& op) {
  Matrix m = Matrix::Identity(1, 1);
  for (const auto& t : op.sites()) m = m * (t.slice(op_index(0, 0)) + t.slice(op_index(1, 1)));
  return m(0, 0);
}

/// Frobenius inner product tr(a^dagger b).
inline cplx frobenius_inner(const MatrixProductOperator& a, const MatrixProductOperator& b) {
  return chain::inner(a.sites(), b.sites());
}

inline double frobenius_norm(const MatrixProductOperator& op) {
  return std::sqrt(std::max(0.0, frobenius_inner(op, op).real()));
}

/// Sum a + b by direct sum of the bond spaces (bond dims add, no compression).
inline MatrixProductOperator add(const MatrixProductOperator& a, const MatrixProductOperator& b) {
  if (a.length() != b.length()) throw DimensionError("add: operator lengths differ");
  const Index n = a.length();
  if (n == 1) {
    SiteTensor t(1, 4, 1, a.site(0).data() + b.site(0).data());
    return MatrixProductOperator({t});
  }
  std::vector<SiteTensor> sites;
  for (Index k = 0; k < n; ++k) {
    const auto& x = a.site(k);
    const auto& y = b.site(k);
    const Index left = k == 0 ? 1 : x.left_dim() + y.left_dim();
    const Index right = k == n - 1 ? 1 : x.right_dim() + y.right_dim();
    SiteTensor t(left, 4, right);
    for (Index p = 0; p < 4; ++p) {
      auto s = t.slice(p);
      const Index yl = k == 0 ? 0 : x.left_dim();
      const Index yr = k == n - 1 ? 0 : x.right_dim();
      s.block(0, 0, x.left_dim(), x.right_dim()) = x.slice(p);
      s.block(yl, yr, y.left_dim(), y.right_dim()) += y.slice(p);
    }
    sites.push_back(std::move(t));
  }
  return MatrixProductOperator(std::move(sites));
}

struct CompressedOperator {
  MatrixProductOperator op;
  /// sqrt of the summed discarded squared singular values (Frobenius norm).
  double truncation_error = 0.0;
};

inline CompressedOperator compress(const MatrixProductOperator& op, const Truncation& trunc) {
  if (trunc.max_bond < 1) throw RangeError("compress: max_bond must be at least 1");
  auto sites = op.sites();
  auto report = chain::compress_in_place(sites, trunc);
  return {MatrixProductOperator(std::move(sites)), std::sqrt(report.discarded_weight)};
}

struct OperatorProduct {
  MatrixProductOperator op;
  double truncation_error = 0.0;
  /// Bond dimensions D_0..D_n of the raw product before any compression.
  std::vector<Index> pre_compression_bonds;
};

/// Product a*b. The raw product has bond dimension D(a)*D(b) at every cut;
/// it is then compressed with `trunc` unless `compress_result` is false.
inline OperatorProduct multiply_mpo(const MatrixProductOperator& a, const MatrixProductOperator& b,
                                    const Truncation& trunc, bool compress_result = true) {
  if (a.length() != b.length())
    throw DimensionError("multiply_mpo: lengths " + std::to_string(a.length()) + " and " + std::to_string(b.length()));
  std::vector<SiteTensor> sites;
  for (Index k = 0; k < a.length(); ++k) {
    const auto& x = a.site(k);
    const auto& y = b.site(k);
    SiteTensor t(x.left_dim() * y.left_dim(), 4, x.right_dim() * y.right_dim());
    for (Index o = 0; o < 2; ++o)
      for (Index i = 0; i < 2; ++i) {
        Matrix acc = Matrix::Zero(t.left_dim(), t.right_dim());
        for (Index m = 0; m < 2; ++m) acc += kron(op_slice(x, o, m), op_slice(y, m, i));
        t.slice(op_index(o, i)) = acc;
      }
    sites.push_back(std::move(t));
  }
  OperatorProduct out{MatrixProductOperator(std::move(sites)), 0.0, {}};
  out.pre_compression_bonds = out.op.bond_dims();
  if (compress_result) {
    auto c = compress(out.op, trunc);
    out.op = std::move(c.op);
    out.truncation_error = c.truncation_error;
  }
  return out;
}

/// Dense 2^n x 2^n matrix, row = output index, qubit 0 most significant.
inline Matrix to_dense(const MatrixProductOperator& op, Index cap = kDenseOperatorCap) {
  if (op.length() > cap)
    throw CapExceeded("to_dense: " + std::to_string(op.length()) + " qubits exceeds the dense operator cap of " +
                      std::to_string(cap));
  const Vector v = chain::to_dense(op.sites());  // index sum_k (2 out_k + in_k) 4^{n-1-k}
  const Index n = op.length();
  const Index dim = pow2(n);
  Matrix m(dim, dim);
  for (Index idx = 0; idx < v.size(); ++idx) {
    Index row = 0, col = 0, rest = idx;
    for (Index k = n - 1; k >= 0; --k) {
      const Index p = rest % 4;
      rest /= 4;
      row |= (p / 2) << (n - 1 - k);
      col |= (p % 2) << (n - 1 - k);
    }
    m(row, col) = v[idx];
  }
  return m;
}

/// Successive-SVD construction from a dense operator.
inline MatrixProductOperator mpo_from_dense(const Matrix& m, const Truncation& trunc = Truncation::lossless(),
                                            double* truncation_error = nullptr) {
  Index n = 0;
  while (pow2(n) < m.rows()) ++n;
  if (m.rows() != m.cols() || pow2(n) != m.rows() || n == 0)
    throw DimensionError("mpo_from_dense: matrix must be 2^n x 2^n");
  Vector v(m.size());
  for (Index row = 0; row < m.rows(); ++row)
    for (Index col = 0; col < m.cols(); ++col) {
      Index idx = 0;
      for (Index k = 0; k < n; ++k) {
        const Index o = (row >> (n - 1 - k)) & 1;
        const Index i = (col >> (n - 1 - k)) & 1;
        idx = 4 * idx + op_index(o, i);
      }
      v[idx] = m(row, col);
    }
  double discarded = 0.0;
  auto sites = chain::from_dense(v, n, 4, trunc, &discarded);
  if (truncation_error) *truncation_error = std::sqrt(discarded);
  return MatrixProductOperator(std::move(sites));
}

}  // namespace mpqpt
