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

// Operations on open-boundary chains of rank-3 tensors, shared by states
// (physical dimension 2) and operators (fused physical dimension 4).

#include <cmath>
#include <string>
#include <vector>

#include "mpqpt/tensor/linalg.hpp"
#include "mpqpt/tensor/site_tensor.hpp"

namespace mpqpt::chain {

using Chain = std::vector<SiteTensor>;

inline void validate(const Chain& c, Index phys) {
  if (c.empty()) throw DimensionError("chain must have at least one site");
  if (c.front().left_dim() != 1) throw DimensionError("left boundary bond must be 1");
  if (c.back().right_dim() != 1) throw DimensionError("right boundary bond must be 1");
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k].phys_dim() != phys)
      throw DimensionError("site " + std::to_string(k) + " has physical dimension " +
                           std::to_string(c[k].phys_dim()) + ", expected " + std::to_string(phys));
    if (k + 1 < c.size() && c[k].right_dim() != c[k + 1].left_dim())
      throw DimensionError("bond mismatch between sites " + std::to_string(k) + " and " + std::to_string(k + 1));
  }
}

/// Bond dimensions D_0 ... D_L (boundary bonds included).
inline std::vector<Index> bond_dims(const Chain& c) {
  std::vector<Index> d;
  d.reserve(c.size() + 1);
  d.push_back(c.front().left_dim());
  for (const auto& t : c) d.push_back(t.right_dim());
  return d;
}

/// G' = sum_p A_p^dagger G B_p.
inline Matrix transfer_left(const Matrix& g, const SiteTensor& a, const SiteTensor& b) {
  Matrix out = Matrix::Zero(a.right_dim(), b.right_dim());
  for (Index p = 0; p < a.phys_dim(); ++p) out.noalias() += a.slice(p).adjoint() * (g * b.slice(p));
  return out;
}

/// R' = sum_p B_p R A_p^dagger.
inline Matrix transfer_right(const Matrix& r, const SiteTensor& a, const SiteTensor& b) {
  Matrix out = Matrix::Zero(b.left_dim(), a.left_dim());
  for (Index p = 0; p < a.phys_dim(); ++p) out.noalias() += b.slice(p) * (r * a.slice(p).adjoint());
  return out;
}

/// <a|b> summed over all physical indices.
inline cplx inner(const Chain& a, const Chain& b) {
  if (a.size() != b.size()) throw DimensionError("inner: chains differ in length");
  Matrix g = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].phys_dim() != b[k].phys_dim()) throw DimensionError("inner: physical dimension mismatch");
    g = transfer_left(g, a[k], b[k]);
  }
  return g(0, 0);
}

/// Left environments: env[k] contracts sites [0, k) of <c|c>, env[0] = 1.
inline std::vector<Matrix> left_environments(const Chain& c) {
  std::vector<Matrix> env(c.size() + 1);
  env[0] = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < c.size(); ++k) env[k + 1] = transfer_left(env[k], c[k], c[k]);
  return env;
}

/// Right environments: env[k] contracts sites [k, L) of <c|c>, env[L] = 1.
inline std::vector<Matrix> right_environments(const Chain& c) {
  std::vector<Matrix> env(c.size() + 1);
  env[c.size()] = Matrix::Identity(1, 1);
  for (std::size_t k = c.size(); k-- > 0;) env[k] = transfer_right(env[k + 1], c[k], c[k]);
  return env;
}

/// Moves the orthogonality center from site k to k+1 with a QR step.
inline void shift_center_right(Chain& c, std::size_t k) {
  auto [q, r] = thin_qr(c[k].left_grouped());
  const Index phys = c[k].phys_dim();
  const Index left = c[k].left_dim();
  c[k] = SiteTensor::from_left_grouped(q, left, phys);
  c[k + 1] = left_multiply(r, c[k + 1]);
}

/// Moves the orthogonality center from site k to k-1 with an LQ step.
inline void shift_center_left(Chain& c, std::size_t k) {
  auto [l, q] = thin_lq(c[k].right_grouped());
  const Index phys = c[k].phys_dim();
  const Index right = c[k].right_dim();
  c[k] = SiteTensor::from_right_grouped(q, phys, right);
  c[k - 1] = right_multiply(c[k - 1], l);
}

/// Left-canonical on [0, center), right-canonical on (center, L).
inline void canonicalize(Chain& c, std::size_t center) {
  for (std::size_t k = 0; k < center; ++k) shift_center_right(c, k);
  for (std::size_t k = c.size() - 1; k > center; --k) shift_center_left(c, k);
}

struct CompressReport {
  double discarded_weight = 0.0;
  std::vector<Index> pre_bonds;
};

/// Left-canonicalizes exactly, then truncates in a right-to-left SVD sweep.
/// The result is right-canonical on sites 1..L-1 with the center at site 0.
inline CompressReport compress_in_place(Chain& c, const Truncation& trunc) {
  CompressReport report;
  report.pre_bonds = bond_dims(c);
  for (std::size_t k = 0; k + 1 < c.size(); ++k) shift_center_right(c, k);
  for (std::size_t k = c.size() - 1; k > 0; --k) {
    TruncatedSvd svd = truncated_svd(c[k].right_grouped(), trunc);
    report.discarded_weight += svd.discarded_weight;
    const Index phys = c[k].phys_dim();
    const Index right = c[k].right_dim();
    c[k] = SiteTensor::from_right_grouped(svd.v.adjoint(), phys, right);
    Matrix us = svd.u * svd.s.asDiagonal();
    c[k - 1] = right_multiply(c[k - 1], us);
  }
  return report;
}

/// Maximum deviation of a left-canonical site from the isometry condition.
inline double left_isometry_error(const SiteTensor& t) {
  Matrix g = t.left_grouped().adjoint() * t.left_grouped();
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

inline double right_isometry_error(const SiteTensor& t) {
  Matrix g = t.right_grouped() * t.right_grouped().adjoint();
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

inline void scale(Chain& c, cplx factor) {
  // Spread evenly so no single tensor carries an extreme magnitude.
  if (c.empty()) return;
  const double mag = std::abs(factor);
  const cplx phase = mag > 0 ? factor / mag : cplx{0.0};
  const double per_site = std::pow(mag, 1.0 / static_cast<double>(c.size()));
  for (auto& t : c) t.data() *= per_site;
  c.front().data() *= phase;
}

/// Tensor-train decomposition of a big-endian vector of phys^L entries.
inline Chain from_dense(const Vector& v, Index length, Index phys, const Truncation& trunc, double* discarded = nullptr) {
  if (ipow(phys, length) != v.size()) throw DimensionError("from_dense: vector size is not phys^length");
  Chain c;
  c.reserve(static_cast<std::size_t>(length));
  Matrix rest = Eigen::Map<const Matrix>(v.data(), 1, v.size());
  double weight = 0.0;
  for (Index k = 0; k + 1 < length; ++k) {
    const Index left = rest.rows();
    const Index tail = rest.cols() / phys;
    Matrix grouped(left * phys, tail);
    for (Index l = 0; l < left; ++l)
      for (Index p = 0; p < phys; ++p) grouped.row(l + left * p) = rest.block(l, p * tail, 1, tail);
    TruncatedSvd svd = truncated_svd(grouped, trunc);
    weight += svd.discarded_weight;
    c.push_back(SiteTensor::from_left_grouped(svd.u, left, phys));
    rest = svd.s.asDiagonal() * svd.v.adjoint();
  }
  SiteTensor last(rest.rows(), phys, 1);
  for (Index l = 0; l < rest.rows(); ++l)
    for (Index p = 0; p < phys; ++p) last(l, p, 0) = rest(l, p);
  c.push_back(std::move(last));
  if (discarded) *discarded = weight;
  return c;
}

/// Dense big-endian expansion of a chain.
inline Vector to_dense(const Chain& c) {
  std::vector<Matrix> partial{Matrix::Identity(1, 1)};
  for (const auto& t : c) {
    std::vector<Matrix> next;
    next.reserve(partial.size() * static_cast<std::size_t>(t.phys_dim()));
    for (const auto& m : partial)
      for (Index p = 0; p < t.phys_dim(); ++p) next.push_back(m * t.slice(p));
    partial = std::move(next);
  }
  Vector v(static_cast<Index>(partial.size()));
  for (std::size_t i = 0; i < partial.size(); ++i) v[static_cast<Index>(i)] = partial[i](0, 0);
  return v;
}

}  // namespace mpqpt::chain
