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

#include "mpqpt/circuit/circuit.hpp"
#include "mpqpt/tensor/mpo.hpp"

namespace mpqpt {

/// Relative cutoff for the operator Schmidt decomposition of a gate.
inline constexpr double kGateSchmidtTol = 1e-14;

/// MPO of a single gate on an n-qubit register. Two-qubit gates are split by
/// operator Schmidt decomposition; sites strictly between the two gate sites
/// carry the Schmidt bond through an identity.
inline MatrixProductOperator gate_to_mpo(const Gate& g, Index n) {
  std::vector<SiteTensor> sites;
  auto identity_site = [](Index bond) {
    SiteTensor t(bond, 4, bond);
    for (Index b = 0; b < bond; ++b) t(b, op_index(0, 0), b) = t(b, op_index(1, 1), b) = 1.0;
    return t;
  };
  if (!g.two_qubit()) {
    for (Index k = 0; k < n; ++k) {
      if (k != g.left) {
        sites.push_back(identity_site(1));
        continue;
      }
      SiteTensor t(1, 4, 1);
      for (Index o = 0; o < 2; ++o)
        for (Index i = 0; i < 2; ++i) t(0, op_index(o, i), 0) = g.matrix(o, i);
      sites.push_back(std::move(t));
    }
    return MatrixProductOperator(std::move(sites));
  }

  // R[(ol, il), (or, ir)] = G[(ol, or), (il, ir)]
  Matrix r(4, 4);
  for (Index ol = 0; ol < 2; ++ol)
    for (Index orr = 0; orr < 2; ++orr)
      for (Index il = 0; il < 2; ++il)
        for (Index ir = 0; ir < 2; ++ir) r(op_index(ol, il), op_index(orr, ir)) = g.matrix(2 * ol + orr, 2 * il + ir);
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  Index rank = 1;
  while (rank < 4 && s[rank] > kGateSchmidtTol * s[0]) ++rank;

  for (Index k = 0; k < n; ++k) {
    if (k < g.left || k > g.right) {
      sites.push_back(identity_site(1));
    } else if (k == g.left) {
      SiteTensor t(1, 4, rank);
      for (Index p = 0; p < 4; ++p)
        for (Index b = 0; b < rank; ++b) t(0, p, b) = svd.matrixU()(p, b) * std::sqrt(s[b]);
      sites.push_back(std::move(t));
    } else if (k == g.right) {
      SiteTensor t(rank, 4, 1);
      for (Index p = 0; p < 4; ++p)
        for (Index b = 0; b < rank; ++b) t(b, p, 0) = std::conj(svd.matrixV()(p, b)) * std::sqrt(s[b]);
      sites.push_back(std::move(t));
    } else {
      sites.push_back(identity_site(rank));
    }
  }
  return MatrixProductOperator(std::move(sites));
}

struct CircuitMpo {
  MatrixProductOperator op;
  /// Accumulated Frobenius truncation error divided by 2^{n/2}; bounds the
  /// normalized Choi-state distance from the exact circuit.
  double error_bound = 0.0;
  /// Largest bond seen at each cut (D_0..D_n) before any compression step.
  std::vector<Index> max_pre_compression_bonds;
};

namespace detail {

/// Applies a single-qubit gate to the output index of one site. Isometry
/// conditions are preserved, so the gauge is untouched.
inline void apply_single_site(SiteTensor& t, const Matrix& g) {
  SiteTensor out(t.left_dim(), 4, t.right_dim());
  for (Index o = 0; o < 2; ++o)
    for (Index i = 0; i < 2; ++i)
      out.slice(op_index(o, i)) = g(o, 0) * t.slice(op_index(0, i)) + g(o, 1) * t.slice(op_index(1, i));
  t = std::move(out);
}

/// Applies a gate on sites (k, k+1) of a chain whose orthogonality center is
/// at k, then splits with a truncated SVD; the center ends at k+1. Returns
/// the discarded weight, which is exact in this gauge.
inline double apply_adjacent(chain::Chain& c, std::size_t k, const Matrix& g, const Truncation& trunc) {
  const SiteTensor& a = c[k];
  const SiteTensor& b = c[k + 1];
  const Index dl = a.left_dim(), dr = b.right_dim();
  // theta[(l, pa), (pb, r)] before the gate
  const Matrix theta = a.left_grouped() * b.right_grouped();
  Matrix out = Matrix::Zero(dl * 4, 4 * dr);
  for (Index ol = 0; ol < 2; ++ol)
    for (Index orr = 0; orr < 2; ++orr)
      for (Index ml = 0; ml < 2; ++ml)
        for (Index mr = 0; mr < 2; ++mr) {
          const cplx w = g(2 * ol + orr, 2 * ml + mr);
          if (w == cplx(0.0)) continue;
          for (Index il = 0; il < 2; ++il)
            for (Index ir = 0; ir < 2; ++ir)
              for (Index r = 0; r < dr; ++r) {
                const Index src_col = op_index(mr, ir) + 4 * r;
                const Index dst_col = op_index(orr, ir) + 4 * r;
                out.block(dl * op_index(ol, il), dst_col, dl, 1) +=
                    w * theta.block(dl * op_index(ml, il), src_col, dl, 1);
              }
        }
  TruncatedSvd svd = truncated_svd(out, trunc);
  c[k] = SiteTensor::from_left_grouped(svd.u, dl, 4);
  c[k + 1] = SiteTensor::from_right_grouped(svd.s.asDiagonal() * svd.v.adjoint(), 4, dr);
  return svd.discarded_weight;
}

inline void move_center(chain::Chain& c, std::size_t& center, std::size_t target) {
  while (center < target) chain::shift_center_right(c, center++);
  while (center > target) chain::shift_center_left(c, center--);
}

}  // namespace detail

/// Multiplies the gate MPOs in circuit order, compressing after every step.
/// Single-qubit and nearest-neighbour gates are applied in place at the
/// orthogonality center, which is the same product followed by a truncation
/// of the one bond it changes.
inline CircuitMpo circuit_to_mpo(const Circuit& c, const Truncation& trunc = {}) {
  if (trunc.max_bond < 1) throw RangeError("circuit_to_mpo: max_bond must be at least 1");
  const Index n = c.qubits();
  CircuitMpo out{MatrixProductOperator::identity(n), 0.0, std::vector<Index>(static_cast<std::size_t>(n + 1), 1)};
  auto sites = out.op.sites();
  std::size_t center = 0;
  chain::canonicalize(sites, center);
  double fro = 0.0;
  auto record = [&](const std::vector<Index>& pre) {
    for (std::size_t i = 0; i < pre.size(); ++i)
      out.max_pre_compression_bonds[i] = std::max(out.max_pre_compression_bonds[i], pre[i]);
  };
  for (const auto& g : c.gates()) {
    if (!g.two_qubit()) {
      detail::apply_single_site(sites[static_cast<std::size_t>(g.left)], g.matrix);
      continue;
    }
    if (g.right == g.left + 1) {
      const auto k = static_cast<std::size_t>(g.left);
      auto pre = chain::bond_dims(sites);
      pre[k + 1] *= gate_to_mpo(g, n).bond_dims()[k + 1];
      record(pre);
      detail::move_center(sites, center, k);
      fro += std::sqrt(detail::apply_adjacent(sites, k, g.matrix, trunc));
      center = k + 1;
      continue;
    }
    auto step = multiply_mpo(gate_to_mpo(g, n), MatrixProductOperator(std::move(sites)), trunc);
    record(step.pre_compression_bonds);
    fro += step.truncation_error;
    sites = step.op.sites();
    center = 0;  // compress leaves the center on the first site
  }
  out.op = MatrixProductOperator(std::move(sites));
  out.error_bound = fro / std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  return out;
}

inline CircuitMpo circuit_to_mpo(const Circuit& c, Index max_bond, double svd_tol = kDefaultSvdTol) {
  return circuit_to_mpo(c, Truncation::bond(max_bond, svd_tol));
}

}  // namespace mpqpt
