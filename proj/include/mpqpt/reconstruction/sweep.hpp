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

// Sweeping machinery for sums of local window operators: the MPO of
// sum_k O_k (O_k acting on sites [k, k+r)), its environments with an MPS, and
// the effective one- and two-site operators.

#include <algorithm>
#include <functional>
#include <vector>

#include <unsupported/Eigen/CXX11/Tensor>

#include "mpqpt/tensor/mpo.hpp"
#include "mpqpt/tensor/mps.hpp"

namespace mpqpt::sweep {

/// MPO of sum_k O_k for dense window operators ops[k] on sites [k, k+r).
/// Built as a finite automaton: a "not started" and a "done" channel carry the
/// identity, and each window's exact operator Schmidt bonds run in between.
inline MatrixProductOperator window_sum_mpo(Index length, Index r, const std::vector<Matrix>& ops,
                                            double svd_tol = 1e-13) {
  if (static_cast<Index>(ops.size()) != length - r + 1) throw DimensionError("window_sum_mpo: one operator per window");
  std::vector<MatrixProductOperator> terms;
  for (const auto& o : ops) terms.push_back(mpo_from_dense(o));
  // channel offsets at each cut
  auto block_offset = [&](Index cut, Index window) {
    Index off = 2;
    for (Index k = std::max<Index>(0, cut - r + 1); k < window; ++k)
      if (k < cut && cut < k + r) off += terms[static_cast<std::size_t>(k)].bond_dims()[static_cast<std::size_t>(cut - k)];
    return off;
  };
  auto width = [&](Index cut) {
    Index w = 2;
    for (Index k = std::max<Index>(0, cut - r + 1); k <= std::min(cut, length - r); ++k)
      if (k < cut && cut < k + r) w += terms[static_cast<std::size_t>(k)].bond_dims()[static_cast<std::size_t>(cut - k)];
    return w;
  };
  constexpr Index kStart = 0, kDone = 1;
  std::vector<SiteTensor> sites;
  for (Index c = 0; c < length; ++c) {
    const Index wl = width(c), wr = width(c + 1);
    SiteTensor t(wl, 4, wr);
    for (Index o = 0; o < 2; ++o) {
      t(kStart, op_index(o, o), kStart) = 1.0;
      t(kDone, op_index(o, o), kDone) = 1.0;
    }
    for (Index k = std::max<Index>(0, c - r + 1); k <= std::min(c, length - r); ++k) {
      const Index m = c - k;
      const auto& s = terms[static_cast<std::size_t>(k)].site(m);
      const bool first = m == 0, last = m == r - 1;
      for (Index a = 0; a < s.left_dim(); ++a)
        for (Index b = 0; b < s.right_dim(); ++b) {
          const Index row = first ? kStart : block_offset(c, k) + a;
          const Index col = last ? kDone : block_offset(c + 1, k) + b;
          for (Index p = 0; p < 4; ++p) t(row, p, col) += s(a, p, b);
        }
    }
    sites.push_back(std::move(t));
  }
  // boundaries: enter in "not started", leave in "done"
  auto& first = sites.front();
  SiteTensor f(1, 4, first.right_dim());
  for (Index p = 0; p < 4; ++p)
    for (Index b = 0; b < first.right_dim(); ++b) f(0, p, b) = first(kStart, p, b);
  first = std::move(f);
  auto& last = sites.back();
  SiteTensor l(last.left_dim(), 4, 1);
  for (Index p = 0; p < 4; ++p)
    for (Index a = 0; a < last.left_dim(); ++a) l(a, p, 0) = last(a, p, kDone);
  last = std::move(l);
  MatrixProductOperator raw(std::move(sites));
  if (svd_tol <= 0.0) return raw;
  return compress(raw, Truncation{std::numeric_limits<Index>::max(), svd_tol}).op;
}

/// Environment tensor E(x, y, w) over two bond indices and the MPO bond.
/// Left environments hold (bra, ket, w); right environments (ket, bra, w).
using Env = Eigen::Tensor<cplx, 3>;

inline Env edge() {
  Env e(1, 1, 1);
  e.setConstant(1.0);
  return e;
}

namespace detail {

template <int N>
using Dims = Eigen::array<Eigen::IndexPair<Index>, N>;

inline Eigen::TensorMap<const Eigen::Tensor<cplx, 3>> site_map(const SiteTensor& a) {
  return {a.data().data(), a.left_dim(), a.phys_dim(), a.right_dim()};
}

/// Operator site as (w, in, out, w'), matching op_index(out, in) = in + 2 out.
inline Eigen::TensorMap<const Eigen::Tensor<cplx, 4>> op_map(const SiteTensor& w) {
  return {w.data().data(), w.left_dim(), 2, 2, w.right_dim()};
}

}  // namespace detail

/// L'(b', k', w') = sum W(w, i, o, w') conj(A(b, o, b')) L(b, k, w) A(k, i, k').
inline Env grow_left(const Env& l, const SiteTensor& a, const SiteTensor& w) {
  const auto am = detail::site_map(a);
  const Eigen::Tensor<cplx, 4> x = l.contract(am, detail::Dims<1>{{{1, 0}}});  // (b, w, i, k')
  const Eigen::Tensor<cplx, 4> y =
      x.contract(detail::op_map(w), detail::Dims<2>{{{1, 0}, {2, 1}}});  // (b, k', o, w')
  return am.conjugate().contract(y, detail::Dims<2>{{{0, 0}, {1, 2}}});             // (b', k', w')
}

/// R(k, b, w) = sum W(w, i, o, w') A(k, i, k') R'(k', b', w') conj(A(b, o, b')).
inline Env grow_right(const Env& r, const SiteTensor& a, const SiteTensor& w) {
  const auto am = detail::site_map(a);
  const Eigen::Tensor<cplx, 4> x = am.contract(r, detail::Dims<1>{{{2, 0}}});                // (k, i, b', w')
  const Eigen::Tensor<cplx, 4> y = x.contract(detail::op_map(w), detail::Dims<2>{{{1, 1}, {3, 3}}});  // (k, b', w, o)
  const Eigen::Tensor<cplx, 3> z = y.contract(am.conjugate(), detail::Dims<2>{{{1, 2}, {3, 1}}});     // (k, w, b)
  return z.shuffle(Eigen::array<Index, 3>{0, 2, 1});
}

/// (H a)(b, o, b2) = sum L(b, k, w) W(w, i, o, w') A(k, i, k2) R(k2, b2, w').
inline SiteTensor apply_one(const Env& l, const SiteTensor& w, const Env& r, const SiteTensor& a) {
  const Eigen::Tensor<cplx, 4> x = l.contract(detail::site_map(a), detail::Dims<1>{{{1, 0}}});         // (b, w, i, k2)
  const Eigen::Tensor<cplx, 4> y = x.contract(detail::op_map(w), detail::Dims<2>{{{1, 0}, {2, 1}}});   // (b, k2, o, w')
  const Eigen::Tensor<cplx, 3> z = y.contract(r, detail::Dims<2>{{{1, 0}, {3, 2}}});                   // (b, o, b2)
  SiteTensor out(a.left_dim(), 2, a.right_dim());
  std::copy(z.data(), z.data() + z.size(), out.data().data());
  return out;
}

/// Two-site block theta stored as (Dl, 4, Dr) with p = i1 + 2 i2, so that
/// its data is the (2 Dl) x (2 Dr) matrix theta[(l, i1), (i2, r)].
inline SiteTensor merge(const SiteTensor& a, const SiteTensor& b) {
  const Matrix m = a.left_grouped() * b.right_grouped();
  return SiteTensor(a.left_dim(), 4, b.right_dim(), Eigen::Map<const Vector>(m.data(), m.size()));
}

inline Index pair_index(Index i1, Index i2) { return i1 + 2 * i2; }

inline SiteTensor apply_two(const Env& l, const SiteTensor& w1, const SiteTensor& w2, const Env& r,
                            const SiteTensor& theta) {
  const Eigen::TensorMap<const Eigen::Tensor<cplx, 4>> t(theta.data().data(), theta.left_dim(), 2, 2,
                                                         theta.right_dim());
  const Eigen::Tensor<cplx, 5> x1 = l.contract(t, detail::Dims<1>{{{1, 0}}});                         // (b, w, i1, i2, k2)
  const Eigen::Tensor<cplx, 5> x2 = x1.contract(detail::op_map(w1), detail::Dims<2>{{{1, 0}, {2, 1}}});  // (b, i2, k2, o1, wm)
  const Eigen::Tensor<cplx, 5> x3 = x2.contract(detail::op_map(w2), detail::Dims<2>{{{1, 1}, {4, 0}}});  // (b, k2, o1, o2, wr)
  const Eigen::Tensor<cplx, 4> x4 = x3.contract(r, detail::Dims<2>{{{1, 0}, {4, 2}}});                 // (b, o1, o2, b2)
  SiteTensor out(theta.left_dim(), 4, theta.right_dim());
  std::copy(x4.data(), x4.data() + x4.size(), out.data().data());
  return out;
}

/// Largest-eigenvalue eigenvector of a Hermitian operator given by its
/// action, Lanczos with full reorthogonalization started from v0.
inline std::pair<double, Vector> lanczos_top(const std::function<Vector(const Vector&)>& apply, Vector v0,
                                             Index max_iter = 40, double tol = 1e-13) {
  const Index dim = v0.size();
  v0.normalize();
  std::vector<Vector> basis{v0};
  std::vector<double> alpha, beta;
  double top = -1e300;
  RealVector ritz;
  for (Index it = 0; it < std::min(max_iter, dim); ++it) {
    Vector w = apply(basis.back());
    alpha.push_back(basis.back().dot(w).real());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b * b.dot(w);
    const auto m = static_cast<Index>(alpha.size());
    RealMatrix tri = RealMatrix::Zero(m, m);
    for (Index k = 0; k < m; ++k) {
      tri(k, k) = alpha[static_cast<std::size_t>(k)];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(tri);
    const double next = es.eigenvalues()(m - 1);
    ritz = es.eigenvectors().col(m - 1);
    const double nb = w.norm();
    const bool done = std::abs(next - top) < tol * std::max(1.0, std::abs(next)) || nb < 1e-12;
    top = next;
    if (done) break;
    beta.push_back(nb);
    basis.push_back(w / nb);
  }
  Vector out = Vector::Zero(dim);
  for (Index k = 0; k < ritz.size(); ++k) out += ritz(k) * basis[static_cast<std::size_t>(k)];
  return {top, out.normalized()};
}

struct SweepResult {
  MatrixProductState state;
  std::vector<double> eigenvalues;  // after each full sweep
};

/// Two-site sweeps maximizing <psi|H|psi> over normalized MPS with bonds up
/// to `trunc.max_bond`.
inline SweepResult maximize_expectation(const MatrixProductOperator& h, const MatrixProductState& start,
                                        const Truncation& trunc, Index max_sweeps, double tol = 1e-10) {
  const Index L = start.length();
  if (h.length() != L) throw DimensionError("maximize_expectation: operator and state lengths differ");
  SweepResult res;
  auto c = start.sites();
  std::size_t center = 0;
  chain::canonicalize(c, center);
  c[0].data() /= c[0].data().norm();
  if (L == 1) {
    Env l = edge(), r = edge();
    auto top = lanczos_top([&](const Vector& x) { return apply_one(l, h.site(0), r, SiteTensor(1, 2, 1, x)).data(); },
                           c[0].data());
    c[0] = SiteTensor(1, 2, 1, top.second);
    res.eigenvalues.push_back(top.first);
    res.state = MatrixProductState(std::move(c), CanonicalForm::mixed(0));
    return res;
  }
  std::vector<Env> left(static_cast<std::size_t>(L + 1)), right(static_cast<std::size_t>(L + 1));
  left[0] = edge();
  right[static_cast<std::size_t>(L)] = edge();
  for (Index k = L - 1; k >= 1; --k)
    right[static_cast<std::size_t>(k)] = grow_right(right[static_cast<std::size_t>(k + 1)], c[static_cast<std::size_t>(k)], h.site(k));
  double previous = -1e300;
  auto optimize = [&](Index j) {
    const auto& l = left[static_cast<std::size_t>(j)];
    const auto& r = right[static_cast<std::size_t>(j + 2)];
    SiteTensor theta = merge(c[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(j + 1)]);
    const Index dl = theta.left_dim(), dr = theta.right_dim();
    auto top = lanczos_top(
        [&](const Vector& x) { return apply_two(l, h.site(j), h.site(j + 1), r, SiteTensor(dl, 4, dr, x)).data(); },
        theta.data());
    const Eigen::Map<const Matrix> m(top.second.data(), 2 * dl, 2 * dr);
    return std::make_pair(top.first, truncated_svd(m, trunc));
  };
  for (Index sweep = 0; sweep < max_sweeps; ++sweep) {
    double value = 0.0;
    for (Index j = 0; j + 1 < L; ++j) {
      auto [e, svd] = optimize(j);
      value = e;
      c[static_cast<std::size_t>(j)] = SiteTensor::from_left_grouped(svd.u, c[static_cast<std::size_t>(j)].left_dim(), 2);
      c[static_cast<std::size_t>(j + 1)] =
          SiteTensor::from_right_grouped(svd.s.asDiagonal() * svd.v.adjoint(), 2, c[static_cast<std::size_t>(j + 1)].right_dim());
      c[static_cast<std::size_t>(j + 1)].data() /= c[static_cast<std::size_t>(j + 1)].data().norm();
      left[static_cast<std::size_t>(j + 1)] = grow_left(left[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(j)], h.site(j));
    }
    for (Index j = L - 2; j >= 0; --j) {
      auto [e, svd] = optimize(j);
      value = e;
      c[static_cast<std::size_t>(j + 1)] = SiteTensor::from_right_grouped(svd.v.adjoint(), 2, c[static_cast<std::size_t>(j + 1)].right_dim());
      Matrix us = svd.u * svd.s.asDiagonal();
      c[static_cast<std::size_t>(j)] = SiteTensor::from_left_grouped(us, c[static_cast<std::size_t>(j)].left_dim(), 2);
      c[static_cast<std::size_t>(j)].data() /= c[static_cast<std::size_t>(j)].data().norm();
      right[static_cast<std::size_t>(j + 1)] = grow_right(right[static_cast<std::size_t>(j + 2)], c[static_cast<std::size_t>(j + 1)], h.site(j + 1));
    }
    res.eigenvalues.push_back(value);
    if (std::abs(value - previous) < tol * std::max(1.0, std::abs(value))) break;
    previous = value;
  }
  res.state = MatrixProductState(std::move(c), CanonicalForm::mixed(0));
  return res;
}

}  // namespace mpqpt::sweep
