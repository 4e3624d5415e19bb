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

#include <optional>
#include <string>
#include <vector>

#include "mpqpt/tensor/mpo.hpp"
#include "mpqpt/tensor/mps.hpp"

namespace mpqpt {

struct ApplyOptions {
  Truncation truncation{};
  bool normalize = false;
  /// Skip the compression sweep entirely (bond dims multiply).
  bool compress = true;
};

/// Applies `op` to the sites `targets` of `psi` (strictly increasing, one per
/// operator site); the remaining sites are acted on by the identity. With an
/// empty `targets` the operator must span the whole chain.
inline CompressedState apply_mpo(const MatrixProductOperator& op, const MatrixProductState& psi,
                                 std::vector<Index> targets = {}, const ApplyOptions& opts = {}) {
  const Index L = psi.length();
  if (targets.empty()) {
    if (op.length() != L)
      throw DimensionError("apply_mpo: operator has " + std::to_string(op.length()) + " sites, state has " +
                           std::to_string(L));
    for (Index k = 0; k < L; ++k) targets.push_back(k);
  }
  if (static_cast<Index>(targets.size()) != op.length())
    throw DimensionError("apply_mpo: need one target site per operator site");
  for (std::size_t m = 0; m < targets.size(); ++m) {
    if (targets[m] < 0 || targets[m] >= L) throw RangeError("apply_mpo: target site out of range");
    if (m > 0 && targets[m] <= targets[m - 1]) throw RangeError("apply_mpo: targets must be strictly increasing");
  }

  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<std::size_t>(L));
  std::size_t next = 0;  // next operator site
  for (Index s = 0; s < L; ++s) {
    const auto& a = psi.site(s);
    const bool is_target = next < targets.size() && targets[next] == s;
    if (is_target) {
      const auto& w = op.site(static_cast<Index>(next));
      SiteTensor t(w.left_dim() * a.left_dim(), 2, w.right_dim() * a.right_dim());
      for (Index o = 0; o < 2; ++o) {
        Matrix acc = Matrix::Zero(t.left_dim(), t.right_dim());
        for (Index i = 0; i < 2; ++i) acc += kron(op_slice(w, o, i), a.slice(i));
        t.slice(o) = acc;
      }
      sites.push_back(std::move(t));
      ++next;
    } else {
      // Identity on the physical index, carrying the operator bond through.
      const Index carried = (next == 0 || next == targets.size()) ? 1 : op.site(static_cast<Index>(next)).left_dim();
      SiteTensor t(carried * a.left_dim(), 2, carried * a.right_dim());
      const Matrix id = Matrix::Identity(carried, carried);
      for (Index i = 0; i < 2; ++i) t.slice(i) = kron(id, a.slice(i));
      sites.push_back(std::move(t));
    }
  }
  MatrixProductState raw(std::move(sites));
  CompressedState out{raw, 0.0};
  if (opts.compress) out = compress(raw, opts.truncation);
  if (opts.normalize) out.state = normalized(out.state);
  return out;
}

/// Reduced density matrix of `width` consecutive sites starting at `start`.
struct WindowDensityMatrix {
  Index start = 0;
  Index width = 0;
  Matrix matrix;  // 2^width x 2^width, first window site most significant
};

namespace detail {

/// Slices of the contracted window: result[c] = A_start^{c_0} ... A_{start+w-1}^{c_{w-1}}
/// with c big-endian over the window.
inline std::vector<Matrix> window_products(const std::vector<SiteTensor>& sites, Index start, Index width) {
  std::vector<Matrix> partial;
  const auto& first = sites[static_cast<std::size_t>(start)];
  for (Index p = 0; p < first.phys_dim(); ++p) partial.push_back(first.slice(p));
  for (Index k = start + 1; k < start + width; ++k) {
    const auto& t = sites[static_cast<std::size_t>(k)];
    std::vector<Matrix> next;
    next.reserve(partial.size() * static_cast<std::size_t>(t.phys_dim()));
    for (const auto& m : partial)
      for (Index p = 0; p < t.phys_dim(); ++p) next.push_back(m * t.slice(p));
    partial = std::move(next);
  }
  return partial;
}

/// rho[a, b] = tr(G W_a R W_b^dagger) for left environment G and right
/// environment R (as produced by chain::left/right_environments).
inline Matrix window_density(const std::vector<Matrix>& w, const Matrix& g, const Matrix& r) {
  const Index dim = static_cast<Index>(w.size());
  const Index rows = w.front().rows();
  const Index cols = w.front().cols();
  Matrix x(dim, rows * cols), y(dim, rows * cols);
  for (Index a = 0; a < dim; ++a) {
    Matrix gwr = g * w[static_cast<std::size_t>(a)] * r;
    x.row(a) = Eigen::Map<const Eigen::RowVectorXcd>(gwr.data(), gwr.size());
    y.row(a) = Eigen::Map<const Eigen::RowVectorXcd>(w[static_cast<std::size_t>(a)].data(), rows * cols);
  }
  return x * y.adjoint();
}

}  // namespace detail

/// Exact partial trace over all sites outside [start, start + width). The
/// result is normalized to unit trace.
inline WindowDensityMatrix reduced_density(const MatrixProductState& psi, Index start, Index width) {
  if (width < 1 || start < 0 || start + width > psi.length())
    throw RangeError("reduced_density: window [" + std::to_string(start) + ", " + std::to_string(start + width) +
                     ") outside chain of length " + std::to_string(psi.length()));
  const auto& sites = psi.sites();
  Matrix g = Matrix::Identity(1, 1);
  for (Index k = 0; k < start; ++k) g = chain::transfer_left(g, sites[static_cast<std::size_t>(k)], sites[static_cast<std::size_t>(k)]);
  Matrix r = Matrix::Identity(1, 1);
  for (Index k = psi.length() - 1; k >= start + width; --k)
    r = chain::transfer_right(r, sites[static_cast<std::size_t>(k)], sites[static_cast<std::size_t>(k)]);
  Matrix rho = detail::window_density(detail::window_products(sites, start, width), g, r);
  const cplx tr = rho.trace();
  if (std::abs(tr) == 0.0) throw PreconditionError("reduced_density: zero state");
  rho /= tr.real();
  return {start, width, hermitian_part(rho)};
}

/// Reduced density matrices of every window of `width` consecutive sites,
/// sharing the environment computation.
inline std::vector<WindowDensityMatrix> all_window_densities(const MatrixProductState& psi, Index width) {
  if (width < 1 || width > psi.length()) throw RangeError("all_window_densities: bad window width");
  const auto& sites = psi.sites();
  const auto left = chain::left_environments(sites);
  const auto right = chain::right_environments(sites);
  const double nrm = left.back()(0, 0).real();
  std::vector<WindowDensityMatrix> out;
  for (Index k = 0; k + width <= psi.length(); ++k) {
    Matrix rho = detail::window_density(detail::window_products(sites, k, width), left[static_cast<std::size_t>(k)],
                                        right[static_cast<std::size_t>(k + width)]);
    out.push_back({k, width, hermitian_part(rho / nrm)});
  }
  return out;
}

}  // namespace mpqpt
