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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpqpt/tensor/chain.hpp"

namespace mpqpt {

/// Gauge of a chain. For `mixed`, sites before `center` are left-isometric
/// and sites after it are right-isometric. `left` means every site but the
/// last is left-isometric, `right` every site but the first is right-isometric.
struct CanonicalForm {
  enum class Kind { none, left, right, mixed };
  Kind kind = Kind::none;
  Index center = 0;

  static CanonicalForm none() { return {}; }
  static CanonicalForm mixed(Index c) { return {Kind::mixed, c}; }

  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

/// Open-boundary matrix product state of qubits: sites A^(k) with shape
/// (D_{k-1}, 2, D_k), D_0 = D_L = 1. Site 0 is the most significant qubit in
/// dense expansions.
class MatrixProductState {
 public:
  MatrixProductState() = default;
  explicit MatrixProductState(std::vector<SiteTensor> sites, CanonicalForm form = {})
      : sites_(std::move(sites)), form_(form) {
    chain::validate(sites_, 2);
    if (form_.kind == CanonicalForm::Kind::mixed && (form_.center < 0 || form_.center >= length()))
      throw RangeError("canonical center out of range");
  }

  /// Product state from single-qubit amplitudes (each of size 2).
  static MatrixProductState product(std::span<const Vector> amplitudes) {
    std::vector<SiteTensor> sites;
    for (const auto& a : amplitudes) {
      if (a.size() != 2) throw DimensionError("product state amplitudes must have 2 entries");
      sites.emplace_back(1, 2, 1, a);
    }
    return MatrixProductState(std::move(sites));
  }

  /// Computational basis state, bits[k] in {0, 1}.
  static MatrixProductState basis(std::span<const int> bits) {
    std::vector<Vector> amps;
    for (int b : bits) {
      Vector v = Vector::Zero(2);
      v[b ? 1 : 0] = 1.0;
      amps.push_back(v);
    }
    return product(amps);
  }

  Index length() const { return static_cast<Index>(sites_.size()); }
  const SiteTensor& site(Index k) const { return sites_.at(static_cast<std::size_t>(k)); }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  CanonicalForm canonical_form() const { return form_; }
  std::vector<Index> bond_dims() const { return chain::bond_dims(sites_); }
  Index max_bond() const {
    Index m = 1;
    for (Index d : bond_dims()) m = std::max(m, d);
    return m;
  }

 private:
  std::vector<SiteTensor> sites_;
  CanonicalForm form_;
};

inline cplx inner(const MatrixProductState& psi, const MatrixProductState& phi) {
  if (psi.length() != phi.length())
    throw DimensionError("inner: lengths " + std::to_string(psi.length()) + " and " + std::to_string(phi.length()));
  return chain::inner(psi.sites(), phi.sites());
}

inline double norm(const MatrixProductState& psi) { return std::sqrt(std::max(0.0, inner(psi, psi).real())); }

namespace detail {
/// Index of the site that carries the norm under the recorded gauge.
inline std::size_t norm_site(const MatrixProductState& psi) {
  const auto form = psi.canonical_form();
  switch (form.kind) {
    case CanonicalForm::Kind::mixed: return static_cast<std::size_t>(form.center);
    case CanonicalForm::Kind::left: return static_cast<std::size_t>(psi.length() - 1);
    default: return 0;
  }
}
}  // namespace detail

inline MatrixProductState scaled(const MatrixProductState& psi, cplx factor) {
  auto sites = psi.sites();
  sites[detail::norm_site(psi)].data() *= factor;
  return MatrixProductState(std::move(sites), psi.canonical_form());
}

inline MatrixProductState normalized(const MatrixProductState& psi) {
  const double n = norm(psi);
  if (n == 0.0) throw PreconditionError("cannot normalize the zero state");
  return scaled(psi, 1.0 / n);
}

/// Mixed-canonical copy with orthogonality center at `center`.
inline MatrixProductState canonicalized(const MatrixProductState& psi, Index center) {
  if (center < 0 || center >= psi.length()) throw RangeError("canonical center out of range");
  auto sites = psi.sites();
  chain::canonicalize(sites, static_cast<std::size_t>(center));
  return MatrixProductState(std::move(sites), CanonicalForm::mixed(center));
}

/// Largest deviation from the isometry conditions implied by the recorded
/// canonical form; 0 for `none`.
inline double canonical_error(const MatrixProductState& psi) {
  const auto form = psi.canonical_form();
  double err = 0.0;
  const Index L = psi.length();
  Index lo = 0, hi = 0;  // left-isometric on [0, lo), right-isometric on (hi, L)
  switch (form.kind) {
    case CanonicalForm::Kind::none: return 0.0;
    case CanonicalForm::Kind::left: lo = L - 1; hi = L - 1; break;
    case CanonicalForm::Kind::right: lo = 0; hi = 0; break;
    case CanonicalForm::Kind::mixed: lo = form.center; hi = form.center; break;
  }
  for (Index k = 0; k < lo; ++k) err = std::max(err, chain::left_isometry_error(psi.site(k)));
  for (Index k = hi + 1; k < L; ++k) err = std::max(err, chain::right_isometry_error(psi.site(k)));
  return err;
}

struct CompressedState {
  MatrixProductState state;
  /// sqrt of the summed discarded squared singular values.
  double truncation_error = 0.0;
};

/// SVD-sweep compression. The output is mixed-canonical with center 0 and
/// bond dimensions at most `trunc.max_bond`.
inline CompressedState compress(const MatrixProductState& psi, const Truncation& trunc) {
  if (trunc.max_bond < 1) throw RangeError("compress: max_bond must be at least 1");
  auto sites = psi.sites();
  auto report = chain::compress_in_place(sites, trunc);
  return {MatrixProductState(std::move(sites), CanonicalForm::mixed(0)), std::sqrt(report.discarded_weight)};
}

inline CompressedState compress(const MatrixProductState& psi, Index max_bond, double svd_tol = kDefaultSvdTol) {
  return compress(psi, Truncation::bond(max_bond, svd_tol));
}

/// Dense big-endian amplitude vector. Refuses above `cap` sites.
inline Vector to_dense(const MatrixProductState& psi, Index cap = kDenseStateCap) {
  if (psi.length() > cap)
    throw CapExceeded("to_dense: " + std::to_string(psi.length()) + " sites exceeds the dense cap of " +
                      std::to_string(cap));
  return chain::to_dense(psi.sites());
}

/// Successive-SVD construction from a dense big-endian vector.
inline MatrixProductState mps_from_dense(const Vector& v, const Truncation& trunc = Truncation::lossless()) {
  Index length = 0;
  while (pow2(length) < v.size()) ++length;
  if (pow2(length) != v.size() || length == 0) throw DimensionError("mps_from_dense: size must be a power of two");
  auto sites = chain::from_dense(v, length, 2, trunc);
  return MatrixProductState(std::move(sites), CanonicalForm{CanonicalForm::Kind::left, length - 1});
}

}  // namespace mpqpt
