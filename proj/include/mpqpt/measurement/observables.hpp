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

// Local Pauli measurement settings on a chain of L sites: a window of r
// consecutive sites starting at k, with one Pauli axis per window site.
//
// Outcomes s in {+1, -1}^r are encoded as an integer with one bit per window
// site, first site most significant, bit 0 meaning s = +1.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mpqpt/common.hpp"
#include "mpqpt/tensor/linalg.hpp"

namespace mpqpt {

struct ObservableSpec {
  Index k = 0;
  std::string alphas;  // one of 'x', 'y', 'z' per window site

  Index width() const { return static_cast<Index>(alphas.size()); }
  friend bool operator==(const ObservableSpec&, const ObservableSpec&) = default;
};

inline void validate(const ObservableSpec& spec, Index length) {
  if (spec.alphas.empty()) throw RangeError("ObservableSpec: empty window");
  for (char a : spec.alphas)
    if (a != 'x' && a != 'y' && a != 'z') throw RangeError(std::string("ObservableSpec: bad Pauli axis '") + a + "'");
  if (spec.k < 0 || spec.k + spec.width() > length)
    throw RangeError("ObservableSpec: window [" + std::to_string(spec.k) + ", " + std::to_string(spec.k + spec.width()) +
                     ") outside chain of length " + std::to_string(length));
}

/// All 3^r axis strings in lexicographic order (x < y < z).
inline std::vector<std::string> all_axis_strings(Index r) {
  std::vector<std::string> out{""};
  for (Index i = 0; i < r; ++i) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char a : {'x', 'y', 'z'}) next.push_back(s + a);
    out = std::move(next);
  }
  return out;
}

/// Every setting of width r on L sites, ordered by k then axis string:
/// (L - r + 1) * 3^r specs.
inline std::vector<ObservableSpec> all_specs(Index length, Index r) {
  if (r < 1 || r > length) throw RangeError("all_specs: need 1 <= r <= L");
  std::vector<ObservableSpec> out;
  const auto axes = all_axis_strings(r);
  for (Index k = 0; k + r <= length; ++k)
    for (const auto& a : axes) out.push_back({k, a});
  return out;
}

inline int outcome_sign(Index outcome, Index width, Index position) {
  return ((outcome >> (width - 1 - position)) & 1) ? -1 : 1;
}

/// Pauli eigenvector |alpha, s>.
inline Vector pauli_eigenstate(char alpha, int s) {
  Vector v(2);
  const double h = 1.0 / std::numbers::sqrt2;
  switch (alpha) {
    case 'x': v << h, (s > 0 ? h : -h); break;
    case 'y': v << h, (s > 0 ? cplx(0, h) : cplx(0, -h)); break;
    case 'z': v << (s > 0 ? 1.0 : 0.0), (s > 0 ? 0.0 : 1.0); break;
    default: throw RangeError(std::string("pauli_eigenstate: bad axis '") + alpha + "'");
  }
  return v;
}

/// Rows are <alpha, +1| and <alpha, -1|.
inline Matrix measurement_basis(char alpha) {
  Matrix m(2, 2);
  m.row(0) = pauli_eigenstate(alpha, 1).adjoint();
  m.row(1) = pauli_eigenstate(alpha, -1).adjoint();
  return m;
}

/// p(s) = <s| V rho V^dagger |s> with V the tensor product of the measurement
/// bases; rho is a 2^r x 2^r density matrix with the first site most
/// significant. Tiny negative values from rounding are clipped to zero.
inline std::vector<double> pauli_outcome_distribution(const Matrix& rho, const std::string& alphas) {
  Matrix v = Matrix::Identity(1, 1);
  for (char a : alphas) v = kron(v, measurement_basis(a));
  if (v.rows() != rho.rows()) throw DimensionError("pauli_outcome_distribution: window size mismatch");
  const Matrix rotated = v * rho * v.adjoint();
  std::vector<double> p(static_cast<std::size_t>(rotated.rows()));
  double total = 0.0;
  for (Index s = 0; s < rotated.rows(); ++s) {
    p[static_cast<std::size_t>(s)] = std::max(0.0, rotated(s, s).real());
    total += p[static_cast<std::size_t>(s)];
  }
  for (auto& x : p) x /= total;
  return p;
}

/// Partial trace of a density matrix on `width` qubits keeping the listed
/// positions (increasing), which become the new qubit order.
inline Matrix keep_positions(const Matrix& rho, Index width, const std::vector<Index>& keep) {
  const Index kd = pow2(static_cast<Index>(keep.size()));
  std::vector<Index> traced;
  for (Index q = 0, j = 0; q < width; ++q) {
    if (j < static_cast<Index>(keep.size()) && keep[static_cast<std::size_t>(j)] == q) {
      ++j;
      continue;
    }
    traced.push_back(q);
  }
  auto compose = [&](Index kept_bits, Index traced_bits) {
    Index idx = 0;
    for (std::size_t m = 0; m < keep.size(); ++m)
      idx |= ((kept_bits >> (keep.size() - 1 - m)) & 1) << (width - 1 - keep[m]);
    for (std::size_t m = 0; m < traced.size(); ++m)
      idx |= ((traced_bits >> (traced.size() - 1 - m)) & 1) << (width - 1 - traced[m]);
    return idx;
  };
  Matrix out = Matrix::Zero(kd, kd);
  for (Index t = 0; t < pow2(static_cast<Index>(traced.size())); ++t)
    for (Index a = 0; a < kd; ++a)
      for (Index b = 0; b < kd; ++b) out(a, b) += rho(compose(a, t), compose(b, t));
  return out;
}

// Pauli strings on r sites are coded in base 4, first site most significant,
// digit 0 = identity, 1 = x, 2 = y, 3 = z.

inline Index axis_digit(char a) { return a == 'x' ? 1 : a == 'y' ? 2 : 3; }

/// Code of the Pauli string that keeps axis alphas[i] where bit i of
/// `subset` is set (outcome bit convention) and the identity elsewhere.
inline Index pauli_code(const std::string& alphas, Index subset) {
  const auto r = static_cast<Index>(alphas.size());
  Index code = 0;
  for (Index i = 0; i < r; ++i)
    code = 4 * code + (((subset >> (r - 1 - i)) & 1) ? axis_digit(alphas[static_cast<std::size_t>(i)]) : 0);
  return code;
}

namespace detail {

/// In-place Walsh-Hadamard transform, v[s] -> sum_T (-1)^{|s & T|} v[T].
inline void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h *= 2)
    for (std::size_t i = 0; i < v.size(); i += 2 * h)
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
}

}  // namespace detail

namespace detail {

/// Entry (x, y) of a 2^r x 2^r matrix sits at the base-4 index with digit
/// 2 x_i + y_i per qubit, matching the Pauli code layout.
inline Index interleave(Index x, Index y, Index r) {
  Index idx = 0;
  for (Index i = r - 1; i >= 0; --i) idx = 4 * idx + 2 * ((x >> i) & 1) + ((y >> i) & 1);
  return idx;
}

/// Applies a 4x4 map to every base-4 digit in turn.
template <typename F>
void per_digit(std::vector<cplx>& v, Index r, F&& f) {
  for (Index stride = 1, i = 0; i < r; ++i, stride *= 4)
    for (Index base = 0; base < static_cast<Index>(v.size()); base += 4 * stride)
      for (Index off = base; off < base + stride; ++off)
        f(v[static_cast<std::size_t>(off)], v[static_cast<std::size_t>(off + stride)],
          v[static_cast<std::size_t>(off + 2 * stride)], v[static_cast<std::size_t>(off + 3 * stride)]);
}

}  // namespace detail

/// tr(rho P) for all 4^r Pauli strings, one qubit at a time.
inline std::vector<double> pauli_expectations(const Matrix& rho, Index r) {
  const Index dim = pow2(r);
  if (rho.rows() != dim) throw DimensionError("pauli_expectations: window size mismatch");
  std::vector<cplx> v(static_cast<std::size_t>(dim * dim));
  for (Index x = 0; x < dim; ++x)
    for (Index y = 0; y < dim; ++y) v[static_cast<std::size_t>(detail::interleave(x, y, r))] = rho(x, y);
  // (rho00, rho01, rho10, rho11) -> (I, X, Y, Z)
  detail::per_digit(v, r, [](cplx& a, cplx& b, cplx& c, cplx& d) {
    const cplx i = a + d, x = b + c, y = kI * (b - c), z = a - d;
    a = i;
    b = x;
    c = y;
    d = z;
  });
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].real();
  return out;
}

/// p(s) = 2^-r sum_T s_T <P_{alpha,T}> from the Pauli expectations.
inline std::vector<double> distribution_from_expectations(const std::vector<double>& expectations,
                                                          const std::string& alphas) {
  const auto r = static_cast<Index>(alphas.size());
  std::vector<double> v(static_cast<std::size_t>(pow2(r)));
  for (Index t = 0; t < pow2(r); ++t) v[static_cast<std::size_t>(t)] = expectations[static_cast<std::size_t>(pauli_code(alphas, t))];
  detail::walsh_hadamard(v);
  for (auto& x : v) x = std::ldexp(x, -static_cast<int>(r));
  return v;
}

/// Setting correlators g[T] = sum_s s_T w(s); the inverse of the above up to 2^-r.
inline std::vector<double> setting_correlators(std::vector<double> w) {
  detail::walsh_hadamard(w);
  return w;
}

/// sum_P c_P P as a dense 2^r x 2^r matrix.
inline Matrix pauli_sum(const std::vector<double>& coefficients, Index r) {
  const Index dim = pow2(r);
  if (static_cast<Index>(coefficients.size()) != dim * dim) throw DimensionError("pauli_sum: need 4^r coefficients");
  std::vector<cplx> v(coefficients.begin(), coefficients.end());
  // (I, X, Y, Z) -> (m00, m01, m10, m11)
  detail::per_digit(v, r, [](cplx& a, cplx& b, cplx& c, cplx& d) {
    const cplx m00 = a + d, m01 = b - kI * c, m10 = b + kI * c, m11 = a - d;
    a = m00;
    b = m01;
    c = m10;
    d = m11;
  });
  Matrix out(dim, dim);
  for (Index x = 0; x < dim; ++x)
    for (Index y = 0; y < dim; ++y) out(x, y) = v[static_cast<std::size_t>(detail::interleave(x, y, r))];
  return out;
}

}  // namespace mpqpt
