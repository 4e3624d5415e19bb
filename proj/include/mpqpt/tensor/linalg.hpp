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

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/SVD>

#ifdef MPQPT_USE_LAPACKE
#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>
#endif

#include "mpqpt/common.hpp"

namespace mpqpt {

struct TruncatedSvd {
  Matrix u;           // rows x kept
  RealVector s;       // kept
  Matrix v;           // cols x kept, m ~ u * diag(s) * v^dagger
  double discarded_weight = 0.0;
};

namespace detail {

struct FullSvd {
  Matrix u;
  RealVector s;
  Matrix v;
};

/// Thin SVD m = u diag(s) v^dagger with s descending. Uses LAPACK's
/// divide-and-conquer driver when available, one-sided Jacobi otherwise.
inline FullSvd thin_svd(const Matrix& m) {
  FullSvd out;
  const Index k = std::min(m.rows(), m.cols());
  if (k == 0) return out;
#ifdef MPQPT_USE_LAPACKE
  Matrix a = m;
  out.u.resize(m.rows(), k);
  out.s.resize(k);
  Matrix vt(k, m.cols());
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(m.rows()), static_cast<lapack_int>(m.cols()),
                     a.data(), static_cast<lapack_int>(a.rows()), out.s.data(), out.u.data(),
                     static_cast<lapack_int>(out.u.rows()), vt.data(), static_cast<lapack_int>(vt.rows()));
  if (info == 0) {
    out.v = vt.adjoint();
    return out;
  }
#endif
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.s = svd.singularValues();
  out.v = svd.matrixV();
  return out;
}

}  // namespace detail

/// Thin SVD keeping at most `trunc.max_bond` values, dropping those below
/// `trunc.svd_tol * ||s||_2`. At least one singular value is always kept.
inline TruncatedSvd truncated_svd(const Matrix& m, const Truncation& trunc) {
  TruncatedSvd out;
  detail::FullSvd svd = detail::thin_svd(m);
  const RealVector& s = svd.s;
  const double total = s.norm();
  Index keep = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] > trunc.svd_tol * total && s[i] > 0.0) keep = i + 1;
  }
  keep = std::clamp<Index>(keep, 1, std::max<Index>(1, std::min(trunc.max_bond, s.size())));
  out.discarded_weight = s.tail(s.size() - keep).squaredNorm();
  out.u = svd.u.leftCols(keep);
  out.s = s.head(keep);
  out.v = svd.v.leftCols(keep);
  return out;
}

/// Thin QR decomposition m = q * r with q having orthonormal columns.
inline std::pair<Matrix, Matrix> thin_qr(const Matrix& m) {
  const Index k = std::min(m.rows(), m.cols());
#ifdef MPQPT_USE_LAPACKE
  if (k > 0) {
    Matrix a = m;
    Vector tau(k);
    const auto rows = static_cast<lapack_int>(m.rows());
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, rows, static_cast<lapack_int>(m.cols()), a.data(), rows, tau.data());
    if (info == 0) {
      Matrix r = a.topRows(k).triangularView<Eigen::Upper>();
      Matrix q = a.leftCols(k);
      info = LAPACKE_zungqr(LAPACK_COL_MAJOR, rows, static_cast<lapack_int>(k), static_cast<lapack_int>(k), q.data(), rows,
                            tau.data());
      if (info == 0) return {std::move(q), std::move(r)};
    }
  }
#endif
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return {std::move(q), std::move(r)};
}

/// Thin LQ decomposition m = l * q with q having orthonormal rows.
inline std::pair<Matrix, Matrix> thin_lq(const Matrix& m) {
  auto [q, r] = thin_qr(m.adjoint());
  return {r.adjoint(), q.adjoint()};
}

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest singular value.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return detail::thin_svd(m).s(0);
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace mpqpt
