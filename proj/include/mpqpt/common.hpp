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

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpqpt {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

inline constexpr double kDefaultSvdTol = 1e-12;
inline constexpr double kIsometryTol = 1e-10;

/// Largest chain (in sites) that may be expanded into a dense state vector.
inline constexpr Index kDenseStateCap = 20;
/// Largest chain (in qubits) that may be expanded into a dense operator.
inline constexpr Index kDenseOperatorCap = 12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible lengths, bond dimensions or physical dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A site, window or parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A dense expansion was requested above the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A measurement dataset does not cover every required setting.
class DatasetError : public Error {
 public:
  using Error::Error;
};

/// tr(U) too small to define a global phase.
class DegeneratePhaseError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// SVD truncation policy: keep at most `max_bond` singular values and drop
/// those below `svd_tol` times the 2-norm of the spectrum.
struct Truncation {
  Index max_bond = std::numeric_limits<Index>::max();
  double svd_tol = kDefaultSvdTol;

  static Truncation bond(Index max_bond, double svd_tol = kDefaultSvdTol) {
    return Truncation{max_bond, svd_tol};
  }
  /// Keeps every nonzero singular value.
  static Truncation lossless() { return Truncation{std::numeric_limits<Index>::max(), 0.0}; }
};

inline Index pow2(Index k) { return Index{1} << k; }

inline Index ipow(Index base, Index exp) {
  Index r = 1;
  for (Index i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace mpqpt
