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

// From a reconstructed Choi state to a unitary operator, and from a unitary
// to its Hamiltonian through a truncated arcsine series.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mpqpt/hamiltonian/hamiltonian.hpp"
#include "mpqpt/measurement/choi.hpp"
#include "mpqpt/measurement/observables.hpp"
#include "mpqpt/tensor/mpo.hpp"

namespace mpqpt {

enum class PhaseRule { none, trace, largest_entry, reference };

inline std::string to_string(PhaseRule r) {
  switch (r) {
    case PhaseRule::none: return "none";
    case PhaseRule::trace: return "trace";
    case PhaseRule::largest_entry: return "largest_entry";
    case PhaseRule::reference: return "reference";
  }
  return "?";
}

inline PhaseRule parse_phase_rule(const std::string& s) {
  if (s == "none") return PhaseRule::none;
  if (s == "trace") return PhaseRule::trace;
  if (s == "largest_entry") return PhaseRule::largest_entry;
  if (s == "reference") return PhaseRule::reference;
  throw RangeError("unknown phase rule '" + s + "'");
}

struct UnitaryEstimate {
  MatrixProductOperator mpo;
  bool phase_fixed = false;
  PhaseRule rule = PhaseRule::none;
  /// tr(U) before the phase was fixed.
  cplx trace_value{};
};

/// Groups each (ancilla, system) pair of sites into one operator site with
/// input index from the ancilla and output index from the system qubit, and
/// scales by 2^{n/2}. Exact, no truncation.
inline UnitaryEstimate choi_to_unitary(const MatrixProductState& psi) {
  if (psi.length() % 2 != 0)
    throw DimensionError("choi_to_unitary: Choi state needs an even number of sites, got " +
                         std::to_string(psi.length()));
  const Index n = psi.length() / 2;
  std::vector<SiteTensor> sites;
  for (Index j = 0; j < n; ++j) {
    const auto& a = psi.site(ancilla_site(j));
    const auto& s = psi.site(system_site(j));
    SiteTensor w(a.left_dim(), 4, s.right_dim());
    for (Index o = 0; o < 2; ++o)
      for (Index i = 0; i < 2; ++i) w.slice(op_index(o, i)) = a.slice(i) * s.slice(o);
    sites.push_back(std::move(w));
  }
  chain::scale(sites, std::pow(2.0, 0.5 * static_cast<double>(n)));
  return {MatrixProductOperator(std::move(sites)), false, PhaseRule::none, {}};
}

/// Relative threshold on |tr(U)| / 2^n below which the trace rule refuses.
inline constexpr double kDegeneratePhaseThreshold = 1e-8;

namespace detail {
inline UnitaryEstimate rephased(const UnitaryEstimate& u, cplx reference, PhaseRule rule) {
  const cplx phase = std::conj(reference) / std::abs(reference);
  return {scaled(u.mpo, phase), true, rule, trace(u.mpo)};
}
}  // namespace detail

/// U tr(U)^* / |tr(U)|, so that the trace becomes real and nonnegative.
inline UnitaryEstimate fix_phase(const UnitaryEstimate& u, double threshold = kDegeneratePhaseThreshold) {
  const cplx tr = trace(u.mpo);
  const double scale = std::ldexp(1.0, static_cast<int>(u.mpo.length()));
  if (std::abs(tr) < threshold * scale)
    throw DegeneratePhaseError("fix_phase: |tr U| = " + std::to_string(std::abs(tr)) + " is below " +
                               std::to_string(threshold) + " * 2^n; use a fallback phase rule");
  return detail::rephased(u, tr, PhaseRule::trace);
}

/// Fallback: the largest-magnitude entry of the dense matrix becomes real
/// and positive.
inline UnitaryEstimate fix_phase_largest_entry(const UnitaryEstimate& u) {
  const Matrix m = to_dense(u.mpo);
  Index row = 0, col = 0;
  m.cwiseAbs().maxCoeff(&row, &col);
  if (std::abs(m(row, col)) == 0.0) throw DegeneratePhaseError("fix_phase_largest_entry: zero operator");
  return detail::rephased(u, m(row, col), PhaseRule::largest_entry);
}

/// Fallback: tr(V^dagger U) becomes real and nonnegative for a reference V.
inline UnitaryEstimate fix_phase_reference(const UnitaryEstimate& u, const MatrixProductOperator& reference) {
  const cplx overlap = frobenius_inner(reference, u.mpo);
  if (std::abs(overlap) == 0.0) throw DegeneratePhaseError("fix_phase_reference: orthogonal to the reference");
  return detail::rephased(u, overlap, PhaseRule::reference);
}

/// |<psi_true|psi_rec>|^2 for normalized states.
inline double process_fidelity(const MatrixProductState& psi_true, const MatrixProductState& psi_rec) {
  if (psi_true.length() != psi_rec.length()) throw DimensionError("process_fidelity: lengths differ");
  return std::norm(inner(psi_true, psi_rec));
}

/// Arcsine series coefficients: x = sin(x) sum_k c_k (cos(x) - 1)^k for
/// |x| < pi.
inline double series_coefficient(Index k) {
  double c = 1.0;
  for (Index j = 1; j <= k; ++j) c *= -0.5 * static_cast<double>(j) / (static_cast<double>(j) + 0.5);
  return c;
}

struct SeriesConfig {
  /// Number of series terms N.
  Index order = 3;

  std::vector<double> coefficients() const {
    if (order < 1) throw RangeError("SeriesConfig: order must be at least 1");
    std::vector<double> c;
    for (Index k = 0; k < order; ++k) c.push_back(series_coefficient(k));
    return c;
  }
};

enum class ExtractionMethod { single_time, two_time };

struct HamiltonianEstimate {
  /// Dense Hermitian matrix; empty when only the operator form was built.
  Matrix dense;
  std::optional<MatrixProductOperator> mpo;
  std::optional<NearestNeighbourHamiltonian> nearest_neighbour;
  ExtractionMethod method = ExtractionMethod::single_time;
  double t = 0.0;
  double t2 = 0.0;
  bool projected = false;
  /// Two-time extraction with a time difference below the noise floor.
  bool noise_dominated = false;
};

/// Dense series evaluation for U = exp(-i H t); t may be negative.
inline Matrix series_hamiltonian(const Matrix& u, double t, const SeriesConfig& cfg = {}) {
  if (t == 0.0) throw PreconditionError("series_hamiltonian: t must be nonzero");
  const Index dim = u.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix sin_ht = (u.adjoint() - u) / (2.0 * kI);
  const Matrix cos_m1 = 0.5 * (u.adjoint() + u) - id;
  const auto c = cfg.coefficients();
  Matrix sum = c.back() * id;
  for (std::size_t k = c.size() - 1; k-- > 0;) sum = c[k] * id + cos_m1 * sum;
  return hermitian_part(sin_ht * sum) / t;
}

/// Operator-form series evaluation, compressing after every product.
inline MatrixProductOperator series_hamiltonian(const MatrixProductOperator& u, double t, const SeriesConfig& cfg,
                                                const Truncation& trunc) {
  if (t == 0.0) throw PreconditionError("series_hamiltonian: t must be nonzero");
  const Index n = u.length();
  const auto id = MatrixProductOperator::identity(n);
  const auto ud = adjoint(u);
  const auto sin_ht = compress(add(scaled(ud, 1.0 / (2.0 * kI)), scaled(u, -1.0 / (2.0 * kI))), trunc).op;
  const auto cos_m1 = compress(add(add(scaled(ud, 0.5), scaled(u, 0.5)), scaled(id, -1.0)), trunc).op;
  const auto c = cfg.coefficients();
  MatrixProductOperator sum = scaled(id, c.back());
  for (std::size_t k = c.size() - 1; k-- > 0;)
    sum = compress(add(scaled(id, c[k]), multiply_mpo(cos_m1, sum, trunc).op), trunc).op;
  const auto x = multiply_mpo(sin_ht, sum, trunc).op;
  return compress(add(scaled(x, 0.5 / t), scaled(adjoint(x), 0.5 / t)), trunc).op;
}

/// Chains up to this many qubits take the dense path.
inline constexpr Index kDenseExtractionCap = 10;

inline HamiltonianEstimate extract_hamiltonian(const UnitaryEstimate& u, double t, const SeriesConfig& cfg = {},
                                               const Truncation& trunc = Truncation::bond(256, 1e-12)) {
  if (!(t > 0.0)) throw PreconditionError("extract_hamiltonian: t must be positive");
  HamiltonianEstimate h;
  h.t = t;
  if (u.mpo.length() <= kDenseExtractionCap)
    h.dense = series_hamiltonian(to_dense(u.mpo), t, cfg);
  else
    h.mpo = series_hamiltonian(u.mpo, t, cfg, trunc);
  return h;
}

/// Extraction from U(t)^dagger U(t2) = exp(-i H (t2 - t)). `time_unit` sets
/// the scale of the noise floor on |t2 - t|.
inline HamiltonianEstimate extract_two_time(const UnitaryEstimate& u_t, const UnitaryEstimate& u_t2, double t,
                                            double t2, const SeriesConfig& cfg = {}, double time_unit = 1.0,
                                            const Truncation& trunc = Truncation::bond(256, 1e-12)) {
  if (t2 == t) throw PreconditionError("extract_two_time: the two times must differ");
  if (u_t.mpo.length() != u_t2.mpo.length()) throw DimensionError("extract_two_time: operator lengths differ");
  const double dt = t2 - t;
  HamiltonianEstimate h;
  h.method = ExtractionMethod::two_time;
  h.t = t;
  h.t2 = t2;
  h.noise_dominated = std::abs(dt) < 1e-6 * time_unit;
  if (u_t.mpo.length() <= kDenseExtractionCap)
    h.dense = series_hamiltonian(Matrix(to_dense(u_t.mpo).adjoint() * to_dense(u_t2.mpo)), dt, cfg);
  else
    h.mpo = series_hamiltonian(multiply_mpo(adjoint(u_t.mpo), u_t2.mpo, trunc).op, dt, cfg, trunc);
  return h;
}

/// min_lambda |A - lambda 1| for Hermitian A: half the spectral width.
inline double centered_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return 0.5 * (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
}

struct DistanceReport {
  double distance = 0.0;
  /// min_lambda |h - lambda 1|.
  double centered_norm = 0.0;
  /// |h|.
  double norm = 0.0;
  /// Whether |h| equals its centered norm to 1e-9 relative, i.e. the
  /// spectrum of h is symmetric about zero.
  bool offset_free() const { return std::abs(norm - centered_norm) <= 1e-9 * std::max(1.0, norm); }
};

/// Offset-independent relative distance of h2 from the reference h.
inline DistanceReport distance_report(const Matrix& h, const Matrix& h2) {
  if (h.rows() != h2.rows() || h.cols() != h2.cols()) throw DimensionError("hamiltonian_distance: sizes differ");
  DistanceReport r;
  r.centered_norm = centered_norm(h);
  r.norm = hermitian_norm(hermitian_part(h));
  if (r.centered_norm <= 1e-14 * std::max(1.0, r.norm))
    throw PreconditionError("hamiltonian_distance: reference is proportional to the identity");
  r.distance = centered_norm(h - h2) / r.centered_norm;
  return r;
}

inline double hamiltonian_distance(const Matrix& h, const Matrix& h2) { return distance_report(h, h2).distance; }

namespace detail {

/// Pauli coefficients tr(h P) / 2^n of every string supported on qubits
/// (i, i+1), from the 4x4 partial trace m = tr_rest(h) / 2^{n-2}. The result
/// is indexed 4a + b with a, b in {0: 1, 1: x, 2: y, 3: z}.
inline std::vector<double> pair_coefficients(const Matrix& m) {
  std::vector<double> c(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      c[static_cast<std::size_t>(4 * a + b)] = (m * kron(pauli::by_index(a), pauli::by_index(b))).trace().real() / 4.0;
  return c;
}

inline NearestNeighbourHamiltonian fold_pairs(const std::vector<Matrix>& marginals) {
  const Index n = static_cast<Index>(marginals.size()) + 1;
  std::vector<Matrix> terms;
  for (Index i = 0; i + 1 < n; ++i) {
    const auto c = pair_coefficients(marginals[static_cast<std::size_t>(i)]);
    const double wl = i == 0 ? 1.0 : 0.5;
    const double wr = i + 2 == n ? 1.0 : 0.5;
    Matrix t = c[0] / static_cast<double>(n - 1) * Matrix::Identity(4, 4);
    for (int a = 1; a < 4; ++a) {
      t += wl * c[static_cast<std::size_t>(4 * a)] * kron(pauli::by_index(a), pauli::identity());
      t += wr * c[static_cast<std::size_t>(a)] * kron(pauli::identity(), pauli::by_index(a));
      for (int b = 1; b < 4; ++b)
        t += c[static_cast<std::size_t>(4 * a + b)] * kron(pauli::by_index(a), pauli::by_index(b));
    }
    terms.push_back(hermitian_part(t));
  }
  return make_custom(std::move(terms));
}

}  // namespace detail

/// Orthogonal projection, in the trace inner product, onto the span of the
/// identity, single-site Paulis and nearest-neighbour Pauli pairs. Single-site
/// parts are split evenly between the two bonds of a site (whole at the
/// chain ends) and the identity part evenly over all bonds.
inline NearestNeighbourHamiltonian project_nearest_neighbour(const Matrix& h) {
  Index n = 0;
  while (pow2(n) < h.rows()) ++n;
  if (pow2(n) != h.rows() || h.rows() != h.cols() || n < 2)
    throw DimensionError("project_nearest_neighbour: need a 2^n x 2^n matrix with n >= 2");
  std::vector<Matrix> marginals;
  for (Index i = 0; i + 1 < n; ++i)
    marginals.push_back(keep_positions(h, n, {i, i + 1}) / std::ldexp(1.0, static_cast<int>(n - 2)));
  return detail::fold_pairs(marginals);
}

/// Same projection for an operator given as an MPO.
inline NearestNeighbourHamiltonian project_nearest_neighbour(const MatrixProductOperator& h) {
  const Index n = h.length();
  if (n < 2) throw DimensionError("project_nearest_neighbour: need n >= 2");
  // Normalized partial traces from each end.
  std::vector<Matrix> left{Matrix::Identity(1, 1)};
  for (Index k = 0; k < n; ++k)
    left.push_back(left.back() * 0.5 * (h.site(k).slice(op_index(0, 0)) + h.site(k).slice(op_index(1, 1))));
  std::vector<Matrix> right(static_cast<std::size_t>(n + 1));
  right[static_cast<std::size_t>(n)] = Matrix::Identity(1, 1);
  for (Index k = n - 1; k >= 0; --k)
    right[static_cast<std::size_t>(k)] =
        0.5 * (h.site(k).slice(op_index(0, 0)) + h.site(k).slice(op_index(1, 1))) * right[static_cast<std::size_t>(k + 1)];
  std::vector<Matrix> marginals;
  for (Index i = 0; i + 1 < n; ++i) {
    Matrix m(4, 4);
    for (Index o1 = 0; o1 < 2; ++o1)
      for (Index o2 = 0; o2 < 2; ++o2)
        for (Index i1 = 0; i1 < 2; ++i1)
          for (Index i2 = 0; i2 < 2; ++i2)
            m(2 * o1 + o2, 2 * i1 + i2) = (left[static_cast<std::size_t>(i)] * op_slice(h.site(i), o1, i1) *
                                           op_slice(h.site(i + 1), o2, i2) * right[static_cast<std::size_t>(i + 2)])(0, 0);
    marginals.push_back(m);
  }
  return detail::fold_pairs(marginals);
}

inline NearestNeighbourHamiltonian project_nearest_neighbour(const HamiltonianEstimate& h) {
  if (h.dense.size() > 0) return project_nearest_neighbour(h.dense);
  if (h.mpo) return project_nearest_neighbour(*h.mpo);
  throw PreconditionError("project_nearest_neighbour: empty estimate");
}

/// Distance between two nearest-neighbour Hamiltonians with extremal
/// eigenvalues from Lanczos; usable beyond the dense operator cap.
inline double projected_distance(const NearestNeighbourHamiltonian& h, const NearestNeighbourHamiltonian& h2) {
  if (h.n != h2.n) throw DimensionError("projected_distance: chain lengths differ");
  std::vector<Matrix> diff;
  for (std::size_t i = 0; i < h.terms.size(); ++i) diff.push_back(h.terms[i] - h2.terms[i]);
  const auto [lo, hi] = detail::lanczos_extremes(h);
  const auto [dlo, dhi] = detail::lanczos_extremes(make_custom(std::move(diff)));
  if (hi - lo <= 1e-14 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))))
    throw PreconditionError("projected_distance: reference is proportional to the identity");
  return (dhi - dlo) / (hi - lo);
}

}  // namespace mpqpt
