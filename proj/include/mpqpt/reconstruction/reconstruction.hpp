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

// Pure-state MPS tomography from local Pauli data.
//
// estimate_windows inverts each window's settings into a density matrix.
// initialize looks for the state best supported by all estimated windows: the
// top eigenvector of sum_k P_k, with P_k the projector onto the eigenvectors
// of the k-th window estimate above a threshold, found by two-site sweeps.
// maximize_likelihood then runs two-site projected-gradient ascent on the
// log-likelihood with backtracking, so no accepted step decreases it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpqpt/measurement/dataset.hpp"
#include "mpqpt/random.hpp"
#include "mpqpt/reconstruction/sweep.hpp"
#include "mpqpt/tensor/operations.hpp"

namespace mpqpt {

enum class InitKind { local_inversion, random };

struct ReconstructionConfig {
  Index target_bond = 8;
  Index max_sweeps = 40;
  double ll_tol = 1e-10;
  InitKind init = InitKind::local_inversion;
  std::uint64_t seed = 0;
  /// Replacement for clearly negative eigenvalues of inverted windows.
  double regularization = 1e-6;
  double probability_floor = 1e-12;
  /// Eigenvalue cut defining window supports; 0 picks 1e-8 for exact data
  /// and 1/sqrt(M) otherwise.
  double support_threshold = 0.0;
  Index init_sweeps = 20;
  double svd_tol = 1e-10;
};

inline void validate(const ReconstructionConfig& cfg) {
  if (cfg.target_bond < 1) throw RangeError("ReconstructionConfig: target_bond must be at least 1");
  if (!(cfg.ll_tol > 0.0)) throw RangeError("ReconstructionConfig: ll_tol must be positive");
  if (cfg.max_sweeps < 0 || cfg.init_sweeps < 0) throw RangeError("ReconstructionConfig: negative sweep count");
}

struct ReconstructionResult {
  MatrixProductState state;
  double final_log_likelihood = 0.0;
  Index sweeps_used = 0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;  // initial value, then one per sweep
};

/// |<a|b>|^2 / (<a|a><b|b>); invariant under global phases.
inline double state_fidelity(const MatrixProductState& a, const MatrixProductState& b) {
  const double na = inner(a, a).real(), nb = inner(b, b).real();
  return std::norm(inner(a, b)) / (na * nb);
}

namespace detail {

/// Outcome tables grouped by window position, in all_specs order.
inline std::vector<std::vector<const OutcomeTable*>> group_tables(const MeasurementDataset& ds) {
  std::map<std::pair<Index, std::string>, const OutcomeTable*> by_spec;
  for (const auto& t : ds.tables) by_spec[{t.spec.k, t.spec.alphas}] = &t;
  std::vector<std::vector<const OutcomeTable*>> out;
  std::vector<std::string> missing;
  std::size_t missing_count = 0;
  for (const auto& spec : all_specs(ds.sites(), ds.r)) {
    if (static_cast<Index>(out.size()) <= spec.k) out.emplace_back();
    const auto it = by_spec.find({spec.k, spec.alphas});
    if (it == by_spec.end()) {
      if (missing.size() < 12) missing.push_back(std::to_string(spec.k) + ":" + spec.alphas);
      ++missing_count;
      continue;
    }
    validate(*it->second, ds.sites());
    out.back().push_back(it->second);
  }
  if (missing_count > 0) {
    std::string msg = "incomplete dataset, " + std::to_string(missing_count) + " settings missing:";
    for (const auto& m : missing) msg += " " + m;
    if (missing_count > missing.size()) msg += " ...";
    throw DatasetError(msg);
  }
  return out;
}

inline Matrix regularize(const Matrix& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  RealVector lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-12) lam(i) = floor;
    else if (lam(i) < 0.0) lam(i) = 0.0;
  }
  lam /= lam.sum();
  return hermitian_part(es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace detail

/// Linear inversion of every window: Pauli expectations are the empirical
/// correlators averaged over all settings that measure them.
inline std::vector<WindowDensityMatrix> estimate_windows(const MeasurementDataset& ds, double floor = 1e-6) {
  const auto groups = detail::group_tables(ds);
  const Index r = ds.r;
  std::vector<WindowDensityMatrix> out;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    std::vector<double> sum(static_cast<std::size_t>(pow2(2 * r)), 0.0), count(sum.size(), 0.0);
    for (const auto* t : groups[k]) {
      const auto g = setting_correlators(t->frequencies());
      for (Index s = 0; s < pow2(r); ++s) {
        const auto code = static_cast<std::size_t>(pauli_code(t->spec.alphas, s));
        sum[code] += g[static_cast<std::size_t>(s)];
        count[code] += 1.0;
      }
    }
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = std::ldexp(sum[c] / count[c], -static_cast<int>(r));
    out.push_back({static_cast<Index>(k), r, detail::regularize(pauli_sum(sum, r), floor)});
  }
  return out;
}

/// Normalized MPS with Gaussian entries from a Philox stream, bonds capped
/// at `bond` and at the exact maximum 2^min(k, L-k).
inline MatrixProductState random_state(Index length, Index bond, std::uint64_t seed) {
  PhiloxEngine rng(seed, 0x6d7073);
  auto gaussian = [&] {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    return cplx(rad * std::cos(2.0 * std::numbers::pi * u2), rad * std::sin(2.0 * std::numbers::pi * u2));
  };
  std::vector<SiteTensor> sites;
  auto cap = [&](Index cut) { return cut >= 62 || length - cut >= 62 ? bond : std::min(bond, std::min(pow2(cut), pow2(length - cut))); };
  for (Index k = 0; k < length; ++k) {
    SiteTensor t(cap(k), 2, cap(k + 1));
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = gaussian();
    sites.push_back(std::move(t));
  }
  auto c = MatrixProductState(std::move(sites)).sites();
  chain::canonicalize(c, 0);
  c[0].data() /= c[0].data().norm();
  return MatrixProductState(std::move(c), CanonicalForm::mixed(0));
}

/// Projector onto the eigenvectors of rho with eigenvalue above threshold.
inline Matrix support_projector(const Matrix& rho, double threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  Matrix p = Matrix::Zero(rho.rows(), rho.cols());
  for (Index i = 0; i < rho.rows(); ++i)
    if (es.eigenvalues()(i) > threshold) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  if (p.isZero()) {
    const Index top = rho.rows() - 1;
    p = es.eigenvectors().col(top) * es.eigenvectors().col(top).adjoint();
  }
  return p;
}

inline double default_support_threshold(const MeasurementDataset& ds) {
  return ds.exact() ? 1e-8 : 1.0 / std::sqrt(static_cast<double>(ds.shots));
}

inline MatrixProductState initialize(const MeasurementDataset& ds, const ReconstructionConfig& cfg = {}) {
  validate(cfg);
  const Index L = ds.sites();
  if (cfg.init == InitKind::random) return random_state(L, cfg.target_bond, cfg.seed);
  const auto windows = estimate_windows(ds, cfg.regularization);
  const double tau = cfg.support_threshold > 0.0 ? cfg.support_threshold : default_support_threshold(ds);
  std::vector<Matrix> projectors;
  for (const auto& w : windows) projectors.push_back(support_projector(w.matrix, tau));
  const auto h = sweep::window_sum_mpo(L, ds.r, projectors);
  const auto start = random_state(L, std::min<Index>(2, cfg.target_bond), cfg.seed);
  auto res = sweep::maximize_expectation(h, start, Truncation::bond(cfg.target_bond, cfg.svd_tol), cfg.init_sweeps);
  return normalized(res.state);
}

/// Per-window empirical frequencies, prepared once for repeated likelihood
/// evaluations.
class LikelihoodModel {
 public:
  explicit LikelihoodModel(const MeasurementDataset& ds, double probability_floor = 1e-12)
      : r_(ds.r), length_(ds.sites()), floor_(probability_floor) {
    for (const auto& group : detail::group_tables(ds)) {
      std::vector<std::pair<std::string, std::vector<double>>> w;
      for (const auto* t : group) {
        w.emplace_back(t->spec.alphas, t->frequencies());
        ++settings_;
      }
      windows_.push_back(std::move(w));
    }
  }

  Index window() const { return r_; }
  Index length() const { return length_; }
  Index settings() const { return settings_; }

  /// sum over settings and outcomes of f log max(p, floor). When `gradient`
  /// is given it receives, per window, sum_settings sum_s (f/p) Pi^s.
  double evaluate(const MatrixProductState& psi, std::vector<Matrix>* gradient = nullptr) const {
    if (psi.length() != length_) throw DimensionError("log-likelihood: state length does not match dataset");
    const auto rhos = all_window_densities(psi, r_);
    double ll = 0.0;
    if (gradient) gradient->clear();
    for (std::size_t k = 0; k < windows_.size(); ++k) {
      const auto e = pauli_expectations(rhos[k].matrix, r_);
      std::vector<double> coeff;
      if (gradient) coeff.assign(static_cast<std::size_t>(pow2(2 * r_)), 0.0);
      for (const auto& [alphas, f] : windows_[k]) {
        const auto p = distribution_from_expectations(e, alphas);
        std::vector<double> w(f.size(), 0.0);
        for (std::size_t s = 0; s < f.size(); ++s) {
          if (f[s] <= 0.0) continue;
          const double q = std::max(p[s], floor_);
          ll += f[s] * std::log(q);
          w[s] = f[s] / q;
        }
        if (!gradient) continue;
        const auto g = setting_correlators(std::move(w));
        for (Index t = 0; t < pow2(r_); ++t)
          coeff[static_cast<std::size_t>(pauli_code(alphas, t))] += std::ldexp(g[static_cast<std::size_t>(t)], -static_cast<int>(r_));
      }
      if (gradient) gradient->push_back(pauli_sum(coeff, r_));
    }
    return ll;
  }

 private:
  Index r_ = 0;
  Index length_ = 0;
  double floor_ = 1e-12;
  Index settings_ = 0;
  std::vector<std::vector<std::pair<std::string, std::vector<double>>>> windows_;
};

inline double log_likelihood(const MeasurementDataset& ds, const MatrixProductState& psi, double floor = 1e-12) {
  return LikelihoodModel(ds, floor).evaluate(psi);
}

/// Smallest step a two-site update starts its backtracking from.
inline constexpr double kMinStartStep = 0.25;
/// Trial steps per two-site update before the update is skipped.
inline constexpr int kMaxStepAttempts = 8;

inline ReconstructionResult maximize_likelihood(const MeasurementDataset& ds, const MatrixProductState& psi0,
                                                const ReconstructionConfig& cfg = {}) {
  validate(cfg);
  const LikelihoodModel model(ds, cfg.probability_floor);
  const Index L = model.length();
  if (psi0.length() != L) throw DimensionError("maximize_likelihood: state length does not match dataset");
  if (L < 2) throw DimensionError("maximize_likelihood: need at least two sites");
  auto c = psi0.sites();
  chain::canonicalize(c, 0);
  c[0].data() /= c[0].data().norm();

  ReconstructionResult res;
  auto state = [&] { return MatrixProductState(c); };
  std::vector<Matrix> g;
  double ll = model.evaluate(state(), &g);
  res.log_likelihood_trace.push_back(ll);
  double step = 1.0;
  std::size_t center = 0;
  const Truncation trunc = Truncation::bond(cfg.target_bond, cfg.svd_tol);
  const double settings = static_cast<double>(model.settings());

  // Two-site projected-gradient step on sites (j, j+1) with the center at j
  // (rightward) or j+1 (leftward). The gradient operator is rebuilt from the
  // current state before every step; an operator frozen over a half-sweep
  // goes stale and most late steps fail. Each trial is checked against the
  // exact log-likelihood, and the step is skipped if none improves it.
  auto update = [&](std::size_t j, bool rightward) {
    std::vector<Matrix> scaled_g = g;
    for (auto& m : scaled_g) m /= settings;
    const auto op = sweep::window_sum_mpo(L, model.window(), scaled_g, 0.0);
    sweep::Env left = sweep::edge(), right = sweep::edge();
    for (std::size_t k = 0; k < j; ++k) left = sweep::grow_left(left, c[k], op.site(static_cast<Index>(k)));
    for (auto k = static_cast<std::size_t>(L - 1); k > j + 1; --k)
      right = sweep::grow_right(right, c[k], op.site(static_cast<Index>(k)));
    const SiteTensor a = c[j], b = c[j + 1];
    const SiteTensor theta = sweep::merge(a, b);
    const SiteTensor rt = sweep::apply_two(left, op.site(static_cast<Index>(j)), op.site(static_cast<Index>(j + 1)), right, theta);
    const cplx lambda = theta.data().dot(rt.data());
    const Vector grad = rt.data() - lambda * theta.data();
    // Initial slope of the log-likelihood along grad.
    const double slope = 2.0 * settings * grad.squaredNorm();
    double local = std::max(step, kMinStartStep);
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxStepAttempts && !accepted && grad.norm() > 1e-14; ++attempt) {
      Vector trial = theta.data() + local * grad;
      const Eigen::Map<const Matrix> m(trial.data(), 2 * theta.left_dim(), 2 * theta.right_dim());
      const TruncatedSvd svd = truncated_svd(m, trunc);
      if (rightward) {
        c[j] = SiteTensor::from_left_grouped(svd.u, a.left_dim(), 2);
        c[j + 1] = SiteTensor::from_right_grouped(svd.s.asDiagonal() * svd.v.adjoint(), 2, b.right_dim());
        c[j + 1].data() /= c[j + 1].data().norm();
      } else {
        c[j + 1] = SiteTensor::from_right_grouped(svd.v.adjoint(), 2, b.right_dim());
        c[j] = SiteTensor::from_left_grouped(svd.u * svd.s.asDiagonal(), a.left_dim(), 2);
        c[j].data() /= c[j].data().norm();
      }
      std::vector<Matrix> trial_g;
      const double candidate = model.evaluate(state(), &trial_g);
      if (candidate >= ll) {
        ll = candidate;
        g = std::move(trial_g);
        step = std::min(local * 2.0, 1e4);
        accepted = true;
      } else {
        c[j] = a;
        c[j + 1] = b;
        // Minimizer of the quadratic through the initial slope and the
        // rejected value, kept within [0.1, 0.5] of the failed step.
        const double drop = slope * local - (candidate - ll);
        const double fit = drop > 0.0 ? 0.5 * slope * local * local / drop : 0.5 * local;
        local = std::clamp(fit, 0.1 * local, 0.5 * local);
      }
    }
    // A skipped update carries its reduced step forward; otherwise one large
    // accepted step leaves every later update starting far too long.
    if (!accepted) step = local;
    if (rightward) {
      if (!accepted) chain::shift_center_right(c, j);
      center = j + 1;
    } else {
      if (!accepted) chain::shift_center_left(c, j + 1);
      center = j;
    }
  };

  for (Index sweep_index = 0; sweep_index < cfg.max_sweeps; ++sweep_index) {
    const double before = ll;
    for (Index j = 0; j + 1 < L; ++j) update(static_cast<std::size_t>(j), true);
    for (Index j = L - 2; j >= 0; --j) update(static_cast<std::size_t>(j), false);
    res.log_likelihood_trace.push_back(ll);
    res.sweeps_used = sweep_index + 1;
    if (std::abs(ll - before) <= cfg.ll_tol * std::max(1.0, std::abs(ll))) {
      res.converged = true;
      break;
    }
  }
  res.final_log_likelihood = ll;
  res.state = MatrixProductState(std::move(c), CanonicalForm::mixed(static_cast<Index>(center)));
  return res;
}

inline ReconstructionResult reconstruct(const MeasurementDataset& ds, const ReconstructionConfig& cfg = {}) {
  return maximize_likelihood(ds, initialize(ds, cfg), cfg);
}

}  // namespace mpqpt
