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

// Ancilla-free translation of a Choi-state setting. A setting splits into an
// ancilla part P_A and a system part P_S; since
//
//   tr[(P_A (x) P_S) rho_E] = tr[E(P_A^t) P_S] / 2^n,
//
// the experiment prepares the system in P_A^t (a product of conjugated Pauli
// eigenstates on touched qubits, maximally mixed elsewhere), runs the channel
// and measures P_S. Each touched ancilla outcome s_A contributes weight 2^-a,
// realized operationally by drawing s_A uniformly.
//
// Simulation purifies the maximally mixed qubits with a Bell partner on their
// ancilla site, so one MPS run yields the conditional system statistics
// q(s_S | s_A) for every system measurement of a window.

#include <map>
#include <optional>

#include "mpqpt/measurement/choi.hpp"
#include "mpqpt/measurement/dataset.hpp"

namespace mpqpt {

struct PreparedQubit {
  char axis = 'z';
  Index position = 0;  // position of the ancilla site inside the window
};

struct MeasuredQubit {
  char axis = 'z';
  Index position = 0;  // position of the system site inside the window
};

struct AncillaFreePlan {
  ObservableSpec spec;
  Index n = 0;
  std::vector<std::optional<PreparedQubit>> preparation;  // per system qubit, nullopt = maximally mixed
  std::vector<std::optional<MeasuredQubit>> observable;   // per system qubit, nullopt = identity

  Index prepared_count() const {
    Index a = 0;
    for (const auto& p : preparation) a += p.has_value();
    return a;
  }

  /// Transposed eigenprojector |alpha, s><alpha, s|^t as the pure state
  /// conj(|alpha, s>); transposition is in the computational basis in which
  /// the Bell pairs are correlated.
  static Vector prepared_state(const PreparedQubit& q, int s) { return pauli_eigenstate(q.axis, s).conjugate(); }
};

inline AncillaFreePlan ancilla_free_plan(const ObservableSpec& spec, Index n) {
  validate(spec, 2 * n);
  AncillaFreePlan plan{spec, n, std::vector<std::optional<PreparedQubit>>(static_cast<std::size_t>(n)),
                       std::vector<std::optional<MeasuredQubit>>(static_cast<std::size_t>(n))};
  for (Index m = 0; m < spec.width(); ++m) {
    const Index site = spec.k + m;
    const auto q = static_cast<std::size_t>(site / 2);
    const char a = spec.alphas[static_cast<std::size_t>(m)];
    if (is_system_site(site))
      plan.observable[q] = MeasuredQubit{a, m};
    else
      plan.preparation[q] = PreparedQubit{a, m};
  }
  return plan;
}

namespace detail {

/// Density matrix of the listed system qubits (increasing) after the channel,
/// with qubit j prepared in states[j] or maximally mixed when absent.
inline Matrix channel_output_density(const MatrixProductOperator& u, const std::vector<std::optional<Vector>>& states,
                                     const std::vector<Index>& measured, const Truncation& trunc) {
  const Index n = u.length();
  std::vector<SiteTensor> sites;
  for (Index j = 0; j < n; ++j) {
    const auto& st = states[static_cast<std::size_t>(j)];
    if (st) {
      Vector zero = Vector::Zero(2);
      zero[0] = 1.0;
      sites.emplace_back(1, 2, 1, zero);
      sites.emplace_back(1, 2, 1, *st);
    } else {
      const auto pair = bell_input(1);
      sites.push_back(pair.site(0));
      sites.push_back(pair.site(1));
    }
  }
  ApplyOptions opts;
  opts.truncation = trunc;
  opts.normalize = true;
  const auto out = apply_mpo(u, MatrixProductState(std::move(sites)), system_sites(n), opts).state;
  if (measured.empty()) return Matrix::Identity(1, 1);
  const Index first = system_site(measured.front());
  const Index width = system_site(measured.back()) - first + 1;
  std::vector<Index> keep;
  for (Index j : measured) keep.push_back(system_site(j) - first);
  return keep_positions(reduced_density(out, first, width).matrix, width, keep);
}

struct SplitSetting {
  std::vector<Index> prepared_qubits, measured_qubits;
  std::string prep_axes, meas_axes;
  std::vector<Index> prep_positions, meas_positions;
};

inline SplitSetting split(const AncillaFreePlan& plan) {
  SplitSetting s;
  for (Index j = 0; j < plan.n; ++j) {
    if (const auto& p = plan.preparation[static_cast<std::size_t>(j)]) {
      s.prepared_qubits.push_back(j);
      s.prep_axes.push_back(p->axis);
      s.prep_positions.push_back(p->position);
    }
    if (const auto& m = plan.observable[static_cast<std::size_t>(j)]) {
      s.measured_qubits.push_back(j);
      s.meas_axes.push_back(m->axis);
      s.meas_positions.push_back(m->position);
    }
  }
  return s;
}

inline std::vector<std::optional<Vector>> preparation_states(const AncillaFreePlan& plan, Index prep_outcome) {
  std::vector<std::optional<Vector>> states(static_cast<std::size_t>(plan.n));
  const Index a = plan.prepared_count();
  Index bit = 0;
  for (Index j = 0; j < plan.n; ++j)
    if (const auto& p = plan.preparation[static_cast<std::size_t>(j)])
      states[static_cast<std::size_t>(j)] = AncillaFreePlan::prepared_state(*p, outcome_sign(prep_outcome, a, bit++));
  return states;
}

/// Window outcome index from the prepared-qubit and measured-qubit outcomes.
inline Index join_outcome(const SplitSetting& s, Index width, Index prep_outcome, Index meas_outcome) {
  Index idx = 0;
  const auto a = static_cast<Index>(s.prep_positions.size());
  const auto b = static_cast<Index>(s.meas_positions.size());
  for (Index i = 0; i < a; ++i)
    idx |= ((prep_outcome >> (a - 1 - i)) & 1) << (width - 1 - s.prep_positions[static_cast<std::size_t>(i)]);
  for (Index i = 0; i < b; ++i)
    idx |= ((meas_outcome >> (b - 1 - i)) & 1) << (width - 1 - s.meas_positions[static_cast<std::size_t>(i)]);
  return idx;
}

/// Conditional system distributions q(. | s_A) for every s_A.
inline std::vector<std::vector<double>> conditional_distributions(const MatrixProductOperator& u,
                                                                  const AncillaFreePlan& plan, const Truncation& trunc) {
  const auto s = split(plan);
  std::vector<std::vector<double>> out;
  for (Index pa = 0; pa < pow2(plan.prepared_count()); ++pa) {
    const Matrix rho = channel_output_density(u, preparation_states(plan, pa), s.measured_qubits, trunc);
    out.push_back(s.meas_axes.empty() ? std::vector<double>{1.0} : pauli_outcome_distribution(rho, s.meas_axes));
  }
  return out;
}

inline std::vector<double> joint_distribution(const AncillaFreePlan& plan,
                                              const std::vector<std::vector<double>>& conditional) {
  const auto s = split(plan);
  const Index width = plan.spec.width();
  const double weight = std::ldexp(1.0, -static_cast<int>(plan.prepared_count()));
  std::vector<double> p(static_cast<std::size_t>(pow2(width)), 0.0);
  for (std::size_t pa = 0; pa < conditional.size(); ++pa)
    for (std::size_t ms = 0; ms < conditional[pa].size(); ++ms)
      p[static_cast<std::size_t>(join_outcome(s, width, static_cast<Index>(pa), static_cast<Index>(ms)))] +=
          weight * conditional[pa][ms];
  return p;
}

/// Shot-level sampling: s_A uniform, then s_S from q(. | s_A). Untouched
/// qubits are maximally mixed, which is the average over uniformly random
/// computational-basis inputs; q already includes that average.
inline std::vector<std::uint64_t> sample_ancilla_free(const AncillaFreePlan& plan,
                                                      const std::vector<std::vector<double>>& conditional,
                                                      std::uint64_t shots, PhiloxEngine& rng) {
  const auto s = split(plan);
  const Index width = plan.spec.width();
  std::vector<double> uniform(conditional.size(), 1.0 / static_cast<double>(conditional.size()));
  const auto prep_counts = sample(uniform, shots, rng);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(pow2(width)), 0);
  for (std::size_t pa = 0; pa < conditional.size(); ++pa) {
    if (prep_counts[pa] == 0) continue;
    const auto c = sample(conditional[pa], prep_counts[pa], rng);
    for (std::size_t ms = 0; ms < c.size(); ++ms)
      counts[static_cast<std::size_t>(join_outcome(s, width, static_cast<Index>(pa), static_cast<Index>(ms)))] += c[ms];
  }
  return counts;
}

}  // namespace detail

/// Exact joint distribution of the ancilla-free experiment for one setting;
/// equals exact_distribution on the Choi state of u.
inline std::vector<double> ancilla_free_distribution(const MatrixProductOperator& u, const ObservableSpec& spec,
                                                     const Truncation& trunc = {}) {
  const auto plan = ancilla_free_plan(spec, u.length());
  return detail::joint_distribution(plan, detail::conditional_distributions(u, plan, trunc));
}

/// Ancilla-free dataset for the channel u. Within each window the channel is
/// simulated once per preparation and shared by all system measurements.
inline MeasurementDataset measure_ancilla_free(const MatrixProductOperator& u, Index r, std::uint64_t shots,
                                               std::uint64_t seed, const Truncation& trunc = {}) {
  const Index n = u.length();
  MeasurementDataset d{n, r, shots, Provenance::ancilla_free, seed, {}};
  const auto specs = all_specs(2 * n, r);
  Index current_k = -1;
  // (prepared axes) -> per s_A output density of the window's system qubits
  std::map<std::string, std::vector<Matrix>> cache;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto plan = ancilla_free_plan(specs[i], n);
    const auto s = detail::split(plan);
    if (specs[i].k != current_k) {
      cache.clear();
      current_k = specs[i].k;
    }
    auto it = cache.find(s.prep_axes);
    if (it == cache.end()) {
      std::vector<Matrix> rhos;
      for (Index pa = 0; pa < pow2(plan.prepared_count()); ++pa)
        rhos.push_back(detail::channel_output_density(u, detail::preparation_states(plan, pa), s.measured_qubits, trunc));
      it = cache.emplace(s.prep_axes, std::move(rhos)).first;
    }
    std::vector<std::vector<double>> conditional;
    for (const auto& rho : it->second)
      conditional.push_back(s.meas_axes.empty() ? std::vector<double>{1.0} : pauli_outcome_distribution(rho, s.meas_axes));
    OutcomeTable t{specs[i], shots, {}, {}};
    if (shots == kExactShots) {
      t.probabilities = detail::joint_distribution(plan, conditional);
    } else {
      PhiloxEngine rng(seed, i);
      t.counts = detail::sample_ancilla_free(plan, conditional, shots, rng);
    }
    d.tables.push_back(std::move(t));
  }
  return d;
}

}  // namespace mpqpt
