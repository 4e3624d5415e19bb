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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion plus
// detail lines, writes run records under the output directory and exits 4
// if any criterion fails.
//
//   acceptance [--out DIR] [criterion ...]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "mpqpt/circuit/circuit_mpo.hpp"
#include "mpqpt/harness/report.hpp"
#include "mpqpt/measurement/ancilla_free.hpp"
#include "mpqpt/tensor/operations.hpp"
#include "support/oracles.hpp"

namespace mpqpt {
namespace {

using testing::Rng;

constexpr int kAcceptanceFailure = 4;
constexpr std::uint64_t kMasterSeed = 2026;

/// Collects the worst observed value of a check together with its verdict.
struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

/// Random MPO scaled to the Frobenius norm of a unitary, so entries are O(1).
MatrixProductOperator unit_scale_mpo(Index length, Index bond, Rng& rng) {
  const auto op = testing::random_mpo(length, bond, rng);
  return scaled(op, std::sqrt(static_cast<double>(pow2(length))) / frobenius_norm(op));
}

std::string outdir = "acceptance_runs";

RunRecord run_and_save(const ExperimentConfig& cfg) {
  RunRecord r = run(cfg);
  r.config_hash = config_hash(cfg);
  write_run(r, outdir);
  return r;
}

std::string describe_failures(const RunRecord& r) {
  std::string out;
  for (const auto& p : r.points)
    if (!p.ok) out += " [n=" + std::to_string(p.n) + " r=" + std::to_string(p.r) + ": " + p.error + "]";
  return out;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  Outcome o;
  Rng rng(101);
  std::uniform_int_distribution<Index> length(2, 6), bond(1, 5), qubits(1, 3);
  const int instances = 60;
  double e_inner = 0, e_apply = 0, e_mult = 0, e_red = 0, e_choi = 0, e_unit = 0;
  for (int k = 0; k < instances; ++k) {
    const Index L = length(rng);
    const auto a = testing::random_mps(L, bond(rng), rng);
    const auto b = testing::random_mps(L, bond(rng), rng);
    e_inner = std::max(e_inner, std::abs(inner(a, b) - to_dense(a).dot(to_dense(b))));

    const auto op = unit_scale_mpo(L, bond(rng), rng);
    const auto applied = apply_mpo(op, a, {}, ApplyOptions{Truncation::lossless()}).state;
    e_apply = std::max(e_apply, max_abs(to_dense(applied) - to_dense(op) * to_dense(a)));

    const auto op2 = unit_scale_mpo(L, bond(rng), rng);
    const auto prod = multiply_mpo(op, op2, Truncation::lossless()).op;
    e_mult = std::max(e_mult, max_abs(to_dense(prod) - to_dense(op) * to_dense(op2)));

    std::uniform_int_distribution<Index> start(0, L - 1);
    const Index s = start(rng);
    std::uniform_int_distribution<Index> width(1, std::min<Index>(3, L - s));
    const Index w = width(rng);
    e_red = std::max(e_red, max_abs(reduced_density(a, s, w).matrix - testing::dense_partial_trace(to_dense(a), L, s, w)));

    const Index n = qubits(rng);
    const Matrix u = testing::random_unitary(pow2(n), rng);
    const auto psi = choi_state(mpo_from_dense(u), Truncation::lossless()).state;
    e_choi = std::max(e_choi, max_abs(to_dense(psi) - testing::dense_choi(u)));
    e_unit = std::max(e_unit, max_abs(to_dense(choi_to_unitary(mps_from_dense(testing::dense_choi(u))).mpo) - u));
  }
  const std::string each = " over " + std::to_string(instances) + " instances, max |diff| = ";
  o.require(e_inner <= 1e-10, "inner" + each + fmt(e_inner));
  o.require(e_apply <= 1e-10, "apply_mpo" + each + fmt(e_apply));
  o.require(e_mult <= 1e-10, "multiply_mpo" + each + fmt(e_mult));
  o.require(e_red <= 1e-10, "reduced_density" + each + fmt(e_red));
  o.require(e_choi <= 1e-10, "choi_state" + each + fmt(e_choi));
  o.require(e_unit <= 1e-10, "choi_to_unitary" + each + fmt(e_unit));
  return o;
}

Outcome criterion_2() {
  Outcome o;
  Rng rng(202);
  for (Index n : {2, 3})
    for (int trial = 0; trial < 3; ++trial) {
      const auto u = mpo_from_dense(testing::random_unitary(pow2(n), rng));
      const auto psi = choi_state(u, Truncation::lossless()).state;
      double worst = 0.0;
      std::size_t specs = 0;
      for (Index r = 1; r <= 2 * n; ++r) {
        const auto a = measure_ancilla_assisted(psi, r, kExactShots, 0);
        const auto f = measure_ancilla_free(u, r, kExactShots, 0);
        for (std::size_t i = 0; i < a.tables.size(); ++i) {
          const auto& pa = a.tables[i].probabilities;
          const auto& pf = f.tables[i].probabilities;
          if (!(a.tables[i].spec == f.tables[i].spec) || pa.size() != pf.size()) worst = kNaN;
          for (std::size_t s = 0; s < pa.size(); ++s) worst = std::max(worst, std::abs(pa[s] - pf[s]));
        }
        specs += a.tables.size();
      }
      o.require(worst <= 1e-10, std::to_string(n) + " qubits, trial " + std::to_string(trial) + ": " +
                                    std::to_string(specs) + " specs, max |diff| = " + fmt(worst));
    }
  return o;
}

Outcome criterion_3() {
  Outcome o;
  bool ghz = true;
  for (Index n = 2; n <= 32; ++n) ghz = ghz && depth_profile(build_ghz(n)).max_depth == 1;
  o.require(ghz, "GHZ d_max = 1 for n = 2..32");

  bool qft = true;
  for (Index n = 2; n <= 32; ++n) {
    const auto d = depth_profile(build_qft(n)).depths;
    for (Index i = 1; i < n; ++i) qft = qft && d[static_cast<std::size_t>(i - 1)] == i * (n - i);
  }
  o.require(qft, "QFT d_i = i(n-i) for n = 2..32");

  bool bonds = true;
  for (Index n = 2; n <= 8; ++n)
    for (const auto& c : {build_ghz(n), build_qft(n)}) {
      const auto r = circuit_to_mpo(c, Truncation{});
      const auto d = depth_profile(c).depths;
      for (Index i = 0; i + 1 < n; ++i)
        bonds = bonds && r.max_pre_compression_bonds[static_cast<std::size_t>(i + 1)] <=
                             ipow(4, std::min<Index>(d[static_cast<std::size_t>(i)], 15));
    }
  o.require(bonds, "pre-compression bonds <= 4^{d_i} for GHZ and QFT, n = 2..8");

  const auto c = build_qft(8);
  const auto r = circuit_to_mpo(c, 16);
  const double f = testing::dense_process_fidelity(testing::reversed_output_dft(8), to_dense(r.op));
  const double measure = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(f))));
  o.require(r.op.max_bond() <= 16 && measure < 2e-5,
            "QFT n = 8 at bond 16: [2(1-sqrt F)]^{1/2} = " + fmt(measure) + ", max bond " + std::to_string(r.op.max_bond()));
  return o;
}

Outcome criterion_4() {
  Outcome o;
  double worst_ratio = 0.0;
  int cases = 0;
  for (Index n = 1; n <= 6; ++n) {
    const Matrix exact = testing::dense_circuit(build_qft(n));
    for (Index c = 0; c <= n; ++c) {
      const double dist = testing::dense_operator_norm(exact - testing::dense_circuit(build_qft_approx(n, c)));
      const double bound = static_cast<double>(n) * std::numbers::pi / std::ldexp(1.0, static_cast<int>(c));
      if (dist > bound + 1e-12) o.require(false, "n=" + std::to_string(n) + " c=" + std::to_string(c) + ": " + fmt(dist));
      worst_ratio = std::max(worst_ratio, dist / bound);
      ++cases;
    }
  }
  o.require(worst_ratio <= 1.0 + 1e-12,
            std::to_string(cases) + " (n, c) pairs, largest ||QFT - QFT_c|| / (n pi / 2^c) = " + fmt(worst_ratio));
  return o;
}

Outcome criterion_5() {
  Outcome o;
  Rng rng(505);
  std::uniform_int_distribution<Index> qubits(1, 4);
  std::uniform_real_distribution<double> eps(1e-3, 1.0);
  double worst_gap = -std::numeric_limits<double>::infinity(), worst_library = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = qubits(rng);
    const Matrix u = testing::random_unitary(pow2(n), rng);
    const Matrix v = k % 2 ? testing::random_unitary(pow2(n), rng)
                           : Matrix((u * (kI * eps(rng) * testing::random_hermitian(pow2(n), rng)).exp()).eval());
    const double f = process_fidelity(mps_from_dense(testing::dense_choi(u)), mps_from_dense(testing::dense_choi(v)));
    worst_library = std::max(worst_library, std::abs(f - testing::dense_process_fidelity(u, v)));
    const double op = testing::dense_operator_norm(u - v);
    worst_gap = std::max(worst_gap, 2.0 * (1.0 - std::sqrt(f)) - op * op);
  }
  o.require(worst_gap <= 1e-12, "100 pairs, max [2(1-sqrt F) - ||U-U'||^2] = " + fmt(worst_gap));
  o.require(worst_library <= 1e-12, "process_fidelity matches dense trace formula to " + fmt(worst_library));
  return o;
}

ExperimentConfig ghz_exact_config() {
  ExperimentConfig c;
  c.name = "acceptance_ghz_exact";
  c.kind = ExperimentKind::circuit_recon;
  c.target = "ghz";
  c.n_grid = {4, 6, 8};
  c.r_grid = {3};
  c.repeats = 1;
  c.master_seed = kMasterSeed;
  c.reconstruction.target_bond = 4;
  c.reconstruction.max_sweeps = 20;
  return c;
}

ExperimentConfig qft_exact_config() {
  ExperimentConfig c;
  c.name = "acceptance_qft_exact";
  c.kind = ExperimentKind::circuit_recon;
  c.target = "qft";
  c.n_grid = {8};
  c.r_grid = {5};
  c.repeats = 1;
  c.master_seed = kMasterSeed;
  c.reconstruction.target_bond = 16;
  c.reconstruction.max_sweeps = 20;
  return c;
}

ExperimentConfig ghz_sampled_config() {
  ExperimentConfig c = ghz_exact_config();
  c.name = "acceptance_ghz_sampled";
  c.n_grid = {4};
  c.shots_grid = {1000, 10000, 100000};
  c.repeats = 5;
  return c;
}

Outcome criterion_6() {
  Outcome o;
  const auto ghz = run_and_save(ghz_exact_config());
  o.require(ghz.failures() == 0, "GHZ exact runs completed" + describe_failures(ghz));
  for (const auto& a : ghz.aggregates)
    o.require(a.fidelity.min >= 0.999, "GHZ n = " + std::to_string(a.n) + ", r = 3, exact: F = " + fmt(a.fidelity.min));

  const auto qft = run_and_save(qft_exact_config());
  o.require(qft.failures() == 0, "QFT exact run completed" + describe_failures(qft));
  for (const auto& a : qft.aggregates)
    o.require(a.fidelity.min >= 0.99, "QFT n = 8, r = 5, exact: F = " + fmt(a.fidelity.min));

  const auto sampled = run_and_save(ghz_sampled_config());
  o.require(sampled.failures() == 0, "GHZ sampled runs completed" + describe_failures(sampled));
  try {
    const auto fits = scaling_report(sampled, ScalingAxis::shots, ScalingMetric::root_infidelity);
    for (const auto& f : fits) {
      std::string means;
      for (const auto& a : f.rows) means += " " + fmt(std::sqrt(std::max(0.0, 1.0 - std::sqrt(a.fidelity.mean))));
      o.require(f.fit.slope >= 0.7 && f.fit.slope <= 1.3,
                "GHZ n = 4 sampled, (1-sqrt F)^{1/2} vs 1/sqrt M slope = " + fmt(f.fit.slope) + " [" +
                    fmt(f.fit.ci_low) + ", " + fmt(f.fit.ci_high) + "]; values" + means);
    }
  } catch (const Error& e) {
    o.require(false, std::string("GHZ sampled scaling fit: ") + e.what());
  }
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const std::vector<Family> families{Family::ising_critical, Family::heisenberg, Family::random_nn};
  for (Family fam : families) {
    double worst_ratio = 0.0;
    double min_fail = std::numeric_limits<double>::infinity();
    for (Index n = 2; n <= 6; ++n) {
      const Matrix h = to_dense(build_family(fam, n, 7));
      const double norm = hermitian_norm(h);
      for (double x : {0.5, 1.0, 1.5}) {
        const double t = x / norm;
        const UnitaryEstimate u{mpo_from_dense(hermitian_exp(h, t)), false, PhaseRule::none, {}};
        const Matrix est = extract_hamiltonian(u, t).dense;
        const double rel = hermitian_norm(hermitian_part(est - h)) / norm;
        worst_ratio = std::max(worst_ratio, rel / (1.5 * std::pow(x, 6) / 140.0));
      }
      for (double x : {std::numbers::pi + 0.1, 3.6, 4.2, 5.0}) {
        const double t = x / norm;
        const UnitaryEstimate u{mpo_from_dense(hermitian_exp(h, t)), false, PhaseRule::none, {}};
        min_fail = std::min(min_fail, hamiltonian_distance(h, extract_hamiltonian(u, t).dense));
      }
    }
    o.require(worst_ratio <= 1.0, to_string(fam) + ", n = 2..6, ||Ht|| in {0.5, 1, 1.5}: largest error / bound = " +
                                      fmt(worst_ratio));
    o.require(min_fail > 0.5, to_string(fam) + ", n = 2..6, ||Ht|| in {pi+0.1, 3.6, 4.2, 5}: smallest D = " + fmt(min_fail));
  }
  return o;
}

ExperimentConfig shot_scaling_config() {
  ExperimentConfig c;
  c.name = "acceptance_shot_scaling";
  c.kind = ExperimentKind::scaling_sweep;
  c.target = "heisenberg";
  c.n_grid = {6};
  c.r_grid = {5};
  c.shots_grid = {1000, 10000, 100000};
  c.time_grid = {2.0};
  c.repeats = 5;
  c.master_seed = kMasterSeed;
  c.series.order = 40;
  c.reconstruction.target_bond = 32;
  c.reconstruction.max_sweeps = 20;
  return c;
}

ExperimentConfig time_scaling_config() {
  ExperimentConfig c = shot_scaling_config();
  c.name = "acceptance_time_scaling";
  c.shots_grid = {10000};
  c.time_grid = {1.0, 1.5, 2.5};
  return c;
}

std::string fit_line(const ScalingFit& f) {
  std::string values;
  for (const auto& a : f.rows)
    values += " " + fmt(detail::axis_value(a, f.axis)) + ":" + fmt(f.metric == ScalingMetric::distance ? a.distance.mean
                                                                                             : a.distance_projected.mean);
  return "slope " + fmt(f.fit.slope) + " [" + fmt(f.fit.ci_low) + ", " + fmt(f.fit.ci_high) + "];" + values;
}

Outcome criterion_8() {
  Outcome o;
  const auto shots = run_and_save(shot_scaling_config());
  o.require(shots.failures() == 0, "M-sweep runs completed" + describe_failures(shots));
  const auto times = run_and_save(time_scaling_config());
  o.require(times.failures() == 0, "t-sweep runs completed" + describe_failures(times));
  try {
    for (const auto& f : scaling_report(shots, ScalingAxis::shots, ScalingMetric::distance))
      o.require(f.fit.slope >= -0.65 && f.fit.slope <= -0.35, "D vs M at t/t_n = 2: " + fit_line(f));
    for (const auto& f : scaling_report(shots, ScalingAxis::shots, ScalingMetric::distance_projected))
      o.details.push_back("  info projected D vs M: " + fit_line(f));

    RunRecord merged = times;
    for (const auto& a : shots.aggregates)
      if (a.shots == 10000) merged.aggregates.push_back(a);
    std::sort(merged.aggregates.begin(), merged.aggregates.end(),
              [](const AggregateRow& a, const AggregateRow& b) { return a.time < b.time; });
    for (const auto& f : scaling_report(merged, ScalingAxis::time, ScalingMetric::distance))
      o.require(f.fit.slope >= -1.4 && f.fit.slope <= -0.6, "D vs t/t_n at M = 1e4: " + fit_line(f));
    for (const auto& f : scaling_report(merged, ScalingAxis::time, ScalingMetric::distance_projected))
      o.details.push_back("  info projected D vs t/t_n: " + fit_line(f));
  } catch (const Error& e) {
    o.require(false, std::string("scaling fit: ") + e.what());
  }
  return o;
}

ExperimentConfig two_time_config(const std::string& family) {
  ExperimentConfig c;
  c.name = "acceptance_two_time_" + family;
  c.kind = ExperimentKind::ham_two_time;
  c.target = family;
  c.n_grid = {6};
  c.r_grid = {5};
  c.time_grid = {3.51};
  c.delay_grid = {0.5, 1.0, 2.0};
  c.repeats = 1;
  c.master_seed = kMasterSeed;
  c.reconstruction.target_bond = 32;
  c.reconstruction.max_sweeps = 30;
  return c;
}

std::vector<RunRecord> two_time_records;

Outcome criterion_9() {
  Outcome o;
  two_time_records.clear();
  for (const char* fam : {"ising_critical", "heisenberg", "random_nn"}) {
    const auto r = run_and_save(two_time_config(fam));
    two_time_records.push_back(r);
    o.require(r.failures() == 0, std::string(fam) + " runs completed" + describe_failures(r));
    for (const auto& p : r.points) {
      if (!p.ok) continue;
      o.require(p.distance <= 0.1, std::string(fam) + ", (t'-t)/t_n = " + fmt(p.delay) + ": D = " + fmt(p.distance) +
                                       " (F = " + fmt(p.fidelity) + ", F' = " + fmt(p.fidelity_later) + ")");
    }
    if (!r.points.empty() && r.points.front().ok)
      o.require(r.points.front().distance_single > 0.5,
                std::string(fam) + ", single-time at t/t_n = 3.51: D = " + fmt(r.points.front().distance_single));
  }
  return o;
}

Outcome criterion_10() {
  Outcome o;
  if (two_time_records.empty()) {
    o.require(false, "needs the outputs of criterion 9");
    return o;
  }
  for (const auto& r : two_time_records)
    for (const auto& p : r.points) {
      if (!p.ok) continue;
      o.require(p.distance_projected <= p.distance, r.config.target + ", (t'-t)/t_n = " + fmt(p.delay) +
                                                        ": projected D = " + fmt(p.distance_projected) +
                                                        ", raw D = " + fmt(p.distance));
    }
  return o;
}

Json without_wall_times(const RunRecord& r) {
  Json j = to_json(r);
  for (auto& p : j["points"]) p.erase("wall_seconds");
  return j;
}

Outcome criterion_11() {
  Outcome o;
  ExperimentConfig small_two_time = two_time_config("heisenberg");
  small_two_time.name = "acceptance_repeat_two_time";
  small_two_time.n_grid = {4};
  small_two_time.reconstruction.target_bond = 16;
  small_two_time.reconstruction.max_sweeps = 10;
  for (const auto& cfg : {ghz_exact_config(), ghz_sampled_config(), small_two_time}) {
    const auto a = run(cfg);
    RunOptions parallel;
    parallel.jobs = 2;
    const auto b = run(cfg, parallel);
    o.require(without_wall_times(a) == without_wall_times(b), cfg.name + ": repeated run is bit-identical");
  }
  return o;
}

}  // namespace
}  // namespace mpqpt

int main(int argc, char** argv) {
  using namespace mpqpt;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      outdir = argv[++i];
    } else {
      try {
        selected.insert(std::stoi(arg));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [--out DIR] [criterion ...]\n";
        return 2;
      }
    }
  }
  const std::vector<std::pair<int, Outcome (*)()>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},   {5, criterion_5},   {6, criterion_6},
      {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}, {11, criterion_11},
  };
  if (selected.count(10)) selected.insert(9);
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  (" << fmt(secs) << " s)\n";
    for (const auto& d : o.details) std::cout << d << "\n";
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all passed"))
            << "\n";
  return failed ? kAcceptanceFailure : 0;
}
