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

// Grid experiments: each grid point builds a channel, simulates measurements
// on its Choi state, reconstructs it and scores the result. Points run on a
// bounded worker pool; every random choice is keyed by (master seed, point,
// repeat), so results do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mpqpt/circuit/circuit_mpo.hpp"
#include "mpqpt/extraction/extraction.hpp"
#include "mpqpt/hamiltonian/evolution.hpp"
#include "mpqpt/measurement/ancilla_free.hpp"
#include "mpqpt/measurement/simulator.hpp"
#include "mpqpt/random.hpp"
#include "mpqpt/reconstruction/reconstruction.hpp"

namespace mpqpt {

enum class ExperimentKind { circuit_recon, ham_single_time, ham_two_time, scaling_sweep };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::circuit_recon: return "circuit_recon";
    case ExperimentKind::ham_single_time: return "ham_single_time";
    case ExperimentKind::ham_two_time: return "ham_two_time";
    case ExperimentKind::scaling_sweep: return "scaling_sweep";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "circuit_recon") return ExperimentKind::circuit_recon;
  if (s == "ham_single_time") return ExperimentKind::ham_single_time;
  if (s == "ham_two_time") return ExperimentKind::ham_two_time;
  if (s == "scaling_sweep") return ExperimentKind::scaling_sweep;
  throw RangeError("unknown experiment kind '" + s + "'");
}

/// Circuit targets are "ghz", "qft" and "qft_c<cutoff>"; anything else is a
/// Hamiltonian family name.
inline bool is_circuit_target(const std::string& target) {
  return target == "ghz" || target == "qft" || target.rfind("qft_c", 0) == 0;
}

inline Circuit build_circuit_target(const std::string& target, Index n) {
  if (target == "ghz") return build_ghz(n);
  if (target == "qft") return build_qft(n);
  if (target.rfind("qft_c", 0) == 0) {
    const std::string digits = target.substr(5);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw RangeError("bad circuit target '" + target + "'");
    return build_qft_approx(n, std::stoll(digits));
  }
  throw RangeError("unknown circuit target '" + target + "'");
}

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::circuit_recon;
  std::string target = "ghz";
  std::vector<Index> n_grid{4};
  std::vector<Index> r_grid{3};
  /// Shots per setting; kExactShots (0) stores exact distributions.
  std::vector<std::uint64_t> shots_grid{kExactShots};
  /// t / t_n for the Hamiltonian kinds.
  std::vector<double> time_grid{1.0};
  /// (t' - t) / t_n for ham_two_time.
  std::vector<double> delay_grid{1.0};
  Index repeats = 5;
  std::uint64_t master_seed = 0;
  /// Seed of the random_nn couplings; fixed across grid points.
  std::uint64_t hamiltonian_seed = 7;
  Provenance provenance = Provenance::ancilla_assisted;
  ReconstructionConfig reconstruction{};
  SeriesConfig series{};
  /// Bond cap used while building the true channel and its Choi state.
  Index channel_bond = 256;
  PhaseRule phase_rule = PhaseRule::trace;
  std::string output_dir = "runs";
};

inline bool is_hamiltonian_kind(const ExperimentConfig& cfg) {
  return cfg.kind == ExperimentKind::ham_single_time || cfg.kind == ExperimentKind::ham_two_time ||
         (cfg.kind == ExperimentKind::scaling_sweep && !is_circuit_target(cfg.target));
}

inline void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw RangeError("ExperimentConfig: " + what); };
  if (cfg.n_grid.empty() || cfg.r_grid.empty() || cfg.shots_grid.empty()) fail("every grid must be nonempty");
  if (cfg.repeats < 1) fail("repeats must be at least 1");
  if (cfg.channel_bond < 1) fail("channel_bond must be at least 1");
  for (Index n : cfg.n_grid)
    if (n < 1) fail("n must be positive");
  for (Index r : cfg.r_grid)
    if (r < 1) fail("r must be positive");
  if (cfg.kind == ExperimentKind::circuit_recon && !is_circuit_target(cfg.target)) fail("circuit_recon needs a circuit target");
  if (is_hamiltonian_kind(cfg)) {
    const Family f = parse_family(cfg.target);
    if (f == Family::custom) fail("custom Hamiltonians are not available from a config");
    if (cfg.time_grid.empty()) fail("time grid must be nonempty");
    for (double t : cfg.time_grid)
      if (!(t > 0.0)) fail("times must be positive");
  } else if (cfg.kind != ExperimentKind::scaling_sweep || is_circuit_target(cfg.target)) {
    build_circuit_target(cfg.target, 2);
  }
  if (cfg.kind == ExperimentKind::ham_two_time) {
    if (cfg.delay_grid.empty()) fail("delay grid must be nonempty");
    for (double d : cfg.delay_grid)
      if (!(d > 0.0)) fail("delays must be positive");
  }
  if (cfg.phase_rule == PhaseRule::reference) fail("phase rule 'reference' needs an explicit reference operator");
  validate(cfg.reconstruction);
  cfg.series.coefficients();
}

/// One grid point without its repeat index. Two-time points carry all delays.
struct GridPoint {
  Index n = 0;
  Index r = 0;
  std::uint64_t shots = kExactShots;
  double time = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<GridPoint> grid_points(const ExperimentConfig& cfg) {
  std::vector<GridPoint> out;
  const bool ham = is_hamiltonian_kind(cfg);
  const std::vector<double> times = ham ? cfg.time_grid : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
  for (Index n : cfg.n_grid)
    for (Index r : cfg.r_grid)
      for (auto m : cfg.shots_grid)
        for (double t : times) out.push_back({n, r, m, t});
  return out;
}

/// Seeds derived from the master seed by one Philox block keyed on it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t repeat, std::uint32_t purpose) {
  const Philox4x32::Block b = Philox4x32::encrypt(
      {static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(point >> 32), static_cast<std::uint32_t>(repeat), purpose},
      {static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)});
  return (std::uint64_t{b[0]} << 32) | b[1];
}

enum SeedPurpose : std::uint32_t { kSeedMeasure = 0, kSeedReconstruct = 1, kSeedMeasureLater = 2, kSeedReconstructLater = 3 };

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Scores of one (grid point, repeat, delay). Inapplicable metrics are NaN.
struct PointResult {
  Index point = 0;
  Index n = 0;
  Index r = 0;
  std::uint64_t shots = kExactShots;
  double time = kNaN;
  double delay = kNaN;
  Index repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double fidelity = kNaN;
  /// Fidelity of the second reconstruction (two-time only).
  double fidelity_later = kNaN;
  double distance = kNaN;
  double distance_projected = kNaN;
  /// Single-time distance at `time`, reported next to two-time results.
  double distance_single = kNaN;
  double channel_error = 0.0;
  double log_likelihood = kNaN;
  Index sweeps = 0;
  std::vector<double> log_likelihood_trace;
  double wall_seconds = 0.0;
};

struct Spread {
  double mean = kNaN;
  double min = kNaN;
  double max = kNaN;
  double std = kNaN;
  Index count = 0;
};

/// Mean, extremes and sample standard deviation of the finite values.
inline Spread spread(const std::vector<double>& xs) {
  Spread s;
  std::vector<double> v;
  for (double x : xs)
    if (std::isfinite(x)) v.push_back(x);
  s.count = static_cast<Index>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

struct AggregateRow {
  Index n = 0;
  Index r = 0;
  std::uint64_t shots = kExactShots;
  double time = kNaN;
  double delay = kNaN;
  Index failures = 0;
  Spread fidelity;
  Spread distance;
  Spread distance_projected;
  Spread distance_single;
};

struct RunRecord {
  std::string config_hash;
  ExperimentConfig config;
  std::vector<PointResult> points;
  std::vector<AggregateRow> aggregates;

  Index failures() const {
    return static_cast<Index>(std::count_if(points.begin(), points.end(), [](const PointResult& p) { return !p.ok; }));
  }
};

namespace detail {

inline bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

inline std::vector<AggregateRow> aggregate(const std::vector<PointResult>& points) {
  std::vector<AggregateRow> rows;
  std::vector<std::vector<const PointResult*>> members;
  for (const auto& p : points) {
    std::size_t i = 0;
    for (; i < rows.size(); ++i)
      if (rows[i].n == p.n && rows[i].r == p.r && rows[i].shots == p.shots && same(rows[i].time, p.time) &&
          same(rows[i].delay, p.delay))
        break;
    if (i == rows.size()) {
      rows.push_back({p.n, p.r, p.shots, p.time, p.delay, 0, {}, {}, {}, {}});
      members.emplace_back();
    }
    members[i].push_back(&p);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> f, d, dp, ds;
    for (const auto* p : members[i]) {
      if (!p->ok) {
        ++rows[i].failures;
        continue;
      }
      f.push_back(p->fidelity);
      d.push_back(p->distance);
      dp.push_back(p->distance_projected);
      ds.push_back(p->distance_single);
    }
    rows[i].fidelity = spread(f);
    rows[i].distance = spread(d);
    rows[i].distance_projected = spread(dp);
    rows[i].distance_single = spread(ds);
  }
  return rows;
}

inline UnitaryEstimate phase_fixed(const UnitaryEstimate& u, PhaseRule rule) {
  switch (rule) {
    case PhaseRule::none: return u;
    case PhaseRule::largest_entry: return fix_phase_largest_entry(u);
    default: break;
  }
  try {
    return fix_phase(u);
  } catch (const DegeneratePhaseError&) {
    if (u.mpo.length() > kDenseOperatorCap) throw;
    return fix_phase_largest_entry(u);
  }
}

struct Reconstructed {
  MatrixProductState truth;
  ReconstructionResult result;
  double channel_error = 0.0;
};

inline Reconstructed reconstruct_channel(const MatrixProductOperator& u, double channel_error, const ExperimentConfig& cfg,
                                         Index r, std::uint64_t shots, std::uint64_t measure_seed,
                                         std::uint64_t recon_seed) {
  const Truncation trunc = Truncation::bond(cfg.channel_bond);
  auto choi = choi_state(u, trunc);
  MeasurementDataset ds = cfg.provenance == Provenance::ancilla_free
                              ? measure_ancilla_free(u, r, shots, measure_seed, trunc)
                              : measure_ancilla_assisted(choi.state, r, shots, measure_seed);
  ReconstructionConfig rc = cfg.reconstruction;
  rc.seed = recon_seed;
  return {choi.state, reconstruct(ds, rc), channel_error + choi.truncation_error};
}

inline UnitaryEstimate estimate_unitary(const ReconstructionResult& res, PhaseRule rule) {
  return phase_fixed(choi_to_unitary(normalized(res.state)), rule);
}

/// D against the true Hamiltonian, densely when possible and otherwise on
/// the nearest-neighbour projections only.
inline void score(PointResult& p, const NearestNeighbourHamiltonian& h, const HamiltonianEstimate& est) {
  if (est.dense.size() > 0) {
    const Matrix hd = to_dense(h, kDenseExtractionCap);
    p.distance = hamiltonian_distance(hd, est.dense);
    p.distance_projected = hamiltonian_distance(hd, to_dense(project_nearest_neighbour(est.dense), kDenseExtractionCap));
  } else {
    p.distance_projected = projected_distance(h, project_nearest_neighbour(*est.mpo));
  }
}

inline std::vector<PointResult> run_point(const ExperimentConfig& cfg, Index index, const GridPoint& g, Index repeat) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t key = static_cast<std::uint64_t>(index);
  const auto rep = static_cast<std::uint64_t>(repeat);
  PointResult base;
  base.point = index;
  base.n = g.n;
  base.r = g.r;
  base.shots = g.shots;
  base.time = g.time;
  base.repeat = repeat;
  base.seed = derive_seed(cfg.master_seed, key, rep, kSeedMeasure);
  const Truncation trunc = Truncation::bond(cfg.channel_bond);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto fill = [](PointResult& p, const Reconstructed& rec) {
    p.fidelity = state_fidelity(rec.truth, rec.result.state);
    p.channel_error = rec.channel_error;
    p.log_likelihood = rec.result.final_log_likelihood;
    p.sweeps = rec.result.sweeps_used;
    p.log_likelihood_trace = rec.result.log_likelihood_trace;
  };

  std::vector<PointResult> out;
  try {
    if (!is_hamiltonian_kind(cfg)) {
      const auto c = circuit_to_mpo(build_circuit_target(cfg.target, g.n), trunc);
      const auto rec = reconstruct_channel(c.op, c.error_bound, cfg, g.r, g.shots, base.seed,
                                           derive_seed(cfg.master_seed, key, rep, kSeedReconstruct));
      PointResult p = base;
      fill(p, rec);
      p.ok = true;
      out.push_back(p);
    } else {
      const auto h = build_family(parse_family(cfg.target), g.n, cfg.hamiltonian_seed);
      const double tn = operator_norm(h).time_unit();
      const double t = g.time * tn;
      const auto ev = evolve({h, t, EvolutionMethod::automatic, 0.0, trunc});
      const auto rec = reconstruct_channel(ev.op, ev.truncation_error, cfg, g.r, g.shots, base.seed,
                                           derive_seed(cfg.master_seed, key, rep, kSeedReconstruct));
      const UnitaryEstimate u = estimate_unitary(rec.result, cfg.phase_rule);
      PointResult single = base;
      fill(single, rec);
      score(single, h, extract_hamiltonian(u, t, cfg.series, trunc));
      if (cfg.kind != ExperimentKind::ham_two_time) {
        single.ok = true;
        out.push_back(single);
      } else {
        const auto later_measure = derive_seed(cfg.master_seed, key, rep, kSeedMeasureLater);
        const auto later_recon = derive_seed(cfg.master_seed, key, rep, kSeedReconstructLater);
        for (std::size_t k = 0; k < cfg.delay_grid.size(); ++k) {
          const double t2 = (g.time + cfg.delay_grid[k]) * tn;
          const auto ev2 = evolve({h, t2, EvolutionMethod::automatic, 0.0, trunc});
          // Each delay gets its own sample: offset the later-time seeds.
          const auto rec2 = reconstruct_channel(ev2.op, ev2.truncation_error, cfg, g.r, g.shots, later_measure + k,
                                                later_recon + k);
          const UnitaryEstimate u2 = estimate_unitary(rec2.result, cfg.phase_rule);
          PointResult p = single;
          p.delay = cfg.delay_grid[k];
          p.distance_single = single.distance;
          p.fidelity_later = state_fidelity(rec2.truth, rec2.result.state);
          p.channel_error = std::max(rec.channel_error, rec2.channel_error);
          score(p, h, extract_two_time(u, u2, t, t2, cfg.series, tn, trunc));
          p.ok = true;
          out.push_back(p);
        }
      }
    }
  } catch (const std::exception& e) {
    out.clear();
    const std::vector<double> delays =
        cfg.kind == ExperimentKind::ham_two_time ? cfg.delay_grid : std::vector<double>{kNaN};
    for (double d : delays) {
      PointResult p = base;
      p.delay = d;
      p.ok = false;
      p.error = e.what();
      out.push_back(p);
    }
  }
  for (auto& p : out) p.wall_seconds = elapsed();
  return out;
}

}  // namespace detail

/// 64-bit FNV-1a, used to name runs after their configuration.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 15];
  return out;
}

struct RunOptions {
  Index jobs = 1;
  /// Called once per finished job (from the worker thread, serialized).
  std::function<void(const std::vector<PointResult>&)> on_result;
};

/// Runs every grid point and repeat. Failing points are recorded with their
/// error message and do not abort the run. `config_hash` is left for the
/// caller, who owns the serialized form of the config.
inline RunRecord run(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  validate(cfg);
  const auto grid = grid_points(cfg);
  struct Job {
    Index point;
    Index repeat;
  };
  std::vector<Job> jobs;
  for (Index i = 0; i < static_cast<Index>(grid.size()); ++i)
    for (Index k = 0; k < cfg.repeats; ++k) jobs.push_back({i, k});

  std::vector<std::vector<PointResult>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      slots[j] = detail::run_point(cfg, jobs[j].point, grid[static_cast<std::size_t>(jobs[j].point)], jobs[j].repeat);
      if (opts.on_result) {
        const std::lock_guard<std::mutex> lock(report);
        opts.on_result(slots[j]);
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<Index>(opts.jobs, 1, static_cast<Index>(std::max<std::size_t>(jobs.size(), 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunRecord rec;
  rec.config = cfg;
  for (auto& s : slots)
    for (auto& p : s) rec.points.push_back(std::move(p));
  rec.aggregates = detail::aggregate(rec.points);
  return rec;
}

}  // namespace mpqpt
