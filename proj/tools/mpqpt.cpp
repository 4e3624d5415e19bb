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

// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage or
// config error, 3 at least one grid point failed.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mpqpt/circuit/circuit_io.hpp"
#include "mpqpt/hamiltonian/hamiltonian_io.hpp"
#include "mpqpt/harness/report.hpp"
#include "mpqpt/measurement/dataset_io.hpp"
#include "mpqpt/tensor/io.hpp"

namespace {

using namespace mpqpt;
using namespace mpqpt::io;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPointFailures = 3;

template <typename T>
void save_chain(const std::string& path, const T& chain) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write(out, chain);
}

std::uint64_t parse_shots(const std::string& s) {
  if (s == "exact") return kExactShots;
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size() || v == 0) throw RangeError("shots must be a positive integer or 'exact'");
  return v;
}

/// Channel from a saved MPO, or built from a named target.
struct ChannelSource {
  std::string mpo_path;
  std::string target;
  Index n = 0;
  /// t / t_n for Hamiltonian targets.
  double time = 1.0;
  std::uint64_t hamiltonian_seed = 7;
  Index bond = 256;

  MatrixProductOperator build() const {
    if (!mpo_path.empty()) return load_mpo(mpo_path);
    if (target.empty() || n < 1) throw RangeError("give --channel, or --target with -n");
    const Truncation trunc = Truncation::bond(bond);
    if (is_circuit_target(target)) return circuit_to_mpo(build_circuit_target(target, n), trunc).op;
    const auto h = build_family(parse_family(target), n, hamiltonian_seed);
    return evolve({h, time * operator_norm(h).time_unit(), EvolutionMethod::automatic, 0.0, trunc}).op;
  }
};

void add_channel_options(CLI::App* app, ChannelSource& src) {
  app->add_option("--channel", src.mpo_path, "Channel MPO file");
  app->add_option("--target", src.target, "ghz, qft, qft_c<k>, heisenberg, ising_critical or random_nn");
  app->add_option("-n", src.n, "Number of qubits");
  app->add_option("--time", src.time, "t / t_n for Hamiltonian targets");
  app->add_option("--hamiltonian-seed", src.hamiltonian_seed, "Seed of random_nn couplings");
  app->add_option("--bond", src.bond, "Bond cap while building the channel");
}

int cmd_circuit(const std::string& target, Index n, Index bond, const std::string& out, const std::string& circuit_out) {
  const Circuit c = build_circuit_target(target, n);
  const auto profile = depth_profile(c);
  const auto r = circuit_to_mpo(c, Truncation::bond(bond));
  Json j{{"target", target},
         {"n", n},
         {"gates", c.gates().size()},
         {"depth_profile", profile.depths},
         {"max_depth", profile.max_depth},
         {"pre_compression_bonds", r.max_pre_compression_bonds},
         {"bonds", r.op.bond_dims()},
         {"error_bound", r.error_bound}};
  std::cout << j.dump(2) << '\n';
  if (!out.empty()) save_chain(out, r.op);
  if (!circuit_out.empty()) save(circuit_out, c);
  return 0;
}

int cmd_measure(const ChannelSource& src, Index r, const std::string& shots, const std::string& provenance,
                std::uint64_t seed, const std::string& out) {
  const auto u = src.build();
  const auto m = parse_shots(shots);
  const Truncation trunc = Truncation::bond(src.bond);
  const MeasurementDataset ds = parse_provenance(provenance) == Provenance::ancilla_free
                                    ? measure_ancilla_free(u, r, m, seed, trunc)
                                    : measure_ancilla_assisted(choi_state(u, trunc).state, r, m, seed);
  std::cout << "settings " << ds.tables.size() << " qubits " << ds.n << " r " << ds.r << " shots " << shots << '\n';
  if (out.empty()) write(std::cout, ds);
  else save(out, ds);
  return 0;
}

int cmd_reconstruct(const std::string& data, ReconstructionConfig cfg, const std::string& init, std::uint64_t seed,
                    const std::string& truth, const std::string& out) {
  const auto ds = load_dataset(data);
  if (init == "random") cfg.init = InitKind::random;
  else if (init != "local_inversion") throw RangeError("unknown init '" + init + "'");
  cfg.seed = seed;
  const auto res = reconstruct(ds, cfg);
  Json j{{"sweeps", res.sweeps_used},
         {"converged", res.converged},
         {"log_likelihood", res.final_log_likelihood},
         {"max_bond", res.state.max_bond()},
         {"log_likelihood_trace", res.log_likelihood_trace}};
  if (!truth.empty()) j["fidelity"] = state_fidelity(choi_state(load_mpo(truth), Truncation::lossless()).state, res.state);
  std::cout << j.dump(2) << '\n';
  if (!out.empty()) save_chain(out, normalized(res.state));
  return 0;
}

struct ExtractOptions {
  std::string state;
  std::string state_later;
  double time = 0.0;
  double time_later = 0.0;
  Index series_order = 3;
  bool project_nn = false;
  std::string phase_mode = "trace";
  std::string hamiltonian;
  std::string family;
  std::uint64_t hamiltonian_seed = 7;
  bool in_tn = false;
  Index bond = 256;
  std::string out;
};

int cmd_extract(const ExtractOptions& o) {
  std::optional<NearestNeighbourHamiltonian> truth;
  auto unitary = [&](const std::string& path) {
    const auto u = choi_to_unitary(normalized(load_mps(path)));
    switch (parse_phase_rule(o.phase_mode)) {
      case PhaseRule::none: return u;
      case PhaseRule::trace: return fix_phase(u);
      case PhaseRule::largest_entry: return fix_phase_largest_entry(u);
      case PhaseRule::reference: break;
    }
    throw RangeError("phase mode 'reference' is not available from the command line");
  };
  const auto u = unitary(o.state);
  const Index n = u.mpo.length();
  if (!o.hamiltonian.empty()) truth = load_hamiltonian(o.hamiltonian);
  else if (!o.family.empty()) truth = build_family(parse_family(o.family), n, o.hamiltonian_seed);
  if (o.in_tn && !truth) throw RangeError("--in-tn needs --hamiltonian or --family");
  const double unit = o.in_tn ? operator_norm(*truth).time_unit() : 1.0;
  SeriesConfig series;
  series.order = o.series_order;
  const Truncation trunc = Truncation::bond(o.bond);
  const HamiltonianEstimate est =
      o.state_later.empty()
          ? extract_hamiltonian(u, o.time * unit, series, trunc)
          : extract_two_time(u, unitary(o.state_later), o.time * unit, o.time_later * unit, series, unit, trunc);
  const auto nn = est.dense.size() > 0 ? project_nearest_neighbour(est.dense) : project_nearest_neighbour(*est.mpo);
  Json j{{"method", est.method == ExtractionMethod::two_time ? "two_time" : "single_time"},
         {"t", est.t},
         {"series_order", o.series_order},
         {"noise_dominated", est.noise_dominated}};
  if (truth) {
    if (est.dense.size() > 0) {
      const Matrix hd = to_dense(*truth, kDenseExtractionCap);
      j["distance"] = hamiltonian_distance(hd, est.dense);
      j["distance_projected"] = hamiltonian_distance(hd, to_dense(nn, kDenseExtractionCap));
    } else {
      j["distance_projected"] = projected_distance(*truth, nn);
    }
  }
  std::cout << j.dump(2) << '\n';
  if (!o.out.empty()) {
    if (!o.project_nn && est.dense.size() == 0) throw RangeError("beyond the dense cap only --project-nn output is available");
    if (o.project_nn) {
      save(o.out, nn);
    } else {
      std::ofstream f(o.out);
      if (!f) throw FormatError("cannot write '" + o.out + "'");
      f << std::setprecision(17) << est.dense << '\n';
    }
  }
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out, Index jobs) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (seed) cfg.master_seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  RunOptions opts;
  opts.jobs = jobs;
  opts.on_result = [](const std::vector<PointResult>& rows) {
    for (const auto& p : rows) {
      std::cerr << "point " << p.point << " repeat " << p.repeat;
      if (!p.ok) std::cerr << " FAILED: " << p.error;
      else std::cerr << " F " << p.fidelity << " D " << p.distance << " D_nn " << p.distance_projected;
      std::cerr << " (" << p.wall_seconds << " s)\n";
    }
  };
  RunRecord record = run(cfg, opts);
  record.config_hash = config_hash(cfg);
  const auto files = write_run(record, cfg.output_dir);
  if (cfg.kind == ExperimentKind::scaling_sweep) {
    const Json fits = scaling_summary(record);
    std::ofstream f(files.record.substr(0, files.record.size() - 5) + "_scaling.json");
    f << fits.dump(2) << '\n';
    std::cout << fits.dump(2) << '\n';
  }
  write_summary_csv(std::cout, record);
  std::cout << "record " << files.record << '\n';
  return record.failures() > 0 ? kExitPointFailures : 0;
}

ScalingAxis parse_axis(const std::string& s) {
  if (s == "shots") return ScalingAxis::shots;
  if (s == "time") return ScalingAxis::time;
  if (s == "delay") return ScalingAxis::delay;
  throw RangeError("unknown axis '" + s + "'");
}

ScalingMetric parse_metric(const std::string& s) {
  if (s == "distance") return ScalingMetric::distance;
  if (s == "distance_projected") return ScalingMetric::distance_projected;
  if (s == "root_infidelity") return ScalingMetric::root_infidelity;
  throw RangeError("unknown metric '" + s + "'");
}

int cmd_plot(const std::string& record_path, const std::string& axis, const std::string& metric, const std::string& out) {
  const RunRecord record = load_run_record(record_path);
  if (out.empty()) {
    write_plot_data(std::cout, record, parse_axis(axis), parse_metric(metric));
  } else {
    std::ofstream f(out);
    if (!f) throw FormatError("cannot write '" + out + "'");
    write_plot_data(f, record, parse_axis(axis), parse_metric(metric));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network process tomography of unitary channels"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out;
  Index jobs = 1;

  auto* circuit = app.add_subcommand("circuit", "Build a circuit and its MPO");
  std::string target = "ghz", circuit_out;
  Index n = 4, bond = 256;
  circuit->add_option("--target", target, "ghz, qft or qft_c<k>")->capture_default_str();
  circuit->add_option("-n", n, "Number of qubits")->capture_default_str();
  circuit->add_option("--bond", bond, "Bond cap")->capture_default_str();
  circuit->add_option("--out", out, "MPO output file");
  circuit->add_option("--circuit-out", circuit_out, "Gate list output file");

  auto* measure = app.add_subcommand("measure", "Simulate local Pauli measurements of a channel");
  ChannelSource src;
  Index r = 3;
  std::string shots = "exact", provenance = "ancilla_assisted";
  add_channel_options(measure, src);
  measure->add_option("-r", r, "Window width")->capture_default_str();
  measure->add_option("--shots", shots, "Shots per setting or 'exact'")->capture_default_str();
  measure->add_option("--provenance", provenance, "ancilla_assisted or ancilla_free")->capture_default_str();
  measure->add_option("--seed", seed, "Sampling seed");
  measure->add_option("--out", out, "Dataset output file");

  auto* recon = app.add_subcommand("reconstruct", "Maximum-likelihood MPS reconstruction of a dataset");
  std::string data, init = "local_inversion", truth;
  ReconstructionConfig rc;
  recon->add_option("--data", data, "Dataset file")->required();
  recon->add_option("--bond", rc.target_bond, "Target bond dimension")->capture_default_str();
  recon->add_option("--sweeps", rc.max_sweeps, "Maximum sweeps")->capture_default_str();
  recon->add_option("--ll-tol", rc.ll_tol, "Relative log-likelihood tolerance")->capture_default_str();
  recon->add_option("--init", init, "local_inversion or random")->capture_default_str();
  recon->add_option("--truth", truth, "True channel MPO, to report the fidelity");
  recon->add_option("--seed", seed, "Initialization seed");
  recon->add_option("--out", out, "Reconstructed Choi state output file");

  auto* extract = app.add_subcommand("extract", "Hamiltonian from reconstructed Choi states");
  ExtractOptions eo;
  extract->add_option("--state", eo.state, "Choi state at time t")->required();
  extract->add_option("--state-later", eo.state_later, "Choi state at time t' (two-time scheme)");
  extract->add_option("--time", eo.time, "t")->required();
  extract->add_option("--time-later", eo.time_later, "t'");
  extract->add_option("--series-order", eo.series_order, "Series order N")->capture_default_str();
  extract->add_flag("--project-nn", eo.project_nn, "Write the nearest-neighbour projection");
  extract->add_option("--phase-fix-mode", eo.phase_mode, "trace, largest_entry or none")->capture_default_str();
  extract->add_option("--hamiltonian", eo.hamiltonian, "True Hamiltonian file, to report distances");
  extract->add_option("--family", eo.family, "True Hamiltonian family, to report distances");
  extract->add_option("--hamiltonian-seed", eo.hamiltonian_seed, "Seed of random_nn couplings");
  extract->add_flag("--in-tn", eo.in_tn, "Times are in units of t_n of the true Hamiltonian");
  extract->add_option("--bond", eo.bond, "Bond cap for operator products")->capture_default_str();
  extract->add_option("--out", eo.out, "Output file");

  auto* run_cmd = app.add_subcommand("run", "Run a grid experiment from a JSON config");
  std::string config;
  std::optional<std::uint64_t> run_seed;
  run_cmd->add_option("config", config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", run_seed, "Override the master seed");
  run_cmd->add_option("--out", out, "Override the output directory");
  run_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  auto* plot = app.add_subcommand("plot", "Gnuplot data from a run record");
  std::string record, axis = "shots", metric = "distance";
  plot->add_option("record", record, "Run record (JSON)")->required();
  plot->add_option("--axis", axis, "shots, time or delay")->capture_default_str();
  plot->add_option("--metric", metric, "distance, distance_projected or root_infidelity")->capture_default_str();
  plot->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*circuit) return cmd_circuit(target, n, bond, out, circuit_out);
    if (*measure) return cmd_measure(src, r, shots, provenance, seed, out);
    if (*recon) return cmd_reconstruct(data, rc, init, seed, truth, out);
    if (*extract) {
      eo.out = out;
      return cmd_extract(eo);
    }
    if (*run_cmd) return cmd_run(config, run_seed, out, jobs);
    if (*plot) return cmd_plot(record, axis, metric, out);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
