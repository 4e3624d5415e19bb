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

// Experiment configs and records as JSON, result tables as CSV, and
// power-law fits over the aggregated results. Needs nlohmann/json and
// Boost.Math on the include path.

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpqpt/harness/experiment.hpp"

namespace mpqpt {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline double number_or_nan(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

inline Json shots_to_json(std::uint64_t m) { return m == kExactShots ? Json("exact") : Json(m); }

inline std::uint64_t shots_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "exact") throw FormatError("shots must be a positive integer or \"exact\"");
    return kExactShots;
  }
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0) throw FormatError("shots must be a positive integer or \"exact\"");
  return j.get<std::uint64_t>();
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline Json to_json(const ReconstructionConfig& c) {
  return Json{{"target_bond", c.target_bond},
              {"max_sweeps", c.max_sweeps},
              {"ll_tol", c.ll_tol},
              {"init", c.init == InitKind::random ? "random" : "local_inversion"},
              {"regularization", c.regularization},
              {"probability_floor", c.probability_floor},
              {"support_threshold", c.support_threshold},
              {"init_sweeps", c.init_sweeps},
              {"svd_tol", c.svd_tol}};
}

inline ReconstructionConfig reconstruction_config_from_json(const Json& j) {
  ReconstructionConfig c;
  detail::read_if(j, "target_bond", c.target_bond);
  detail::read_if(j, "max_sweeps", c.max_sweeps);
  detail::read_if(j, "ll_tol", c.ll_tol);
  if (j.contains("init")) {
    const auto s = j.at("init").get<std::string>();
    if (s == "random") c.init = InitKind::random;
    else if (s == "local_inversion") c.init = InitKind::local_inversion;
    else throw FormatError("unknown init '" + s + "'");
  }
  detail::read_if(j, "regularization", c.regularization);
  detail::read_if(j, "probability_floor", c.probability_floor);
  detail::read_if(j, "support_threshold", c.support_threshold);
  detail::read_if(j, "init_sweeps", c.init_sweeps);
  detail::read_if(j, "svd_tol", c.svd_tol);
  return c;
}

/// Everything that determines the numbers; the output directory is left out.
inline Json to_json(const ExperimentConfig& c) {
  Json shots = Json::array();
  for (auto m : c.shots_grid) shots.push_back(detail::shots_to_json(m));
  return Json{{"name", c.name},
              {"kind", to_string(c.kind)},
              {"target", c.target},
              {"n", c.n_grid},
              {"r", c.r_grid},
              {"shots", shots},
              {"time", c.time_grid},
              {"delay", c.delay_grid},
              {"repeats", c.repeats},
              {"master_seed", c.master_seed},
              {"hamiltonian_seed", c.hamiltonian_seed},
              {"provenance", to_string(c.provenance)},
              {"series_order", c.series.order},
              {"channel_bond", c.channel_bond},
              {"phase_rule", to_string(c.phase_rule)},
              {"reconstruction", to_json(c.reconstruction)}};
}

/// Parses and validates a config. Unknown keys are rejected so that typos
/// do not silently fall back to defaults.
inline ExperimentConfig experiment_config_from_json(const Json& j) {
  static const std::vector<std::string> known{"name",     "kind",        "target",           "n",
                                              "r",        "shots",       "time",             "delay",
                                              "repeats",  "master_seed", "hamiltonian_seed", "provenance",
                                              "series_order", "channel_bond", "phase_rule",   "reconstruction",
                                              "output_dir"};
  if (!j.is_object()) throw FormatError("experiment config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw FormatError("unknown config key '" + key + "'");
  ExperimentConfig c;
  try {
    detail::read_if(j, "name", c.name);
    if (j.contains("kind")) c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    detail::read_if(j, "target", c.target);
    detail::read_if(j, "n", c.n_grid);
    detail::read_if(j, "r", c.r_grid);
    if (j.contains("shots")) {
      c.shots_grid.clear();
      for (const auto& m : j.at("shots")) c.shots_grid.push_back(detail::shots_from_json(m));
    }
    detail::read_if(j, "time", c.time_grid);
    detail::read_if(j, "delay", c.delay_grid);
    detail::read_if(j, "repeats", c.repeats);
    detail::read_if(j, "master_seed", c.master_seed);
    detail::read_if(j, "hamiltonian_seed", c.hamiltonian_seed);
    if (j.contains("provenance")) c.provenance = parse_provenance(j.at("provenance").get<std::string>());
    detail::read_if(j, "series_order", c.series.order);
    detail::read_if(j, "channel_bond", c.channel_bond);
    if (j.contains("phase_rule")) c.phase_rule = parse_phase_rule(j.at("phase_rule").get<std::string>());
    if (j.contains("reconstruction")) c.reconstruction = reconstruction_config_from_json(j.at("reconstruction"));
    detail::read_if(j, "output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("experiment config: ") + e.what());
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config '" + path + "': " + e.what());
  }
  return experiment_config_from_json(j);
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(to_json(c).dump()); }

inline Json to_json(const Spread& s) {
  return Json{{"mean", detail::number_or_null(s.mean)},
              {"min", detail::number_or_null(s.min)},
              {"max", detail::number_or_null(s.max)},
              {"std", detail::number_or_null(s.std)},
              {"count", s.count}};
}

inline Json to_json(const PointResult& p) {
  return Json{{"point", p.point},
              {"n", p.n},
              {"r", p.r},
              {"shots", detail::shots_to_json(p.shots)},
              {"time", detail::number_or_null(p.time)},
              {"delay", detail::number_or_null(p.delay)},
              {"repeat", p.repeat},
              {"seed", p.seed},
              {"ok", p.ok},
              {"error", p.error},
              {"fidelity", detail::number_or_null(p.fidelity)},
              {"fidelity_later", detail::number_or_null(p.fidelity_later)},
              {"distance", detail::number_or_null(p.distance)},
              {"distance_projected", detail::number_or_null(p.distance_projected)},
              {"distance_single", detail::number_or_null(p.distance_single)},
              {"channel_error", p.channel_error},
              {"log_likelihood", detail::number_or_null(p.log_likelihood)},
              {"sweeps", p.sweeps},
              {"log_likelihood_trace", p.log_likelihood_trace},
              {"wall_seconds", p.wall_seconds}};
}

inline Json to_json(const AggregateRow& a) {
  return Json{{"n", a.n},
              {"r", a.r},
              {"shots", detail::shots_to_json(a.shots)},
              {"time", detail::number_or_null(a.time)},
              {"delay", detail::number_or_null(a.delay)},
              {"failures", a.failures},
              {"fidelity", to_json(a.fidelity)},
              {"distance", to_json(a.distance)},
              {"distance_projected", to_json(a.distance_projected)},
              {"distance_single", to_json(a.distance_single)}};
}

/// Full record. Wall times are the only entries that differ between
/// repeated runs of the same config.
inline Json to_json(const RunRecord& r) {
  Json points = Json::array(), aggregates = Json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  for (const auto& a : r.aggregates) aggregates.push_back(to_json(a));
  return Json{{"config_hash", r.config_hash},
              {"config", to_json(r.config)},
              {"failures", r.failures()},
              {"points", points},
              {"aggregates", aggregates}};
}

inline Spread spread_from_json(const Json& j) {
  return {detail::number_or_nan(j.at("mean")), detail::number_or_nan(j.at("min")), detail::number_or_nan(j.at("max")),
          detail::number_or_nan(j.at("std")), j.at("count").get<Index>()};
}

inline PointResult point_from_json(const Json& j) {
  PointResult p;
  p.point = j.at("point").get<Index>();
  p.n = j.at("n").get<Index>();
  p.r = j.at("r").get<Index>();
  p.shots = detail::shots_from_json(j.at("shots"));
  p.time = detail::number_or_nan(j.at("time"));
  p.delay = detail::number_or_nan(j.at("delay"));
  p.repeat = j.at("repeat").get<Index>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.ok = j.at("ok").get<bool>();
  p.error = j.at("error").get<std::string>();
  p.fidelity = detail::number_or_nan(j.at("fidelity"));
  p.fidelity_later = detail::number_or_nan(j.at("fidelity_later"));
  p.distance = detail::number_or_nan(j.at("distance"));
  p.distance_projected = detail::number_or_nan(j.at("distance_projected"));
  p.distance_single = detail::number_or_nan(j.at("distance_single"));
  p.channel_error = j.at("channel_error").get<double>();
  p.log_likelihood = detail::number_or_nan(j.at("log_likelihood"));
  p.sweeps = j.at("sweeps").get<Index>();
  p.log_likelihood_trace = j.at("log_likelihood_trace").get<std::vector<double>>();
  p.wall_seconds = j.at("wall_seconds").get<double>();
  return p;
}

inline AggregateRow aggregate_from_json(const Json& j) {
  AggregateRow a;
  a.n = j.at("n").get<Index>();
  a.r = j.at("r").get<Index>();
  a.shots = detail::shots_from_json(j.at("shots"));
  a.time = detail::number_or_nan(j.at("time"));
  a.delay = detail::number_or_nan(j.at("delay"));
  a.failures = j.at("failures").get<Index>();
  a.fidelity = spread_from_json(j.at("fidelity"));
  a.distance = spread_from_json(j.at("distance"));
  a.distance_projected = spread_from_json(j.at("distance_projected"));
  a.distance_single = spread_from_json(j.at("distance_single"));
  return a;
}

inline RunRecord run_record_from_json(const Json& j) {
  RunRecord r;
  try {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.config = experiment_config_from_json(j.at("config"));
    for (const auto& p : j.at("points")) r.points.push_back(point_from_json(p));
    for (const auto& a : j.at("aggregates")) r.aggregates.push_back(aggregate_from_json(a));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("run record: ") + e.what());
  }
  return r;
}

inline RunRecord load_run_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open run record '" + path + "'");
  try {
    return run_record_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("run record '" + path + "': " + e.what());
  }
}

namespace detail {

inline std::string csv_number(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline std::string csv_shots(std::uint64_t m) { return m == kExactShots ? "exact" : std::to_string(m); }

}  // namespace detail

/// One row per (point, repeat, delay).
inline void write_points_csv(std::ostream& out, const RunRecord& r) {
  out << "point,n,r,shots,time,delay,repeat,seed,ok,fidelity,fidelity_later,distance,distance_projected,"
         "distance_single,channel_error,log_likelihood,sweeps,wall_seconds,error\n";
  for (const auto& p : r.points) {
    std::string err = p.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out << p.point << ',' << p.n << ',' << p.r << ',' << detail::csv_shots(p.shots) << ',' << detail::csv_number(p.time)
        << ',' << detail::csv_number(p.delay) << ',' << p.repeat << ',' << p.seed << ',' << (p.ok ? 1 : 0) << ','
        << detail::csv_number(p.fidelity) << ',' << detail::csv_number(p.fidelity_later) << ','
        << detail::csv_number(p.distance) << ',' << detail::csv_number(p.distance_projected) << ','
        << detail::csv_number(p.distance_single) << ',' << detail::csv_number(p.channel_error) << ','
        << detail::csv_number(p.log_likelihood) << ',' << p.sweeps << ',' << detail::csv_number(p.wall_seconds) << ",\""
        << err << "\"\n";
  }
}

/// One row per grid point with mean, min, max and std over repeats.
inline void write_summary_csv(std::ostream& out, const RunRecord& r) {
  out << "n,r,shots,time,delay,failures";
  for (const char* m : {"fidelity", "distance", "distance_projected", "distance_single"})
    for (const char* s : {"mean", "min", "max", "std"}) out << ',' << m << '_' << s;
  out << '\n';
  for (const auto& a : r.aggregates) {
    out << a.n << ',' << a.r << ',' << detail::csv_shots(a.shots) << ',' << detail::csv_number(a.time) << ','
        << detail::csv_number(a.delay) << ',' << a.failures;
    for (const Spread* s : {&a.fidelity, &a.distance, &a.distance_projected, &a.distance_single})
      out << ',' << detail::csv_number(s->mean) << ',' << detail::csv_number(s->min) << ','
          << detail::csv_number(s->max) << ',' << detail::csv_number(s->std);
    out << '\n';
  }
}

struct RunFiles {
  std::string record;
  std::string points_csv;
  std::string summary_csv;
  std::string manifest;
};

/// Writes <name>_<hash>.json/.csv/_summary.csv into `dir` and adds the run
/// to dir/manifest.json. Entries are keyed by config hash, so an identical
/// rerun replaces its own entry and never touches other runs.
inline RunFiles write_run(const RunRecord& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stem = r.config.name + "_" + r.config_hash;
  RunFiles files{(fs::path(dir) / (stem + ".json")).string(), (fs::path(dir) / (stem + ".csv")).string(),
                 (fs::path(dir) / (stem + "_summary.csv")).string(), (fs::path(dir) / "manifest.json").string()};
  auto open = [](const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot write '" + path + "'");
    return f;
  };
  {
    auto f = open(files.record);
    f << to_json(r).dump(2) << '\n';
  }
  {
    auto f = open(files.points_csv);
    write_points_csv(f, r);
  }
  {
    auto f = open(files.summary_csv);
    write_summary_csv(f, r);
  }
  Json manifest = Json{{"runs", Json::array()}};
  if (fs::exists(files.manifest)) {
    std::ifstream in(files.manifest);
    try {
      manifest = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("corrupt manifest '" + files.manifest + "': " + e.what());
    }
  }
  Json entry{{"config_hash", r.config_hash},
             {"name", r.config.name},
             {"kind", to_string(r.config.kind)},
             {"points", r.points.size()},
             {"failures", r.failures()},
             {"record", fs::path(files.record).filename().string()},
             {"points_csv", fs::path(files.points_csv).filename().string()},
             {"summary_csv", fs::path(files.summary_csv).filename().string()}};
  auto& runs = manifest["runs"];
  auto it = std::find_if(runs.begin(), runs.end(), [&](const Json& e) { return e.value("config_hash", "") == r.config_hash; });
  if (it != runs.end()) *it = entry;
  else runs.push_back(entry);
  auto f = open(files.manifest);
  f << manifest.dump(2) << '\n';
  return files;
}

/// log y = intercept + slope log x by least squares, with a two-sided
/// Student-t confidence interval on the slope.
struct PowerLawFit {
  double slope = kNaN;
  double intercept = kNaN;
  double slope_stderr = kNaN;
  double ci_low = kNaN;
  double ci_high = kNaN;
  Index points = 0;
};

inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double confidence = 0.95) {
  if (x.size() != y.size()) throw DimensionError("fit_power_law: x and y differ in length");
  if (x.size() < 3) throw PreconditionError("fit_power_law: need at least 3 points");
  if (!(confidence > 0.0 && confidence < 1.0)) throw RangeError("fit_power_law: confidence must be in (0, 1)");
  const auto k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionError("fit_power_law: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    mx += lx.back() / k;
    my += ly.back() / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_power_law: x values are all equal");
  PowerLawFit f;
  f.points = static_cast<Index>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    sse += e * e;
  }
  f.slope_stderr = std::sqrt(sse / (k - 2.0) / sxx);
  const boost::math::students_t dist(k - 2.0);
  const double q = boost::math::quantile(dist, 0.5 + 0.5 * confidence);
  f.ci_low = f.slope - q * f.slope_stderr;
  f.ci_high = f.slope + q * f.slope_stderr;
  return f;
}

enum class ScalingAxis { shots, time, delay };

inline std::string to_string(ScalingAxis a) {
  switch (a) {
    case ScalingAxis::shots: return "shots";
    case ScalingAxis::time: return "time";
    case ScalingAxis::delay: return "delay";
  }
  return "?";
}

/// x -> y pairs fitted: D vs M, D vs t/t_n, D vs (t' - t)/t_n, and
/// (1 - sqrt F)^{1/2} vs 1/sqrt(M).
enum class ScalingMetric { distance, distance_projected, root_infidelity };

inline std::string to_string(ScalingMetric m) {
  switch (m) {
    case ScalingMetric::distance: return "distance";
    case ScalingMetric::distance_projected: return "distance_projected";
    case ScalingMetric::root_infidelity: return "root_infidelity";
  }
  return "?";
}

struct ScalingFit {
  ScalingAxis axis = ScalingAxis::shots;
  ScalingMetric metric = ScalingMetric::distance;
  /// The aggregate rows used, all sharing every grid value except `axis`.
  std::vector<AggregateRow> rows;
  PowerLawFit fit;
};

namespace detail {

inline double axis_value(const AggregateRow& a, ScalingAxis axis) {
  switch (axis) {
    case ScalingAxis::shots: return static_cast<double>(a.shots);
    case ScalingAxis::time: return a.time;
    case ScalingAxis::delay: return a.delay;
  }
  return kNaN;
}

inline bool same_slice(const AggregateRow& a, const AggregateRow& b, ScalingAxis axis) {
  return a.n == b.n && a.r == b.r && (axis == ScalingAxis::shots || a.shots == b.shots) &&
         (axis == ScalingAxis::time || same(a.time, b.time)) && (axis == ScalingAxis::delay || same(a.delay, b.delay));
}

}  // namespace detail

/// Fits along `axis` within every slice of the other grid values that has
/// at least 3 distinct sampled values; exact-mode rows are skipped on the
/// shots axis. Throws if no slice qualifies.
inline std::vector<ScalingFit> scaling_report(const RunRecord& record, ScalingAxis axis, ScalingMetric metric) {
  std::vector<ScalingFit> out;
  std::vector<bool> used(record.aggregates.size(), false);
  for (std::size_t i = 0; i < record.aggregates.size(); ++i) {
    if (used[i]) continue;
    ScalingFit s{axis, metric, {}, {}};
    for (std::size_t j = i; j < record.aggregates.size(); ++j) {
      const auto& a = record.aggregates[j];
      if (used[j] || !detail::same_slice(record.aggregates[i], a, axis)) continue;
      used[j] = true;
      if (axis == ScalingAxis::shots && a.shots == kExactShots) continue;
      if (!std::isfinite(detail::axis_value(a, axis))) continue;
      s.rows.push_back(a);
    }
    if (s.rows.size() < 3) continue;
    std::vector<double> x, y;
    for (const auto& a : s.rows) {
      const double v = detail::axis_value(a, axis);
      switch (metric) {
        case ScalingMetric::distance: y.push_back(a.distance.mean); break;
        case ScalingMetric::distance_projected: y.push_back(a.distance_projected.mean); break;
        case ScalingMetric::root_infidelity: y.push_back(std::sqrt(1.0 - std::sqrt(a.fidelity.mean))); break;
      }
      x.push_back(metric == ScalingMetric::root_infidelity && axis == ScalingAxis::shots ? 1.0 / std::sqrt(v) : v);
    }
    s.fit = fit_power_law(x, y);
    out.push_back(std::move(s));
  }
  if (out.empty())
    throw PreconditionError("scaling_report: no slice has 3 or more values of " + to_string(axis));
  return out;
}

inline Json to_json(const ScalingFit& s) {
  Json rows = Json::array();
  for (const auto& a : s.rows) rows.push_back(to_json(a));
  return Json{{"axis", to_string(s.axis)},
              {"metric", to_string(s.metric)},
              {"slope", s.fit.slope},
              {"intercept", s.fit.intercept},
              {"slope_stderr", detail::number_or_null(s.fit.slope_stderr)},
              {"ci95", Json::array({detail::number_or_null(s.fit.ci_low), detail::number_or_null(s.fit.ci_high)})},
              {"rows", rows}};
}

/// Every fit the record supports: D and projected D along each axis with at
/// least 3 values, and root infidelity against 1/sqrt(M).
inline Json scaling_summary(const RunRecord& record) {
  Json out = Json::array();
  auto add = [&](ScalingAxis axis, ScalingMetric metric) {
    try {
      for (const auto& f : scaling_report(record, axis, metric)) out.push_back(to_json(f));
    } catch (const PreconditionError&) {
    }
  };
  for (auto axis : {ScalingAxis::shots, ScalingAxis::time, ScalingAxis::delay}) {
    if (is_hamiltonian_kind(record.config)) {
      add(axis, ScalingMetric::distance);
      add(axis, ScalingMetric::distance_projected);
    }
  }
  add(ScalingAxis::shots, ScalingMetric::root_infidelity);
  return out;
}

/// Gnuplot-ready columns: the swept value, then mean, min and max of the
/// metric. Blocks for different slices are separated by two blank lines.
inline void write_plot_data(std::ostream& out, const RunRecord& record, ScalingAxis axis, ScalingMetric metric) {
  std::vector<bool> used(record.aggregates.size(), false);
  bool first = true;
  for (std::size_t i = 0; i < record.aggregates.size(); ++i) {
    if (used[i]) continue;
    if (!first) out << "\n\n";
    first = false;
    const auto& head = record.aggregates[i];
    out << "# n=" << head.n << " r=" << head.r << " shots=" << detail::csv_shots(head.shots)
        << " time=" << detail::csv_number(head.time) << " delay=" << detail::csv_number(head.delay) << " ("
        << to_string(axis) << " varies)\n";
    out << "# " << to_string(axis) << ' ' << to_string(metric) << "_mean min max\n";
    for (std::size_t j = i; j < record.aggregates.size(); ++j) {
      const auto& a = record.aggregates[j];
      if (used[j] || !detail::same_slice(head, a, axis)) continue;
      used[j] = true;
      const Spread& s = metric == ScalingMetric::distance_projected ? a.distance_projected
                        : metric == ScalingMetric::distance        ? a.distance
                                                                   : a.fidelity;
      auto tr = [&](double v) { return metric == ScalingMetric::root_infidelity ? std::sqrt(1.0 - std::sqrt(v)) : v; };
      const double x = axis == ScalingAxis::shots && a.shots == kExactShots ? kNaN : detail::axis_value(a, axis);
      // Root infidelity decreases with F, so min and max swap.
      const double lo = metric == ScalingMetric::root_infidelity ? tr(s.max) : tr(s.min);
      const double hi = metric == ScalingMetric::root_infidelity ? tr(s.min) : tr(s.max);
      out << (std::isfinite(x) ? detail::csv_number(x) : std::string("inf")) << ' ' << detail::csv_number(tr(s.mean))
          << ' ' << detail::csv_number(lo) << ' ' << detail::csv_number(hi) << '\n';
    }
  }
}

}  // namespace mpqpt
