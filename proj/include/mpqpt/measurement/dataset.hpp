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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mpqpt/measurement/observables.hpp"
#include "mpqpt/random.hpp"

namespace mpqpt {

/// Shot count meaning "store exact probabilities instead of counts".
inline constexpr std::uint64_t kExactShots = 0;

enum class Provenance { ancilla_assisted, ancilla_free };

inline std::string to_string(Provenance p) {
  return p == Provenance::ancilla_assisted ? "ancilla_assisted" : "ancilla_free";
}

inline Provenance parse_provenance(const std::string& s) {
  if (s == "ancilla_assisted") return Provenance::ancilla_assisted;
  if (s == "ancilla_free") return Provenance::ancilla_free;
  throw FormatError("unknown provenance '" + s + "'");
}

/// Outcome statistics of one setting, indexed by the outcome encoding of
/// observables.hpp. Exactly one of counts / probabilities is populated.
struct OutcomeTable {
  ObservableSpec spec;
  std::uint64_t shots = kExactShots;
  std::vector<std::uint64_t> counts;
  std::vector<double> probabilities;

  bool exact() const { return shots == kExactShots; }

  /// Empirical weights (counts / M) or the exact probabilities.
  std::vector<double> frequencies() const {
    if (exact()) return probabilities;
    std::vector<double> f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
    return f;
  }
};

struct MeasurementDataset {
  Index n = 0;
  Index r = 0;
  std::uint64_t shots = kExactShots;
  Provenance provenance = Provenance::ancilla_assisted;
  std::uint64_t seed = 0;
  std::vector<OutcomeTable> tables;  // same order as all_specs(2n, r)

  bool exact() const { return shots == kExactShots; }
  Index sites() const { return 2 * n; }
};

inline void validate(const OutcomeTable& t, Index length) {
  validate(t.spec, length);
  const auto size = static_cast<std::size_t>(pow2(t.spec.width()));
  if (t.exact()) {
    if (t.probabilities.size() != size) throw DatasetError("outcome table has the wrong number of probabilities");
    double total = 0.0;
    for (double p : t.probabilities) {
      if (!(p >= -1e-12)) throw DatasetError("negative outcome probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DatasetError("outcome probabilities do not sum to 1");
  } else {
    if (t.counts.size() != size) throw DatasetError("outcome table has the wrong number of counts");
    std::uint64_t total = 0;
    for (auto c : t.counts) total += c;
    if (total != t.shots) throw DatasetError("outcome counts do not sum to the shot count");
  }
}

/// Checks complete coverage of all (2n - r + 1) 3^r settings, in order.
inline void validate(const MeasurementDataset& d) {
  if (d.n < 1 || d.r < 1 || d.r > d.sites()) throw DatasetError("dataset: need n >= 1 and 1 <= r <= 2n");
  const auto specs = all_specs(d.sites(), d.r);
  if (d.tables.size() != specs.size())
    throw DatasetError("dataset has " + std::to_string(d.tables.size()) + " settings, expected " +
                       std::to_string(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& t = d.tables[i];
    if (!(t.spec == specs[i])) throw DatasetError("dataset settings missing or out of order at record " + std::to_string(i));
    if (t.shots != d.shots) throw DatasetError("dataset records disagree on the shot count");
    validate(t, d.sites());
  }
}

/// Multinomial counts by successive conditional binomials.
inline std::vector<std::uint64_t> sample(const std::vector<double>& dist, std::uint64_t shots, PhiloxEngine& rng) {
  if (shots < 1) throw RangeError("sample: need at least one shot");
  std::vector<std::uint64_t> counts(dist.size(), 0);
  std::uint64_t left = shots;
  double mass = 0.0;
  for (double p : dist) mass += std::max(0.0, p);
  for (std::size_t i = 0; i < dist.size() && left > 0; ++i) {
    const double p = std::max(0.0, dist[i]);
    if (i + 1 == dist.size() || p >= mass) {
      counts[i] = left;
      break;
    }
    const double q = mass > 0.0 ? std::min(1.0, p / mass) : 0.0;
    std::binomial_distribution<std::uint64_t> bin(left, q);
    counts[i] = bin(rng);
    left -= counts[i];
    mass -= p;
  }
  return counts;
}

/// Table for one setting from its exact distribution; the rng stream is the
/// setting's position in the dataset.
inline OutcomeTable make_table(const ObservableSpec& spec, std::vector<double> dist, std::uint64_t shots,
                               std::uint64_t seed, std::uint64_t stream) {
  OutcomeTable t{spec, shots, {}, {}};
  if (shots == kExactShots) {
    t.probabilities = std::move(dist);
  } else {
    PhiloxEngine rng(seed, stream);
    t.counts = sample(dist, shots, rng);
  }
  return t;
}

}  // namespace mpqpt
