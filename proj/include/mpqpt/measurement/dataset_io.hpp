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

// Dataset text format:
//
//   mpqpt-dataset 1
//   qubits N
//   window R
//   shots M | exact
//   provenance ancilla_assisted | ancilla_free
//   seed S
//   record k alphas v_0 ... v_{2^R - 1}
//
// Records follow all_specs order. Values are counts, or hexfloat
// probabilities in exact mode, listed for s in lexicographic order with +1
// before -1 (outcome index 0 = all +1).

#include <fstream>
#include <sstream>

#include "mpqpt/measurement/dataset.hpp"
#include "mpqpt/tensor/io.hpp"

namespace mpqpt::io {

inline void write(std::ostream& out, const MeasurementDataset& d) {
  out << "mpqpt-dataset 1\n";
  out << "qubits " << d.n << "\nwindow " << d.r << "\n";
  out << "shots " << (d.exact() ? std::string("exact") : std::to_string(d.shots)) << "\n";
  out << "provenance " << to_string(d.provenance) << "\nseed " << d.seed << "\n";
  for (const auto& t : d.tables) {
    out << "record " << t.spec.k << ' ' << t.spec.alphas;
    if (t.exact())
      for (double p : t.probabilities) out << ' ' << hex_double(p);
    else
      for (auto c : t.counts) out << ' ' << c;
    out << "\n";
  }
}

inline MeasurementDataset read_dataset(std::istream& in) {
  if (detail::expect_key(in, "mpqpt-dataset") != "1") throw FormatError("unsupported dataset version");
  MeasurementDataset d;
  try {
    d.n = std::stol(detail::expect_key(in, "qubits"));
    d.r = std::stol(detail::expect_key(in, "window"));
    const std::string shots = detail::expect_key(in, "shots");
    d.shots = shots == "exact" ? kExactShots : std::stoull(shots);
    if (shots != "exact" && d.shots == kExactShots) throw FormatError("dataset shot count must be positive");
    d.provenance = parse_provenance(detail::expect_key(in, "provenance"));
    d.seed = std::stoull(detail::expect_key(in, "seed"));
  } catch (const std::logic_error&) {
    throw FormatError("malformed dataset header");
  }
  if (d.n < 1 || d.r < 1 || d.r > 2 * d.n || d.r > 20) throw FormatError("dataset header out of range");
  const std::size_t expected = all_specs(2 * d.n, d.r).size();
  const auto size = static_cast<std::size_t>(pow2(d.r));
  for (std::size_t i = 0; i < expected; ++i) {
    std::istringstream ls(detail::expect_key(in, "record"));
    OutcomeTable t;
    t.shots = d.shots;
    if (!(ls >> t.spec.k >> t.spec.alphas)) throw FormatError("malformed dataset record");
    for (std::size_t s = 0; s < size; ++s) {
      std::string v;
      if (!(ls >> v)) throw FormatError("truncated dataset record");
      if (d.exact()) {
        t.probabilities.push_back(parse_double(v));
      } else {
        if (v.find_first_not_of("0123456789") != std::string::npos) throw FormatError("bad count '" + v + "'");
        t.counts.push_back(std::stoull(v));
      }
    }
    std::string extra;
    if (ls >> extra) throw FormatError("trailing data in dataset record");
    d.tables.push_back(std::move(t));
  }
  validate(d);
  return d;
}

inline void save(const std::string& path, const MeasurementDataset& d) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out, d);
}

inline MeasurementDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_dataset(in);
}

}  // namespace mpqpt::io
