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

// Hamiltonian text format:
//
//   mpqpt-hamiltonian 1
//   family heisenberg|ising_critical|random_nn|custom
//   qubits N
//   seed S                          random_nn only
//   term i <re im> x16              custom only, row-major 4x4, one per bond
//
// Named families are stored by tag and regenerated on load.

#include <fstream>
#include <sstream>
#include <string>

#include "mpqpt/hamiltonian/hamiltonian.hpp"
#include "mpqpt/tensor/io.hpp"

namespace mpqpt::io {

inline void write(std::ostream& out, const NearestNeighbourHamiltonian& h) {
  out << "mpqpt-hamiltonian 1\n";
  out << "family " << to_string(h.family) << "\n";
  out << "qubits " << h.n << "\n";
  if (h.family == Family::random_nn) out << "seed " << h.seed.value() << "\n";
  if (h.family != Family::custom) return;
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    out << "term " << i;
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b)
        out << ' ' << hex_double(h.terms[i](a, b).real()) << ' ' << hex_double(h.terms[i](a, b).imag());
    out << "\n";
  }
}

inline NearestNeighbourHamiltonian read_hamiltonian(std::istream& in) {
  if (detail::expect_key(in, "mpqpt-hamiltonian") != "1") throw FormatError("unsupported Hamiltonian version");
  const Family family = parse_family(detail::expect_key(in, "family"));
  const Index n = std::stol(detail::expect_key(in, "qubits"));
  if (family == Family::random_nn) return build_family(family, n, std::stoull(detail::expect_key(in, "seed")));
  if (family != Family::custom) return build_family(family, n);
  std::vector<Matrix> terms;
  for (Index i = 0; i + 1 < n; ++i) {
    std::istringstream ls(detail::expect_key(in, "term"));
    Index idx = -1;
    ls >> idx;
    if (idx != i) throw FormatError("Hamiltonian terms out of order");
    Matrix t(4, 4);
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) {
        std::string re, im;
        if (!(ls >> re >> im)) throw FormatError("truncated Hamiltonian term");
        t(a, b) = cplx(parse_double(re), parse_double(im));
      }
    terms.push_back(t);
  }
  return make_custom(std::move(terms));
}

inline void save(const std::string& path, const NearestNeighbourHamiltonian& h) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out, h);
}

inline NearestNeighbourHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_hamiltonian(in);
}

}  // namespace mpqpt::io
