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

// Circuit text format, one gate per line after the header:
//
//   mpqpt-circuit 1
//   qubits N
//   H <site>
//   X <site>
//   CN <control> <target>
//   CR <control> <target> <phi>
//   U1 <site> <re im> x4              row-major 2x2
//   U2 <left> <right> <re im> x16     row-major 4x4
//
// Sites are 0-based. Reals are hexadecimal floats.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mpqpt/circuit/circuit.hpp"
#include "mpqpt/tensor/io.hpp"

namespace mpqpt::io {

inline void write(std::ostream& out, const Circuit& c) {
  out << "mpqpt-circuit 1\n";
  out << "qubits " << c.qubits() << "\n";
  for (const auto& g : c.gates()) {
    if (g.name == "H" || g.name == "X") {
      out << g.name << ' ' << g.left << "\n";
    } else if (g.name == "CN") {
      out << "CN " << g.left << ' ' << g.right << "\n";
    } else if (g.name == "CR") {
      out << "CR " << g.left << ' ' << g.right << ' ' << hex_double(g.params.at(0)) << "\n";
    } else {
      out << (g.two_qubit() ? "U2 " : "U1 ") << g.left;
      if (g.two_qubit()) out << ' ' << g.right;
      for (Index i = 0; i < g.matrix.rows(); ++i)
        for (Index j = 0; j < g.matrix.cols(); ++j)
          out << ' ' << hex_double(g.matrix(i, j).real()) << ' ' << hex_double(g.matrix(i, j).imag());
      out << "\n";
    }
  }
}

inline Circuit read_circuit(std::istream& in) {
  if (detail::expect_key(in, "mpqpt-circuit") != "1") throw FormatError("unsupported circuit version");
  Circuit c(std::stol(detail::expect_key(in, "qubits")));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    Index a = 0, b = 0;
    ls >> name >> a;
    if (!ls) throw FormatError("bad gate record: '" + line + "'");
    auto read_matrix = [&](Index dim) {
      Matrix m(dim, dim);
      for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) {
          std::string re, im;
          if (!(ls >> re >> im)) throw FormatError("truncated matrix in: '" + line + "'");
          m(i, j) = cplx(parse_double(re), parse_double(im));
        }
      return m;
    };
    if (name == "H") {
      c.add(gates::h(a));
    } else if (name == "X") {
      c.add(gates::single("X", gates::pauli_x(), a));
    } else if (name == "CN") {
      if (!(ls >> b)) throw FormatError("CN needs two sites");
      c.add(gates::cn(a, b));
    } else if (name == "CR") {
      std::string phi;
      if (!(ls >> b >> phi)) throw FormatError("CR needs two sites and an angle");
      c.add(gates::cr(a, b, parse_double(phi)));
    } else if (name == "U1") {
      c.add(gates::single("U1", read_matrix(2), a));
    } else if (name == "U2") {
      if (!(ls >> b)) throw FormatError("U2 needs two sites");
      c.add(gates::pair("U2", read_matrix(4), a, b));
    } else {
      throw FormatError("unknown gate '" + name + "'");
    }
  }
  return c;
}

inline void save(const std::string& path, const Circuit& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out, c);
}

inline Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_circuit(in);
}

}  // namespace mpqpt::io
