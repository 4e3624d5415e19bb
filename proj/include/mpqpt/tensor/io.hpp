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

// Text container for tensor chains:
//
//   mpqpt-chain 1
//   kind mps|mpo
//   length L
//   phys d                       (2 for states, 4 for operators)
//   bonds D_0 D_1 ... D_L
//   canonical none|left|right|mixed C
//   site k
//   <re> <im>                    one line per entry, row-major over (l, p, r)
//
// Entries are written as C99 hexadecimal floats so a write/read round trip
// reproduces every bit.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpqpt/tensor/mpo.hpp"
#include "mpqpt/tensor/mps.hpp"

namespace mpqpt::io {

inline std::string hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw FormatError("not a number: '" + s + "'");
  return v;
}

namespace detail {

inline std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw FormatError("expected '" + key + "', found '" + k + "'");
    std::string rest;
    std::getline(ls, rest);
    const auto first = rest.find_first_not_of(' ');
    return first == std::string::npos ? std::string{} : rest.substr(first);
  }
  throw FormatError("unexpected end of input while looking for '" + key + "'");
}

inline void write_chain(std::ostream& out, const std::string& kind, const std::vector<SiteTensor>& sites,
                        const CanonicalForm& form) {
  out << "mpqpt-chain 1\n";
  out << "kind " << kind << "\n";
  out << "length " << sites.size() << "\n";
  out << "phys " << sites.front().phys_dim() << "\n";
  out << "bonds";
  for (Index d : chain::bond_dims(sites)) out << ' ' << d;
  out << "\n";
  out << "canonical ";
  switch (form.kind) {
    case CanonicalForm::Kind::none: out << "none 0"; break;
    case CanonicalForm::Kind::left: out << "left 0"; break;
    case CanonicalForm::Kind::right: out << "right 0"; break;
    case CanonicalForm::Kind::mixed: out << "mixed " << form.center; break;
  }
  out << "\n";
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& t = sites[k];
    out << "site " << k << "\n";
    for (Index l = 0; l < t.left_dim(); ++l)
      for (Index p = 0; p < t.phys_dim(); ++p)
        for (Index r = 0; r < t.right_dim(); ++r) {
          const cplx z = t(l, p, r);
          out << hex_double(z.real()) << ' ' << hex_double(z.imag()) << "\n";
        }
  }
}

struct ParsedChain {
  std::string kind;
  std::vector<SiteTensor> sites;
  CanonicalForm form;
};

inline ParsedChain read_chain(std::istream& in) {
  ParsedChain pc;
  if (expect_key(in, "mpqpt-chain") != "1") throw FormatError("unsupported container version");
  pc.kind = expect_key(in, "kind");
  const long length = std::stol(expect_key(in, "length"));
  const Index phys = std::stol(expect_key(in, "phys"));
  std::istringstream bs(expect_key(in, "bonds"));
  std::vector<Index> bonds;
  for (Index d; bs >> d;) bonds.push_back(d);
  if (length < 1 || static_cast<long>(bonds.size()) != length + 1) throw FormatError("bond list does not match length");
  std::istringstream cs(expect_key(in, "canonical"));
  std::string ck;
  Index center = 0;
  cs >> ck >> center;
  if (ck == "none") pc.form = CanonicalForm::none();
  else if (ck == "left") pc.form = {CanonicalForm::Kind::left, 0};
  else if (ck == "right") pc.form = {CanonicalForm::Kind::right, 0};
  else if (ck == "mixed") pc.form = CanonicalForm::mixed(center);
  else throw FormatError("unknown canonical form '" + ck + "'");
  for (long k = 0; k < length; ++k) {
    if (std::stol(expect_key(in, "site")) != k) throw FormatError("sites out of order");
    SiteTensor t(bonds[static_cast<std::size_t>(k)], phys, bonds[static_cast<std::size_t>(k + 1)]);
    for (Index l = 0; l < t.left_dim(); ++l)
      for (Index p = 0; p < phys; ++p)
        for (Index r = 0; r < t.right_dim(); ++r) {
          std::string re, im;
          if (!(in >> re >> im)) throw FormatError("truncated tensor data");
          t(l, p, r) = cplx(parse_double(re), parse_double(im));
        }
    pc.sites.push_back(std::move(t));
  }
  return pc;
}

}  // namespace detail

inline void write(std::ostream& out, const MatrixProductState& psi) {
  detail::write_chain(out, "mps", psi.sites(), psi.canonical_form());
}

inline void write(std::ostream& out, const MatrixProductOperator& op) {
  detail::write_chain(out, "mpo", op.sites(), CanonicalForm::none());
}

inline MatrixProductState read_mps(std::istream& in) {
  auto pc = detail::read_chain(in);
  if (pc.kind != "mps") throw FormatError("expected an mps container, found '" + pc.kind + "'");
  return MatrixProductState(std::move(pc.sites), pc.form);
}

inline MatrixProductOperator read_mpo(std::istream& in) {
  auto pc = detail::read_chain(in);
  if (pc.kind != "mpo") throw FormatError("expected an mpo container, found '" + pc.kind + "'");
  return MatrixProductOperator(std::move(pc.sites));
}

template <typename T>
void save(const std::string& path, const T& value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out, value);
}

inline MatrixProductState load_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_mps(in);
}

inline MatrixProductOperator load_mpo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_mpo(in);
}

}  // namespace mpqpt::io
