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

#include <sstream>

#include <gtest/gtest.h>

#include "mpqpt/tensor/io.hpp"
#include "mpqpt/tensor/operations.hpp"
#include "support/oracles.hpp"

namespace mpqpt {
namespace {

using testing::Rng;

TEST(SiteTensor, SliceLayoutMatchesElementAccess) {
  SiteTensor t(3, 2, 4);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = cplx(static_cast<double>(i), 0.0);
  for (Index p = 0; p < 2; ++p)
    for (Index l = 0; l < 3; ++l)
      for (Index r = 0; r < 4; ++r) EXPECT_EQ(t.slice(p)(l, r), t(l, p, r));
  EXPECT_EQ(t.left_grouped()(1 + 3 * 1, 2), t(1, 1, 2));
  EXPECT_EQ(t.right_grouped()(2, 1 + 2 * 3), t(2, 1, 3));
}

TEST(Mps, DenseRoundTrip) {
  Rng rng(1);
  const auto psi = testing::random_mps(7, 5, rng);
  const Vector v = to_dense(psi);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  const auto back = mps_from_dense(v);
  EXPECT_LT((to_dense(back) - v).norm(), 1e-12);
  EXPECT_LT(canonical_error(back), 1e-10);
}

TEST(Mps, BasisStateIsBigEndian) {
  const std::vector<int> bits{1, 0, 1};
  const Vector v = to_dense(MatrixProductState::basis(bits));
  EXPECT_EQ(v[5], cplx(1.0));
  EXPECT_NEAR(v.norm(), 1.0, 0.0);
}

TEST(Mps, InnerMatchesDense) {
  Rng rng(2);
  const auto a = testing::random_mps(6, 4, rng, false);
  const auto b = testing::random_mps(6, 3, rng, false);
  const cplx expected = to_dense(a).dot(to_dense(b));  // conjugates the first argument
  EXPECT_LT(std::abs(inner(a, b) - expected), 1e-10 * std::abs(expected));
  const auto c = testing::random_mps(5, 2, rng);
  EXPECT_THROW(inner(a, c), DimensionError);
}

TEST(Mps, CanonicalizeKeepsStateAndGauge) {
  Rng rng(3);
  const auto psi = testing::random_mps(8, 6, rng);
  const Vector v = to_dense(psi);
  for (Index c : {0, 3, 7}) {
    const auto can = canonicalized(psi, c);
    EXPECT_LT(canonical_error(can), kIsometryTol);
    EXPECT_LT((to_dense(can) - v).norm(), 1e-11);
  }
}

TEST(Mps, CompressRespectsBondAndReportsError) {
  Rng rng(4);
  const auto psi = testing::random_mps(10, 16, rng);
  const Vector v = to_dense(psi);
  for (Index chi : {1, 2, 4, 8, 16}) {
    const auto c = compress(psi, chi);
    EXPECT_LE(c.state.max_bond(), chi);
    EXPECT_LT(canonical_error(c.state), kIsometryTol);
    const double actual = (to_dense(c.state) - v).norm();
    // Sequential truncation: the true error never exceeds the accumulated
    // discarded weight.
    EXPECT_LE(actual, c.truncation_error + 1e-10);
    if (chi == 16) EXPECT_LT(actual, 1e-10);
  }
}

TEST(Mps, CompressIsOptimalForSingleCut) {
  // Two sites: truncated SVD is the Eckart-Young optimum.
  Rng rng(5);
  Matrix m = testing::random_matrix(2, 2, rng);
  Vector v(4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) v[2 * i + j] = m(i, j);
  const auto psi = mps_from_dense(v);
  const auto c = compress(psi, 1);
  Eigen::JacobiSVD<Matrix> svd(m);
  EXPECT_NEAR((to_dense(c.state) - v).norm(), svd.singularValues()[1], 1e-12);
  EXPECT_NEAR(c.truncation_error, svd.singularValues()[1], 1e-12);
}

TEST(Mps, ToDenseCap) {
  Rng rng(6);
  const auto psi = testing::random_mps(6, 2, rng);
  EXPECT_THROW(to_dense(psi, 5), CapExceeded);
}

TEST(Mpo, DenseRoundTripAndAdjoint) {
  Rng rng(7);
  const Matrix u = testing::random_matrix(16, 16, rng);
  const auto op = mpo_from_dense(u);
  EXPECT_LT((to_dense(op) - u).norm(), 1e-11);
  EXPECT_LT((to_dense(adjoint(op)) - u.adjoint()).norm(), 1e-11);
  EXPECT_LT(std::abs(trace(op) - u.trace()), 1e-11);
  EXPECT_NEAR(frobenius_norm(op), u.norm(), 1e-10);
}

TEST(Mpo, ProductOfSingleSiteOperators) {
  const auto op = MatrixProductOperator::product({testing::pauli('x'), testing::pauli('y'), testing::pauli('z')});
  const Matrix expected = testing::dense_kron_all({testing::pauli('x'), testing::pauli('y'), testing::pauli('z')});
  EXPECT_LT((to_dense(op) - expected).norm(), 1e-14);
  EXPECT_LT((to_dense(MatrixProductOperator::identity(3)) - Matrix::Identity(8, 8)).norm(), 0.0 + 1e-15);
}

TEST(Mpo, MultiplyMatchesDense) {
  Rng rng(8);
  const auto a = testing::random_mpo(5, 3, rng);
  const auto b = testing::random_mpo(5, 2, rng);
  const Matrix expected = to_dense(a) * to_dense(b);
  const auto raw = multiply_mpo(a, b, Truncation::lossless(), false);
  EXPECT_LT((to_dense(raw.op) - expected).norm(), 1e-10 * expected.norm());
  for (std::size_t k = 1; k + 1 < raw.pre_compression_bonds.size(); ++k) EXPECT_EQ(raw.pre_compression_bonds[k], 6);
  const auto c = multiply_mpo(a, b, Truncation::lossless());
  EXPECT_LT((to_dense(c.op) - expected).norm(), 1e-10 * expected.norm());
  const auto t = multiply_mpo(a, b, Truncation::bond(2));
  EXPECT_LE(t.op.max_bond(), 2);
  EXPECT_LE((to_dense(t.op) - expected).norm(), t.truncation_error + 1e-9 * expected.norm());
}

TEST(Mpo, AddMatchesDense) {
  Rng rng(9);
  const auto a = testing::random_mpo(4, 2, rng);
  const auto b = testing::random_mpo(4, 3, rng);
  EXPECT_LT((to_dense(add(a, b)) - (to_dense(a) + to_dense(b))).norm(), 1e-10);
}

TEST(Operations, ApplyMpoFullChain) {
  Rng rng(10);
  const auto psi = testing::random_mps(6, 4, rng);
  const auto op = testing::random_mpo(6, 3, rng);
  const Vector expected = to_dense(op) * to_dense(psi);
  const auto out = apply_mpo(op, psi);
  EXPECT_LT((to_dense(out.state) - expected).norm(), 1e-10 * expected.norm());
  ApplyOptions opts;
  opts.normalize = true;
  const auto n = apply_mpo(op, psi, {}, opts);
  EXPECT_NEAR(norm(n.state), 1.0, 1e-12);
}

TEST(Operations, ApplyMpoOnSubsetWithGaps) {
  Rng rng(11);
  const auto psi = testing::random_mps(7, 4, rng);
  const Matrix u = testing::random_unitary(8, rng);
  const auto op = mpo_from_dense(u);
  const std::vector<Index> targets{1, 3, 6};
  // Dense oracle: permute target qubits next to each other is avoided by
  // acting directly on the amplitude index.
  const Vector v = to_dense(psi);
  Vector expected = Vector::Zero(v.size());
  const Index n = 7;
  for (Index idx = 0; idx < v.size(); ++idx) {
    Index in = 0;
    for (Index t : targets) in = (in << 1) | ((idx >> (n - 1 - t)) & 1);
    for (Index out = 0; out < 8; ++out) {
      Index j = idx;
      for (Index m = 0; m < 3; ++m) {
        const Index bit = (out >> (2 - m)) & 1;
        const Index pos = n - 1 - targets[static_cast<std::size_t>(m)];
        j = (j & ~(Index{1} << pos)) | (bit << pos);
      }
      expected[j] += u(out, in) * v[idx];
    }
  }
  const auto got = apply_mpo(op, psi, targets);
  EXPECT_LT((to_dense(got.state) - expected).norm(), 1e-10);
  EXPECT_THROW(apply_mpo(op, psi, {3, 1, 6}), RangeError);
  EXPECT_THROW(apply_mpo(op, psi, {1, 3}), DimensionError);
}

TEST(Operations, ReducedDensityMatchesPartialTrace) {
  Rng rng(12);
  const auto psi = testing::random_mps(8, 5, rng, false);
  const Vector v = to_dense(psi);
  for (Index w : {1, 2, 3}) {
    const auto all = all_window_densities(psi, w);
    ASSERT_EQ(static_cast<Index>(all.size()), 8 - w + 1);
    for (Index k = 0; k + w <= 8; ++k) {
      const Matrix expected = testing::dense_partial_trace(v, 8, k, w);
      EXPECT_LT((reduced_density(psi, k, w).matrix - expected).norm(), 1e-10);
      EXPECT_LT((all[static_cast<std::size_t>(k)].matrix - expected).norm(), 1e-10);
    }
  }
  EXPECT_THROW(reduced_density(psi, 7, 2), RangeError);
}

TEST(Io, RoundTripIsBitExact) {
  Rng rng(13);
  const auto psi = canonicalized(testing::random_mps(5, 3, rng), 2);
  std::stringstream ss;
  io::write(ss, psi);
  const auto back = io::read_mps(ss);
  ASSERT_EQ(back.length(), psi.length());
  EXPECT_EQ(back.canonical_form(), psi.canonical_form());
  for (Index k = 0; k < psi.length(); ++k) EXPECT_TRUE(back.site(k) == psi.site(k));

  const auto op = testing::random_mpo(4, 2, rng);
  std::stringstream so;
  io::write(so, op);
  const auto opb = io::read_mpo(so);
  for (Index k = 0; k < op.length(); ++k) EXPECT_TRUE(opb.site(k) == op.site(k));
}

TEST(Io, RejectsWrongKindAndTruncation) {
  Rng rng(14);
  std::stringstream ss;
  io::write(ss, testing::random_mpo(2, 2, rng));
  EXPECT_THROW(io::read_mps(ss), FormatError);
  std::stringstream bad("mpqpt-chain 1\nkind mps\nlength 1\nphys 2\nbonds 1 1\ncanonical none 0\nsite 0\n0x1p+0 0x0p+0\n");
  EXPECT_THROW(io::read_mps(bad), FormatError);
}

}  // namespace
}  // namespace mpqpt
