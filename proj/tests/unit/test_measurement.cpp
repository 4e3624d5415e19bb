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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mpqpt/measurement/ancilla_free.hpp"
#include "mpqpt/measurement/dataset_io.hpp"
#include "mpqpt/measurement/simulator.hpp"
#include "support/oracles.hpp"

namespace mpqpt {
namespace {

Matrix projector(char a, int s) { return 0.5 * (Matrix::Identity(2, 2) + double(s) * testing::pauli(a)); }

// p(s) = <psi| (x)_window (1 + s_i sigma_i)/2 |psi>, fully dense.
std::vector<double> dense_distribution(const Vector& psi, Index length, const ObservableSpec& spec) {
  std::vector<double> p;
  for (Index s = 0; s < pow2(spec.width()); ++s) {
    std::vector<Matrix> ops(static_cast<std::size_t>(length), Matrix::Identity(2, 2));
    for (Index m = 0; m < spec.width(); ++m)
      ops[static_cast<std::size_t>(spec.k + m)] =
          projector(spec.alphas[static_cast<std::size_t>(m)], outcome_sign(s, spec.width(), m));
    p.push_back((psi.adjoint() * testing::dense_kron_all(ops) * psi)(0, 0).real());
  }
  return p;
}

// tr[E(P_A^t) P_S] / 2^n with E(X) = U X U^dagger, per window outcome.
std::vector<double> dense_channel_distribution(const Matrix& u, const ObservableSpec& spec) {
  const Index n = static_cast<Index>(std::lround(std::log2(static_cast<double>(u.rows()))));
  std::vector<double> p;
  for (Index s = 0; s < pow2(spec.width()); ++s) {
    std::vector<Matrix> pa(static_cast<std::size_t>(n), Matrix::Identity(2, 2)), ps = pa;
    for (Index m = 0; m < spec.width(); ++m) {
      const Index site = spec.k + m;
      const Matrix proj = projector(spec.alphas[static_cast<std::size_t>(m)], outcome_sign(s, spec.width(), m));
      (site % 2 ? ps : pa)[static_cast<std::size_t>(site / 2)] = proj;
    }
    const Matrix a_t = testing::dense_kron_all(pa).transpose();
    p.push_back((u * a_t * u.adjoint() * testing::dense_kron_all(ps)).trace().real() / std::ldexp(1.0, int(n)));
  }
  return p;
}

double correlator(const std::vector<double>& p, Index width) {
  double c = 0.0;
  for (Index s = 0; s < static_cast<Index>(p.size()); ++s) {
    int sign = 1;
    for (Index m = 0; m < width; ++m) sign *= outcome_sign(s, width, m);
    c += sign * p[static_cast<std::size_t>(s)];
  }
  return c;
}

TEST(Specs, CountAndOrder) {
  for (Index n = 1; n <= 5; ++n)
    for (Index r = 1; r <= std::min<Index>(2 * n, 4); ++r)
      EXPECT_EQ(static_cast<Index>(all_specs(2 * n, r).size()), (2 * n - r + 1) * ipow(3, r));
  const auto specs = all_specs(4, 2);
  EXPECT_EQ(specs.front(), (ObservableSpec{0, "xx"}));
  EXPECT_EQ(specs[1], (ObservableSpec{0, "xy"}));
  EXPECT_EQ(specs[9], (ObservableSpec{1, "xx"}));
  EXPECT_EQ(specs.back(), (ObservableSpec{2, "zz"}));
  EXPECT_THROW(validate(ObservableSpec{3, "xx"}, 4), RangeError);
  EXPECT_THROW(validate(ObservableSpec{0, "xw"}, 4), RangeError);
}

Matrix dense_pauli_string(Index code, Index r) {
  std::vector<Matrix> ops;
  for (Index i = r - 1; i >= 0; --i) {
    const Index digit = (code >> (2 * i)) & 3;
    ops.push_back(digit == 0 ? Matrix(Matrix::Identity(2, 2)) : testing::pauli("xyz"[digit - 1]));
  }
  return testing::dense_kron_all(ops);
}

TEST(PauliTransforms, MatchBruteForce) {
  testing::Rng rng(2);
  for (Index r = 1; r <= 3; ++r) {
    const Matrix h = testing::random_hermitian(pow2(r), rng);
    const auto e = pauli_expectations(h, r);
    std::vector<double> coeff(e.size());
    for (Index code = 0; code < pow2(2 * r); ++code) {
      EXPECT_NEAR(e[static_cast<std::size_t>(code)], (h * dense_pauli_string(code, r)).trace().real(), 1e-12);
      coeff[static_cast<std::size_t>(code)] = std::ldexp(e[static_cast<std::size_t>(code)], -static_cast<int>(r));
    }
    // Pauli expansion reproduces the matrix
    EXPECT_LT((pauli_sum(coeff, r) - h).norm(), 1e-12);
  }
  // distribution_from_expectations agrees with the direct basis rotation
  const Matrix rho = [&] {
    const Matrix a = testing::random_matrix(8, 8, rng);
    const Matrix m = a * a.adjoint();
    return Matrix(m / m.trace());
  }();
  for (const auto& alphas : all_axis_strings(3)) {
    const auto a = distribution_from_expectations(pauli_expectations(rho, 3), alphas);
    const auto b = pauli_outcome_distribution(rho, alphas);
    for (std::size_t s = 0; s < a.size(); ++s) EXPECT_NEAR(a[s], b[s], 1e-12);
    const auto g = setting_correlators(b);
    for (Index t = 0; t < 8; ++t)
      EXPECT_NEAR(g[static_cast<std::size_t>(t)], (rho * dense_pauli_string(pauli_code(alphas, t), 3)).trace().real(), 1e-12);
  }
}

TEST(BellInput, SinglePairAndMarginals) {
  const Vector v = to_dense(bell_input(1));
  EXPECT_NEAR(std::abs(v[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v[3] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_EQ(v[1], cplx(0.0));
  EXPECT_EQ(v[2], cplx(0.0));
  const auto psi = bell_input(3);
  EXPECT_EQ(psi.max_bond(), 2);
  EXPECT_NEAR(norm(psi), 1.0, 1e-14);
  for (Index k = 0; k < 6; ++k)
    EXPECT_LT((reduced_density(psi, k, 1).matrix - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_NEAR(correlator(exact_distribution(psi, {2, "xx"}), 2), 1.0, 1e-14);
  EXPECT_NEAR(correlator(exact_distribution(psi, {2, "yy"}), 2), -1.0, 1e-14);
  EXPECT_NEAR(correlator(exact_distribution(psi, {2, "zz"}), 2), 1.0, 1e-14);
  // across pairs there is no correlation
  EXPECT_NEAR(correlator(exact_distribution(psi, {1, "xx"}), 2), 0.0, 1e-14);
}

TEST(ChoiState, IdentityAndAmplitudes) {
  const auto id = choi_state(MatrixProductOperator::identity(3));
  EXPECT_LT((to_dense(id.state) - to_dense(bell_input(3))).norm(), 1e-14);

  const auto flip = choi_state(MatrixProductOperator::product({testing::pauli('x')}));
  const Vector f = to_dense(flip.state);
  EXPECT_NEAR(std::abs(f[1]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(f[2]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_LT(std::abs(f[0]) + std::abs(f[3]), 1e-15);

  testing::Rng rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix u = testing::random_unitary(4, rng);
    const Vector v = to_dense(choi_state(mpo_from_dense(u)).state);
    // sites a0 s0 a1 s1: <i|<j|psi> 2^{n/2} = <j|U|i>
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) {
        const Index idx = ((i >> 1) << 3) | ((j >> 1) << 2) | ((i & 1) << 1) | (j & 1);
        EXPECT_LT(std::abs(2.0 * v[idx] - u(j, i)), 1e-13);
      }
    EXPECT_LT((v - testing::dense_choi(u)).norm(), 1e-13);
  }
}

TEST(ExactDistribution, SimpleStates) {
  const std::vector<int> zeros(4, 0);
  const auto p = exact_distribution(MatrixProductState::basis(zeros), {1, "zzz"});
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  for (std::size_t s = 1; s < p.size(); ++s) EXPECT_NEAR(p[s], 0.0, 1e-15);
  const auto q = exact_distribution(MatrixProductState::basis(zeros), {2, "x"});
  EXPECT_NEAR(q[0], 0.5, 1e-15);
  EXPECT_NEAR(q[1], 0.5, 1e-15);
}

TEST(ExactDistribution, MatchesDenseProjectors) {
  testing::Rng rng(8);
  const auto psi = testing::random_mps(6, 4, rng);
  const Vector v = to_dense(psi);
  for (const auto& spec : all_specs(6, 3)) {
    const auto p = exact_distribution(psi, spec);
    const auto expected = dense_distribution(v, 6, spec);
    double total = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      EXPECT_NEAR(p[s], expected[s], 1e-12);
      EXPECT_GE(p[s], -1e-12);
      total += p[s];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Sampling, PointMassMeanAndDeterminism) {
  PhiloxEngine rng(1, 0);
  const auto c = sample({0.0, 0.0, 1.0, 0.0}, 1000, rng);
  EXPECT_EQ(c, (std::vector<std::uint64_t>{0, 0, 1000, 0}));

  const std::vector<double> dist{0.1, 0.2, 0.3, 0.4};
  const std::uint64_t m = 100000;
  PhiloxEngine a(99, 3), b(99, 3);
  const auto ca = sample(dist, m, a);
  EXPECT_EQ(ca, sample(dist, m, b));
  std::uint64_t total = 0;
  for (auto x : ca) total += x;
  EXPECT_EQ(total, m);
  // s_1 = +1 for outcomes 0, 1
  const double mean = (double(ca[0] + ca[1]) - double(ca[2] + ca[3])) / double(m);
  EXPECT_NEAR(mean, 0.3 - 0.7, 5.0 / std::sqrt(double(m)));
}

TEST(AncillaFree, PlanSplitsLayout) {
  const auto plan = ancilla_free_plan({1, "xy"}, 2);
  EXPECT_FALSE(plan.preparation[0].has_value());
  ASSERT_TRUE(plan.preparation[1].has_value());
  EXPECT_EQ(plan.preparation[1]->axis, 'y');
  ASSERT_TRUE(plan.observable[0].has_value());
  EXPECT_EQ(plan.observable[0]->axis, 'x');
  EXPECT_FALSE(plan.observable[1].has_value());

  const auto sys = ancilla_free_plan({1, "z"}, 2);
  EXPECT_EQ(sys.prepared_count(), 0);
  EXPECT_EQ(sys.observable[0]->axis, 'z');

  // |y,+>^t is |y,->
  const Vector t = AncillaFreePlan::prepared_state({'y', 0}, 1);
  EXPECT_LT((t - pauli_eigenstate('y', -1)).norm(), 1e-15);
}

TEST(AncillaFree, IdentityChannelYY) {
  const auto id = MatrixProductOperator::identity(1);
  EXPECT_NEAR(correlator(ancilla_free_distribution(id, {0, "yy"}), 2), -1.0, 1e-14);
  EXPECT_NEAR(correlator(exact_distribution(choi_state(id).state, {0, "yy"}), 2), -1.0, 1e-14);
}

TEST(AncillaFree, SingleQubitChannelAllPairs) {
  testing::Rng rng(12);
  const Matrix u = testing::random_unitary(2, rng);
  const auto op = mpo_from_dense(u);
  const auto psi = choi_state(op).state;
  for (const auto& spec : all_specs(2, 2)) {
    const auto free = ancilla_free_distribution(op, spec);
    const auto assisted = exact_distribution(psi, spec);
    const auto oracle = dense_channel_distribution(u, spec);
    for (std::size_t s = 0; s < free.size(); ++s) {
      EXPECT_NEAR(free[s], assisted[s], 1e-12) << spec.alphas;
      EXPECT_NEAR(free[s], oracle[s], 1e-12) << spec.alphas;
    }
  }
}

TEST(AncillaFree, EquivalenceOnRandomUnitaries) {
  testing::Rng rng(21);
  for (Index n : {2, 3}) {
    const Matrix u = testing::random_unitary(pow2(n), rng);
    const auto op = mpo_from_dense(u);
    for (Index r = 1; r <= 3; ++r) {
      const auto free = measure_ancilla_free(op, r, kExactShots, 0);
      const auto assisted = measure_ancilla_assisted(choi_state(op).state, r, kExactShots, 0);
      validate(free);
      validate(assisted);
      for (std::size_t i = 0; i < free.tables.size(); ++i) {
        const auto oracle = dense_channel_distribution(u, free.tables[i].spec);
        for (std::size_t s = 0; s < oracle.size(); ++s) {
          EXPECT_NEAR(free.tables[i].probabilities[s], oracle[s], 1e-10);
          EXPECT_NEAR(assisted.tables[i].probabilities[s], oracle[s], 1e-10);
        }
      }
    }
  }
}

TEST(AncillaFree, CircuitChannelMatchesAssisted) {
  testing::Rng rng(5);
  const Index n = 5;
  const auto op = testing::random_mpo(n, 3, rng);
  // unitary via dense polar factor, then back to an MPO
  const Matrix m = to_dense(op);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto u = mpo_from_dense(svd.matrixU() * svd.matrixV().adjoint());
  const auto free = measure_ancilla_free(u, 3, kExactShots, 0);
  const auto assisted = measure_ancilla_assisted(choi_state(u).state, 3, kExactShots, 0);
  for (std::size_t i = 0; i < free.tables.size(); ++i)
    for (std::size_t s = 0; s < 8; ++s)
      EXPECT_NEAR(free.tables[i].probabilities[s], assisted.tables[i].probabilities[s], 1e-10);
}

TEST(AncillaFree, SampledCorrelatorsAndDeterminism) {
  testing::Rng rng(30);
  const auto op = mpo_from_dense(testing::random_unitary(4, rng));
  const std::uint64_t m = 20000;
  const auto a = measure_ancilla_free(op, 2, m, 77);
  const auto b = measure_ancilla_free(op, 2, m, 77);
  const auto exact = measure_ancilla_free(op, 2, kExactShots, 0);
  validate(a);
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    EXPECT_EQ(a.tables[i].counts, b.tables[i].counts);
    EXPECT_NEAR(correlator(a.tables[i].frequencies(), 2), correlator(exact.tables[i].probabilities, 2),
                5.0 / std::sqrt(double(m)));
  }
  EXPECT_NE(measure_ancilla_free(op, 2, m, 78).tables[0].counts, a.tables[0].counts);
}

TEST(Dataset, AssistedSamplingIsSeeded) {
  testing::Rng rng(31);
  const auto psi = choi_state(mpo_from_dense(testing::random_unitary(8, rng))).state;
  const auto a = measure_ancilla_assisted(psi, 2, 1000, 5);
  const auto b = measure_ancilla_assisted(psi, 2, 1000, 5);
  validate(a);
  for (std::size_t i = 0; i < a.tables.size(); ++i) EXPECT_EQ(a.tables[i].counts, b.tables[i].counts);
}

TEST(DatasetIo, RoundTripAndRejects) {
  testing::Rng rng(32);
  const auto psi = choi_state(mpo_from_dense(testing::random_unitary(4, rng))).state;
  for (std::uint64_t shots : {kExactShots, std::uint64_t{500}}) {
    const auto d = measure_ancilla_assisted(psi, 2, shots, 9);
    std::stringstream ss;
    io::write(ss, d);
    const auto back = io::read_dataset(ss);
    EXPECT_EQ(back.n, d.n);
    EXPECT_EQ(back.r, d.r);
    EXPECT_EQ(back.shots, d.shots);
    EXPECT_EQ(back.seed, d.seed);
    EXPECT_EQ(back.provenance, d.provenance);
    for (std::size_t i = 0; i < d.tables.size(); ++i) {
      EXPECT_EQ(back.tables[i].spec, d.tables[i].spec);
      EXPECT_EQ(back.tables[i].counts, d.tables[i].counts);
      EXPECT_EQ(back.tables[i].probabilities, d.tables[i].probabilities);
    }
  }
  auto d = measure_ancilla_assisted(psi, 2, 100, 9);
  d.tables.pop_back();
  EXPECT_THROW(validate(d), DatasetError);
  std::stringstream ss;
  io::write(ss, d);
  EXPECT_THROW(io::read_dataset(ss), FormatError);
  auto e = measure_ancilla_assisted(psi, 2, 100, 9);
  e.tables[3].counts[0] += 1;
  EXPECT_THROW(validate(e), DatasetError);
}

}  // namespace
}  // namespace mpqpt
