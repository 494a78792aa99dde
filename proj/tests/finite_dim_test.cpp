#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dmbohm/finite_dim.hpp"

using namespace dmbohm;
using namespace dmbohm::finite;

namespace {

using M = MatrixC<double>;
using V = VectorC<double>;

V random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  V v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = {n01(rng), n01(rng)};
  return v.normalized();
}

DensityOperator<double> random_operator(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  M a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {n01(rng), n01(rng)};
  M m = a * a.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator<double>(m);
}

// Independent entropy: sum over eigenvalues from a real 2x2 closed form.
double entropy_2x2(double a, double b) { return -(a * std::log(a) + b * std::log(b)); }

}  // namespace

TEST_CASE("ensemble_to_density") {
  const auto ensembles = half_identity_ensembles<double>();
  const M half = 0.5 * M::Identity(2, 2);

  const auto r1 = ensemble_to_density(ensembles[0]);
  CHECK(r1.matrix() == half);
  CHECK(max_abs_difference(ensemble_to_density(ensembles[1]), r1) < 1e-14);
  CHECK(max_abs_difference(ensemble_to_density(ensembles[2]), r1) < 1e-14);

  SUBCASE("errors") {
    CHECK_THROWS_AS(ensemble_to_density(WeightedStateList<double>{}), Error);
    CHECK_THROWS_AS(ensemble_to_density<double>({{0.5, basis(2, 0)}, {0.6, basis(2, 1)}}), Error);
    CHECK_THROWS_AS(ensemble_to_density<double>({{1.0, V(2.0 * basis(2, 0))}}), Error);
    CHECK_THROWS_AS(ensemble_to_density<double>({{0.5, basis(2, 0)}, {0.5, basis(3, 1)}}), Error);
    CHECK_THROWS_AS(ensemble_to_density<double>({{1.5, basis(2, 0)}, {-0.5, basis(2, 1)}}), Error);
  }
}

TEST_CASE("density operator validation") {
  M m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  CHECK_THROWS_AS(DensityOperator<double>{m}, Error);
  m << 0.6, 0.0, 0.0, 0.6;
  CHECK_THROWS_AS(DensityOperator<double>{m}, Error);
  m << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityOperator<double>{m}, Error);
  CHECK_THROWS_AS(DensityOperator<double>(M::Identity(65, 65) / 65.0), Error);
  try {
    DensityOperator<double>(M::Zero(2, 3));
    FAIL("expected DimMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimMismatch);
  }
}

TEST_CASE("outcome_probability") {
  const auto half = ensemble_to_density(half_identity_ensembles<double>()[0]);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) CHECK(outcome_probability(half, random_state(2, rng)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(outcome_probability(half, basis(2, 1)) == 0.5);

  const auto zero = pure_state<double>(basis(2, 0));
  CHECK(outcome_probability(zero, basis(2, 0)) == 1.0);
  const V plus = (basis(2, 0) + basis(2, 1)) / std::numbers::sqrt2;
  CHECK(std::abs(outcome_probability(zero, plus) - 0.5) < 1e-15);
  CHECK_THROWS_AS(outcome_probability(zero, basis(3, 0)), Error);
}

TEST_CASE("outcome probability equals the weighted sum over the ensemble") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index dim = 2 + trial % 4;
    WeightedStateList<double> e;
    double total = 0;
    for (int i = 0; i < 3; ++i) {
      e.push_back({u01(rng), random_state(dim, rng)});
      total += e.back().probability;
    }
    for (auto& s : e) s.probability /= total;
    const V a = random_state(dim, rng);
    double expected = 0;
    for (const auto& [p, phi] : e) expected += p * std::norm(phi.dot(a));
    CHECK(std::abs(outcome_probability(ensemble_to_density(e), a) - expected) < 1e-12);
  }
}

TEST_CASE("the three qubit ensembles are indistinguishable by every measurement") {
  const auto ensembles = half_identity_ensembles<double>();
  std::vector<DensityOperator<double>> ops;
  for (const auto& e : ensembles) ops.push_back(ensemble_to_density(e));
  std::mt19937_64 rng(20);
  for (int i = 0; i < 20; ++i) {
    const V a = random_state(2, rng);
    const double p0 = outcome_probability(ops[0], a);
    CHECK(outcome_probability(ops[1], a) == doctest::Approx(p0).epsilon(1e-14));
    CHECK(outcome_probability(ops[2], a) == doctest::Approx(p0).epsilon(1e-14));
  }
}

TEST_CASE("von_neumann_entropy") {
  CHECK(von_neumann_entropy(pure_state<double>(basis(3, 1))) < 1e-12);
  const auto half = ensemble_to_density(half_identity_ensembles<double>()[1]);
  CHECK(std::abs(von_neumann_entropy(half) - std::log(2.0)) < 1e-12);
  M d = M::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  const double expected = entropy_2x2(0.75, 0.25);
  CHECK(std::abs(expected - 0.562335) < 1e-6);
  CHECK(std::abs(von_neumann_entropy(DensityOperator<double>(d)) - expected) < 1e-12);

  SUBCASE("concavity") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
      const auto a = random_operator(3, rng);
      const auto b = random_operator(3, rng);
      const DensityOperator<double> mix(0.5 * (a.matrix() + b.matrix()));
      CHECK(von_neumann_entropy(mix) >= 0.5 * von_neumann_entropy(a) + 0.5 * von_neumann_entropy(b) - 1e-12);
    }
  }
}

TEST_CASE("partial_trace") {
  SUBCASE("which-path entangled state leaves the equal mixture of the arms") {
    // atom labels |u>,|d> and detector labels |xi0>,|xi1>; joint index atom*2 + detector
    const V u = basis(2, 0);
    const V d = basis(2, 1);
    const V xi0 = basis(2, 0);
    const V xi1 = basis(2, 1);
    const V joint = (kron<double>(u, xi1) + kron<double>(d, xi0)) / std::numbers::sqrt2;
    const auto reduced = partial_trace(pure_state<double>(joint), 2, 2, 0);
    const M expected = 0.5 * (u * u.adjoint() + d * d.adjoint());
    // (1/sqrt2)^2 rounds to 0.5000000000000001
    CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(reduced.matrix()(0, 1) == 0.0);
  }
  SUBCASE("product factorization") {
    std::mt19937_64 rng(4);
    const auto a = random_operator(3, rng);
    const auto b = random_operator(2, rng);
    const auto ab = tensor(a, b);
    CHECK(max_abs_difference(partial_trace(ab, 3, 2, 0), a) < 1e-15);
    CHECK(max_abs_difference(partial_trace(ab, 3, 2, 1), b) < 1e-15);
  }
  SUBCASE("Bell state") {
    const V bell = (kron<double>(basis(2, 0), basis(2, 0)) + kron<double>(basis(2, 1), basis(2, 1))) / std::numbers::sqrt2;
    const M half = 0.5 * M::Identity(2, 2);
    for (int keep : {0, 1}) {
      CHECK((partial_trace(pure_state<double>(bell), 2, 2, keep).matrix() - half).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("trace preserved and errors") {
    std::mt19937_64 rng(8);
    const auto j = random_operator(6, rng);
    CHECK(std::abs(partial_trace(j, 2, 3, 1).matrix().trace().real() - 1.0) < 1e-14);
    CHECK_THROWS_AS(partial_trace(j, 4, 2, 0), Error);
    CHECK_THROWS_AS(partial_trace(j, 2, 3, 2), Error);
  }
}

TEST_CASE("diagonalize") {
  SUBCASE("degenerate spectrum is checked by reconstruction") {
    const auto half = ensemble_to_density(half_identity_ensembles<double>()[2]);
    const auto list = diagonalize(half);
    REQUIRE(list.size() == 2);
    CHECK(std::abs(list[0].probability - 0.5) < 1e-14);
    CHECK(std::abs(list[0].state.dot(list[1].state)) < 1e-14);
    CHECK((reconstruct(list, 2) - half.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("diag(3/4, 1/4)") {
    M d = M::Zero(2, 2);
    d(0, 0) = 0.75;
    d(1, 1) = 0.25;
    const auto list = diagonalize(DensityOperator<double>(d));
    REQUIRE(list.size() == 2);
    CHECK(std::abs(list[0].probability - 0.75) < 1e-14);
    CHECK(std::abs(list[1].probability - 0.25) < 1e-14);
    CHECK(std::abs(std::abs(list[0].state[0]) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(list[1].state[1]) - 1.0) < 1e-14);
  }
  SUBCASE("random operators round-trip") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 10; ++i) {
      const auto rho = random_operator(4, rng);
      const auto list = diagonalize(rho);
      CHECK(max_abs_difference(ensemble_to_density(list, 1e-10), rho) < 1e-10);
    }
  }
  SUBCASE("zero weights are dropped") {
    CHECK(diagonalize(pure_state<double>(basis(4, 2))).size() == 1);
  }
}

TEST_CASE("float precision is supported") {
  const auto list = half_identity_ensembles<float>();
  const auto rho = ensemble_to_density<float>(list[1], 1e-6f);
  CHECK(std::abs(von_neumann_entropy(rho) - std::log(2.0f)) < 1e-5f);
}

TEST_CASE("footnote check: rho1 members measured in the +/- basis") {
  const V plus = (basis(2, 0) + basis(2, 1)) / std::numbers::sqrt2;
  const V minus = (basis(2, 0) - basis(2, 1)) / std::numbers::sqrt2;
  for (Eigen::Index member : {0, 1}) {
    const auto rho = pure_state<double>(basis(2, member));
    CHECK(std::abs(outcome_probability(rho, plus) - 0.5) < 1e-15);
    CHECK(std::abs(outcome_probability(rho, minus) - 0.5) < 1e-15);
  }
}
