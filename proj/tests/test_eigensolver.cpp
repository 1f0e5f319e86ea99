#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qst/eigensolver.hpp"
#include "qst/errors.hpp"

using namespace qst;

namespace {

Hamiltonian1Ex uniform(std::size_t n, double tau, double diag = 0.0) {
  Hamiltonian1Ex h;
  h.diag.assign(n, diag);
  h.offdiag.assign(n - 1, tau);
  return h;
}

double max_orthonormality_error(const EigenDecomposition& ed) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ed.size; ++i)
    for (std::size_t j = 0; j < ed.size; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < ed.size; ++k) dot += ed.component(i, k) * ed.component(j, k);
      worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

void check_invariants(const Hamiltonian1Ex& h, const EigenDecomposition& ed) {
  REQUIRE(ed.size == h.size());
  for (std::size_t i = 1; i < ed.size; ++i) REQUIRE(ed.values[i - 1] <= ed.values[i]);
  CHECK(residual_norm(h, ed) <= 1e-10);
  CHECK(max_orthonormality_error(ed) <= 1e-10);
  for (std::size_t i = 0; i < ed.size; ++i) {
    auto v = ed.vector(i);
    auto lead = std::find_if(v.begin(), v.end(), [](double x) { return std::fabs(x) > 1e-12; });
    REQUIRE(lead != v.end());
    CHECK(*lead > 0.0);
  }
  for (double x : ed.vectors) REQUIRE(std::isfinite(x));
  for (double x : ed.values) REQUIRE(std::isfinite(x));
}

}  // namespace

TEST_CASE("2x2 dimer") {
  const auto h = uniform(2, 2.0);
  const auto ed = decompose(h);
  CHECK(ed.values[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(ed.values[1] == doctest::Approx(2.0).epsilon(1e-15));
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(ed.component(0, 0) == doctest::Approx(r));
  CHECK(ed.component(0, 1) == doctest::Approx(-r));
  CHECK(ed.component(1, 0) == doctest::Approx(r));
  CHECK(ed.component(1, 1) == doctest::Approx(r));
  CHECK(ed.parity[0] == Parity::odd);
  CHECK(ed.parity[1] == Parity::even);
  CHECK(residual_norm(h, ed) <= 1e-15);
}

TEST_CASE("uniform 3-site chain") {
  const auto ed = decompose(uniform(3, 1.0));
  CHECK(ed.values[0] == doctest::Approx(-std::numbers::sqrt2));
  CHECK(std::fabs(ed.values[1]) < 1e-14);
  CHECK(ed.values[2] == doctest::Approx(std::numbers::sqrt2));
}

TEST_CASE("uniform_chain_reference closed form") {
  auto ref = uniform_chain_reference(1, 1.0);
  CHECK(ref.values == std::vector<double>{2.0 * std::cos(std::numbers::pi / 2)});
  CHECK(ref.vectors == std::vector<double>{1.0});

  ref = uniform_chain_reference(3, 1.0);
  CHECK(ref.values[0] == doctest::Approx(-std::numbers::sqrt2));
  CHECK(ref.values[2] == doctest::Approx(std::numbers::sqrt2));

  // Site-1 components: sqrt(2/9) sin(k pi / 9), k = 1..8 (any order).
  ref = uniform_chain_reference(8, 1.0);
  std::vector<double> site1, expected;
  for (std::size_t i = 0; i < 8; ++i) site1.push_back(ref.component(i, 0));
  for (int k = 1; k <= 8; ++k) expected.push_back(std::sqrt(2.0 / 9.0) * std::sin(k * std::numbers::pi / 9));
  std::sort(site1.begin(), site1.end());
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < 8; ++i) CHECK(site1[i] == doctest::Approx(expected[i]).epsilon(1e-14));

  CHECK_THROWS_AS(uniform_chain_reference(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_chain_reference(4, 0.0), std::invalid_argument);
}

TEST_CASE("decompose matches the analytic open-chain spectrum") {
  for (bool blocks : {true, false}) {
    CAPTURE(blocks);
    for (std::size_t n = 2; n <= 64; ++n) {
      for (double tau : {1.0, 0.37, -1.3}) {
        const auto h = uniform(n, tau);
        const auto ed = decompose(h, {.use_mirror_blocks = blocks});
        const auto ref = uniform_chain_reference(n, tau);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(std::fabs(ed.values[i] - ref.values[i]) <= 1e-10);
        for (std::size_t x = 0; x < n * n; ++x)
          REQUIRE(std::fabs(ed.vectors[x] - ref.vectors[x]) <= 1e-8);
      }
    }
  }
  // N = 64, tau = 1 against the cosine formula directly.
  const auto ed = decompose(uniform(64, 1.0));
  for (int k = 1; k <= 64; ++k) {
    const double expected = 2.0 * std::cos(k * std::numbers::pi / 65);
    CHECK(std::fabs(ed.values[64 - k] - expected) <= 1e-10);
  }
}

TEST_CASE("random tridiagonal matrices: invariants and Jacobi cross-check") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> ud(-5.0, 5.0), ue(0.05, 3.0);
  std::uniform_int_distribution<std::size_t> un(1, 40);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = un(rng);
    Hamiltonian1Ex h;
    for (std::size_t k = 0; k < n; ++k) h.diag.push_back(ud(rng));
    for (std::size_t k = 0; k + 1 < n; ++k) h.offdiag.push_back((trial % 2 ? -1 : 1) * ue(rng));
    const auto ed = decompose(h);
    check_invariants(h, ed);

    double trace = 0.0, trace_sq = 0.0, frob = h.frobenius_norm();
    for (double d : h.diag) trace += d;
    double sum = 0.0, sum_sq = 0.0;
    for (double v : ed.values) {
      sum += v;
      sum_sq += v * v;
    }
    trace_sq = frob * frob;
    CHECK(std::fabs(sum - trace) <= 1e-10 * frob);
    CHECK(std::fabs(sum_sq - trace_sq) <= 1e-10 * std::max(1.0, frob * frob));

    auto [ref_values, ref_vectors] = oracle::jacobi_eigen(oracle::dense_from(h));
    std::sort(ref_values.begin(), ref_values.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(ed.values[i] == doctest::Approx(ref_values[i]).epsilon(1e-11));
  }
}

TEST_CASE("mirror-symmetric inputs get alternating parity labels") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(0.0, 2.0), up(0.0, 4.0), uj(0.05, 1.5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 15);
    const auto chain = build_chain(n, uj(rng), 1.0, build_fields(n, {ua(rng), up(rng)}));
    const auto h = to_single_excitation(chain);
    for (bool blocks : {true, false}) {
      const auto ed = decompose(h, {.use_mirror_blocks = blocks});
      check_invariants(h, ed);
      REQUIRE(ed.parity.size() == n);
      bool nondegenerate = true;
      for (std::size_t i = 1; i < n; ++i)
        if (ed.values[i] - ed.values[i - 1] < 1e-6 * h.frobenius_norm()) nondegenerate = false;
      // The full path mixes doublets split just above the cluster tolerance.
      if (blocks || nondegenerate)
        for (auto p : ed.parity) CHECK(p != Parity::none);
      if (nondegenerate)
        for (std::size_t i = 1; i < n; ++i) CHECK(ed.parity[i] != ed.parity[i - 1]);
    }
  }
}

TEST_CASE("near-degenerate doublets resolve to parity eigenstates") {
  // Strong potential, weak edges: the sender/receiver doublet splits far below 1e-12.
  const auto chain = build_chain(8, 0.01, 1.0, build_fields(8, {0.5, 4.0}));
  const auto h = to_single_excitation(chain);
  for (bool blocks : {true, false}) {
    CAPTURE(blocks);
    const auto ed = decompose(h, {.use_mirror_blocks = blocks});
    check_invariants(h, ed);
    // Top two levels are the edge doublet; each must be (|1> +- |N>)/sqrt(2).
    for (std::size_t i = 6; i < 8; ++i) {
      CHECK(std::fabs(ed.component(i, 0)) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-8));
      CHECK(std::fabs(ed.component(i, 7)) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-8));
      CHECK(ed.parity[i] != Parity::none);
    }
    CHECK(ed.parity[6] != ed.parity[7]);
  }
}

TEST_CASE("residual_norm") {
  const auto h = uniform(2, 2.0);
  auto ed = decompose(h);
  CHECK(residual_norm(h, ed) <= std::numeric_limits<double>::epsilon());
  ed.vectors[0] += 1e-3;
  CHECK(residual_norm(h, ed) > 1e-4);

  const auto h3 = uniform(3, 1.0);
  CHECK_THROWS_AS(residual_norm(h3, ed), std::invalid_argument);
}

TEST_CASE("invalid Hamiltonians are rejected") {
  Hamiltonian1Ex h{{0.0, 0.0}, {0.0}, 0.0};
  CHECK_THROWS_AS(decompose(h), std::invalid_argument);
  h = {{0.0, NAN}, {1.0}, 0.0};
  CHECK_THROWS_AS(decompose(h), std::invalid_argument);
  h = {{}, {}, 0.0};
  CHECK_THROWS_AS(decompose(h), std::invalid_argument);
}

TEST_CASE("eigen table layout") {
  const auto ed = decompose(uniform(3, 1.0));
  const auto table = eigen_table(ed);
  CHECK(table.header == std::vector<std::string>{"index", "value", "parity", "v_1", "v_2", "v_3"});
  REQUIRE(table.rows.size() == 3);
  CHECK(std::get<std::string>(table.rows[0][2]) == "even");
}
