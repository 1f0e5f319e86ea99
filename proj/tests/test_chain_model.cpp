#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "qst/chain_model.hpp"

using namespace qst;

TEST_CASE("build_fields evaluates the centered power law") {
  SUBCASE("flat field for p = 0") {
    const auto b = build_fields(8, {0.5, 0.0});
    for (double x : b) CHECK(x == 0.5);
  }
  SUBCASE("harmonic, even N") {
    const auto b = build_fields(8, {0.5, 2.0});
    const std::vector<double> expected{6.125, 3.125, 1.125, 0.125, 0.125, 1.125, 3.125, 6.125};
    CHECK(b == expected);
  }
  SUBCASE("linear, odd N has a zero-field center") {
    const auto b = build_fields(9, {1.0, 1.0});
    const std::vector<double> expected{4, 3, 2, 1, 0, 1, 2, 3, 4};
    CHECK(b == expected);
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(build_fields(8, {-0.1, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_fields(8, {0.5, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_fields(8, {NAN, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_fields(8, {0.5, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(build_fields(1, {0.5, 2.0}), std::invalid_argument);
  }
}

TEST_CASE("build_chain edge/bulk layout") {
  CHECK(build_chain(4, 0.01, 1.0, std::vector<double>(4, 0.0)).couplings ==
        std::vector<double>{0.01, 1.0, 0.01});
  CHECK(build_chain(2, 1.0, 3.0, {0.0, 0.0}).couplings == std::vector<double>{1.0});
  CHECK(build_chain(3, 0.2, 3.0, {0.0, 0.0, 0.0}).couplings == std::vector<double>{0.2, 0.2});

  const auto chain = build_chain(8, 1.0, 1.0, build_fields(8, {0.5, 2.0}));
  CHECK(chain.couplings == std::vector<double>(7, 1.0));
  CHECK(chain.fields[0] == 6.125);

  CHECK_THROWS_AS(build_chain(4, 0.0, 1.0, std::vector<double>(4, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(4, 1.0, -1.0, std::vector<double>(4, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(4, 1.0, 1.0, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("to_single_excitation carries the Pauli factor 2") {
  auto h = to_single_excitation(ChainSpec{2, {1.0}, {0.0, 0.0}});
  CHECK(h.diag == std::vector<double>{0, 0});
  CHECK(h.offdiag == std::vector<double>{2});

  h = to_single_excitation(ChainSpec{2, {1.0}, {1.0, 1.0}});
  CHECK(h.diag == std::vector<double>{2, 2});
  CHECK(h.offdiag == std::vector<double>{2});
  CHECK(h.energy_offset == -2.0);

  h = to_single_excitation(ChainSpec{3, {0.5, 0.5}, {1.0, 0.0, 1.0}});
  CHECK(h.diag == std::vector<double>{2, 0, 2});
  CHECK(h.offdiag == std::vector<double>{1, 1});

  CHECK_THROWS_AS(to_single_excitation(ChainSpec{3, {0.5}, {1.0, 0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(to_single_excitation(ChainSpec{2, {0.0}, {1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("single-excitation block matches the full spin Hamiltonian") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> field(-2.0, 2.0), coupling(0.1, 2.0);
  for (std::size_t n : {2u, 3u, 5u, 7u}) {
    ChainSpec chain{n, {}, {}};
    for (std::size_t k = 0; k + 1 < n; ++k) chain.couplings.push_back(coupling(rng));
    for (std::size_t k = 0; k < n; ++k) chain.fields.push_back(field(rng));
    const auto block = oracle::spin_single_excitation_block(chain);
    const auto h = to_single_excitation(chain);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(block(i, i) == doctest::Approx(h.diag[i] + h.energy_offset).epsilon(1e-14));
      for (std::size_t j = 0; j < n; ++j) {
        double expected = 0.0;
        if (j == i + 1) expected = h.offdiag[i];
        if (i == j + 1) expected = h.offdiag[j];
        if (i != j) CHECK(block(i, j) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("mirror symmetry check") {
  CHECK(is_mirror_symmetric(build_chain(8, 1, 1, build_fields(8, {0.5, 2.0})), 0.0));
  CHECK_FALSE(is_mirror_symmetric(ChainSpec{3, {1, 1}, {1, 0, 2}}, 1e-12));
  CHECK(is_mirror_symmetric(ChainSpec{4, {0.01, 1, 0.01}, {0.3, 0.3, 0.3, 0.3}}, 0.0));
  CHECK_FALSE(is_mirror_symmetric(ChainSpec{4, {0.01, 1, 0.02}, {0, 0, 0, 0}}, 1e-3));
  CHECK_THROWS_AS(is_mirror_symmetric(ChainSpec{2, {1}, {0, 0}}, -1.0), std::invalid_argument);
}

TEST_CASE("generated chains are bitwise mirror symmetric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.0, 3.0), up(0.0, 6.0), uj(0.001, 2.0);
  std::uniform_int_distribution<std::size_t> un(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = un(rng);
    const auto b = build_fields(n, {ua(rng), up(rng)});
    for (std::size_t k = 0; k < n; ++k) REQUIRE(b[k] == b[n - 1 - k]);
    const auto chain = build_chain(n, uj(rng), uj(rng), b);
    REQUIRE(is_mirror_symmetric(chain, 0.0));
    const auto h = to_single_excitation(chain);
    for (std::size_t k = 0; k + 1 < n; ++k) REQUIRE(h.offdiag[k] == h.offdiag[n - 2 - k]);
  }
}
