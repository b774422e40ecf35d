#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tfim/entanglement.hpp"

using namespace tfim;

namespace {

std::vector<int> block_positions(const Lattice& lat) {
  std::vector<int> keep;
  for (int x = 0; x <= lat.L(); ++x) keep.push_back(lat.index_of(x));
  return keep;
}

}  // namespace

TEST_CASE("schmidt_spectrum examples") {
  SUBCASE("product state") {
    const auto p = homogeneous_profile(Lattice(1, 1), 1.0, 0.0);
    const auto sp = schmidt_spectrum(ground_state(p), p.lattice());
    CHECK(sp.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t j = 1; j < sp.values.size(); ++j) CHECK(sp.values[j] <= 1e-10);
  }
  SUBCASE("Bell state") {
    // block [0, 0] is the second bit of the m = 1, L = 0 lattice; entangle it
    // with the first one and leave the third in |+>
    const Lattice lat(1, 0);
    std::vector<double> psi(8, 0.0);
    psi[0b000] = 0.5;
    psi[0b011] = 0.5;
    psi[0b100] = 0.5;
    psi[0b111] = 0.5;
    const auto sp = schmidt_spectrum(psi, lat);
    REQUIRE(sp.values.size() == 2);
    CHECK(sp.values[0] == doctest::Approx(0.5));
    CHECK(sp.values[1] == doctest::Approx(0.5));
    CHECK(entanglement_entropy(sp) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("n = 4, block [0, 1] against the dense partial trace") {
    const auto p = homogeneous_profile(Lattice(1, 1), 1.0, 1.0);
    const auto g = ground_state(p);
    const auto sp = schmidt_spectrum(g, p.lattice());
    const Eigen::Map<const Eigen::VectorXd> psi(g.amplitudes.data(), g.amplitudes.size());
    const auto ref = oracle::descending_eigenvalues(oracle::partial_trace(psi, 4, block_positions(p.lattice())));
    REQUIRE(sp.values.size() == ref.size());
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(sp.values[j] - ref[j]) <= 1e-10);
  }
  SUBCASE("unnormalized input") {
    std::vector<double> psi(4, 0.6);
    CHECK_THROWS_AS(schmidt_spectrum(psi, Lattice(0, 1)), std::invalid_argument);
  }
}

TEST_CASE("entanglement_entropy examples") {
  CHECK(entanglement_entropy({{1.0}}) == 0.0);
  CHECK(entanglement_entropy({{0.5, 0.5}}) == doctest::Approx(1.0));
  CHECK(entanglement_entropy({{0.25, 0.25, 0.25, 0.25}}) == doctest::Approx(2.0));
  CHECK(entanglement_entropy({{0.5, 0.5, 0.0}}) == doctest::Approx(1.0));
  CHECK(entanglement_entropy({{0.5, 0.5}}, EntropyUnit::nats) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("entropy_of_block examples") {
  SUBCASE("J = 0 gives zero entropy") {
    for (int m = 0; m <= 3; ++m)
      for (int L = 0; L <= 3; ++L) CHECK(entropy_of_block(homogeneous_profile(Lattice(m, L), 0.9, 0.0)).entropy_bits <= 1e-9);
  }
  SUBCASE("m = 1, L = 0, h = 5 against the 8-dimensional oracle") {
    const auto p = homogeneous_profile(Lattice(1, 0), 5.0, 1.0);
    const auto rep = entropy_of_block(p);
    const auto ref = oracle::dense_ground_state(oracle::dense_hamiltonian(p));
    const double s = oracle::entropy_bits(oracle::descending_eigenvalues(oracle::partial_trace(ref.psi, 3, {1})));
    CHECK(std::abs(rep.entropy_bits - s) <= 1e-10);
    CHECK(rep.entropy_bits > 0.0);
  }
  SUBCASE("purity symmetry, m = 4, L = 3") {
    const auto p = homogeneous_profile(Lattice(4, 3), 1.0, 1.0);
    const auto g = ground_state(p);
    const double sb = entanglement_entropy(schmidt_spectrum(g, p.lattice(), CutSide::block));
    const double se = entanglement_entropy(schmidt_spectrum(g, p.lattice(), CutSide::environment));
    CHECK(std::abs(sb - se) <= 1e-10);
  }
}

TEST_CASE("spectrum invariants against the dense oracle for n <= 8") {
  for (int m = 0; m <= 2; ++m)
    for (int L = 0; L <= 3; ++L) {
      const Lattice lat(m, L);
      if (lat.size() > 8) continue;
      const auto p = random_profile(lat, 31 * m + L, {0.3, 1.5}, 1.0);
      const auto g = ground_state(p);
      const auto sp = schmidt_spectrum(g, lat);
      double sum = 0;
      for (std::size_t j = 0; j < sp.values.size(); ++j) {
        CHECK(sp.values[j] >= 0.0);
        if (j) CHECK(sp.values[j] <= sp.values[j - 1]);
        sum += sp.values[j];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
      const Eigen::Map<const Eigen::VectorXd> psi(g.amplitudes.data(), g.amplitudes.size());
      auto ref = oracle::descending_eigenvalues(oracle::partial_trace(psi, lat.size(), block_positions(lat)));
      ref.resize(sp.values.size());
      for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(sp.values[j] - std::max(ref[j], 0.0)) <= 1e-10);
      const double S = entanglement_entropy(sp);
      CHECK(S >= 0.0);
      CHECK(S <= L + 1 + 1e-12);
      int nonzero = 0;
      for (double v : sp.values) nonzero += v > 0.0;
      CHECK(S <= std::log2(static_cast<double>(nonzero)) + 1e-12);
      if (L == 0) CHECK(S <= 1.0);
    }
}

TEST_CASE("entropy vanishes as J goes to zero") {
  const auto p = homogeneous_profile(Lattice(2, 2), 1.0, 1e-8);
  CHECK(entropy_of_block(p).entropy_bits < 1e-6);
}

TEST_CASE("block size limit") {
  EntropyOptions opts;
  opts.max_block_sites = 2;
  CHECK_THROWS(entropy_of_block(homogeneous_profile(Lattice(0, 3), 1.0, 1.0), opts));
}
