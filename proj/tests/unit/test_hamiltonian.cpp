#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tfim/hamiltonian.hpp"

using namespace tfim;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("apply_hamiltonian examples") {
  SUBCASE("single site, J = 0 is -sigma1") {
    const HamiltonianOperator H(FieldProfile(Lattice(0, 0), {1.0}, 0.0));
    const auto out = H.apply(std::vector<double>{1.0, 0.0});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(-1.0));
  }
  SUBCASE("two aligned sites carry -J/2 on the diagonal") {
    const double eps = 1e-9;
    const HamiltonianOperator H(FieldProfile(Lattice(0, 1), {eps, eps}, 1.0));
    CHECK(H.diagonal()[0] == -0.5);
    CHECK(H.diagonal()[1] == 0.5);
    CHECK(H.diagonal()[3] == -0.5);
    const auto out = H.apply(std::vector<double>{1, 0, 0, 0});
    CHECK(out[0] == -0.5);
    CHECK(out[1] == -eps);
    CHECK(out[2] == -eps);
    CHECK(out[3] == 0.0);
  }
  SUBCASE("size mismatch") {
    const HamiltonianOperator H(FieldProfile(Lattice(0, 1), {1, 1}, 1.0));
    CHECK_THROWS_AS(H.apply(std::vector<double>(3)), std::invalid_argument);
  }
}

TEST_CASE("matrix-free operator equals the dense Kronecker oracle and is symmetric") {
  std::mt19937_64 gen(11);
  for (int n = 1; n <= 6; ++n) {
    const auto p = random_profile(Lattice(0, n - 1), 100 + n, {0.2, 2.0}, 0.3 * n);
    const HamiltonianOperator H(p);
    const Eigen::MatrixXd D = oracle::dense_hamiltonian(p);
    const auto v = random_vector(gen, H.dimension());
    const auto u = random_vector(gen, H.dimension());
    const auto Hv = H.apply(v);
    const Eigen::VectorXd ref = D * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(Hv[i] == doctest::Approx(ref(i)).epsilon(1e-12));
    CHECK(std::abs(dot(u, Hv) - dot(H.apply(u), v)) <= 1e-12 * (1 + std::abs(dot(u, Hv))));
    // off-diagonal entries are -h_x on single flips, zero elsewhere
    for (Eigen::Index a = 0; a < D.rows(); ++a)
      for (Eigen::Index b = 0; b < D.cols(); ++b) {
        if (a == b) continue;
        const auto diff = static_cast<std::uint64_t>(a ^ b);
        if (std::popcount(diff) == 1) CHECK(D(a, b) == -p.fields()[std::countr_zero(diff)]);
        else CHECK(D(a, b) == 0.0);
      }
    CHECK(H.norm_bound() >= D.cwiseAbs().rowwise().sum().maxCoeff() - 1e-12);
  }
}

TEST_CASE("ground_state examples") {
  SUBCASE("J = 0 product state") {
    const auto p = random_profile(Lattice(1, 2), 3, {0.3, 1.7}, 0.0);
    const auto g = ground_state(p);
    double sum = 0;
    for (double h : p.fields()) sum += h;
    CHECK(g.energy == doctest::Approx(-sum).epsilon(1e-12));
    for (double a : g.amplitudes) CHECK(a == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-9));
  }
  SUBCASE("single site") {
    const auto g = ground_state(FieldProfile(Lattice(0, 0), {0.7}, 1.0));
    CHECK(g.energy == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(g.amplitudes[0] == doctest::Approx(M_SQRT1_2).epsilon(1e-10));
    CHECK(g.amplitudes[1] == doctest::Approx(M_SQRT1_2).epsilon(1e-10));
  }
  SUBCASE("two sites against the 4x4 oracle") {
    const FieldProfile p(Lattice(0, 1), {1.0, 1.0}, 1.0);
    const auto g = ground_state(p);
    const auto ref = oracle::dense_ground_state(oracle::dense_hamiltonian(p));
    CHECK(std::abs(g.energy - ref.energy) <= 1e-10);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(g.amplitudes[i] - ref.psi(i)) <= 1e-8);
  }
}

TEST_CASE("ground state invariants") {
  std::mt19937_64 gen(5);
  for (int n = 2; n <= 10; n += 2) {
    const auto p = random_profile(Lattice(0, n - 1), 7 * n, {0.2, 1.5}, 1.0);
    LanczosOptions opts;
    opts.tol = 1e-10;
    const auto g = ground_state(p, opts);
    CHECK(g.residual <= opts.tol);
    CHECK(std::sqrt(dot(g.amplitudes, g.amplitudes)) == doctest::Approx(1.0).epsilon(1e-12));
    const std::size_t dim = g.amplitudes.size();
    for (std::size_t b = 0; b < dim; ++b) {
      CHECK(g.amplitudes[b] > 0.0);
      CHECK(std::abs(g.amplitudes[b] - g.amplitudes[(dim - 1) ^ b]) <= 1e-10);
    }
    const HamiltonianOperator H(p);
    for (int trial = 0; trial < 100; ++trial) {
      auto u = random_vector(gen, dim);
      const double nu = std::sqrt(dot(u, u));
      for (auto& x : u) x /= nu;
      CHECK(dot(u, H.apply(u)) >= g.energy - opts.tol);
    }
    if (n <= 6) {
      const auto ref = oracle::dense_ground_state(oracle::dense_hamiltonian(p));
      CHECK(std::abs(g.energy - ref.energy) <= 1e-10);
      for (std::size_t b = 0; b < dim; ++b) CHECK(std::abs(g.amplitudes[b] - ref.psi(b)) <= 1e-8);
    }
  }
}

TEST_CASE("ground_state size limit") {
  LanczosOptions opts;
  opts.max_sites = 4;
  CHECK_THROWS_AS(ground_state(homogeneous_profile(Lattice(1, 2), 1.0, 1.0), opts), std::invalid_argument);
}

TEST_CASE("ground_state_marginal") {
  SUBCASE("J = 0 is uniform") {
    const auto p = homogeneous_profile(Lattice(1, 1), 0.8, 0.0);
    const auto g = ground_state(p);
    const auto mg = ground_state_marginal(g, p.lattice(), p.lattice().sites());
    for (double x : mg.prob) CHECK(x == doctest::Approx(1.0 / 16).epsilon(1e-9));
  }
  SUBCASE("empty site set") {
    const auto p = homogeneous_profile(Lattice(1, 1), 0.8, 1.0);
    const auto mg = ground_state_marginal(ground_state(p), p.lattice(), {});
    REQUIRE(mg.prob.size() == 1);
    CHECK(mg.prob[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two sites, one kept, against the oracle") {
    const FieldProfile p(Lattice(0, 1), {1.0, 1.0}, 1.0);
    const auto mg = ground_state_marginal(ground_state(p), p.lattice(), {0});
    const auto ref = oracle::dense_ground_state(oracle::dense_hamiltonian(p));
    const double plus = ref.psi(0) * ref.psi(0) + ref.psi(2) * ref.psi(2);
    CHECK(mg.prob[0] == doctest::Approx(plus).epsilon(1e-10));
    CHECK(mg.prob[0] + mg.prob[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("sites outside the lattice") {
    const auto p = homogeneous_profile(Lattice(0, 1), 1.0, 1.0);
    CHECK_THROWS(ground_state_marginal(ground_state(p), p.lattice(), {5}));
  }
}

TEST_CASE("configuration labels and state serialization") {
  CHECK(configuration_label(0b10, 2) == "+-");
  CHECK(configuration_label(0, 3) == "+++");
  const auto g = ground_state(homogeneous_profile(Lattice(1, 1), 1.0, 1.0));
  std::stringstream ss;
  write_state(ss, g);
  const auto back = read_state(ss);
  CHECK(back.sites == g.sites);
  CHECK(back.energy == g.energy);
  CHECK(back.amplitudes == g.amplitudes);
}
