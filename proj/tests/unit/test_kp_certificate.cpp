#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tfim/kp_certificate.hpp"
#include "tfim/transfer_matrix.hpp"

using namespace tfim;

TEST_CASE("grid params") {
  const GridParams g(0.125, 8);
  CHECK(g.delta2() == 1.0);
  CHECK_THROWS(GridParams(0.0, 2));
  CHECK_THROWS(GridParams(0.5, 0));
}

TEST_CASE("build_ledger examples") {
  SUBCASE("J = 0") {
    const auto gaps = measure_cluster_gaps(0.0, 1.0, 2);
    const auto L = build_ledger({0.0, 1.0, 4.0, 2}, GridParams(0.25, 4), gaps);
    CHECK(L.b1 == 0.0);
    CHECK(L.b4 == 1.0);
  }
  SUBCASE("large C2") {
    const auto L = build_ledger({0.5, 1.0, 1000.0, 0}, GridParams(1.0, 2), {});
    CHECK(L.log_b2 <= -1000.0);
    const auto Li =
        build_ledger({0.5, 1.0, 1000.0, 0}, GridParams(1.0, 2), {}, {ShortIntervalBound::integrated, 2.0});
    CHECK(Li.log_b2 <= -2000.0);
  }
  SUBCASE("K = 1: gamma_min is the single-site gap") {
    const auto gaps = measure_cluster_gaps(0.5, 1.0, 1);
    const auto L = build_ledger({0.5, 1.0, 4.0, 1}, GridParams(0.5, 8), gaps);
    const auto pd = perron(transfer(ClusterBlock({1.0}, 0.5), 4.0));
    CHECK(L.gamma_min == doctest::Approx(pd.gap_rate).epsilon(1e-10));
    CHECK(L.gamma_min == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(L.c_meas == doctest::Approx(2.0 * 0.5).epsilon(1e-10));
    CHECK(L.b3 == doctest::Approx(L.c_meas * std::exp(-2.0 * 4.0)).epsilon(1e-9));
    CHECK(L.b4 == doctest::Approx(std::exp(2 * 0.5 * 1 * 4.0)).epsilon(1e-12));
    CHECK(L.c1_geom == doctest::Approx(1 * 4.0 + 4.0 + 1));
  }
  SUBCASE("errors") {
    CHECK_THROWS(build_ledger({0.5, 1.0, 0.0, 0}, GridParams(1.0, 2), {}));
    CHECK_THROWS(build_ledger({0.5, 1.0, 1.0, 2}, GridParams(1.0, 2), measure_cluster_gaps(0.5, 1.0, 1)));
  }
}

TEST_CASE("ledger invariants") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = trial % 4;
    const double J = u(gen), C1 = u(gen), C2 = 4 * u(gen);
    const auto gaps = measure_cluster_gaps(J, C1, K);
    const GridParams grid(0.05 * u(gen), 1 + trial % 7);
    const auto L = build_ledger({J, C1, C2, K}, grid, gaps);
    CHECK(L.b1 >= 0.0);
    CHECK(L.b2 >= 0.0);
    CHECK(L.b3 >= 0.0);
    CHECK(L.b4 >= 1.0);
    CHECK(std::isfinite(L.b4));
    CHECK(build_ledger({J, C1, 2 * C2, K}, grid, gaps).b2 < L.b2);
    if (K > 0) CHECK(build_ledger({J, C1, C2, K}, GridParams(grid.delta1(), grid.q() + 1), gaps).b3 < L.b3);
  }
}

TEST_CASE("kp_check examples") {
  SUBCASE("J = 0, K = 0 ledger with tiny theta") {
    const auto L = build_ledger({0.0, 1.0, 1e4, 0}, GridParams(0.01, 2), {});
    const auto c = kp_check(L, 1e-6, 0.01);
    CHECK(c.valid);
    CHECK(c.slack > 0.0);
    CHECK(c.failing.empty());
    CHECK(!c.assumptions.empty());
  }
  SUBCASE("theta = eta = 0.9 diverges") {
    const auto L = build_ledger({0.0, 1.0, 1e4, 0}, GridParams(0.01, 2), {});
    const auto c = kp_check(L, 0.9, 0.9);
    CHECK_FALSE(c.valid);
    CHECK(L.degree >= 2);
    bool tree_fails = false;
    for (const auto& chk : c.checks)
      if (chk.tag == "tree_sum_le_one") tree_fails = !chk.holds() && std::isinf(chk.margin);
    CHECK(tree_fails);
  }
  SUBCASE("K = 1, C1 = 0.5, J = 0.25, delta1 = 0.25, delta2 = 8, C2 = 40 regression") {
    // Recorded on first computation: the long intervals carry c1 = 17, so the
    // half absorption theta^(1/2) e^(2 c1) b4 <= eta cannot hold for any
    // theta above b1 = 1/16.
    const auto gaps = measure_cluster_gaps(0.25, 0.5, 1);
    const auto L = build_ledger({0.25, 0.5, 40.0, 1}, GridParams(0.25, 32), gaps);
    CHECK(L.degree == 70);
    CHECK(L.c1_geom == 17.0);
    CHECK(L.gamma_min == doctest::Approx(1.0).epsilon(1e-12));
    const auto c = optimize_theta_eta(L);
    CHECK_FALSE(c.valid);
    CHECK(c.failing == "half_absorption");
    CHECK(c.slack == doctest::Approx(-42.1734354811).epsilon(1e-9));
  }
  SUBCASE("domain") {
    const auto L = build_ledger({0.0, 1.0, 1.0, 0}, GridParams(0.5, 2), {});
    CHECK_THROWS(kp_check(L, 0.0, 0.5));
    CHECK_THROWS(kp_check(L, 0.5, 1.0));
  }
}

TEST_CASE("search_parameters examples") {
  SUBCASE("J = 0 without clusters succeeds on the first grid") {
    const auto r = search_parameters(0.0, 0.5, 0, {});
    REQUIRE(r.found);
    CHECK(r.certificate.valid);
    CHECK(r.certificate.ledger.delta2() == 0.5);
    CHECK(r.certificate.ledger.q == 2);
    CHECK(r.certificate.ledger.bounds.C2 == 64.0);
  }
  SUBCASE("J = 0 with a cluster needs a gap above 4(K + 1)") {
    CHECK(search_parameters(0.0, 5.0, 1, measure_cluster_gaps(0.0, 5.0, 1)).found);
    const auto r = search_parameters(0.0, 0.5, 1, measure_cluster_gaps(0.0, 0.5, 1));
    CHECK_FALSE(r.found);
    CHECK(r.certificate.failing == "half_absorption");
    CHECK(!r.frontier.empty());
  }
  SUBCASE("K = 0 reduces to the large-field condition") {
    const auto r = search_parameters(0.5, 1.0, 0, {});
    REQUIRE(r.found);
    CHECK(std::isfinite(r.certificate.ledger.bounds.C2));
    CHECK(r.certificate.ledger.b3 == 0.0);
    CHECK(r.certificate.ledger.b4 == 1.0);
  }
  SUBCASE("validity persists for larger C2") {
    const auto r = search_parameters(0.5, 1.0, 0, {});
    REQUIRE(r.found);
    const auto& L = r.certificate.ledger;
    for (double factor : {2.0, 10.0, 1e3}) {
      auto bounds = L.bounds;
      bounds.C2 *= factor;
      const auto bigger = build_ledger(bounds, GridParams(L.delta1, L.q), {});
      CHECK(kp_check_log(bigger, r.certificate.log_theta, r.certificate.log_eta).valid);
    }
  }
}

TEST_CASE("monotonicity in C2 and J") {
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto gaps = measure_cluster_gaps(0.2, 1.0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = trial % 3;
    const GridParams grid(std::pow(10.0, -4 * u(gen)), 1 + static_cast<std::int64_t>(8 * u(gen)));
    const double C2 = std::pow(10.0, 6 * u(gen));
    const double J = u(gen);
    const double log_theta = -30 * u(gen) - 1e-3, log_eta = -10 * u(gen) - 1e-3;
    const auto base = kp_check_log(build_ledger({J, 1.0, C2, K}, grid, gaps), log_theta, log_eta);
    const auto more_c2 = kp_check_log(build_ledger({J, 1.0, 3 * C2, K}, grid, gaps), log_theta, log_eta);
    if (base.valid) CHECK(more_c2.valid);
    CHECK(more_c2.slack >= base.slack);
    const auto lo = build_ledger({J, 1.0, C2, K}, grid, gaps);
    const auto hi = build_ledger({J + 0.5, 1.0, C2, K}, grid, gaps);
    CHECK(hi.b1 >= lo.b1);
    CHECK(hi.b4 >= lo.b4);
    CHECK(kp_check_log(hi, log_theta, log_eta).slack <= kp_check_log(lo, log_theta, log_eta).slack);
  }
}

TEST_CASE("tree bound dominates brute-force polymer sums on miniature grids") {
  struct Mini {
    std::vector<double> lengths;
    double horizon;
    int K;
    GridParams grid;
  };
  const std::vector<Mini> grids = {
      {{0.25, 0.25, 0.25}, 1.0, 0, GridParams(0.25, 2)},
      {{0.25, 0.5, 0.25}, 1.0, 1, GridParams(0.25, 2)},
      {{0.25, 1.0, 0.25}, 1.0, 1, GridParams(0.25, 4)},
      {{0.25, 0.25, 1.0, 0.25}, 0.5, 1, GridParams(0.25, 4)},
  };
  for (const auto& m : grids) {
    std::vector<oracle::GridObject> objs;
    const auto adj = oracle::grid_adjacency(m.lengths, m.horizon, &objs);
    REQUIRE(objs.size() <= 12);
    const std::int64_t d = grid_degree(m.grid, m.K);
    for (const auto& nb : adj) CHECK(static_cast<std::int64_t>(nb.size()) <= d);
    for (double x : {0.05, 0.2, 0.38}) {
      const double eta = x / static_cast<double>(d);
      for (int root = 0; root < static_cast<int>(objs.size()); ++root)
        CHECK(oracle::connected_subset_sum(adj, root, eta) <= tree_sum_bound(d, eta));
    }
  }
  CHECK(std::isinf(tree_sum_bound(8, 1.0 / 8)));
  CHECK(tree_sum_bound(8, 0.01) == doctest::Approx(0.08 / (0.92 * 0.92)));
}

TEST_CASE("certificate json keeps infinities") {
  const auto L = build_ledger({0.0, 1.0, 1.0, 0}, GridParams(0.5, 2), {});
  const auto j = to_json(kp_check(L, 0.5, 0.9));
  CHECK(j.at("ledger").at("log_b1") == "-inf");
  CHECK(j.contains("assumptions"));
  CHECK(j.at("checks").size() == 5);
}
