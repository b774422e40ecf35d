#include "tfim/kp_certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tfim/transfer_matrix.hpp"

namespace tfim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// largest d*eta with d eta / (1 - d eta)^2 <= 1
const double kTreeRoot = (3.0 - std::sqrt(5.0)) / 2.0;

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

// JSON has no infinities; emit them as strings so nothing is silently lost.
nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::vector<std::string> assumptions_for(const BoundLedger& ledger) {
  std::vector<std::string> a = {
      "polymer connectivity is counted on grid intervals; degree d is the largest number of intervals whose "
      "closed time supports meet one interval in its own or a neighbouring column",
      "polymers containing a fixed grid object are bounded by the rooted-tree series "
      "sum_{n>=1} (d eta)^n / (1 - d eta)",
      "area plus diameter per object is at most delta1 + 1 for short intervals and K delta2 + delta2 + K for "
      "long intervals (c1 = max of the two)",
      "long intervals touching a horizontal bond number at most twice the horizontal bonds; each is absorbed "
      "per object as theta^(1/2) exp(2 c1) b4 <= eta",
      "the non-equilibrated long-interval factor uses the cluster size bound K: exp(2 J K delta2)",
      "intra-cluster coupling enters the transfer matrix with the ferromagnetic sign",
  };
  if (ledger.bounds.K > 0)
    a.emplace_back("equilibration constant and gap measured on clusters of length 1..K with every field at C1; "
                   "constant multiplied by a safety factor");
  a.emplace_back(ledger.short_bound == ShortIntervalBound::printed
                     ? "short vertical stretch bound exp(-C2 delta1)"
                     : "short vertical stretch bound exp(-2 C2 delta1)");
  return a;
}

}  // namespace

GridParams::GridParams(double delta1, std::int64_t q) : delta1_(delta1), q_(q) {
  if (!(delta1 > 0.0) || !std::isfinite(delta1)) throw std::invalid_argument("grid: delta1 must be > 0");
  if (q < 1) throw std::invalid_argument("grid: q must be a positive integer");
}

std::vector<ClusterGap> measure_cluster_gaps(double J, double C1, int K, std::span<const double> times) {
  if (!(C1 > 0.0)) throw std::invalid_argument("cluster gaps: C1 must be > 0");
  std::vector<ClusterGap> out;
  for (int l = 1; l <= K; ++l) {
    const ClusterBlock block(std::vector<double>(l, C1), J);
    ClusterGap gap{l, kInf, 0.0};
    for (double s : times) {
      const PerronData pd = perron(transfer(block, s));
      gap.gap_rate = std::min(gap.gap_rate, pd.gap_rate);
      gap.equilibration_c = std::max(gap.equilibration_c, pd.equilibration_c);
    }
    out.push_back(gap);
  }
  return out;
}

std::int64_t grid_degree(const GridParams& grid, int K) {
  // short interval between two short columns: 2 in its column, 3 per side
  const std::int64_t short_degree = 2 + 2 * 3;
  if (K == 0) return short_degree;
  // long interval of a one-site cluster: q + 2 short intervals meet it per side
  return std::max(short_degree, 2 + 2 * (grid.q() + 2));
}

double tree_sum_bound(std::int64_t degree, double eta) {
  const double x = static_cast<double>(degree) * eta;
  if (x >= 1.0) return kInf;
  return x / ((1.0 - x) * (1.0 - x));
}

BoundLedger build_ledger(const ProfileBounds& bounds, const GridParams& grid, std::span<const ClusterGap> gaps,
                         const LedgerOptions& options) {
  if (!(bounds.C2 > 0.0)) throw std::invalid_argument("ledger: C2 must be > 0");
  if (!(bounds.J >= 0.0)) throw std::invalid_argument("ledger: J must be >= 0");
  if (bounds.K < 0) throw std::invalid_argument("ledger: K must be >= 0");

  BoundLedger L;
  L.bounds = bounds;
  L.delta1 = grid.delta1();
  L.q = grid.q();
  L.short_bound = options.short_bound;
  const double d1 = grid.delta1();
  const double d2 = grid.delta2();

  L.log_b1 = safe_log(bounds.J * d1);
  L.b1 = bounds.J * d1;
  L.log_b2 = -(options.short_bound == ShortIntervalBound::printed ? 1.0 : 2.0) * bounds.C2 * d1;
  L.b2 = std::exp(L.log_b2);
  L.c1_geom = d1 + 1.0;
  L.degree = grid_degree(grid, bounds.K);

  if (bounds.K == 0) {
    L.b3 = 0.0;
    L.log_b3 = -kInf;
    L.b4 = 1.0;
    L.log_b4 = 0.0;
    return L;
  }

  L.gamma_min = kInf;
  for (int l = 1; l <= bounds.K; ++l) {
    const auto it = std::find_if(gaps.begin(), gaps.end(), [l](const ClusterGap& g) { return g.length == l; });
    if (it == gaps.end())
      throw std::invalid_argument("ledger: missing gap data for cluster length " + std::to_string(l));
    L.gamma_min = std::min(L.gamma_min, it->gap_rate);
    L.c_meas = std::max(L.c_meas, it->equilibration_c);
  }
  L.c_meas *= options.c_safety;
  L.log_b3 = safe_log(L.c_meas) - L.gamma_min * d2;
  L.b3 = std::exp(L.log_b3);
  L.log_b4 = 2.0 * bounds.J * bounds.K * d2;
  L.b4 = std::exp(L.log_b4);
  L.c1_geom = std::max(L.c1_geom, bounds.K * d2 + d2 + bounds.K);
  return L;
}

KPCertificate kp_check(const BoundLedger& ledger, double theta, double eta) {
  if (!(theta > 0.0 && theta < 1.0) || !(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("kp_check: theta and eta must lie in (0, 1)");
  return kp_check_log(ledger, std::log(theta), std::log(eta));
}

KPCertificate kp_check_log(const BoundLedger& ledger, double log_theta, double log_eta) {
  if (!(log_theta < 0.0) || !(log_eta < 0.0)) throw std::invalid_argument("kp_check: theta and eta must be < 1");
  KPCertificate cert;
  cert.ledger = ledger;
  cert.log_theta = log_theta;
  cert.log_eta = log_eta;
  cert.theta = std::exp(log_theta);
  cert.eta = std::exp(log_eta);
  const double c1 = ledger.c1_geom;

  cert.checks.push_back({"horizontal_bond_le_theta", log_theta - ledger.log_b1});
  cert.checks.push_back({"short_interval_le_theta", log_theta - ledger.log_b2});
  if (ledger.bounds.K > 0) cert.checks.push_back({"long_interval_le_theta", log_theta - ledger.log_b3});
  cert.checks.push_back({"full_absorption", log_eta - (log_theta + 2.0 * c1)});
  cert.checks.push_back({"half_absorption", log_eta - (0.5 * log_theta + 2.0 * c1 + ledger.log_b4)});
  const double tree = tree_sum_bound(ledger.degree, cert.eta);
  cert.checks.push_back({"tree_sum_le_one", std::isfinite(tree) ? -std::log(tree) : -kInf});

  cert.slack = kInf;
  for (const auto& c : cert.checks) {
    if (c.margin < cert.slack) {
      cert.slack = c.margin;
      if (!c.holds()) cert.failing = c.tag;
    }
  }
  cert.valid = cert.slack > 0.0;
  if (!cert.valid && cert.failing.empty()) cert.failing = "zero_slack";
  cert.assumptions = assumptions_for(ledger);
  return cert;
}

KPCertificate optimize_theta_eta(const BoundLedger& ledger, double log10_grid_step) {
  const double step = log10_grid_step * std::log(10.0);
  const double worst = std::max({ledger.log_b1, ledger.log_b2, ledger.log_b3});
  // smallest grid value strictly above every b_i, never above the first grid point
  double k_theta = std::isfinite(worst) ? std::ceil(-worst / step) - 1.0 : 1e6;
  k_theta = std::clamp(k_theta, 1.0, 1e6);
  const double log_cap = std::log(kTreeRoot / static_cast<double>(ledger.degree));
  double k_eta = std::max(1.0, std::floor(-log_cap / step) + 1.0);
  return kp_check_log(ledger, -k_theta * step, -k_eta * step);
}

SearchSchedules SearchSchedules::defaults() {
  SearchSchedules s;
  for (int k = 0; k <= 12; ++k) s.delta2.push_back(0.5 * std::ldexp(1.0, k));
  for (int k = 1; k <= 40; ++k) s.q.push_back(std::int64_t{1} << k);
  for (int k = 0; k <= 60; ++k) s.C2.push_back(std::ldexp(1.0, k));
  return s;
}

SearchResult search_parameters(double J, double C1, int K, std::span<const ClusterGap> gaps,
                               const SearchSchedules& schedules) {
  if (!(J >= 0.0) || !(C1 > 0.0) || K < 0) throw std::invalid_argument("search: need J >= 0, C1 > 0, K >= 0");
  SearchResult result;
  result.certificate.slack = -kInf;
  bool have_best = false;
  for (double d2 : schedules.delta2) {
    for (std::int64_t q : schedules.q) {
      const GridParams grid(d2 / static_cast<double>(q), q);
      FrontierEntry best{d2, q, 0.0, -kInf, ""};
      for (double c2 : schedules.C2) {
        const BoundLedger ledger = build_ledger({J, C1, c2, K}, grid, gaps, schedules.ledger);
        KPCertificate cert = optimize_theta_eta(ledger, schedules.log10_grid_step);
        if (cert.slack > best.slack || best.C2 == 0.0) best = {d2, q, c2, cert.slack, cert.failing};
        if (!have_best || cert.slack > result.certificate.slack) {
          result.certificate = cert;
          have_best = true;
        }
        if (cert.valid) {
          result.found = true;
          result.certificate = std::move(cert);
          result.frontier.push_back(best);
          return result;
        }
      }
      result.frontier.push_back(best);
    }
  }
  return result;
}

nlohmann::json to_json(const BoundLedger& L) {
  return {{"J", L.bounds.J},
          {"C1", L.bounds.C1},
          {"C2", L.bounds.C2},
          {"K", L.bounds.K},
          {"delta1", L.delta1},
          {"delta2", L.delta2()},
          {"q", L.q},
          {"b1", L.b1},
          {"b2", L.b2},
          {"b3", L.b3},
          {"b4", num(L.b4)},
          {"log_b1", num(L.log_b1)},
          {"log_b2", num(L.log_b2)},
          {"log_b3", num(L.log_b3)},
          {"log_b4", num(L.log_b4)},
          {"gamma_min", num(L.gamma_min)},
          {"c_meas", L.c_meas},
          {"c1_geom", L.c1_geom},
          {"degree", L.degree},
          {"short_interval_bound", L.short_bound == ShortIntervalBound::printed ? "exp(-C2 delta1)"
                                                                              : "exp(-2 C2 delta1)"}};
}

nlohmann::json to_json(const KPCertificate& cert) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : cert.checks) checks.push_back({{"tag", c.tag}, {"margin", num(c.margin)}, {"holds", c.holds()}});
  return {{"valid", cert.valid},
          {"slack", num(cert.slack)},
          {"failing", cert.failing},
          {"theta", cert.theta},
          {"eta", cert.eta},
          {"log_theta", cert.log_theta},
          {"log_eta", cert.log_eta},
          {"ledger", to_json(cert.ledger)},
          {"checks", checks},
          {"assumptions", cert.assumptions}};
}

nlohmann::json to_json(const SearchResult& result) {
  nlohmann::json frontier = nlohmann::json::array();
  for (const auto& f : result.frontier)
    frontier.push_back(
        {{"delta2", f.delta2}, {"q", f.q}, {"C2", f.C2}, {"slack", num(f.slack)}, {"failing", f.failing}});
  return {{"found", result.found}, {"certificate", to_json(result.certificate)}, {"frontier", frontier}};
}

}  // namespace tfim
