#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace tfim {

/// Time grid of the polymer expansion: short intervals of length delta1 on
/// high-field columns, long intervals of length delta2 = q * delta1 on the
/// columns of low-field clusters.
class GridParams {
 public:
  GridParams(double delta1, std::int64_t q);

  double delta1() const { return delta1_; }
  std::int64_t q() const { return q_; }
  double delta2() const { return static_cast<double>(q_) * delta1_; }

 private:
  double delta1_;
  std::int64_t q_;
};

struct ProfileBounds {
  double J = 0.0;
  double C1 = 1.0;  // lower field bound on the low-field set A
  double C2 = 1.0;  // lower field bound off A
  int K = 0;        // largest cluster of A
};

/// Spectral data of the worst cluster of each length (every field at C1).
struct ClusterGap {
  int length = 0;
  double gap_rate = 0.0;
  double equilibration_c = 0.0;  // sup over the sampled times
};

inline constexpr double kDefaultGapTimesArray[] = {0.5, 1.0, 2.0, 4.0, 8.0};
inline constexpr std::span<const double> kDefaultGapTimes{kDefaultGapTimesArray};

std::vector<ClusterGap> measure_cluster_gaps(double J, double C1, int K,
                                             std::span<const double> times = kDefaultGapTimes);

enum class ShortIntervalBound {
  printed,     // exp(-C2 * delta1)
  integrated,  // exp(-2 C2 * delta1), from 1 + s1 s2 exp(-2 h |x2 - x1|)
};

struct LedgerOptions {
  ShortIntervalBound short_bound = ShortIntervalBound::printed;
  double c_safety = 2.0;
};

/// Per-object activity bounds. Each bound is kept with its natural log so
/// that values beyond double range still compare correctly.
struct BoundLedger {
  ProfileBounds bounds;
  double delta1 = 0.0;
  std::int64_t q = 0;
  double b1 = 0.0, log_b1 = 0.0;  // horizontal bond:           J delta1
  double b2 = 0.0, log_b2 = 0.0;  // short vertical stretch:    exp(-C2 delta1) or exp(-2 C2 delta1)
  double b3 = 0.0, log_b3 = 0.0;  // equilibrated long interval: c exp(-gamma delta2)
  double b4 = 1.0, log_b4 = 0.0;  // long interval touching a horizontal bond: exp(2 J K delta2)
  double gamma_min = 0.0;
  double c_meas = 0.0;
  double c1_geom = 0.0;
  std::int64_t degree = 0;
  ShortIntervalBound short_bound = ShortIntervalBound::printed;

  double delta2() const { return static_cast<double>(q) * delta1; }
};

/// Throws std::invalid_argument when C2 <= 0 or when a cluster length 1..K
/// has no gap data.
BoundLedger build_ledger(const ProfileBounds& bounds, const GridParams& grid, std::span<const ClusterGap> gaps,
                         const LedgerOptions& options = {});

/// Largest number of grid intervals whose closed supports can meet one
/// interval (own column plus both neighbouring columns).
std::int64_t grid_degree(const GridParams& grid, int K);

/// Upper bound on the sum of eta^|R| over polymers containing a fixed grid
/// object when every object has at most `degree` neighbours:
/// sum_{n>=1} (d eta)^n / (1 - d eta) = d eta / (1 - d eta)^2. Infinite when
/// d eta >= 1.
double tree_sum_bound(std::int64_t degree, double eta);

struct InequalityCheck {
  std::string tag;
  double margin = 0.0;  // log(rhs) - log(lhs); holds when >= 0
  bool holds() const { return margin >= 0.0; }
};

struct KPCertificate {
  BoundLedger ledger;
  double theta = 0.0;
  double eta = 0.0;
  double log_theta = 0.0;
  double log_eta = 0.0;
  std::vector<InequalityCheck> checks;
  bool valid = false;
  double slack = 0.0;  // min margin
  std::string failing;  // tag of the tightest violated inequality, empty when valid
  std::vector<std::string> assumptions;
};

/// Evaluates the per-object inequality chain for given theta, eta in (0, 1).
/// Valid iff every margin is nonnegative and the slack is positive.
KPCertificate kp_check(const BoundLedger& ledger, double theta, double eta);
KPCertificate kp_check_log(const BoundLedger& ledger, double log_theta, double log_eta);

struct SearchSchedules {
  std::vector<double> delta2;        // long interval lengths, tried first
  std::vector<std::int64_t> q;       // submultiples delta2 / delta1, tried second
  std::vector<double> C2;            // field bounds off A, tried last
  double log10_grid_step = 0.125;    // theta and eta grids: 10^(-k step)
  LedgerOptions ledger;
  static SearchSchedules defaults();
};

struct FrontierEntry {
  double delta2 = 0.0;
  std::int64_t q = 0;
  double C2 = 0.0;
  double slack = 0.0;
  std::string failing;
};

struct SearchResult {
  bool found = false;
  KPCertificate certificate;  // first valid one, otherwise the best slack seen
  std::vector<FrontierEntry> frontier;  // best attempt per (delta2, q)
};

/// theta and eta on their log grids for a fixed ledger: theta is the smallest
/// grid value strictly above b1, b2, b3 and eta the largest with a finite
/// tree sum of at most 1.
KPCertificate optimize_theta_eta(const BoundLedger& ledger, double log10_grid_step = 0.125);

/// Schedules are scanned in the order delta2, then q, then C2; the first valid
/// certificate wins.
SearchResult search_parameters(double J, double C1, int K, std::span<const ClusterGap> gaps,
                               const SearchSchedules& schedules = SearchSchedules::defaults());

nlohmann::json to_json(const BoundLedger& ledger);
nlohmann::json to_json(const KPCertificate& cert);
nlohmann::json to_json(const SearchResult& result);

}  // namespace tfim
