#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfim/kp_certificate.hpp"
#include "tfim/lattice.hpp"
#include "tfim/transfer_matrix.hpp"

namespace tfim {

inline constexpr const char* kToolVersion = "tfim-lab 0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  std::string id;
  std::string family;          // homogeneous | periodic | random | explicit
  std::vector<double> values;  // homogeneous: {h}; periodic: one period; explicit: every site
  double a = 0.0, b = 0.0;     // random: U(a, b)
  std::uint64_t seed = 0;      // random

  bool operator==(const ProfileSpec&) const = default;
};

FieldProfile make_profile(const ProfileSpec& spec, const Lattice& lattice, double J);

struct ClusterSpec {
  std::vector<double> h;
  double J = 0.0;
  bool operator==(const ClusterSpec&) const = default;
};

struct ExperimentConfig {
  std::string scenario;  // entropy-scan | mc-compare | transfer-bounds | kp-search
  std::vector<ProfileSpec> profiles;
  double J = 1.0;
  std::vector<int> m;
  std::vector<int> L;
  std::vector<double> beta;
  std::uint64_t sweeps = 0;
  std::uint64_t burn_in = 0;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-10;
  int max_n = 24;
  int workers = 1;
  double slope_threshold = 0.05;
  std::string endpoints = "free";  // free | perron
  std::vector<ClusterSpec> clusters;
  std::vector<double> times;
  double C1 = 1.0;
  int K = 0;
  std::string out;
  std::string certificate_out;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on missing fields, empty ranges, unknown families, or
/// lattices beyond max_n.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

/// %.12g, the single float format used in every output file.
std::string format_number(double x);
/// Copy with every floating-point value rounded to 12 significant digits.
nlohmann::json rounded(const nlohmann::json& j);
void write_json_file(const std::string& path, const nlohmann::json& j);

struct ScanRow {
  std::string profile_id;
  int m = 0;
  int L = 0;
  double J = 0.0;
  double entropy_bits = 0.0;
  double schmidt_1 = 0.0;
  double residual = 0.0;
  bool ok = true;
  std::string error;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least squares of S against log2(L + 1).
SlopeFit fit_log_slope(const std::vector<ScanRow>& rows);

struct ScanGroupSummary {
  std::string profile_id;
  int m = 0;
  double max_entropy = 0.0;
  SlopeFit fit;
};

struct ScanTable {
  double J = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<ScanRow> rows;  // sorted by (profile_id, L, m)
  std::vector<ScanGroupSummary> summary;
  int failures = 0;
};

/// Every (profile, m, L) point; rows are appended and flushed to config.out in
/// sorted order as soon as they are ready. A failing point becomes a row with
/// NaN entries and the scan continues.
ScanTable run_entropy_scan(const ExperimentConfig& config);
ScanTable read_scan_csv(const std::string& path);
nlohmann::json summary_json(const ScanTable& table);

struct UniformityReport {
  double slope_a = 0.0;
  double slope_b = 0.0;
  double threshold = 0.0;
  std::string verdict;  // discriminated | indistinguishable | inconclusive
};

/// Throws std::invalid_argument when a table has fewer than 4 distinct L.
UniformityReport run_uniformity_report(const ScanTable& bounded, const ScanTable& critical, double threshold);

struct McConfigurationRow {
  std::string label;
  double estimate = 0.0;
  double exact = 0.0;
  double stderr_ = 0.0;
  double z = 0.0;
};

struct McRun {
  double beta = 0.0;
  double total_variation = 0.0;
  double max_abs_z = 0.0;
  double acceptance_rate = 0.0;
  std::vector<McConfigurationRow> rows;
};

struct McCompareReport {
  std::vector<McRun> runs;  // in config beta order
  bool pass = false;        // every |z| <= 4 at the largest beta
  bool tv_nonincreasing = false;
};

McCompareReport run_mc_compare(const ExperimentConfig& config);
nlohmann::json to_json(const McCompareReport& report);

std::vector<BoundReport> run_transfer_bounds(const ExperimentConfig& config);

SearchResult run_kp_search(const ExperimentConfig& config);

}  // namespace tfim
