// Command-line front end for the experiment scenarios.
//
//   tfim_lab entropy-scan    --config scan.json --out scan.csv
//   tfim_lab mc-compare      --config mc.json --seed 7 --out mc.json
//   tfim_lab transfer-bounds --config tb.json --out bounds.json
//   tfim_lab kp-search       --config kp.json --certificate-out cert.json
//   tfim_lab uniformity      --table-a bounded.csv --table-b critical.csv
//
// Exit codes: 0 success, 2 partial failure, 3 configuration error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "tfim/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 2;
constexpr int kConfigError = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::string certificate_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_n;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment configuration (JSON)")->required();
  cmd->add_option("--out", o.out, "output path");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--max-n", o.max_n, "largest lattice size");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--certificate-out", o.certificate_out, "certificate output path");
}

tfim::ExperimentConfig resolve(const Overrides& o, const std::string& scenario) {
  tfim::ExperimentConfig c = tfim::load_config(o.config);
  if (c.scenario != scenario)
    throw tfim::ConfigError("config scenario '" + c.scenario + "' does not match subcommand '" + scenario + "'");
  if (!o.out.empty()) c.out = o.out;
  if (!o.certificate_out.empty()) c.certificate_out = o.certificate_out;
  if (o.seed) c.seed = o.seed;
  if (o.max_n) c.max_n = *o.max_n;
  if (o.workers) c.workers = *o.workers;
  tfim::validate(c);
  return c;
}

int entropy_scan(const Overrides& o) {
  const auto c = resolve(o, "entropy-scan");
  const auto table = tfim::run_entropy_scan(c);
  const auto summary = tfim::summary_json(table);
  if (!c.out.empty()) tfim::write_json_file(c.out + ".summary.json", summary);
  std::cout << tfim::rounded(summary).dump(2) << '\n';
  for (const auto& r : table.rows)
    if (!r.ok) std::cerr << "failed point " << r.profile_id << " m=" << r.m << " L=" << r.L << ": " << r.error << '\n';
  return table.failures ? kPartial : kOk;
}

int mc_compare(const Overrides& o) {
  const auto c = resolve(o, "mc-compare");
  const auto report = tfim::run_mc_compare(c);
  const auto j = tfim::to_json(report);
  if (!c.out.empty()) tfim::write_json_file(c.out, j);
  std::cout << tfim::rounded(j).dump(2) << '\n';
  return report.pass ? kOk : kPartial;
}

int transfer_bounds(const Overrides& o) {
  const auto c = resolve(o, "transfer-bounds");
  nlohmann::json reports = nlohmann::json::array();
  bool all_hold = true;
  for (const auto& r : tfim::run_transfer_bounds(c)) {
    reports.push_back(tfim::to_json(r));
    all_hold = all_hold && r.eigenvalue_bound_holds;
  }
  if (!c.out.empty()) tfim::write_json_file(c.out, reports);
  std::cout << tfim::rounded(reports).dump(2) << '\n';
  return all_hold ? kOk : kPartial;
}

int kp_search(const Overrides& o) {
  const auto c = resolve(o, "kp-search");
  const auto result = tfim::run_kp_search(c);
  const auto j = tfim::to_json(result);
  const std::string path = !c.certificate_out.empty() ? c.certificate_out : c.out;
  if (!path.empty()) tfim::write_json_file(path, j);
  std::cout << tfim::rounded(tfim::to_json(result.certificate)).dump(2) << '\n';
  if (!result.found)
    std::cerr << "no valid certificate in schedule; tightest inequality: " << result.certificate.failing << '\n';
  return result.found ? kOk : kPartial;
}

int uniformity(const std::string& a, const std::string& b, double threshold, const std::string& out) {
  const auto rep = tfim::run_uniformity_report(tfim::read_scan_csv(a), tfim::read_scan_csv(b), threshold);
  nlohmann::json j = {{"slope_a", rep.slope_a}, {"slope_b", rep.slope_b}, {"threshold", rep.threshold},
                      {"verdict", rep.verdict}};
  if (!out.empty()) tfim::write_json_file(out, j);
  std::cout << tfim::rounded(j).dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse-field Ising chain laboratory"};
  app.require_subcommand(1);

  Overrides scan_o, mc_o, tb_o, kp_o;
  auto* scan = app.add_subcommand("entropy-scan", "block entanglement entropy over (profile, m, L)");
  add_common(scan, scan_o);
  auto* mc = app.add_subcommand("mc-compare", "path-integral marginal vs exact ground state");
  add_common(mc, mc_o);
  auto* tb = app.add_subcommand("transfer-bounds", "cluster transfer-matrix bound reports");
  add_common(tb, tb_o);
  auto* kp = app.add_subcommand("kp-search", "search for a polymer-expansion certificate");
  add_common(kp, kp_o);

  std::string table_a, table_b, uni_out;
  double threshold = 0.05;
  auto* uni = app.add_subcommand("uniformity", "compare entropy growth of two scan tables");
  uni->add_option("--table-a", table_a, "bounded-regime scan CSV")->required();
  uni->add_option("--table-b", table_b, "critical-regime scan CSV")->required();
  uni->add_option("--threshold", threshold, "slope threshold in bits per log2 step");
  uni->add_option("--out", uni_out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (scan->parsed()) return entropy_scan(scan_o);
    if (mc->parsed()) return mc_compare(mc_o);
    if (tb->parsed()) return transfer_bounds(tb_o);
    if (kp->parsed()) return kp_search(kp_o);
    if (uni->parsed()) return uniformity(table_a, table_b, threshold, uni_out);
  } catch (const tfim::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartial;
  }
  return kOk;
}
