#include "tfim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "tfim/entanglement.hpp"
#include "tfim/hamiltonian.hpp"
#include "tfim/spinflip.hpp"

namespace tfim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

ProfileSpec profile_spec_from_json(const nlohmann::json& j) {
  ProfileSpec p;
  p.id = j.at("id").get<std::string>();
  p.family = j.at("family").get<std::string>();
  p.values = get_or<std::vector<double>>(j, "values", {});
  p.a = get_or(j, "a", 0.0);
  p.b = get_or(j, "b", 0.0);
  p.seed = get_or<std::uint64_t>(j, "seed", 0);
  return p;
}

nlohmann::json to_json(const ProfileSpec& p) {
  nlohmann::json j = {{"id", p.id}, {"family", p.family}, {"values", p.values}};
  if (p.family == "random") {
    j["a"] = p.a;
    j["b"] = p.b;
    j["seed"] = p.seed;
  }
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_line(const ScanRow& r) {
  std::ostringstream os;
  os << csv_escape(r.profile_id) << ',' << r.m << ',' << r.L << ',' << format_number(r.J) << ','
     << format_number(r.entropy_bits) << ',' << format_number(r.schmidt_1) << ',' << format_number(r.residual);
  return os.str();
}

std::string metadata_line(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# " << kToolVersion << " scenario=" << c.scenario << " J=" << format_number(c.J)
     << " seed=" << (c.seed ? std::to_string(*c.seed) : std::string("none"));
  return os.str();
}

constexpr const char* kCsvHeader = "profile_id,m,L,J,entropy_bits,schmidt_1,residual";

struct ScanPoint {
  const ProfileSpec* spec;
  int m;
  int L;
};

ScanRow compute_point(const ExperimentConfig& config, const ScanPoint& p) {
  ScanRow row;
  row.profile_id = p.spec->id;
  row.m = p.m;
  row.L = p.L;
  row.J = config.J;
  try {
    const FieldProfile profile = make_profile(*p.spec, Lattice(p.m, p.L), config.J);
    EntropyOptions opts;
    opts.lanczos.tol = config.tolerance;
    opts.lanczos.max_sites = config.max_n;
    const EntropyReport rep = entropy_of_block(profile, opts);
    row.entropy_bits = rep.entropy_bits;
    row.schmidt_1 = rep.spectrum.values.empty() ? kNaN : rep.spectrum.values.front();
    row.residual = rep.residual;
  } catch (const ConvergenceError& e) {
    row = {p.spec->id, p.m, p.L, config.J, kNaN, kNaN, e.best_residual(), false, e.what()};
  } catch (const std::exception& e) {
    row = {p.spec->id, p.m, p.L, config.J, kNaN, kNaN, kNaN, false, e.what()};
  }
  return row;
}

std::vector<ScanGroupSummary> summarize(const std::vector<ScanRow>& rows) {
  std::map<std::pair<std::string, int>, std::vector<ScanRow>> groups;
  for (const auto& r : rows)
    if (r.ok) groups[{r.profile_id, r.m}].push_back(r);
  std::vector<ScanGroupSummary> out;
  for (const auto& [key, group] : groups) {
    ScanGroupSummary s{key.first, key.second, 0.0, {}};
    for (const auto& r : group) s.max_entropy = std::max(s.max_entropy, r.entropy_bits);
    if (group.size() >= 2) s.fit = fit_log_slope(group);
    out.push_back(s);
  }
  return out;
}

}  // namespace

FieldProfile make_profile(const ProfileSpec& spec, const Lattice& lattice, double J) {
  if (spec.family == "homogeneous") {
    if (spec.values.size() != 1) throw ConfigError("profile " + spec.id + ": homogeneous needs one value");
    return homogeneous_profile(lattice, spec.values[0], J);
  }
  if (spec.family == "periodic") return periodic_profile(lattice, spec.values, J);
  if (spec.family == "random") return random_profile(lattice, spec.seed, {spec.a, spec.b}, J);
  if (spec.family == "explicit") return FieldProfile(lattice, spec.values, J);
  throw ConfigError("profile " + spec.id + ": unknown family '" + spec.family + "'");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("profiles"))
      for (const auto& p : j.at("profiles")) c.profiles.push_back(profile_spec_from_json(p));
    c.J = get_or(j, "J", c.J);
    c.m = get_or<std::vector<int>>(j, "m", {});
    c.L = get_or<std::vector<int>>(j, "L", {});
    c.beta = get_or<std::vector<double>>(j, "beta", {});
    c.sweeps = get_or<std::uint64_t>(j, "sweeps", 0);
    c.burn_in = get_or<std::uint64_t>(j, "burn_in", 0);
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.tolerance = get_or(j, "tolerance", c.tolerance);
    c.max_n = get_or(j, "max_n", c.max_n);
    c.workers = get_or(j, "workers", c.workers);
    c.slope_threshold = get_or(j, "slope_threshold", c.slope_threshold);
    c.endpoints = get_or<std::string>(j, "endpoints", c.endpoints);
    if (j.contains("clusters"))
      for (const auto& cl : j.at("clusters"))
        c.clusters.push_back({cl.at("h").get<std::vector<double>>(), cl.at("J").get<double>()});
    c.times = get_or<std::vector<double>>(j, "times", {});
    c.C1 = get_or(j, "C1", c.C1);
    c.K = get_or(j, "K", c.K);
    c.out = get_or<std::string>(j, "out", "");
    c.certificate_out = get_or<std::string>(j, "certificate_out", "");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& p : c.profiles) profiles.push_back(to_json(p));
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& cl : c.clusters) clusters.push_back({{"h", cl.h}, {"J", cl.J}});
  return {{"scenario", c.scenario},
          {"profiles", profiles},
          {"J", c.J},
          {"m", c.m},
          {"L", c.L},
          {"beta", c.beta},
          {"sweeps", c.sweeps},
          {"burn_in", c.burn_in},
          {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
          {"tolerance", c.tolerance},
          {"max_n", c.max_n},
          {"workers", c.workers},
          {"slope_threshold", c.slope_threshold},
          {"endpoints", c.endpoints},
          {"clusters", clusters},
          {"times", c.times},
          {"C1", c.C1},
          {"K", c.K},
          {"out", c.out},
          {"certificate_out", c.certificate_out}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> scenarios = {"entropy-scan", "mc-compare", "transfer-bounds", "kp-search"};
  if (!scenarios.contains(c.scenario)) throw ConfigError("config: unknown scenario '" + c.scenario + "'");
  if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (!(c.J >= 0.0)) throw ConfigError("config: J must be >= 0");

  if (c.scenario == "entropy-scan" || c.scenario == "mc-compare") {
    if (c.profiles.empty() || c.m.empty() || c.L.empty()) throw ConfigError("config: profiles, m and L must be nonempty");
    std::set<std::string> ids;
    for (const auto& p : c.profiles) {
      if (!ids.insert(p.id).second) throw ConfigError("config: duplicate profile id '" + p.id + "'");
      static const std::set<std::string> families = {"homogeneous", "periodic", "random", "explicit"};
      if (!families.contains(p.family)) throw ConfigError("config: unknown family '" + p.family + "'");
    }
    for (int m : c.m)
      for (int L : c.L) {
        if (m < 0 || L < 0) throw ConfigError("config: m and L must be >= 0");
        if (2 * m + L + 1 > c.max_n)
          throw ConfigError("config: lattice m=" + std::to_string(m) + " L=" + std::to_string(L) + " exceeds max_n");
      }
  }
  if (c.scenario == "mc-compare") {
    if (!c.seed) throw ConfigError("config: mc-compare requires a seed");
    if (c.beta.empty()) throw ConfigError("config: beta must be nonempty");
    if (c.sweeps <= c.burn_in) throw ConfigError("config: sweeps must exceed burn_in");
    if (c.endpoints != "free" && c.endpoints != "perron") throw ConfigError("config: endpoints must be free or perron");
    if (2 * c.m.front() + c.L.front() + 1 > 8) throw ConfigError("config: mc-compare lattice limited to 8 sites");
  }
  if (c.scenario == "transfer-bounds" && (c.clusters.empty() || c.times.empty()))
    throw ConfigError("config: clusters and times must be nonempty");
  if (c.scenario == "kp-search" && (!(c.C1 > 0.0) || c.K < 0 || c.K > ClusterBlock::kDefaultMaxSites))
    throw ConfigError("config: kp-search needs C1 > 0 and 0 <= K <= 6");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // folds -0 into 0
  return buf;
}

nlohmann::json rounded(const nlohmann::json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) return format_number(x);
    return std::strtod(format_number(x).c_str(), nullptr);
  }
  if (j.is_array() || j.is_object()) {
    nlohmann::json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << rounded(j).dump(2) << '\n';
}

SlopeFit fit_log_slope(const std::vector<ScanRow>& rows) {
  SlopeFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!r.ok || std::isnan(r.entropy_bits)) continue;
    const double x = std::log2(r.L + 1.0);
    sx += x;
    sy += r.entropy_bits;
    sxx += x * x;
    sxy += x * r.entropy_bits;
    ++f.points;
  }
  const double n = f.points;
  const double denom = n * sxx - sx * sx;
  if (f.points < 2 || denom <= 0.0) throw std::invalid_argument("fit: need at least two distinct L values");
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

ScanTable run_entropy_scan(const ExperimentConfig& config) {
  validate(config);
  std::vector<ScanPoint> points;
  for (const auto& spec : config.profiles)
    for (int m : config.m)
      for (int L : config.L) points.push_back({&spec, m, L});
  std::sort(points.begin(), points.end(), [](const ScanPoint& a, const ScanPoint& b) {
    return std::tie(a.spec->id, a.L, a.m) < std::tie(b.spec->id, b.L, b.m);
  });

  std::ofstream csv;
  if (!config.out.empty()) {
    csv.open(config.out, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + config.out);
    csv << metadata_line(config) << '\n' << kCsvHeader << '\n' << std::flush;
  }

  // workers fill slots; this thread commits the ready prefix in order
  std::vector<std::optional<ScanRow>> slots(points.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      ScanRow row = compute_point(config, points[i]);
      std::lock_guard lock(mu);
      slots[i] = std::move(row);
      ready.notify_one();
    }
  };
  const int nthreads = std::max(1, std::min<int>(config.workers, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);

  ScanTable table;
  table.J = config.J;
  table.seed = config.seed;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[i].has_value(); });
    ScanRow row = std::move(*slots[i]);
    lock.unlock();
    if (!row.ok) ++table.failures;
    if (csv.is_open()) csv << csv_line(row) << '\n' << std::flush;
    table.rows.push_back(std::move(row));
  }
  for (auto& t : pool) t.join();
  table.summary = summarize(table.rows);
  return table;
}

ScanTable read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  ScanTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw std::runtime_error(path + ": unexpected CSV header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cell += line[++i];
        else if (ch == '"') quoted = false;
        else cell += ch;
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error(path + ": malformed row");
    ScanRow r;
    r.profile_id = cells[0];
    r.m = std::stoi(cells[1]);
    r.L = std::stoi(cells[2]);
    r.J = std::strtod(cells[3].c_str(), nullptr);
    r.entropy_bits = std::strtod(cells[4].c_str(), nullptr);
    r.schmidt_1 = std::strtod(cells[5].c_str(), nullptr);
    r.residual = std::strtod(cells[6].c_str(), nullptr);
    r.ok = !std::isnan(r.entropy_bits);
    if (!r.ok) ++table.failures;
    table.J = r.J;
    table.rows.push_back(std::move(r));
  }
  table.summary = summarize(table.rows);
  return table;
}

nlohmann::json summary_json(const ScanTable& table) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : table.summary)
    groups.push_back({{"profile_id", g.profile_id},
                      {"m", g.m},
                      {"max_entropy_bits", g.max_entropy},
                      {"slope_bits_per_log2", g.fit.slope},
                      {"points", g.fit.points}});
  return {{"tool", kToolVersion}, {"J", table.J}, {"rows", table.rows.size()},
          {"failures", table.failures}, {"groups", groups}};
}

UniformityReport run_uniformity_report(const ScanTable& bounded, const ScanTable& critical, double threshold) {
  auto distinct_L = [](const ScanTable& t) {
    std::set<int> ls;
    for (const auto& r : t.rows)
      if (r.ok) ls.insert(r.L);
    return ls;
  };
  if (distinct_L(bounded).size() < 4 || distinct_L(critical).size() < 4)
    throw std::invalid_argument("uniformity: each table needs at least 4 distinct L values");
  UniformityReport rep;
  rep.threshold = threshold;
  rep.slope_a = fit_log_slope(bounded.rows).slope;
  rep.slope_b = fit_log_slope(critical.rows).slope;
  if (std::abs(rep.slope_a - rep.slope_b) <= 1e-12)
    rep.verdict = "indistinguishable";
  else if (rep.slope_a < threshold && threshold < rep.slope_b)
    rep.verdict = "discriminated";
  else
    rep.verdict = "inconclusive";
  return rep;
}

McCompareReport run_mc_compare(const ExperimentConfig& config) {
  validate(config);
  const Lattice lattice(config.m.front(), config.L.front());
  const FieldProfile profile = make_profile(config.profiles.front(), lattice, config.J);
  LanczosOptions lopts;
  lopts.tol = std::min(config.tolerance, 1e-10);
  const GroundStateResult psi = ground_state(profile, lopts);
  const Marginal exact = ground_state_marginal(psi, lattice, lattice.sites());

  MarginalOptions mopts;
  if (config.endpoints == "perron") mopts.endpoints = perron_endpoints(profile);

  McCompareReport report;
  for (double beta : config.beta) {
    const MarginalEstimate est = estimate_marginal(profile, beta, config.sweeps, config.burn_in, *config.seed, mopts);
    McRun run;
    run.beta = beta;
    run.acceptance_rate = est.acceptance_rate;
    for (std::size_t c = 0; c < est.estimate.size(); ++c) {
      const double diff = est.estimate[c] - exact.prob[c];
      double z = 0.0;
      if (est.stderr_[c] > 0.0) z = diff / est.stderr_[c];
      else if (std::abs(diff) > 1e-15) z = std::numeric_limits<double>::infinity();
      run.rows.push_back({configuration_label(c, lattice.size()), est.estimate[c], exact.prob[c], est.stderr_[c], z});
      run.total_variation += 0.5 * std::abs(diff);
      run.max_abs_z = std::max(run.max_abs_z, std::abs(z));
    }
    report.runs.push_back(std::move(run));
  }

  std::vector<const McRun*> by_beta;
  for (const auto& r : report.runs) by_beta.push_back(&r);
  std::sort(by_beta.begin(), by_beta.end(), [](auto* a, auto* b) { return a->beta < b->beta; });
  report.pass = by_beta.back()->max_abs_z <= 4.0;
  report.tv_nonincreasing = true;
  for (std::size_t i = 1; i < by_beta.size(); ++i)
    if (by_beta[i]->total_variation > by_beta[i - 1]->total_variation) report.tv_nonincreasing = false;
  return report;
}

nlohmann::json to_json(const McCompareReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& c : r.rows)
      rows[c.label] = {{"estimate", c.estimate}, {"exact", c.exact}, {"stderr", c.stderr_},
                       {"z", std::isfinite(c.z) ? nlohmann::json(c.z) : nlohmann::json("inf")}};
    runs.push_back({{"beta", r.beta},
                    {"total_variation", r.total_variation},
                    {"max_abs_z", std::isfinite(r.max_abs_z) ? nlohmann::json(r.max_abs_z) : nlohmann::json("inf")},
                    {"acceptance_rate", r.acceptance_rate},
                    {"configurations", rows}});
  }
  return {{"tool", kToolVersion}, {"runs", runs}, {"pass", report.pass}, {"tv_nonincreasing", report.tv_nonincreasing}};
}

std::vector<BoundReport> run_transfer_bounds(const ExperimentConfig& config) {
  validate(config);
  std::vector<BoundReport> out;
  for (const auto& cl : config.clusters)
    for (double s : config.times) out.push_back(check_bounds(ClusterBlock(cl.h, cl.J), s));
  return out;
}

SearchResult run_kp_search(const ExperimentConfig& config) {
  validate(config);
  const auto gaps = measure_cluster_gaps(config.J, config.C1, config.K);
  return search_parameters(config.J, config.C1, config.K, gaps);
}

}  // namespace tfim
