#include "tfim/spinflip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tfim/hamiltonian.hpp"
#include "tfim/transfer_matrix.hpp"

namespace tfim {

int Trajectory::spin_at(double t) const {
  const auto flipped = std::upper_bound(flips.begin(), flips.end(), t) - flips.begin();
  return (flipped % 2 == 0) ? initial_spin : -initial_spin;
}

Trajectory sample_trajectory(int site, double h, double beta, CounterRng& rng, std::optional<int> initial_spin) {
  if (!(h > 0.0) || !(beta > 0.0)) throw std::invalid_argument("sample_trajectory: h and beta must be > 0");
  Trajectory tr;
  tr.site = site;
  tr.beta = beta;
  tr.initial_spin = initial_spin ? *initial_spin : (rng.coin() ? 1 : -1);
  const double end = 0.5 * beta;
  for (double t = -end + rng.exponential(h); t < end; t += rng.exponential(h)) tr.flips.push_back(t);
  return tr;
}

double overlap_integral(const Trajectory& a, const Trajectory& b) {
  if (a.beta != b.beta) throw std::invalid_argument("overlap_integral: trajectories have different beta");
  const double end = 0.5 * a.beta;
  double t = -end;
  double total = 0.0;
  int product = a.initial_spin * b.initial_spin;
  std::size_t i = 0, j = 0;
  while (i < a.flips.size() || j < b.flips.size()) {
    double next;
    if (j >= b.flips.size() || (i < a.flips.size() && a.flips[i] <= b.flips[j]))
      next = a.flips[i++];
    else
      next = b.flips[j++];
    total += product * (next - t);
    product = -product;
    t = next;
  }
  return total + product * (end - t);
}

EndpointLaw free_endpoints() { return {}; }

EndpointLaw perron_endpoints(const FieldProfile& profile, double s) {
  const int n = profile.lattice().size();
  const ClusterBlock chain(profile.fields(), profile.J(), n);
  const PerronData pd = perron(transfer(chain, s));
  EndpointLaw law;
  law.log_weight.resize(pd.p.size());
  for (Eigen::Index i = 0; i < pd.p.size(); ++i) law.log_weight[i] = std::log(pd.p(i));
  return law;
}

std::uint64_t PathConfiguration::configuration_at(double t) const {
  std::uint64_t c = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k)
    if (trajectories[k].spin_at(t) < 0) c |= std::uint64_t{1} << k;
  return c;
}

std::uint64_t PathConfiguration::initial_configuration() const {
  std::uint64_t c = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k)
    if (trajectories[k].initial_spin < 0) c |= std::uint64_t{1} << k;
  return c;
}

std::uint64_t PathConfiguration::final_configuration() const {
  std::uint64_t c = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k)
    if (trajectories[k].final_spin() < 0) c |= std::uint64_t{1} << k;
  return c;
}

double path_log_weight(const PathConfiguration& config, const FieldProfile& profile, const EndpointLaw& law) {
  double w = 0.0;
  for (std::size_t k = 0; k + 1 < config.trajectories.size(); ++k)
    w += overlap_integral(config.trajectories[k], config.trajectories[k + 1]);
  w *= 0.5 * profile.J();
  if (!law.free())
    w += law.log_weight[config.initial_configuration()] + law.log_weight[config.final_configuration()];
  return w;
}

std::vector<CounterRng> site_streams(std::uint64_t seed, int sites) {
  const CounterRng root(seed);
  std::vector<CounterRng> out;
  out.reserve(sites);
  for (int k = 0; k < sites; ++k) out.push_back(root.split(static_cast<std::uint64_t>(k)));
  return out;
}

PathConfiguration sample_base_configuration(const FieldProfile& profile, double beta,
                                            std::span<CounterRng> streams, const EndpointLaw& law) {
  const Lattice& lat = profile.lattice();
  if (static_cast<int>(streams.size()) != lat.size()) throw std::invalid_argument("configuration: one stream per site");
  PathConfiguration config;
  config.beta = beta;
  for (int k = 0; k < lat.size(); ++k)
    config.trajectories.push_back(sample_trajectory(lat.site_at(k), profile.fields()[k], beta, streams[k]));
  for (int k = 0; k + 1 < lat.size(); ++k)
    config.bond_overlaps.push_back(overlap_integral(config.trajectories[k], config.trajectories[k + 1]));
  config.log_weight = path_log_weight(config, profile, law);
  return config;
}

void mcmc_sweep(PathConfiguration& config, const FieldProfile& profile, std::span<CounterRng> streams,
                const EndpointLaw& law, SweepStats& stats) {
  const int n = static_cast<int>(config.trajectories.size());
  const double half_j = 0.5 * profile.J();
  for (int k = 0; k < n; ++k) {
    CounterRng& rng = streams[k];
    Trajectory proposal = sample_trajectory(config.trajectories[k].site, profile.fields()[k], config.beta, rng);
    ++stats.proposals;

    const double left = k > 0 ? overlap_integral(config.trajectories[k - 1], proposal) : 0.0;
    const double right = k + 1 < n ? overlap_integral(proposal, config.trajectories[k + 1]) : 0.0;
    double delta = half_j * ((left - (k > 0 ? config.bond_overlaps[k - 1] : 0.0)) +
                             (right - (k + 1 < n ? config.bond_overlaps[k] : 0.0)));
    if (!law.free()) {
      const std::uint64_t bit = std::uint64_t{1} << k;
      const std::uint64_t a0 = config.initial_configuration(), b0 = config.final_configuration();
      const std::uint64_t a1 = proposal.initial_spin < 0 ? (a0 | bit) : (a0 & ~bit);
      const std::uint64_t b1 = proposal.final_spin() < 0 ? (b0 | bit) : (b0 & ~bit);
      delta += law.log_weight[a1] + law.log_weight[b1] - law.log_weight[a0] - law.log_weight[b0];
    }

    // always draw the uniform so the stream position does not depend on delta
    const double u = rng.uniform_open0();
    if (delta >= 0.0 || u <= std::exp(delta)) {
      config.trajectories[k] = std::move(proposal);
      if (k > 0) config.bond_overlaps[k - 1] = left;
      if (k + 1 < n) config.bond_overlaps[k] = right;
      config.log_weight += delta;
      ++stats.accepted;
    }
  }
}

MarginalEstimate estimate_marginal(const FieldProfile& profile, double beta, std::uint64_t sweeps,
                                   std::uint64_t burn_in, std::uint64_t seed, const MarginalOptions& options) {
  if (!(sweeps > burn_in)) throw std::invalid_argument("estimate_marginal: sweeps must exceed burn-in");
  if (!(beta > 0.0)) throw std::invalid_argument("estimate_marginal: beta must be > 0");
  const int n = profile.lattice().size();
  if (n > 20) throw std::invalid_argument("estimate_marginal: lattice too large for a full histogram");
  if (!options.endpoints.free() && options.endpoints.log_weight.size() != (std::size_t{1} << n))
    throw std::invalid_argument("estimate_marginal: endpoint law does not match lattice");
  const int batches = std::max(2, options.batches);
  const std::uint64_t samples = sweeps - burn_in;
  if (samples < static_cast<std::uint64_t>(batches)) throw std::invalid_argument("estimate_marginal: too few samples");

  auto streams = site_streams(seed, n);
  PathConfiguration config = sample_base_configuration(profile, beta, streams, options.endpoints);
  SweepStats stats;
  for (std::uint64_t i = 0; i < burn_in; ++i) mcmc_sweep(config, profile, streams, options.endpoints, stats);

  const std::size_t dim = std::size_t{1} << n;
  MarginalEstimate est;
  est.beta = beta;
  est.sweeps = sweeps;
  est.burn_in = burn_in;
  est.seed = seed;
  est.sites = n;
  est.batches = batches;
  est.counts.assign(dim, 0);
  std::vector<std::vector<std::uint64_t>> batch_counts(batches, std::vector<std::uint64_t>(dim, 0));
  std::vector<std::uint64_t> batch_sizes(batches, 0);

  stats = {};
  for (std::uint64_t i = 0; i < samples; ++i) {
    mcmc_sweep(config, profile, streams, options.endpoints, stats);
    const std::uint64_t c = config.configuration_at(0.0);
    const auto b = static_cast<std::size_t>(i * batches / samples);
    ++est.counts[c];
    ++batch_counts[b][c];
    ++batch_sizes[b];
  }
  est.acceptance_rate = stats.acceptance_rate();

  est.estimate.resize(dim);
  est.stderr_.resize(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    est.estimate[c] = static_cast<double>(est.counts[c]) / static_cast<double>(samples);
    double mean = 0.0, sq = 0.0;
    for (int b = 0; b < batches; ++b) {
      const double f = static_cast<double>(batch_counts[b][c]) / static_cast<double>(batch_sizes[b]);
      mean += f;
      sq += f * f;
    }
    mean /= batches;
    const double var = std::max(0.0, (sq - batches * mean * mean) / (batches - 1));
    est.stderr_[c] = std::sqrt(var / batches);
  }
  return est;
}

nlohmann::json to_json(const MarginalEstimate& est) {
  nlohmann::json configs = nlohmann::json::object();
  for (std::size_t c = 0; c < est.counts.size(); ++c)
    configs[configuration_label(c, est.sites)] = {
        {"count", est.counts[c]}, {"estimate", est.estimate[c]}, {"stderr", est.stderr_[c]}};
  return {{"beta", est.beta},         {"sweeps", est.sweeps},     {"burn_in", est.burn_in},
          {"seed", est.seed},         {"sites", est.sites},       {"batches", est.batches},
          {"acceptance_rate", est.acceptance_rate}, {"configurations", configs}};
}

}  // namespace tfim
