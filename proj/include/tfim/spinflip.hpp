#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <vector>

#include "tfim/lattice.hpp"
#include "tfim/rng.hpp"

namespace tfim {

/// Piecewise-constant +-1 path on [-beta/2, beta/2] that flips at the points
/// of a Poisson process. Spins are right-continuous at flip times.
struct Trajectory {
  int site = 0;
  double beta = 0.0;
  int initial_spin = 1;
  std::vector<double> flips;  // strictly increasing, inside (-beta/2, beta/2)

  int spin_at(double t) const;
  int final_spin() const { return (flips.size() % 2 == 0) ? initial_spin : -initial_spin; }
};

/// Flip times from a rate-h Poisson process; the starting spin is a fair coin
/// unless pinned.
Trajectory sample_trajectory(int site, double h, double beta, CounterRng& rng,
                             std::optional<int> initial_spin = std::nullopt);

/// Exact int s1(t) s2(t) dt over [-beta/2, beta/2]. Throws on mismatched beta.
double overlap_integral(const Trajectory& a, const Trajectory& b);

/// Weight on the spin configurations at the two time boundaries. Free
/// endpoints leave them unconditioned; the Perron law weights each end by the
/// top eigenvector of the whole-chain transfer matrix.
struct EndpointLaw {
  std::vector<double> log_weight;  // empty for free endpoints, else one entry per basis index
  bool free() const { return log_weight.empty(); }
};

EndpointLaw free_endpoints();
EndpointLaw perron_endpoints(const FieldProfile& profile, double s = 1.0);

struct PathConfiguration {
  double beta = 0.0;
  std::vector<Trajectory> trajectories;  // one per site, ascending
  std::vector<double> bond_overlaps;     // bond k joins sites k and k+1
  double log_weight = 0.0;

  std::uint64_t configuration_at(double t) const;
  std::uint64_t initial_configuration() const;
  std::uint64_t final_configuration() const;
};

/// log weight = (J/2) sum_bonds overlap + endpoint terms.
double path_log_weight(const PathConfiguration& config, const FieldProfile& profile, const EndpointLaw& law);

/// One stream per site, split from the chain seed.
std::vector<CounterRng> site_streams(std::uint64_t seed, int sites);

PathConfiguration sample_base_configuration(const FieldProfile& profile, double beta,
                                            std::span<CounterRng> streams, const EndpointLaw& law);

struct SweepStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const { return proposals ? static_cast<double>(accepted) / proposals : 0.0; }
};

/// Metropolis sweep over sites in ascending order: each proposal is a fresh
/// trajectory from the rate-h_x Poisson law, accepted with probability
/// min(1, exp(delta log weight)).
void mcmc_sweep(PathConfiguration& config, const FieldProfile& profile, std::span<CounterRng> streams,
                const EndpointLaw& law, SweepStats& stats);

struct MarginalEstimate {
  double beta = 0.0;
  std::uint64_t sweeps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  int sites = 0;
  std::vector<std::uint64_t> counts;  // per configuration of the t = 0 slice
  std::vector<double> estimate;
  std::vector<double> stderr_;        // batch means
  int batches = 0;
  double acceptance_rate = 0.0;
};

struct MarginalOptions {
  int batches = 50;
  EndpointLaw endpoints;
};

MarginalEstimate estimate_marginal(const FieldProfile& profile, double beta, std::uint64_t sweeps,
                                   std::uint64_t burn_in, std::uint64_t seed, const MarginalOptions& options = {});

nlohmann::json to_json(const MarginalEstimate& est);

}  // namespace tfim
