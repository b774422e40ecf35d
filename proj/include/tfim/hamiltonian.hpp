#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfim/lattice.hpp"

namespace tfim {

// Basis convention used everywhere: bit k of a basis index is the sigma^3
// value at the k-th site in ascending order (bit 0 <-> site -m), with bit 0
// meaning +1 and bit 1 meaning -1.
inline constexpr const char* kSiteOrder = "ascending-from-minus-m";

inline int spin_of(std::uint64_t basis, int bit) { return ((basis >> bit) & 1U) ? -1 : 1; }

/// H = -(J/2) sum_<x,y> s3_x s3_y - sum_x h_x s1_x, applied without ever
/// forming the 2^n x 2^n matrix.
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(const FieldProfile& profile);

  int sites() const { return n_; }
  std::size_t dimension() const { return std::size_t{1} << n_; }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<double>& flip_fields() const { return h_; }

  /// out = H v. Throws std::invalid_argument on a size mismatch.
  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

  /// Cheap upper bound on the spectral radius.
  double norm_bound() const;

 private:
  int n_;
  std::vector<double> h_;
  std::vector<double> diagonal_;
};

struct LanczosOptions {
  double tol = 1e-10;         // residual ||H psi - E psi|| target
  int krylov_dim = 40;        // retained band per restart cycle
  int max_restarts = 400;
  int max_sites = 24;
};

struct GroundStateResult {
  int sites = 0;
  double energy = 0.0;
  std::vector<double> amplitudes;  // unit norm, largest-magnitude entry positive
  double residual = 0.0;
  int iterations = 0;              // matrix-vector products
  double gap_estimate = 0.0;       // second Ritz value minus energy in the last cycle
  bool near_degenerate = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// Restarted Lanczos with full reorthogonalization against the retained band.
/// The start vector is the uniform superposition, which overlaps the
/// (positive, spin-flip even) ground state and keeps the iteration in the even
/// sector.
GroundStateResult ground_state(const FieldProfile& profile, const LanczosOptions& options = {});

struct Marginal {
  std::vector<int> sites;    // bit j of a configuration index <-> sites[j]
  std::vector<double> prob;  // size 2^sites.size()
};

/// Distribution of the sigma^3 configuration on `sites` under |psi|^2.
Marginal ground_state_marginal(const GroundStateResult& result, const Lattice& lattice,
                               const std::vector<int>& sites);

/// "+-+" style label; character j is the spin of bit j.
std::string configuration_label(std::uint64_t config, int nsites);

/// One JSON header line followed by 2^n little-endian float64 amplitudes.
void write_state(std::ostream& os, const GroundStateResult& result);
GroundStateResult read_state(std::istream& is);

}  // namespace tfim
