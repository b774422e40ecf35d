#pragma once

#include <span>
#include <vector>

#include "tfim/hamiltonian.hpp"
#include "tfim/lattice.hpp"

namespace tfim {

/// Eigenvalues of a reduced density matrix, descending, noise below zero
/// clamped to 0.
struct SchmidtSpectrum {
  std::vector<double> values;
};

enum class EntropyUnit { bits, nats };

/// Which side of the [0, L] cut the Gram matrix is built on.
enum class CutSide { smaller, block, environment };

/// Squared Schmidt coefficients of a pure state across the cut between the
/// block [0, L] and the rest of the lattice. Throws std::invalid_argument if
/// the state norm deviates from 1 by more than 1e-8.
SchmidtSpectrum schmidt_spectrum(std::span<const double> amplitudes, const Lattice& lattice,
                                 CutSide side = CutSide::smaller);

inline SchmidtSpectrum schmidt_spectrum(const GroundStateResult& psi, const Lattice& lattice,
                                        CutSide side = CutSide::smaller) {
  return schmidt_spectrum(psi.amplitudes, lattice, side);
}

/// -sum lambda log lambda with 0 log 0 = 0; base 2 unless nats are requested.
double entanglement_entropy(const SchmidtSpectrum& spectrum, EntropyUnit unit = EntropyUnit::bits);

struct EntropyReport {
  int m = 0;
  int L = 0;
  double entropy_bits = 0.0;
  SchmidtSpectrum spectrum;
  double residual = 0.0;
  double energy = 0.0;
};

struct EntropyOptions {
  LanczosOptions lanczos;
  int max_block_sites = 14;
};

EntropyReport entropy_of_block(const FieldProfile& profile, const EntropyOptions& options = {});

}  // namespace tfim
