#include "tfim/entanglement.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tfim {

SchmidtSpectrum schmidt_spectrum(std::span<const double> amplitudes, const Lattice& lattice, CutSide side) {
  const int n = lattice.size();
  if (amplitudes.size() != (std::size_t{1} << n))
    throw std::invalid_argument("schmidt_spectrum: amplitude count does not match lattice");
  const double norm2 = std::inner_product(amplitudes.begin(), amplitudes.end(), amplitudes.begin(), 0.0);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8) throw std::invalid_argument("schmidt_spectrum: state is not normalized");

  // Bits [m, m+L] belong to the block; the environment is the m low bits and
  // the m high bits, packed as low | high << m.
  const int m = lattice.m();
  const int block_bits = lattice.L() + 1;
  const int env_bits = n - block_bits;
  const Eigen::Index block_dim = Eigen::Index{1} << block_bits;
  const Eigen::Index env_dim = Eigen::Index{1} << env_bits;
  const std::uint64_t low_mask = (std::uint64_t{1} << m) - 1;
  const std::uint64_t block_mask = (std::uint64_t{1} << block_bits) - 1;

  Eigen::MatrixXd psi(block_dim, env_dim);
  for (std::uint64_t b = 0; b < amplitudes.size(); ++b) {
    const std::uint64_t blk = (b >> m) & block_mask;
    const std::uint64_t env = (b & low_mask) | ((b >> (m + block_bits)) << m);
    psi(static_cast<Eigen::Index>(blk), static_cast<Eigen::Index>(env)) = amplitudes[b];
  }

  const bool use_block = side == CutSide::block || (side == CutSide::smaller && block_dim <= env_dim);
  Eigen::MatrixXd gram;
  if (use_block) {
    gram = Eigen::MatrixXd::Zero(block_dim, block_dim);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(psi);
  } else {
    gram = Eigen::MatrixXd::Zero(env_dim, env_dim);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(psi.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);

  SchmidtSpectrum out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  for (double& v : out.values) v = std::max(v, 0.0);
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double entanglement_entropy(const SchmidtSpectrum& spectrum, EntropyUnit unit) {
  double s = 0.0;
  for (double v : spectrum.values)
    if (v > 0.0) s -= v * std::log(v);
  // a leading value of 1 + 1e-16 would otherwise give -0.0000000000000003
  s = std::max(s, 0.0);
  return unit == EntropyUnit::bits ? s / std::log(2.0) : s;
}

EntropyReport entropy_of_block(const FieldProfile& profile, const EntropyOptions& options) {
  const Lattice& lat = profile.lattice();
  if (lat.L() + 1 > options.max_block_sites)
    throw std::invalid_argument("entropy_of_block: block of " + std::to_string(lat.L() + 1) +
                                " sites exceeds limit");
  const GroundStateResult psi = ground_state(profile, options.lanczos);
  EntropyReport report;
  report.m = lat.m();
  report.L = lat.L();
  report.spectrum = schmidt_spectrum(psi, lat);
  report.entropy_bits = entanglement_entropy(report.spectrum);
  report.residual = psi.residual;
  report.energy = psi.energy;
  return report;
}

}  // namespace tfim
