#include "tfim/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace tfim {

HamiltonianOperator::HamiltonianOperator(const FieldProfile& profile)
    : n_(profile.lattice().size()), h_(profile.fields()) {
  if (n_ > 30) throw std::invalid_argument("hamiltonian: too many sites");
  const double half_j = 0.5 * profile.J();
  diagonal_.resize(dimension());
  for (std::uint64_t b = 0; b < dimension(); ++b) {
    // neighbouring spins disagree exactly where b ^ (b >> 1) has a bit set
    const int domain_walls = std::popcount((b ^ (b >> 1)) & ((std::uint64_t{1} << (n_ - 1)) - 1));
    const int aligned = (n_ - 1) - domain_walls;
    diagonal_[b] = -half_j * (aligned - domain_walls);
  }
}

void HamiltonianOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dimension() || out.size() != dimension())
    throw std::invalid_argument("hamiltonian: vector length does not match 2^n");
  const std::size_t dim = dimension();
  for (std::size_t b = 0; b < dim; ++b) {
    double acc = diagonal_[b] * v[b];
    for (int k = 0; k < n_; ++k) acc -= h_[k] * v[b ^ (std::size_t{1} << k)];
    out[b] = acc;
  }
}

std::vector<double> HamiltonianOperator::apply(std::span<const double> v) const {
  std::vector<double> out(v.size());
  apply(v, out);
  return out;
}

double HamiltonianOperator::norm_bound() const {
  double bound = 0.0;
  for (double h : h_) bound += h;
  double max_diag = 0.0;
  for (double d : diagonal_) max_diag = std::max(max_diag, std::abs(d));
  return bound + max_diag;
}

Marginal ground_state_marginal(const GroundStateResult& result, const Lattice& lattice,
                               const std::vector<int>& sites) {
  if (static_cast<int>(result.sites) != lattice.size())
    throw std::invalid_argument("marginal: state does not match lattice");
  std::vector<int> bits;
  for (int s : sites) {
    if (!lattice.contains(s)) throw std::invalid_argument("marginal: site outside lattice");
    bits.push_back(lattice.index_of(s));
  }
  Marginal out{sites, std::vector<double>(std::size_t{1} << sites.size(), 0.0)};
  for (std::size_t b = 0; b < result.amplitudes.size(); ++b) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) c |= ((b >> bits[j]) & 1U) << j;
    out.prob[c] += result.amplitudes[b] * result.amplitudes[b];
  }
  return out;
}

std::string configuration_label(std::uint64_t config, int nsites) {
  std::string s(nsites, '+');
  for (int j = 0; j < nsites; ++j)
    if ((config >> j) & 1U) s[j] = '-';
  return s;
}

void write_state(std::ostream& os, const GroundStateResult& result) {
  nlohmann::json header = {{"n", result.sites},           {"site_order", kSiteOrder},
                           {"energy", result.energy},     {"residual", result.residual},
                           {"iterations", result.iterations}, {"encoding", "float64-le"}};
  os << header.dump() << '\n';
  for (double a : result.amplitudes) {
    unsigned char bytes[8];
    std::uint64_t bits;
    std::memcpy(&bits, &a, 8);
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

GroundStateResult read_state(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_state: missing header");
  const auto header = nlohmann::json::parse(line);
  if (header.at("site_order") != kSiteOrder) throw std::runtime_error("read_state: unknown site order");
  GroundStateResult r;
  r.sites = header.at("n").get<int>();
  r.energy = header.at("energy").get<double>();
  r.residual = header.at("residual").get<double>();
  r.iterations = header.value("iterations", 0);
  r.amplitudes.resize(std::size_t{1} << r.sites);
  for (double& a : r.amplitudes) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("read_state: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
    std::memcpy(&a, &bits, 8);
  }
  return r;
}

}  // namespace tfim
