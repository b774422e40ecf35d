#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tfim/hamiltonian.hpp"

namespace tfim {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double s) {
  for (double& v : x) v *= s;
}

}  // namespace

GroundStateResult ground_state(const FieldProfile& profile, const LanczosOptions& options) {
  const int n = profile.lattice().size();
  if (n > options.max_sites)
    throw std::invalid_argument("ground_state: " + std::to_string(n) + " sites exceeds limit of " +
                                std::to_string(options.max_sites));
  if (!(options.tol > 0.0)) throw std::invalid_argument("ground_state: tolerance must be > 0");

  const HamiltonianOperator H(profile);
  const std::size_t dim = H.dimension();
  const double norm = H.norm_bound();
  // keep the Krylov band under ~1 GiB for the largest systems
  const int band = static_cast<int>(std::clamp<std::size_t>(
      std::min<std::size_t>(options.krylov_dim, (std::size_t{1} << 27) / dim), 4, dim));

  GroundStateResult result;
  result.sites = n;
  std::vector<double> start(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim), ritz(dim), hr(dim);
  double best_residual = std::numeric_limits<double>::infinity();

  for (int cycle = 0; cycle <= options.max_restarts; ++cycle) {
    basis.clear();
    basis.push_back(start);
    std::vector<double> alpha, beta;
    for (int j = 0; j < band; ++j) {
      H.apply(basis[j], w);
      ++result.iterations;
      alpha.push_back(dot(w, basis[j]));
      // two passes of classical Gram-Schmidt against the whole band
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) axpy(-dot(w, q), q, w);
      const double b = std::sqrt(dot(w, w));
      if (j + 1 == band || b < 1e-13 * norm) break;
      beta.push_back(b);
      basis.emplace_back(w);
      scale(basis.back(), 1.0 / b);
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1);
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = tri.eigenvalues()(0);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);

    std::fill(ritz.begin(), ritz.end(), 0.0);
    for (int i = 0; i < k; ++i) axpy(y(i), basis[i], ritz);
    scale(ritz, 1.0 / std::sqrt(dot(ritz, ritz)));
    H.apply(ritz, hr);
    ++result.iterations;
    const double energy = dot(ritz, hr);
    axpy(-energy, ritz, hr);
    const double residual = std::sqrt(dot(hr, hr));
    best_residual = std::min(best_residual, residual);

    if (k > 1) result.gap_estimate = tri.eigenvalues()(1) - theta;
    if (residual <= options.tol) {
      result.energy = energy;
      result.residual = residual;
      const auto biggest = std::max_element(ritz.begin(), ritz.end(),
                                            [](double a, double b) { return std::abs(a) < std::abs(b); });
      if (*biggest < 0) scale(ritz, -1.0);
      result.amplitudes = std::move(ritz);
      result.near_degenerate = k > 1 && result.gap_estimate < 1e-10 * norm;
      return result;
    }
    start = ritz;
  }
  throw ConvergenceError("ground_state: Lanczos did not reach tolerance", best_residual);
}

}  // namespace tfim
