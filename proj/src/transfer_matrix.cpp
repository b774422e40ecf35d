#include "tfim/transfer_matrix.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tfim/matrix_exp.hpp"

namespace tfim {

ClusterBlock::ClusterBlock(std::vector<double> fields, double J, int max_sites) : h_(std::move(fields)), J_(J) {
  if (h_.empty() || size() > max_sites)
    throw std::invalid_argument("cluster: size must be in [1, " + std::to_string(max_sites) + "]");
  if (!(J_ >= 0.0)) throw std::invalid_argument("cluster: J must be >= 0");
  for (double h : h_)
    if (!(h > 0.0)) throw std::invalid_argument("cluster: fields must be > 0");
}

double ClusterBlock::total_field() const { return std::accumulate(h_.begin(), h_.end(), 0.0); }

Eigen::MatrixXd cluster_generator(const ClusterBlock& block, CouplingSign sign) {
  const int l = block.size();
  const int dim = block.dimension();
  const double coupling = (sign == CouplingSign::ferromagnetic ? 0.5 : -0.5) * block.J();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int c = 0; c < dim; ++c) {
    double bonds = 0.0;
    for (int j = 0; j + 1 < l; ++j) bonds += (((c >> j) ^ (c >> (j + 1))) & 1) ? -1.0 : 1.0;
    g(c, c) = coupling * bonds;
    for (int i = 0; i < l; ++i) g(c, c ^ (1 << i)) = block.fields()[i];
  }
  return g;
}

TransferBlock transfer(const ClusterBlock& block, double s, CouplingSign sign) {
  if (!(s > 0.0)) throw std::invalid_argument("transfer: s must be > 0");
  Eigen::MatrixXd rate = cluster_generator(block, sign);
  rate.diagonal().array() -= block.total_field();
  Eigen::MatrixXd g = expm(s * rate);
  // the exact result is symmetric; remove the roundoff asymmetry
  g = 0.5 * (g + g.transpose()).eval();
  return {s, std::move(g), std::move(rate)};
}

PerronData perron(const TransferBlock& tb) {
  // eigenvalues of g_s are exp(s mu_k) with mu_k those of the rate matrix;
  // without one, fall back to the matrix itself (log of its eigenvalues)
  const bool from_rate = tb.rate.size() > 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(from_rate ? tb.rate : tb.matrix);
  const Eigen::Index n = solver.eigenvalues().size();
  Eigen::VectorXd log_ev(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = solver.eigenvalues()(i);
    log_ev(i) = from_rate ? tb.s * e : std::log(std::abs(e));
  }
  Eigen::Index top = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (log_ev(i) > log_ev(top)) top = i;

  PerronData pd;
  pd.s = tb.s;
  pd.lambda = std::exp(log_ev(top));
  pd.p = solver.eigenvectors().col(top);
  if (pd.p.sum() < 0) pd.p = -pd.p;
  double log_second = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != top) log_second = std::max(log_second, log_ev(i));
  pd.lambda2_abs = std::exp(log_second);
  pd.gap_rate = (log_ev(top) - log_second) / tb.s;
  // g/lambda - p p^T = sum_{k != top} (lambda_k/lambda) v_k v_k^T; dividing by
  // the second ratio before summing avoids cancellation below roundoff.
  Eigen::MatrixXd rest = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == top) continue;
    const Eigen::VectorXd v = solver.eigenvectors().col(i);
    const double sign = (!from_rate && solver.eigenvalues()(i) < 0) ? -1.0 : 1.0;
    rest += sign * std::exp(log_ev(i) - log_second) * v * v.transpose();
  }
  pd.equilibration_c = n > 1 ? rest.cwiseAbs().maxCoeff() : 0.0;
  return pd;
}

double equilibration_deviation(const TransferBlock& tb, const PerronData& pd) {
  return (tb.matrix / pd.lambda - pd.p * pd.p.transpose()).cwiseAbs().maxCoeff();
}

BoundReport check_bounds(const ClusterBlock& block, double s, CouplingSign sign) {
  const TransferBlock tb = transfer(block, s, sign);
  const PerronData pd = perron(tb);
  const int l = block.size();

  BoundReport r;
  r.fields = block.fields();
  r.J = block.J();
  r.s = s;
  r.lambda = pd.lambda;
  r.lambda_lo = std::exp(-l * block.J() * s);
  r.lambda_hi = std::exp(l * block.J() * s);
  // relative slack for roundoff when the bound is tight (J = 0 gives lambda = 1)
  r.eigenvalue_bound_holds = pd.lambda >= r.lambda_lo * (1 - 1e-12) && pd.lambda <= r.lambda_hi * (1 + 1e-12);
  r.gap_rate = pd.gap_rate;

  double log_formula = -2.0 * block.J() * l * s;
  for (double h : block.fields()) log_formula -= std::log(std::sinh(h * s));
  r.inf_sup_gap_bound = std::exp(log_formula);
  r.inf_sup_bound_exceeds_one = log_formula > 0.0;

  r.equilibration_c = pd.equilibration_c;
  const TransferBlock tb2 = transfer(block, 2 * s, sign);
  const PerronData pd2 = perron(tb2);
  r.deviation_doubled = pd2.equilibration_c * pd2.lambda2_abs / pd2.lambda;
  r.predicted_doubled = pd.equilibration_c * std::exp(-pd.gap_rate * 2 * s);
  r.equilibration_consistent = r.deviation_doubled <= 1.1 * r.predicted_doubled;
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"cluster", {{"h", r.fields}, {"J", r.J}}},
          {"s", r.s},
          {"lambda", r.lambda},
          {"lambda_lo", r.lambda_lo},
          {"lambda_hi", r.lambda_hi},
          {"eigenvalue_bound_holds", r.eigenvalue_bound_holds},
          {"gap_rate", r.gap_rate},
          {"printed_gap_formula", r.inf_sup_gap_bound},
          {"gap_formula_exceeds_one", r.inf_sup_bound_exceeds_one},
          {"equilibration_c", r.equilibration_c},
          {"deviation_doubled", r.deviation_doubled},
          {"predicted_doubled", r.predicted_doubled},
          {"equilibration_consistent", r.equilibration_consistent}};
}

}  // namespace tfim
