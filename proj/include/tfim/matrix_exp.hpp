#pragma once

#include <Eigen/Dense>

namespace tfim {

/// exp(A) for a small dense matrix: trace shift, then degree-13 Pade with
/// scaling and squaring (Higham 2005). Relative accuracy near 1e-15 for the
/// well-conditioned symmetric generators used here.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace tfim
