#pragma once
#include <Eigen/Dense>
#include <functional>

namespace bellmux {

struct LevMarOptions {
  int max_iter = 200;
  double ftol = 1e-12;  ///< relative cost change
  double xtol = 1e-12;  ///< relative step size
  double lambda0 = 1e-3;
};

struct LevMarResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  ///< (J^T J)^-1 scaled by reduced chi^2
  double chi2 = 0.0;
  int iterations = 0;
  int n_points = 0;
  bool converged = false;
};

/// Evaluates weighted residuals r(p) and, when J is non-null, the
/// Jacobian dr/dp.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;

/// Damped least squares with analytic Jacobians. Throws
/// std::runtime_error on non-convergence or singular normal equations.
LevMarResult levmar_fit(const ResidualFn& fn, Eigen::VectorXd p0, int n_residuals,
                        const LevMarOptions& opt = {});

}  // namespace bellmux
