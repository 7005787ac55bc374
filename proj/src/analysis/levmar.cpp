#include "bellmux/analysis/levmar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellmux {

LevMarResult levmar_fit(const ResidualFn& fn, Eigen::VectorXd p0, int n_residuals,
                        const LevMarOptions& opt) {
  const int np = static_cast<int>(p0.size());
  Eigen::VectorXd r(n_residuals);
  Eigen::MatrixXd jac(n_residuals, np);

  fn(p0, r, &jac);
  double cost = r.squaredNorm();
  double lambda = opt.lambda0;

  bool converged = false;
  int it = 0;
  for (; it < opt.max_iter && !converged; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.norm() < 1e-14 * std::max(1.0, cost)) {
      converged = true;
      break;
    }

    bool stepped = false;
    for (int tries = 0; tries < 40 && !stepped; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (int d = 0; d < np; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
      if (ldlt.info() != Eigen::Success) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd step = ldlt.solve(-jtr);
      const Eigen::VectorXd p_new = p0 + step;
      Eigen::VectorXd r_new(n_residuals);
      fn(p_new, r_new, nullptr);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double df = (cost - cost_new) / std::max(cost, 1e-300);
        const double dx = step.norm() / std::max(p0.norm(), 1e-300);
        p0 = p_new;
        fn(p0, r, &jac);
        cost = cost_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (df < opt.ftol || dx < opt.xtol) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    // Damping exhausted without descent: already at a local optimum.
    if (!stepped) converged = true;
  }

  if (!converged)
    throw std::runtime_error("levmar_fit: no convergence after " + std::to_string(opt.max_iter) +
                             " iterations (cost " + std::to_string(cost) + ")");

  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("levmar_fit: singular normal equations at the optimum");

  LevMarResult out;
  out.n_points = n_residuals;
  const int dof = std::max(1, n_residuals - np);
  const double s2 = std::max(cost / dof, 1e-300);
  out.covariance = ldlt.solve(Eigen::MatrixXd::Identity(np, np)) * s2;
  out.params = p0;
  out.chi2 = cost;
  out.iterations = it;
  out.converged = true;
  return out;
}

}  // namespace bellmux
