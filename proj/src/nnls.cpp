#include "mollify/nnls.hpp"

#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "mollify/error.hpp"

namespace mollify {

NnlsResult nnls(const Matrix& A, const Vector& y, int max_iterations, double tolerance) {
  require_dimension(A.rows(), y.size(), "nnls");
  const Eigen::Index n = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 10);
  if (tolerance <= 0.0) tolerance = 1e-12 * (1.0 + (A.transpose() * y).cwiseAbs().maxCoeff());

  NnlsResult result{Vector::Zero(n), 0, false};
  Vector& x = result.x;
  std::vector<bool> passive(static_cast<std::size_t>(n), false);

  auto solve_passive = [&](Vector& z) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[j]) cols.push_back(j);
    }
    Matrix sub(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    const Vector zs = sub.colPivHouseholderQr().solve(y);
    z.setZero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(static_cast<Eigen::Index>(k));
  };

  Vector w = A.transpose() * (y - A * x);
  Vector z(n);
  while (result.iterations < max_iterations) {
    Eigen::Index best = -1;
    double best_w = tolerance;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) {
      result.converged = true;
      break;
    }
    passive[best] = true;
    ++result.iterations;

    for (;;) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      }
      x += alpha * (z - x);
      bool removed = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= 1e-15) {
          passive[j] = false;
          x(j) = 0.0;
          removed = true;
        }
      }
      if (!removed) {
        // Numerical stall: drop the most negative candidate.
        Eigen::Index worst = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (passive[j] && z(j) <= 0.0 && (worst < 0 || z(j) < z(worst))) worst = j;
        }
        passive[worst] = false;
        x(worst) = 0.0;
      }
    }
    w = A.transpose() * (y - A * x);
  }
  return result;
}

Vector l1_constrained_least_squares(const Matrix& Phi, const Vector& y, double budget, int max_iterations) {
  require_dimension(Phi.rows(), y.size(), "l1_constrained_least_squares");
  if (!(budget > 0.0)) throw InvalidSpecError("l1_constrained_least_squares: budget must be positive");
  const Eigen::Index m = Phi.rows();
  const Eigen::Index n = Phi.cols();
  const double col_scale = 1.0 + budget * Phi.colwise().norm().maxCoeff();
  const double weight = 1e4 * col_scale;

  Matrix A = Matrix::Zero(m + 1, 2 * n + 1);
  A.topLeftCorner(m, n) = budget * Phi;
  A.block(0, n, m, n) = -budget * Phi;
  A.row(m).setConstant(weight);
  Vector rhs(m + 1);
  rhs.head(m) = y;
  rhs(m) = weight;

  // The constraint row dominates A^T y; scale the stopping tolerance to the data rows.
  const double tol = 1e-10 * (1.0 + budget * (Phi.transpose() * y).cwiseAbs().maxCoeff());
  const NnlsResult sol = nnls(A, rhs, max_iterations, tol);
  Vector theta = budget * (sol.x.head(n) - sol.x.segment(n, n));
  const double l1 = theta.lpNorm<1>();
  if (l1 > budget) theta *= budget / l1;
  return theta;
}

}  // namespace mollify
