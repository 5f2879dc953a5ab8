#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "mollify/activation.hpp"
#include "mollify/domain.hpp"
#include "mollify/types.hpp"

namespace mollify {

/// Axis-aligned box of ridge parameters gamma = [w; b] in R^{n+1}.
class ParameterSet {
 public:
  ParameterSet(Vector lower, Vector upper);
  /// [-half, half]^{n+1}
  static ParameterSet symmetric(int input_dim, double half);

  int dimension() const { return static_cast<int>(lower_.size()); }
  int input_dimension() const { return dimension() - 1; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double volume() const { return (upper_ - lower_).prod(); }
  bool contains(const PointRef& gamma, double tol = 1e-12) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Range of gamma^T X over gamma in the parameter set and x in the domain (an
/// enclosing interval; exact for boxes).
std::pair<double, double> feasible_input_interval(const ParameterSet& params, const Domain& domain);

/// f_hat_N(x) = sum_i theta_i sigma(gamma_i^T X). Parameters are stored column-wise
/// in an (n+1) x N matrix.
class BaseApproximation {
 public:
  BaseApproximation(Activation activation, Vector theta, Matrix gammas, ParameterSet parameter_set);
  /// Network with no atoms; evaluates to zero.
  static BaseApproximation empty(Activation activation, ParameterSet parameter_set);

  const Activation& activation() const { return activation_; }
  const Vector& theta() const { return theta_; }
  const Matrix& gammas() const { return gammas_; }
  const ParameterSet& parameter_set() const { return parameter_set_; }
  int input_dimension() const { return parameter_set_.input_dimension(); }
  Eigen::Index atom_count() const { return theta_.size(); }
  /// S_N = sum_i |theta_i|, cached at construction.
  double coefficient_size() const { return coefficient_size_; }

 private:
  Activation activation_;
  Vector theta_;
  Matrix gammas_;
  ParameterSet parameter_set_;
  double coefficient_size_ = 0.0;
};

double evaluate(const BaseApproximation& net, const PointRef& x);
/// Evaluates at every column of `points`.
Vector evaluate_many(const BaseApproximation& net, const Matrix& points);

inline double coefficient_size(const BaseApproximation& net) { return net.coefficient_size(); }
/// L_hat = L_sigma sum_i |theta_i| ||w_i||_2. Requires a Lipschitz activation.
double lipschitz_constant(const BaseApproximation& net);
/// D_hat = D_sigma sum_i |theta_i|. Requires a bounded activation.
double boundedness_constant(const BaseApproximation& net);

/// f_check(x) = f(x) - a^T x - b
struct AffineShift {
  Vector a;
  double b = 0.0;

  static AffineShift none(int input_dim) { return {Vector::Zero(input_dim), 0.0}; }
  double apply(const ScalarField& f, const PointRef& x) const { return f(x) - a.dot(x) - b; }
};

/// a = central-difference gradient of f at the origin (step 1e-5), b = f(0).
AffineShift default_affine_shift(const ScalarField& f, int input_dim, double step = 1e-5);

struct FitSpec {
  int atom_budget = 64;            // candidate atoms on the parameter grid
  double coefficient_budget = 1.0;  // S: sum |theta| <= S
  std::size_t collocation_points = 4096;
  std::size_t holdout_points = 4096;
  std::uint64_t seed = 0;
  int max_iterations = 2000;
};

struct FitResult {
  BaseApproximation net;
  double epsilon_n = 0.0;  // held-out Monte Carlo L2 error of f_check - f_hat_N
  double epsilon_std_error = 0.0;
  double training_rms = 0.0;
};

/// Candidate ridge parameters: k points per axis (k = floor(budget^{1/(n+1)}),
/// endpoints included), lexicographic order, zero-weight points dropped.
Matrix candidate_grid(const ParameterSet& params, int atom_budget);

/// L1-ball constrained least squares fit of the shifted target over a parameter grid.
FitResult fit_base(const ScalarField& target, const Domain& domain, const ParameterSet& params,
                   const Activation& activation, const FitSpec& spec, const AffineShift& shift);

/// Maurey empirical subsampling. The dense network must be a (signed) convex combination
/// at budget S: sum |theta_i| = S. Draws N atoms iid with probability |theta_i| / S and
/// gives each the coefficient sign(theta_i) S / N.
BaseApproximation maurey_subsample(const BaseApproximation& dense, double budget, int count,
                                   std::uint64_t seed);

}  // namespace mollify
