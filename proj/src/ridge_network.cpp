#include "mollify/ridge_network.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mollify/error.hpp"
#include "mollify/nnls.hpp"
#include "mollify/rng.hpp"

namespace mollify {

ParameterSet::ParameterSet(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_dimension(lower_.size(), upper_.size(), "ParameterSet bounds");
  if (lower_.size() < 2) throw InvalidInputError("ParameterSet: need dimension n+1 >= 2");
  if (!lower_.allFinite() || !upper_.allFinite() || (upper_.array() <= lower_.array()).any()) {
    throw InvalidInputError("ParameterSet: bounds must be finite with lower < upper on every axis");
  }
}

ParameterSet ParameterSet::symmetric(int input_dim, double half) {
  return ParameterSet(Vector::Constant(input_dim + 1, -half), Vector::Constant(input_dim + 1, half));
}

bool ParameterSet::contains(const PointRef& gamma, double tol) const {
  require_dimension(dimension(), gamma.size(), "ParameterSet::contains");
  return (gamma.array() >= lower_.array() - tol).all() && (gamma.array() <= upper_.array() + tol).all();
}

std::pair<double, double> feasible_input_interval(const ParameterSet& params, const Domain& domain) {
  const int n = params.input_dimension();
  require_dimension(n, domain.dimension(), "feasible_input_interval");
  const Vector xlo = domain.lower();
  const Vector xhi = domain.upper();
  double lo = params.lower()(n);
  double hi = params.upper()(n);
  for (int k = 0; k < n; ++k) {
    const double c[4] = {params.lower()(k) * xlo(k), params.lower()(k) * xhi(k), params.upper()(k) * xlo(k),
                         params.upper()(k) * xhi(k)};
    lo += *std::min_element(c, c + 4);
    hi += *std::max_element(c, c + 4);
  }
  return {lo, hi};
}

BaseApproximation::BaseApproximation(Activation activation, Vector theta, Matrix gammas,
                                     ParameterSet parameter_set)
    : activation_(std::move(activation)),
      theta_(std::move(theta)),
      gammas_(std::move(gammas)),
      parameter_set_(std::move(parameter_set)) {
  require_dimension(theta_.size(), gammas_.cols(), "BaseApproximation atom count");
  if (gammas_.cols() > 0) require_dimension(parameter_set_.dimension(), gammas_.rows(), "BaseApproximation gamma");
  if (gammas_.cols() == 0) gammas_.resize(parameter_set_.dimension(), 0);
  if (!theta_.allFinite()) throw InvalidInputError("BaseApproximation: non-finite coefficient");
  const int n = parameter_set_.input_dimension();
  for (Eigen::Index i = 0; i < gammas_.cols(); ++i) {
    if (!parameter_set_.contains(gammas_.col(i))) {
      throw OutOfSetError("BaseApproximation: atom " + std::to_string(i) + " lies outside the parameter set");
    }
    if (gammas_.col(i).head(n).isZero(0.0)) {
      throw InvalidInputError("BaseApproximation: atom " + std::to_string(i) + " has zero weight vector");
    }
  }
  coefficient_size_ = theta_.lpNorm<1>();
}

BaseApproximation BaseApproximation::empty(Activation activation, ParameterSet parameter_set) {
  const int d = parameter_set.dimension();
  return BaseApproximation(std::move(activation), Vector(0), Matrix(d, 0), std::move(parameter_set));
}

double evaluate(const BaseApproximation& net, const PointRef& x) {
  const int n = net.input_dimension();
  require_dimension(n, x.size(), "evaluate(BaseApproximation)");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < net.atom_count(); ++i) {
    const auto g = net.gammas().col(i);
    sum += net.theta()(i) * net.activation()(g.head(n).dot(x) + g(n));
  }
  return sum;
}

Vector evaluate_many(const BaseApproximation& net, const Matrix& points) {
  const int n = net.input_dimension();
  require_dimension(n, points.rows(), "evaluate_many(BaseApproximation)");
  if (net.atom_count() == 0) return Vector::Zero(points.cols());
  // Z(i, j) = gamma_i^T X_j
  Matrix z = net.gammas().topRows(n).transpose() * points;
  z.colwise() += net.gammas().row(n).transpose();
  const Matrix s = z.unaryExpr([&](double u) { return net.activation()(u); });
  return s.transpose() * net.theta();
}

double lipschitz_constant(const BaseApproximation& net) {
  const auto l = net.activation().lipschitz_constant();
  if (!l) throw NotApplicableError("lipschitz_constant: activation has no L_sigma");
  const int n = net.input_dimension();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < net.atom_count(); ++i) {
    sum += std::abs(net.theta()(i)) * net.gammas().col(i).head(n).norm();
  }
  return *l * sum;
}

double boundedness_constant(const BaseApproximation& net) {
  const auto d = net.activation().bounded_constant();
  if (!d) throw NotApplicableError("boundedness_constant: activation has no D_sigma");
  return *d * net.coefficient_size();
}

AffineShift default_affine_shift(const ScalarField& f, int input_dim, double step) {
  AffineShift shift{Vector::Zero(input_dim), 0.0};
  const Vector origin = Vector::Zero(input_dim);
  shift.b = f(origin);
  for (int k = 0; k < input_dim; ++k) {
    Vector plus = origin;
    Vector minus = origin;
    plus(k) = step;
    minus(k) = -step;
    shift.a(k) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return shift;
}

Matrix candidate_grid(const ParameterSet& params, int atom_budget) {
  if (atom_budget <= 0) throw InvalidSpecError("candidate_grid: atom budget must be positive");
  const int d = params.dimension();
  const int n = d - 1;
  int k = static_cast<int>(std::floor(std::pow(static_cast<double>(atom_budget), 1.0 / d) + 1e-9));
  k = std::max(k, 1);
  std::vector<Vector> cols;
  std::vector<int> idx(d, 0);
  long total = 1;
  for (int a = 0; a < d; ++a) total *= k;
  for (long c = 0; c < total; ++c) {
    Vector g(d);
    for (int a = 0; a < d; ++a) {
      const double lo = params.lower()(a);
      const double hi = params.upper()(a);
      g(a) = k == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[a] / (k - 1);
      if (std::abs(g(a)) < 1e-14 * (hi - lo)) g(a) = 0.0;
    }
    if (!g.head(n).isZero(0.0)) cols.push_back(std::move(g));
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < k) break;
      idx[a] = 0;
    }
  }
  Matrix out(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

FitResult fit_base(const ScalarField& target, const Domain& domain, const ParameterSet& params,
                   const Activation& activation, const FitSpec& spec, const AffineShift& shift) {
  const int n = params.input_dimension();
  require_dimension(n, domain.dimension(), "fit_base domain");
  require_dimension(n, shift.a.size(), "fit_base shift");
  if (spec.atom_budget <= 0 || !(spec.coefficient_budget > 0.0)) {
    throw InvalidSpecError("fit_base: atom and coefficient budgets must be positive");
  }
  if (spec.collocation_points == 0 || spec.holdout_points == 0) {
    throw InvalidSpecError("fit_base: collocation and holdout sizes must be positive");
  }
  const Matrix candidates = candidate_grid(params, spec.atom_budget);
  if (candidates.cols() == 0) throw InvalidSpecError("fit_base: parameter grid has no admissible atoms");

  const Matrix train = uniform_sample(domain, spec.collocation_points, derive_seed(spec.seed, 0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(train.cols()));
  Vector y(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) y(j) = shift.apply(target, train.col(j)) * scale;
  Matrix z = candidates.topRows(n).transpose() * train;
  z.colwise() += candidates.row(n).transpose();
  const Matrix phi = z.unaryExpr([&](double u) { return activation(u); }).transpose() * scale;

  const Vector theta = l1_constrained_least_squares(phi, y, spec.coefficient_budget, spec.max_iterations);

  // Keep only atoms that carry weight.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta(i) != 0.0) keep.push_back(i);
  }
  Vector kept_theta(static_cast<Eigen::Index>(keep.size()));
  Matrix kept_gammas(params.dimension(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    kept_theta(static_cast<Eigen::Index>(k)) = theta(keep[k]);
    kept_gammas.col(static_cast<Eigen::Index>(k)) = candidates.col(keep[k]);
  }
  FitResult result{BaseApproximation(activation, kept_theta, kept_gammas, params)};
  result.training_rms = (phi * theta - y).norm();

  DomainQuadrature holdout;
  holdout.points = uniform_sample(domain, spec.holdout_points, derive_seed(spec.seed, 1));
  holdout.weights = Vector::Constant(holdout.points.cols(), 1.0 / holdout.points.cols());
  holdout.method = IntegrationMethod::monte_carlo;
  Vector resid = evaluate_many(result.net, holdout.points);
  for (Eigen::Index j = 0; j < resid.size(); ++j) resid(j) = shift.apply(target, holdout.points.col(j)) - resid(j);
  const NormEstimate eps = l2_norm_of_values(resid, holdout);
  result.epsilon_n = eps.value;
  result.epsilon_std_error = eps.std_error;
  return result;
}

BaseApproximation maurey_subsample(const BaseApproximation& dense, double budget, int count, std::uint64_t seed) {
  if (count <= 0) throw InvalidSpecError("maurey_subsample: N must be positive");
  if (!(budget > 0.0) || dense.atom_count() == 0) {
    throw InvalidInputError("maurey_subsample: need a positive budget and at least one atom");
  }
  const double total = dense.coefficient_size();
  if (std::abs(total - budget) > 1e-9 * std::max(1.0, budget)) {
    throw InvalidInputError("maurey_subsample: weights are not a convex combination at the stated budget");
  }
  std::vector<double> probs(static_cast<std::size_t>(dense.atom_count()));
  for (Eigen::Index i = 0; i < dense.atom_count(); ++i) probs[i] = std::abs(dense.theta()(i)) / total;
  std::discrete_distribution<Eigen::Index> pick(probs.begin(), probs.end());
  Rng rng = make_rng(seed);

  Vector theta(count);
  Matrix gammas(dense.gammas().rows(), count);
  const double weight = budget / count;
  for (int j = 0; j < count; ++j) {
    const Eigen::Index i = pick(rng);
    theta(j) = dense.theta()(i) < 0.0 ? -weight : weight;
    gammas.col(j) = dense.gammas().col(i);
  }
  return BaseApproximation(dense.activation(), std::move(theta), std::move(gammas), dense.parameter_set());
}

}  // namespace mollify
