#include "mollify/error_analysis.hpp"

#include <cmath>
#include <numbers>

#include "mollify/error.hpp"
#include "mollify/rng.hpp"

namespace mollify {
namespace {

double sqrt_half_log_inv(double nu) { return std::sqrt(0.5 * std::log(1.0 / nu)); }

// Visits every point of a tensor grid with `k` points per axis on [lo, hi].
template <typename Visit>
void for_each_grid_point(const Vector& lo, const Vector& hi, int k, Visit&& visit) {
  const Eigen::Index n = lo.size();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vector x(n);
  long total = 1;
  for (Eigen::Index a = 0; a < n; ++a) total *= k;
  for (long c = 0; c < total; ++c) {
    for (Eigen::Index a = 0; a < n; ++a) {
      x(a) = k == 1 ? 0.5 * (lo(a) + hi(a)) : lo(a) + (hi(a) - lo(a)) * idx[a] / (k - 1);
    }
    visit(x);
    for (Eigen::Index a = n - 1; a >= 0; --a) {
      if (++idx[a] < k) break;
      idx[a] = 0;
    }
  }
}

}  // namespace

const char* to_string(BoundCase c) { return c == BoundCase::bounded ? "bounded" : "lipschitz"; }

NormEstimate l2_norm(const ScalarField& f, const Domain& domain, const QuadratureSpec& spec) {
  const DomainQuadrature quad = domain_quadrature(domain, spec);
  Vector values(static_cast<Eigen::Index>(quad.size()));
  for (Eigen::Index j = 0; j < values.size(); ++j) values(j) = f(quad.points.col(j));
  return l2_norm_of_values(values, quad);
}

LinfEstimate linf_norm(const ScalarField& f, const Domain& domain, const LinfSpec& spec) {
  if (spec.grid_points == 0) throw InvalidSpecError("linf_norm: grid budget must be positive");
  const int n = domain.dimension();
  const int k = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(spec.grid_points), 1.0 / n) + 1e-9)));
  LinfEstimate est;
  est.argmax = domain.center();
  double best = -1.0;
  auto consider = [&](const Vector& x) {
    if (!domain.contains(x, 1e-12)) return;
    ++est.points;
    const double v = std::abs(f(x));
    if (v > best) {
      best = v;
      est.argmax = x;
    }
  };
  for_each_grid_point(domain.lower(), domain.upper(), k, consider);
  if (best < 0.0) consider(domain.center());
  est.coarse_value = best;

  Vector half = (domain.upper() - domain.lower()) / (k - 1);
  const int m = std::max(3, spec.refinement_points_per_axis);
  for (int round = 0; round < spec.refinement_rounds; ++round) {
    const Vector lo = (est.argmax - half).cwiseMax(domain.lower());
    const Vector hi = (est.argmax + half).cwiseMin(domain.upper());
    const Vector center = est.argmax;
    for_each_grid_point(lo, hi, m, consider);
    consider(center);
    half *= 2.0 / (m - 1);
  }
  est.value = best;
  return est;
}

Theorem1Bound theorem1_bound(const BaseApproximation& net, const MollificationConfig& cfg, double e_b) {
  const Activation& act = net.activation();
  const double s = net.coefficient_size();
  std::optional<Theorem1Bound> out;
  if (act.bounded_constant()) out = Theorem1Bound{s * *act.bounded_constant(), BoundCase::bounded};
  if (act.lipschitz_constant()) {
    const double v = s * *act.lipschitz_constant() * std::sqrt(static_cast<double>(cfg.dimension())) * e_b / cfg.lambda();
    if (!out || v < out->value) out = Theorem1Bound{v, BoundCase::lipschitz};
  }
  if (!out) throw NotApplicableError("theorem1_bound: activation has no growth constant");
  return *out;
}

Theorem1Bound theorem1_bound(const BaseApproximation& net, const MollificationConfig& cfg, const Domain& domain) {
  return theorem1_bound(net, cfg, euclidean_norm_factor(domain).value);
}

BoundReport theorem2_bound(const BaseApproximation& net, const MollificationConfig& cfg,
                           const SamplingDensity& density, int r, double nu, double epsilon_n, double e_b,
                           std::optional<BoundCase> which) {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidSpecError("theorem2_bound: nu must lie in (0, 1)");
  if (r < 1) throw InvalidSpecError("theorem2_bound: R must be at least 1");
  const Activation& act = net.activation();
  const int d = cfg.dimension();
  const ExpandedParameterSet& expanded = density.support();

  auto report_for = [&](BoundCase c) {
    BoundReport rep;
    rep.which = c;
    rep.epsilon_n = epsilon_n;
    rep.coefficient_size = net.coefficient_size();
    rep.lambda = cfg.lambda();
    rep.n = d - 1;
    rep.r = r;
    rep.nu = nu;
    rep.e_b = e_b;
    rep.expanded_diameter = expanded.diameter;
    rep.gamma_max = expanded.max_norm;
    rep.p_min = density.p_min();
    rep.sigma_at_zero = act.sigma_at_zero();
    rep.eta = cfg.eta();

    const double prefactor = std::pow(cfg.eta() / std::numbers::e, d) / rep.p_min;
    const double dev = sqrt_half_log_inv(nu);
    const double s0 = std::abs(rep.sigma_at_zero);
    double core_expectation = 0.0;  // B / c_sigma
    double core_difference = 0.0;   // A / c_sigma
    if (c == BoundCase::bounded) {
      rep.sigma_constant = *act.bounded_constant();
      const double ratio = s0 / rep.sigma_constant;
      core_expectation = 1.0 + ratio;
      core_difference = 3.0 + 2.0 * ratio;
      rep.mollification_term = rep.coefficient_size * rep.sigma_constant;
    } else {
      rep.sigma_constant = *act.lipschitz_constant();
      const double ratio = s0 / rep.sigma_constant;
      core_expectation = rep.gamma_max * e_b + ratio;
      core_difference = (rep.expanded_diameter + 2.0 * rep.gamma_max) * e_b + 2.0 * ratio;
      rep.mollification_term =
          rep.coefficient_size * rep.sigma_constant * std::sqrt(static_cast<double>(d)) * e_b / rep.lambda;
    }
    rep.k_coefficient = prefactor * (core_expectation + core_difference * dev);
    const double scale = rep.coefficient_size * rep.sigma_constant * std::pow(rep.lambda, d) / std::sqrt(static_cast<double>(r));
    rep.concentration_term = scale * rep.k_coefficient;
    rep.expectation_bound = scale * prefactor * core_expectation;
    rep.total = rep.epsilon_n + rep.mollification_term + rep.concentration_term;
    return rep;
  };

  const bool has_d = act.bounded_constant().has_value();
  const bool has_l = act.lipschitz_constant().has_value();
  if (which) {
    if ((*which == BoundCase::bounded && !has_d) || (*which == BoundCase::lipschitz && !has_l)) {
      throw NotApplicableError("theorem2_bound: activation lacks the requested constant");
    }
    return report_for(*which);
  }
  if (has_d && has_l) {
    BoundReport a = report_for(BoundCase::bounded);
    BoundReport b = report_for(BoundCase::lipschitz);
    return b.total < a.total ? b : a;
  }
  if (has_d) return report_for(BoundCase::bounded);
  if (has_l) return report_for(BoundCase::lipschitz);
  throw NotApplicableError("theorem2_bound: activation has no growth constant");
}

BoundReport theorem2_bound(const BaseApproximation& net, const MollificationConfig& cfg, const Domain& domain,
                           const SamplingDensity& density, int r, double nu, double epsilon_n,
                           std::optional<BoundCase> which) {
  return theorem2_bound(net, cfg, density, r, nu, epsilon_n, euclidean_norm_factor(domain).value, which);
}

LinfBoundReport linf_extension_bound(double epsilon_n, const DomainGeometry& geom, double lipschitz, double a_norm,
                                     const NetConstant& net_constant, int n) {
  if (!(geom.inscribed_radius > 0.0) || !(geom.diameter > 0.0)) {
    throw InvalidDomainError("linf_extension_bound: need r > 0 and D > 0");
  }
  if (n < 1) throw InvalidSpecError("linf_extension_bound: n must be positive");
  if (epsilon_n < 0.0) throw InvalidSpecError("linf_extension_bound: epsilon_N must be nonnegative");
  LinfBoundReport rep;
  rep.which = net_constant.kind;
  rep.lipschitz = lipschitz;
  rep.a_norm = a_norm;
  rep.net_constant = net_constant.value;
  rep.epsilon_n = epsilon_n;
  rep.n = n;
  rep.diameter = geom.diameter;
  rep.inscribed_radius = geom.inscribed_radius;

  const double r = geom.inscribed_radius;
  const double D = geom.diameter;
  const double ratio = r / (D * (r + std::sqrt(r * r + D * D)));
  rep.geometric_factor = std::pow(ratio, -static_cast<double>(n) / (n + 2));
  const double exponent = 1.0 / (n + 2);
  if (net_constant.kind == BoundCase::bounded) {
    rep.k_eps = std::pow(std::pow(lipschitz + a_norm, n) * epsilon_n * epsilon_n, exponent) + net_constant.value;
  } else {
    rep.k_eps = std::pow(std::pow(lipschitz + a_norm + net_constant.value, n) * epsilon_n * epsilon_n, exponent);
  }
  rep.total = 2.0 * rep.geometric_factor * rep.k_eps;
  return rep;
}

ConcentrationReport concentration_experiment(const BaseApproximation& net, const MollificationConfig& cfg,
                                             const Domain& domain, const SamplingDensity& density, int r, double nu,
                                             std::size_t trials, std::uint64_t master_seed,
                                             const QuadratureSpec& norm_spec,
                                             const MollifierQuadrature& mollifier_quad) {
  if (trials < 100) throw InvalidSpecError("concentration_experiment: need at least 100 trials");
  const DomainQuadrature quad = domain_quadrature(domain, norm_spec);
  const double e_b = euclidean_norm_factor(domain, norm_spec).value;

  ConcentrationReport rep;
  rep.bound = theorem2_bound(net, cfg, density, r, nu, 0.0, e_b);
  rep.deviation_level = rep.bound.concentration_term;
  const MollifiedValues target = mollified_evaluate_many(net, cfg, quad.points, mollifier_quad);
  rep.mollifier_error_estimate = target.max_error_estimate;
  const double coeff_bound = coefficient_bound(net, cfg, density, r);

  std::size_t violations = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  rep.trials.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(master_seed, t);
    const RandomApproximation approx = build_random_approximation(net, cfg, density, r, seed);
    const Vector diff = target.values - evaluate_many(approx, quad.points);
    ConcentrationTrial row;
    row.trial = t;
    row.seed = seed;
    row.h_b = l2_norm_of_values(diff, quad).value;
    row.bound_level = rep.deviation_level;
    row.violated = row.h_b > row.bound_level;
    row.max_abs_coeff = approx.size() > 0 ? approx.coefficients().cwiseAbs().maxCoeff() : 0.0;
    row.coeff_bound = coeff_bound;
    if (row.max_abs_coeff > coeff_bound) ++rep.coefficient_violations;
    if (row.violated) ++violations;
    sum += row.h_b;
    sum_sq += row.h_b * row.h_b;
    rep.trials.push_back(row);
  }
  const double m = static_cast<double>(trials);
  rep.mean_h_b = sum / m;
  rep.mean_h_b_std_error = std::sqrt(std::max(0.0, (sum_sq / m - rep.mean_h_b * rep.mean_h_b) / (m - 1.0)));
  rep.violation_fraction = static_cast<double>(violations) / m;
  rep.allowed_fraction = nu + 3.0 * std::sqrt(nu * (1.0 - nu) / m);
  return rep;
}

}  // namespace mollify
