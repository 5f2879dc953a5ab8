#include "mollify/mollifier.hpp"

#include <cmath>
#include <numbers>

#include "mollify/error.hpp"
#include "mollify/quadrature.hpp"
#include "mollify/rng.hpp"

namespace mollify {
namespace {

// Rules for int eta bump(t) g(t) dt in the variable t = tanh(s). The integrand becomes
// eta exp(-cosh^2 s) sech^2 s g(tanh s), negligible for |s| > kHalfRange, so the
// trapezoid rule converges exponentially for smooth g.
constexpr double kHalfRange = 2.6;

struct BumpRule {
  Vector nodes;
  Vector weights;
};

double bump_weight(double s) {
  const double c = std::cosh(s);
  return std::exp(-c * c) / (c * c);
}

BumpRule bump_rule(int m) {
  BumpRule r{Vector(m), Vector(m)};
  if (m == 1) {
    r.nodes(0) = 0.0;
    r.weights(0) = 1.0;
    return r;
  }
  const double h = 2.0 * kHalfRange / (m - 1);
  for (int k = 0; k < m; ++k) {
    const double s = -kHalfRange + k * h;
    r.nodes(k) = std::tanh(s);
    r.weights(k) = h * bump_weight(s);
  }
  // Exact normalization makes the rule exact for affine g by symmetry.
  r.weights /= r.weights.sum();
  return r;
}

double smoothed_tensor(const Activation& act, double z, const PointRef& v, int m) {
  const Eigen::Index d = v.size();
  Eigen::Index split = 0;
  v.cwiseAbs().maxCoeff(&split);
  const double vs = v(split);
  const BumpRule full = bump_rule(m);
  const GaussLegendreRule& base = gauss_legendre(m);
  const double eta = eta_constant();

  // Inner integral along the split axis given the partial sum c of the other axes. A kink
  // inside the bulk of the weight splits the s-range into two Gauss-Legendre panels.
  auto inner = [&](double c) {
    auto panel = [&](double a, double b) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (b + a);
      double sum = 0.0;
      for (int i = 0; i < m; ++i) {
        const double s = mid + half * base.nodes(i);
        sum += base.weights(i) * bump_weight(s) * act(c + vs * std::tanh(s));
      }
      return sum * half * eta;
    };
    const double t0 = vs != 0.0 ? -c / vs : 2.0;
    if (t0 > -1.0 && t0 < 1.0) {
      const double s0 = std::atanh(t0);
      if (std::abs(s0) < kHalfRange) return panel(-kHalfRange, s0) + panel(s0, kHalfRange);
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += full.weights(i) * act(c + vs * full.nodes(i));
    return sum;
  };

  if (d == 1) return inner(z);
  std::vector<Eigen::Index> others;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k != split) others.push_back(k);
  }
  const std::size_t outer_dim = others.size();
  std::vector<int> idx(outer_dim, 0);
  long total = 1;
  for (std::size_t k = 0; k < outer_dim; ++k) total *= m;
  double sum = 0.0;
  for (long c = 0; c < total; ++c) {
    double w = 1.0;
    double shift = z;
    for (std::size_t k = 0; k < outer_dim; ++k) {
      w *= full.weights(idx[k]);
      shift += v(others[k]) * full.nodes(idx[k]);
    }
    if (w != 0.0) sum += w * inner(shift);
    for (int k = static_cast<int>(outer_dim) - 1; k >= 0; --k) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
  return sum;
}

}  // namespace

double bump(double y) {
  const double s = 1.0 - y * y;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double eta_constant() {
  static const double eta = 1.0 / adaptive_integrate(bump, -1.0, 1.0, 1e-14);
  return eta;
}

MollificationConfig::MollificationConfig(double lambda, int dimension)
    : MollificationConfig(lambda, dimension, eta_constant()) {}

MollificationConfig::MollificationConfig(double lambda, int dimension, double eta)
    : lambda_(lambda), eta_(eta), dimension_(dimension) {
  if (!std::isfinite(lambda) || lambda <= 0.0) throw InvalidSpecError("mollification factor lambda must be positive");
  if (dimension < 1) throw InvalidSpecError("mollification dimension must be positive");
  if (std::abs(eta - eta_constant()) > 1e-9 * eta_constant()) {
    throw InvalidSpecError("mollification eta does not match the bump normalizer");
  }
}

double mollified_delta(const MollificationConfig& cfg, const PointRef& offset) {
  require_dimension(cfg.dimension(), offset.size(), "mollified_delta");
  const double lam = cfg.lambda();
  double value = std::pow(cfg.eta() * lam, cfg.dimension());
  for (Eigen::Index k = 0; k < offset.size(); ++k) {
    const double u = lam * offset(k);
    if (std::abs(u) >= 1.0) return 0.0;
    value *= std::exp(-1.0 / (1.0 - u * u));
  }
  return value;
}

ExpandedParameterSet expand_parameter_set(const ParameterSet& base, double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) throw InvalidSpecError("expand_parameter_set: lambda must be positive");
  const double grow = 1.0 / lambda;
  ParameterSet box(base.lower().array() - grow, base.upper().array() + grow);
  const Vector width = box.upper() - box.lower();
  const Vector far = box.lower().cwiseAbs().cwiseMax(box.upper().cwiseAbs());
  return ExpandedParameterSet{base, lambda, box, width.norm(), far.norm(), width.prod()};
}

double coefficient_function(const BaseApproximation& net, const MollificationConfig& cfg, const PointRef& gamma) {
  require_dimension(cfg.dimension(), gamma.size(), "coefficient_function");
  require_dimension(net.parameter_set().dimension(), gamma.size(), "coefficient_function");
  const ExpandedParameterSet expanded = expand_parameter_set(net.parameter_set(), cfg.lambda());
  if (!expanded.box.contains(gamma)) throw OutOfSetError("coefficient_function: gamma outside expanded set");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < net.atom_count(); ++i) {
    sum += net.theta()(i) * mollified_delta(cfg, gamma - net.gammas().col(i));
  }
  return sum;
}

double g_lambda_max(const BaseApproximation& net, const MollificationConfig& cfg) {
  return net.coefficient_size() * std::pow(cfg.eta() * cfg.lambda() / std::numbers::e, cfg.dimension());
}

double smoothed_activation(const Activation& act, double z, const PointRef& v, int nodes_per_axis) {
  if (nodes_per_axis <= 0) throw InvalidSpecError("smoothed_activation: node count must be positive");
  return smoothed_tensor(act, z, v, nodes_per_axis);
}

MollifiedValue smoothed_activation_mc(const Activation& act, double z, const PointRef& v, std::size_t points,
                                      std::uint64_t seed) {
  if (points == 0) throw InvalidSpecError("smoothed_activation_mc: point budget must be positive");
  const Eigen::Index d = v.size();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double volume_weight = std::pow(2.0 * eta_constant(), static_cast<double>(d));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    double arg = z;
    double density = volume_weight;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double t = unit(rng);
      arg += v(k) * t;
      density *= bump(t);
    }
    const double sample = density * act(arg);
    const double delta = sample - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (sample - mean);
  }
  const double var = points > 1 ? m2 / static_cast<double>(points - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(points))};
}

MollifiedValue mollified_evaluate(const BaseApproximation& net, const MollificationConfig& cfg, const PointRef& x,
                                  const MollifierQuadrature& quad) {
  const int n = net.input_dimension();
  require_dimension(n, x.size(), "mollified_evaluate");
  require_dimension(n + 1, cfg.dimension(), "mollified_evaluate config");
  if (quad.nodes_per_axis <= 0 || quad.mc_points == 0) {
    throw InvalidSpecError("mollified_evaluate: quadrature budget must be positive");
  }
  const Vector v = augment(x) / cfg.lambda();
  const bool tensor = cfg.dimension() <= quad.max_tensor_dimension;
  MollifiedValue out;
  for (Eigen::Index i = 0; i < net.atom_count(); ++i) {
    const auto g = net.gammas().col(i);
    const double z = g.head(n).dot(x) + g(n);
    const double theta = net.theta()(i);
    if (tensor) {
      const double coarse = smoothed_tensor(net.activation(), z, v, quad.nodes_per_axis);
      out.value += theta * coarse;
      if (quad.estimate_error) {
        const double fine = smoothed_tensor(net.activation(), z, v, 2 * quad.nodes_per_axis);
        out.error_estimate += std::abs(theta) * std::abs(fine - coarse);
      }
    } else {
      const MollifiedValue mc =
          smoothed_activation_mc(net.activation(), z, v, quad.mc_points, derive_seed(quad.seed, static_cast<std::uint64_t>(i)));
      out.value += theta * mc.value;
      out.error_estimate += std::abs(theta) * mc.error_estimate;
    }
  }
  return out;
}

MollifiedValues mollified_evaluate_many(const BaseApproximation& net, const MollificationConfig& cfg,
                                        const Matrix& points, const MollifierQuadrature& quad) {
  require_dimension(net.input_dimension(), points.rows(), "mollified_evaluate_many");
  MollifiedValues out{Vector(points.cols()), 0.0};
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const MollifiedValue v = mollified_evaluate(net, cfg, points.col(j), quad);
    out.values(j) = v.value;
    out.max_error_estimate = std::max(out.max_error_estimate, v.error_estimate);
  }
  return out;
}

}  // namespace mollify
