#include "mollify/domain.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mollify/error.hpp"
#include "mollify/quadrature.hpp"
#include "mollify/rng.hpp"

namespace mollify {

Domain::Domain(DomainKind kind, Vector center, Vector half_widths, double radius)
    : kind_(kind), center_(std::move(center)), half_widths_(std::move(half_widths)), radius_(radius) {}

Domain Domain::box(Vector center, Vector half_widths) {
  if (center.size() == 0) throw InvalidDomainError("box: dimension must be positive");
  require_dimension(center.size(), half_widths.size(), "box half-widths");
  if (!center.allFinite() || !half_widths.allFinite() || (half_widths.array() <= 0.0).any()) {
    throw InvalidDomainError("box: half-widths must be finite and strictly positive");
  }
  if ((center.array().abs() > half_widths.array()).any()) {
    throw InvalidDomainError("box: domain must contain the origin");
  }
  return Domain(DomainKind::box, std::move(center), std::move(half_widths), 0.0);
}

Domain Domain::ball(Vector center, double radius) {
  if (center.size() == 0) throw InvalidDomainError("ball: dimension must be positive");
  if (!center.allFinite() || !std::isfinite(radius) || radius <= 0.0) {
    throw InvalidDomainError("ball: radius must be finite and strictly positive");
  }
  if (center.norm() > radius) throw InvalidDomainError("ball: domain must contain the origin");
  Vector half = Vector::Constant(center.size(), radius);
  return Domain(DomainKind::ball, std::move(center), std::move(half), radius);
}

bool Domain::contains(const PointRef& x, double tol) const {
  require_dimension(dimension(), x.size(), "Domain::contains");
  if (kind_ == DomainKind::box) {
    return ((x - center_).array().abs() <= half_widths_.array() + tol).all();
  }
  return (x - center_).norm() <= radius_ + tol;
}

DomainGeometry geometry_summary(const Domain& domain) {
  const int n = domain.dimension();
  DomainGeometry g;
  g.centroid = domain.center();
  if (domain.kind() == DomainKind::box) {
    const Vector& h = domain.half_widths();
    g.volume = (2.0 * h.array()).prod();
    g.diameter = 2.0 * h.norm();
    g.inscribed_radius = h.minCoeff();
    g.enclosing_radius = (domain.center().array().abs() + h.array()).matrix().norm();
  } else {
    const double a = domain.radius();
    g.volume = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(a, n);
    g.diameter = 2.0 * a;
    g.inscribed_radius = a;
    g.enclosing_radius = domain.center().norm() + a;
  }
  return g;
}

Matrix uniform_sample(const Domain& domain, std::size_t count, std::uint64_t seed) {
  const int n = domain.dimension();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(n, static_cast<Eigen::Index>(count));
  if (domain.kind() == DomainKind::box) {
    const Vector lo = domain.lower();
    const Vector width = 2.0 * domain.half_widths();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      for (int k = 0; k < n; ++k) out(k, j) = lo(k) + width(k) * unit(rng);
    }
    return out;
  }
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    Vector dir(n);
    double norm = 0.0;
    do {
      for (int k = 0; k < n; ++k) dir(k) = normal(rng);
      norm = dir.norm();
    } while (norm == 0.0);
    const double r = domain.radius() * std::pow(unit(rng), 1.0 / n);
    out.col(j) = domain.center() + (r / norm) * dir;
  }
  return out;
}

const char* to_string(IntegrationMethod method) {
  return method == IntegrationMethod::tensor_grid ? "tensor-grid" : "monte-carlo";
}

DomainQuadrature domain_quadrature(const Domain& domain, const QuadratureSpec& spec) {
  const int n = domain.dimension();
  const bool interval = n == 1;
  const bool tensor = (domain.kind() == DomainKind::box || interval) && n <= spec.max_tensor_dimension;
  DomainQuadrature quad;
  if (tensor) {
    if (spec.nodes_per_axis <= 0) throw InvalidSpecError("quadrature: nodes_per_axis must be positive");
    const auto& rule = gauss_legendre(spec.nodes_per_axis);
    const int m = spec.nodes_per_axis;
    Eigen::Index total = 1;
    for (int k = 0; k < n; ++k) total *= m;
    quad.points.resize(n, total);
    quad.weights.resize(total);
    quad.method = IntegrationMethod::tensor_grid;
    std::vector<int> idx(n, 0);
    for (Eigen::Index j = 0; j < total; ++j) {
      double w = 1.0;
      for (int k = 0; k < n; ++k) {
        quad.points(k, j) = domain.center()(k) + domain.half_widths()(k) * rule.nodes(idx[k]);
        w *= 0.5 * rule.weights(idx[k]);
      }
      quad.weights(j) = w;
      for (int k = n - 1; k >= 0; --k) {
        if (++idx[k] < m) break;
        idx[k] = 0;
      }
    }
    return quad;
  }
  if (spec.mc_samples == 0) throw InvalidSpecError("quadrature: mc_samples must be positive");
  quad.points = uniform_sample(domain, spec.mc_samples, spec.seed);
  quad.weights = Vector::Constant(static_cast<Eigen::Index>(spec.mc_samples), 1.0 / spec.mc_samples);
  quad.method = IntegrationMethod::monte_carlo;
  return quad;
}

NormEstimate l2_norm_of_values(const Vector& values, const DomainQuadrature& quad) {
  require_dimension(quad.weights.size(), values.size(), "l2_norm_of_values");
  NormEstimate est;
  est.method = quad.method;
  est.points = quad.size();
  const Vector sq = values.array().square();
  const double mean_sq = std::max(0.0, quad.weights.dot(sq));
  est.value = std::sqrt(mean_sq);
  if (quad.method == IntegrationMethod::monte_carlo && est.points > 1 && est.value > 0.0) {
    const double m = static_cast<double>(est.points);
    const double var = (sq.array() - mean_sq).square().sum() / (m - 1.0);
    est.std_error = std::sqrt(var / m) / (2.0 * est.value);
  }
  return est;
}

NormEstimate euclidean_norm_factor(const Domain& domain, const QuadratureSpec& spec) {
  const DomainQuadrature quad = domain_quadrature(domain, spec);
  const Vector values = (quad.points.colwise().squaredNorm().array() + 1.0).sqrt().transpose();
  return l2_norm_of_values(values, quad);
}

}  // namespace mollify
