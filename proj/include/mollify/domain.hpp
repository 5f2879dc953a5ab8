#pragma once

#include <cstddef>
#include <cstdint>

#include "mollify/types.hpp"

namespace mollify {

enum class DomainKind { box, ball };

/// Input region B (or K): an axis-aligned box or a Euclidean ball. Always
/// full-dimensional and containing the origin.
class Domain {
 public:
  static Domain box(Vector center, Vector half_widths);
  static Domain ball(Vector center, double radius);

  DomainKind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(center_.size()); }
  const Vector& center() const { return center_; }
  /// Box half-widths; for a ball, the half-widths of its bounding box.
  const Vector& half_widths() const { return half_widths_; }
  double radius() const { return radius_; }

  bool contains(const PointRef& x, double tol = 0.0) const;
  Vector lower() const { return center_ - half_widths_; }
  Vector upper() const { return center_ + half_widths_; }

 private:
  Domain(DomainKind kind, Vector center, Vector half_widths, double radius);

  DomainKind kind_;
  Vector center_;
  Vector half_widths_;
  double radius_ = 0.0;
};

struct DomainGeometry {
  double volume = 0.0;
  double diameter = 0.0;
  double inscribed_radius = 0.0;  // largest ball at the centroid inside the domain
  double enclosing_radius = 0.0;  // smallest rho with domain inside B_0(rho)
  Vector centroid;
};

DomainGeometry geometry_summary(const Domain& domain);

/// `count` iid uniform points, one per column.
Matrix uniform_sample(const Domain& domain, std::size_t count, std::uint64_t seed);

enum class IntegrationMethod { tensor_grid, monte_carlo };

const char* to_string(IntegrationMethod method);

/// How integrals against the uniform probability measure on a domain are computed.
/// Boxes (and 1-D balls) up to `max_tensor_dimension` use a tensor Gauss-Legendre
/// rule; everything else uses seeded Monte Carlo.
struct QuadratureSpec {
  int nodes_per_axis = 64;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
  int max_tensor_dimension = 3;
};

/// Nodes (columns) and probability weights summing to one.
struct DomainQuadrature {
  Matrix points;
  Vector weights;
  IntegrationMethod method = IntegrationMethod::tensor_grid;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

DomainQuadrature domain_quadrature(const Domain& domain, const QuadratureSpec& spec = {});

struct NormEstimate {
  double value = 0.0;
  IntegrationMethod method = IntegrationMethod::tensor_grid;
  std::size_t points = 0;
  double std_error = 0.0;  // Monte Carlo only
};

/// L2 norm of tabulated values at the quadrature nodes. Monte Carlo standard
/// error via the delta method on the mean square.
NormEstimate l2_norm_of_values(const Vector& values, const DomainQuadrature& quad);

/// E_B = || ||[x; 1]||_2 ||_{L2(B)}.
NormEstimate euclidean_norm_factor(const Domain& domain, const QuadratureSpec& spec = {});

}  // namespace mollify
