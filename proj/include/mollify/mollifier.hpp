#pragma once

#include <cstddef>
#include <cstdint>

#include "mollify/ridge_network.hpp"
#include "mollify/types.hpp"

namespace mollify {

/// eta = 1 / int_{-1}^{1} exp(-1 / (1 - y^2)) dy, computed once by adaptive quadrature.
double eta_constant();

/// The 1-D bump exp(-1 / (1 - y^2)) on (-1, 1), zero elsewhere.
double bump(double y);

/// Mollification factor lambda and normalizer eta for a parameter space of
/// dimension n+1.
class MollificationConfig {
 public:
  MollificationConfig(double lambda, int dimension);
  /// Rejects an eta that does not match eta_constant() within 1e-9.
  MollificationConfig(double lambda, int dimension, double eta);

  double lambda() const { return lambda_; }
  double eta() const { return eta_; }
  int dimension() const { return dimension_; }

 private:
  double lambda_;
  double eta_;
  int dimension_;
};

/// (eta lambda)^{n+1} prod_k exp(-1 / (1 - lambda^2 u_k^2)) inside (-1/lambda, 1/lambda)^{n+1}.
double mollified_delta(const MollificationConfig& cfg, const PointRef& offset);

/// Parameter box grown by 1/lambda on every side.
struct ExpandedParameterSet {
  ParameterSet base;
  double lambda;
  ParameterSet box;
  double diameter;  // D_{Upsilon lambda}: diagonal of the expanded box
  double max_norm;  // gamma_{lambda max}: largest vertex norm
  double volume;
};

ExpandedParameterSet expand_parameter_set(const ParameterSet& base, double lambda);

/// g_lambda(gamma) = sum_i theta_i delta_lambda(gamma - gamma_i). Throws OutOfSetError
/// for gamma outside the expanded set.
double coefficient_function(const BaseApproximation& net, const MollificationConfig& cfg, const PointRef& gamma);

/// S_N (eta lambda / e)^{n+1}
double g_lambda_max(const BaseApproximation& net, const MollificationConfig& cfg);

struct MollifierQuadrature {
  int nodes_per_axis = 24;
  int max_tensor_dimension = 4;
  std::size_t mc_points = 100'000;
  std::uint64_t seed = 0;
  bool estimate_error = true;  // rerun with twice the nodes and report the difference
};

struct MollifiedValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// E[sigma(z + v^T t)] for t distributed with the normalized product bump on (-1,1)^d.
/// Tensor rule: the axis with the largest |v_k| is split at the activation kink so each
/// 1-D panel integrand is smooth.
double smoothed_activation(const Activation& act, double z, const PointRef& v, int nodes_per_axis);

/// Monte Carlo version of smoothed_activation for high dimensions; returns value and
/// standard error.
MollifiedValue smoothed_activation_mc(const Activation& act, double z, const PointRef& v, std::size_t points,
                                      std::uint64_t seed);

/// f_hat_{lambda,N}(x): per-atom integration over each atom's own support cube.
MollifiedValue mollified_evaluate(const BaseApproximation& net, const MollificationConfig& cfg, const PointRef& x,
                                  const MollifierQuadrature& quad = {});

struct MollifiedValues {
  Vector values;
  double max_error_estimate = 0.0;
};

MollifiedValues mollified_evaluate_many(const BaseApproximation& net, const MollificationConfig& cfg,
                                        const Matrix& points, const MollifierQuadrature& quad = {});

}  // namespace mollify
