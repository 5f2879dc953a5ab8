#pragma once

#include <cstdint>
#include <string>

#include "mollify/mollifier.hpp"
#include "mollify/ridge_network.hpp"

namespace mollify {

enum class DensityKind { uniform, grid_tabulated };

/// Sampling density P_lambda over the expanded parameter set. Either uniform, or
/// piecewise constant on a regular grid of cells with a declared positive lower bound.
class SamplingDensity {
 public:
  static SamplingDensity uniform(const ExpandedParameterSet& support);
  /// `cells_per_axis` cells per axis, `cell_values` in lexicographic cell order
  /// (last axis fastest). Values are normalized to integrate to one; `p_min` must not
  /// exceed the smallest normalized value.
  static SamplingDensity grid(const ExpandedParameterSet& support, std::vector<int> cells_per_axis,
                              Vector cell_values, double p_min);

  DensityKind kind() const { return kind_; }
  const ExpandedParameterSet& support() const { return support_; }
  double p_min() const { return p_min_; }
  std::string id() const;

  /// Density value; zero outside the support.
  double operator()(const PointRef& gamma) const;
  /// R iid draws, one per column.
  Matrix sample(int count, std::uint64_t seed) const;

 private:
  explicit SamplingDensity(ExpandedParameterSet support);
  Eigen::Index cell_of(const PointRef& gamma) const;

  DensityKind kind_ = DensityKind::uniform;
  ExpandedParameterSet support_;
  double p_min_ = 0.0;
  std::vector<int> cells_;
  Vector values_;  // normalized density per cell
};

inline Matrix sample_parameters(const SamplingDensity& density, int count, std::uint64_t seed) {
  return density.sample(count, seed);
}

struct Provenance {
  std::uint64_t seed = 0;
  std::string density_id;
  std::string source_net_id;
  double lambda = 0.0;
};

/// F_hat_R(x) = sum_j vartheta_j sigma(gamma_j^T X)
class RandomApproximation {
 public:
  RandomApproximation(Activation activation, Vector coefficients, Matrix gammas, Provenance provenance = {});

  const Activation& activation() const { return activation_; }
  const Vector& coefficients() const { return coefficients_; }
  const Matrix& gammas() const { return gammas_; }
  const Provenance& provenance() const { return provenance_; }
  int input_dimension() const { return static_cast<int>(gammas_.rows()) - 1; }
  Eigen::Index size() const { return coefficients_.size(); }

 private:
  Activation activation_;
  Vector coefficients_;
  Matrix gammas_;
  Provenance provenance_;
};

double evaluate(const RandomApproximation& net, const PointRef& x);
Vector evaluate_many(const RandomApproximation& net, const Matrix& points);

/// vartheta_j = g_lambda(gamma_j) / (P_lambda(gamma_j) R). Throws OutOfSetError for a
/// sample outside the density support.
Vector canonical_coefficients(const BaseApproximation& net, const MollificationConfig& cfg,
                              const SamplingDensity& density, const Matrix& samples);

/// g_lambda_max / (P_lambda_min R)
double coefficient_bound(const BaseApproximation& net, const MollificationConfig& cfg,
                         const SamplingDensity& density, int count);

/// Samples R parameters with `seed` and attaches canonical coefficients.
RandomApproximation build_random_approximation(const BaseApproximation& net, const MollificationConfig& cfg,
                                               const SamplingDensity& density, int count, std::uint64_t seed,
                                               std::string source_net_id = "");

}  // namespace mollify
