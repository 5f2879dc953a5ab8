#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace mollify {

enum class ActivationKind { scaled_step, relu, custom };

/// Scalar activation sigma together with its growth constants:
///   bounded:   |sigma(u) - sigma(v)| <= D_sigma
///   Lipschitz: |sigma(u) - sigma(v)| <= L_sigma |u - v|
/// At least one constant is always present.
class Activation {
 public:
  /// sigma(u) = c for u > 0, else 0. D_sigma = c.
  static Activation step(double c = 1.0);
  /// sigma(u) = max(0, u). L_sigma = 1.
  static Activation relu();
  static Activation custom(std::function<double(double)> fn, std::optional<double> bounded_constant,
                           std::optional<double> lipschitz_constant, std::string name = "custom");

  ActivationKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double step_scale() const { return step_scale_; }
  double sigma_at_zero() const { return sigma_at_zero_; }
  std::optional<double> bounded_constant() const { return bounded_; }
  std::optional<double> lipschitz_constant() const { return lipschitz_; }

  double operator()(double u) const {
    switch (kind_) {
      case ActivationKind::relu:
        return u > 0.0 ? u : 0.0;
      case ActivationKind::scaled_step:
        return u > 0.0 ? step_scale_ : 0.0;
      case ActivationKind::custom:
        break;
    }
    return fn_(u);
  }

  /// sigma(u) - sigma(0). Keeps the same growth constants.
  double shifted(double u) const { return (*this)(u) - sigma_at_zero_; }

 private:
  Activation() = default;

  ActivationKind kind_ = ActivationKind::relu;
  std::string name_;
  double step_scale_ = 0.0;
  double sigma_at_zero_ = 0.0;
  std::optional<double> bounded_;
  std::optional<double> lipschitz_;
  std::function<double(double)> fn_;
};

inline double evaluate(const Activation& act, double u) { return act(u); }
inline double shifted_evaluate(const Activation& act, double u) { return act.shifted(u); }

struct GrowthConstants {
  std::optional<double> bounded;
  std::optional<double> lipschitz;
};

/// Largest observed |sigma(u) - sigma(v)| and slope over a uniform grid on [lo, hi].
/// The slope maximum over consecutive grid points equals the maximum over all grid pairs.
GrowthConstants empirical_growth(const Activation& act, std::pair<double, double> interval,
                                 int grid_points = 10'000);

/// Declared constants of `act`, after checking them on a 10^4-point grid over the
/// feasible-input interval. Throws ConstantViolationError when the grid contradicts a
/// declared constant by more than 1e-12.
GrowthConstants growth_constants(const Activation& act, std::pair<double, double> interval);

}  // namespace mollify
