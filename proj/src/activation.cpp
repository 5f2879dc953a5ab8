#include "mollify/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mollify/error.hpp"

namespace mollify {
namespace {

void check_constant(std::optional<double> value, const char* what) {
  if (value && (!std::isfinite(*value) || *value <= 0.0)) {
    throw InvalidInputError(std::string("activation: ") + what + " must be finite and positive");
  }
}

}  // namespace

Activation Activation::step(double c) {
  if (!std::isfinite(c) || c <= 0.0) throw InvalidInputError("step activation: scale c must be positive");
  Activation act;
  act.kind_ = ActivationKind::scaled_step;
  act.name_ = "step";
  act.step_scale_ = c;
  act.sigma_at_zero_ = 0.0;
  act.bounded_ = c;
  return act;
}

Activation Activation::relu() {
  Activation act;
  act.kind_ = ActivationKind::relu;
  act.name_ = "relu";
  act.lipschitz_ = 1.0;
  return act;
}

Activation Activation::custom(std::function<double(double)> fn, std::optional<double> bounded_constant,
                              std::optional<double> lipschitz_constant, std::string name) {
  if (!fn) throw InvalidInputError("custom activation: function is empty");
  if (!bounded_constant && !lipschitz_constant) {
    throw InvalidInputError("custom activation: declare D_sigma or L_sigma");
  }
  check_constant(bounded_constant, "D_sigma");
  check_constant(lipschitz_constant, "L_sigma");
  Activation act;
  act.kind_ = ActivationKind::custom;
  act.name_ = std::move(name);
  act.fn_ = std::move(fn);
  act.bounded_ = bounded_constant;
  act.lipschitz_ = lipschitz_constant;
  act.sigma_at_zero_ = act.fn_(0.0);
  return act;
}

GrowthConstants empirical_growth(const Activation& act, std::pair<double, double> interval, int grid_points) {
  const auto [lo, hi] = interval;
  if (!(hi > lo) || grid_points < 2) throw InvalidSpecError("empirical_growth: need hi > lo and >= 2 points");
  double min_v = std::numeric_limits<double>::infinity();
  double max_v = -min_v;
  double max_slope = 0.0;
  const double h = (hi - lo) / (grid_points - 1);
  double prev = act(lo);
  for (int i = 0; i < grid_points; ++i) {
    const double u = lo + h * i;
    const double v = act(u);
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
    if (i > 0) max_slope = std::max(max_slope, std::abs(v - prev) / h);
    prev = v;
  }
  return {max_v - min_v, max_slope};
}

GrowthConstants growth_constants(const Activation& act, std::pair<double, double> interval) {
  constexpr double tol = 1e-12;
  const GrowthConstants observed = empirical_growth(act, interval, 10'000);
  if (act.bounded_constant() && *observed.bounded > *act.bounded_constant() + tol) {
    throw ConstantViolationError("activation '" + act.name() + "': observed variation " +
                                 std::to_string(*observed.bounded) + " exceeds D_sigma");
  }
  // Grid slopes across a jump blow up; the Lipschitz check only applies to
  // activations declaring L_sigma.
  if (act.lipschitz_constant() && *observed.lipschitz > *act.lipschitz_constant() + tol) {
    throw ConstantViolationError("activation '" + act.name() + "': observed slope " +
                                 std::to_string(*observed.lipschitz) + " exceeds L_sigma");
  }
  return {act.bounded_constant(), act.lipschitz_constant()};
}

}  // namespace mollify
