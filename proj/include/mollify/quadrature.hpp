#pragma once

#include <functional>

#include "mollify/types.hpp"

namespace mollify {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  Vector nodes;
  Vector weights;
};

/// Rules are computed by Newton iteration on P_n and cached per node count.
const GaussLegendreRule& gauss_legendre(int nodes);

/// Rule mapped to [a, b].
GaussLegendreRule gauss_legendre(int nodes, double a, double b);

/// Globally adaptive bisection with a 16-point Gauss-Legendre panel rule.
/// Stops once the summed panel error estimates fall below
/// max(abs_tol, rel_tol * |integral|).
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0, int max_panels = 4096);

}  // namespace mollify
