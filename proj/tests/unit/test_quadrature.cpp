#include "doctest.h"

#include <cmath>
#include <array>
#include <numbers>

#include "mollify/nnls.hpp"
#include "mollify/quadrature.hpp"

using namespace mollify;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& rule = gauss_legendre(n);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * n - 2;  // even degree, nonzero integral
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.weights(i) * std::pow(rule.nodes(i), deg);
    CHECK(s == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("mapped rule") {
  const auto rule = gauss_legendre(8, 0.0, std::numbers::pi);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += rule.weights(i) * std::sin(rule.nodes(i));
  CHECK(s == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("adaptive integration handles a kink and an essential singularity") {
  CHECK(adaptive_integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0) ==
        doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-12));
  const double bump_integral =
      adaptive_integrate([](double y) { return y * y < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0; }, -1.0, 1.0, 1e-14);
  // mpmath, 30 digits
  CHECK(bump_integral == doctest::Approx(0.443993816168079437823).epsilon(1e-13));
}

TEST_CASE("nnls matches a hand-solved problem") {
  Matrix a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  Vector y(3);
  y << 1, -1, 0;
  // unconstrained solution (1, -1) is infeasible; optimum keeps x2 = 0, x1 = 0.5
  const NnlsResult r = nnls(a, y);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(0.5));
  CHECK(r.x(1) == doctest::Approx(0.0));
}

TEST_CASE("l1 constrained least squares respects the budget and is exact when feasible") {
  Matrix phi(4, 3);
  phi << 1, 0, 1, 0, 1, 1, 1, 1, 0, 2, 0, 1;
  const Vector truth = Vector::Map(std::array<double, 3>{0.5, -0.25, 0.0}.data(), 3);
  const Vector y = phi * truth;
  const Vector loose = l1_constrained_least_squares(phi, y, 2.0);
  CHECK((loose - truth).norm() < 1e-7);
  const Vector tight = l1_constrained_least_squares(phi, y, 0.3);
  CHECK(tight.lpNorm<1>() <= 0.3 + 1e-12);
  CHECK((phi * tight - y).norm() > 1e-3);
}
