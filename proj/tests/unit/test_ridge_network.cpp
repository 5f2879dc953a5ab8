#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "mollify/error.hpp"
#include "mollify/ridge_network.hpp"
#include "mollify/rng.hpp"

using namespace mollify;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

BaseApproximation two_atom_relu() {
  Matrix g(2, 2);
  g << 1.0, -0.5,  //
      0.0, 0.2;
  return BaseApproximation(Activation::relu(), vec({0.7, -0.3}), g, ParameterSet::symmetric(1, 1.0));
}
}  // namespace

TEST_CASE("hand-evaluated network") {
  const auto net = two_atom_relu();
  // 0.7 relu(x) - 0.3 relu(-0.5x + 0.2)
  CHECK(evaluate(net, vec({0.3})) == doctest::Approx(0.7 * 0.3 - 0.3 * 0.05));
  CHECK(evaluate(net, vec({-0.6})) == doctest::Approx(-0.3 * 0.5));
  CHECK(net.coefficient_size() == doctest::Approx(1.0));
  CHECK(lipschitz_constant(net) == doctest::Approx(0.7 + 0.3 * 0.5));
  CHECK_THROWS_AS(boundedness_constant(net), NotApplicableError);

  Matrix pts(1, 3);
  pts << 0.3, -0.6, 0.9;
  const Vector many = evaluate_many(net, pts);
  for (int j = 0; j < 3; ++j) CHECK(many(j) == doctest::Approx(evaluate(net, pts.col(j))));
}

TEST_CASE("empty network is zero") {
  const auto net = BaseApproximation::empty(Activation::step(), ParameterSet::symmetric(2, 1.0));
  CHECK(net.atom_count() == 0);
  CHECK(evaluate(net, vec({0.2, 0.3})) == 0.0);
  CHECK(net.coefficient_size() == 0.0);
  CHECK(boundedness_constant(net) == 0.0);
}

TEST_CASE("network validation") {
  const auto p = ParameterSet::symmetric(1, 1.0);
  Matrix outside(2, 1);
  outside << 1.5, 0.0;
  CHECK_THROWS_AS(BaseApproximation(Activation::relu(), vec({1.0}), outside, p), OutOfSetError);
  Matrix zero_w(2, 1);
  zero_w << 0.0, 0.5;
  CHECK_THROWS_AS(BaseApproximation(Activation::relu(), vec({1.0}), zero_w, p), InvalidInputError);
  Matrix ok(2, 1);
  ok << 1.0, 0.0;
  CHECK_THROWS(BaseApproximation(Activation::relu(), vec({1.0, 2.0}), ok, p));
  CHECK_THROWS_AS(evaluate(two_atom_relu(), vec({0.1, 0.2})), DimensionMismatchError);
  CHECK_THROWS_AS(ParameterSet(vec({0.0}), vec({1.0})), InvalidInputError);
  CHECK_THROWS_AS(ParameterSet(vec({0.0, 1.0}), vec({1.0, 1.0})), InvalidInputError);
}

TEST_CASE("growth constants hold for random nets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix g(3, 5);
    for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = u(rng);
    Vector th(5);
    for (int k = 0; k < 5; ++k) th(k) = u(rng);
    const auto p = ParameterSet::symmetric(2, 1.0);
    const BaseApproximation lip(Activation::relu(), th, g, p);
    const BaseApproximation bnd(Activation::step(2.0), th, g, p);
    const double l = lipschitz_constant(lip);
    const double d = boundedness_constant(bnd);
    for (int k = 0; k < 200; ++k) {
      const Vector x = vec({u(rng), u(rng)});
      const Vector y = vec({u(rng), u(rng)});
      CHECK(std::abs(evaluate(lip, x) - evaluate(lip, y)) <= l * (x - y).norm() + 1e-12);
      CHECK(std::abs(evaluate(bnd, x) - evaluate(bnd, y)) <= d + 1e-12);
    }
  }
}

TEST_CASE("feasible input interval") {
  const auto p = ParameterSet::symmetric(1, 2.0);
  const auto [lo, hi] = feasible_input_interval(p, Domain::box(Vector::Zero(1), vec({1.0})));
  CHECK(lo == doctest::Approx(-4.0));
  CHECK(hi == doctest::Approx(4.0));
}

TEST_CASE("affine shift") {
  const ScalarField f = [](const PointRef& x) { return 3.0 * x(0) - 2.0 * x(1) + 0.5 + x(0) * x(1); };
  const auto s = default_affine_shift(f, 2);
  CHECK(s.a(0) == doctest::Approx(3.0));
  CHECK(s.a(1) == doctest::Approx(-2.0));
  CHECK(s.b == doctest::Approx(0.5));
  CHECK(s.apply(f, vec({0.4, 0.5})) == doctest::Approx(0.2));
}

TEST_CASE("candidate grid") {
  const auto p = ParameterSet::symmetric(1, 1.0);
  const Matrix g = candidate_grid(p, 9);
  // 3x3 grid on {-1,0,1}^2 minus the three w = 0 points.
  CHECK(g.cols() == 6);
  CHECK((g.row(0).array() != 0.0).all());
  const Matrix g17 = candidate_grid(p, 289);
  CHECK(g17.cols() == 17 * 16);
  CHECK_THROWS_AS(candidate_grid(p, 0), InvalidSpecError);
}

TEST_CASE("fit_base") {
  const Domain dom = Domain::box(Vector::Zero(1), vec({1.0}));
  const auto p = ParameterSet::symmetric(1, 4.0);
  const ScalarField f = [](const PointRef& x) { return std::sin(std::numbers::pi * x(0)); };

  SUBCASE("exactly representable target is recovered") {
    const ScalarField g = [](const PointRef& x) { return 0.5 * std::max(0.0, x(0)); };
    FitSpec spec;
    spec.atom_budget = 81;
    spec.coefficient_budget = 1.0;
    const auto r = fit_base(g, dom, p, Activation::relu(), spec, AffineShift::none(1));
    CHECK(r.epsilon_n < 1e-6);
  }
  SUBCASE("coefficient budget is respected") {
    FitSpec spec;
    spec.atom_budget = 81;
    spec.coefficient_budget = 0.2;
    const auto r = fit_base(f, dom, p, Activation::relu(), spec, default_affine_shift(f, 1));
    CHECK(r.net.coefficient_size() <= 0.2 * (1.0 + 1e-9));
  }
  SUBCASE("error decreases on nested grids") {
    double prev = INFINITY;
    for (int budget : {9, 25, 81, 289}) {
      FitSpec spec;
      spec.atom_budget = budget;
      spec.coefficient_budget = 20.0;
      spec.seed = 3;
      const auto r = fit_base(f, dom, p, Activation::relu(), spec, default_affine_shift(f, 1));
      CHECK(r.epsilon_n <= prev + 2.0 * r.epsilon_std_error);
      prev = r.epsilon_n;
    }
    CHECK(prev < 0.05);
  }
  SUBCASE("deterministic") {
    FitSpec spec;
    spec.atom_budget = 25;
    spec.coefficient_budget = 5.0;
    spec.seed = 9;
    const auto a = fit_base(f, dom, p, Activation::relu(), spec, AffineShift::none(1));
    const auto b = fit_base(f, dom, p, Activation::relu(), spec, AffineShift::none(1));
    CHECK(a.epsilon_n == b.epsilon_n);
    CHECK(a.net.theta() == b.net.theta());
  }
  SUBCASE("bad specs") {
    FitSpec spec;
    spec.coefficient_budget = 0.0;
    CHECK_THROWS_AS(fit_base(f, dom, p, Activation::relu(), spec, AffineShift::none(1)), InvalidSpecError);
  }
}

TEST_CASE("maurey subsampling") {
  const auto p = ParameterSet::symmetric(1, 1.0);
  Matrix g(2, 3);
  g << 1.0, -1.0, 0.5,  //
      0.0, 0.5, -0.2;
  const BaseApproximation dense(Activation::step(1.0), vec({0.5, -0.3, 0.2}), g, p);

  SUBCASE("atoms come from the dense net with weight S/N") {
    const auto sub = maurey_subsample(dense, 1.0, 10, 4);
    CHECK(sub.atom_count() == 10);
    CHECK(sub.coefficient_size() == doctest::Approx(1.0));
    for (Eigen::Index j = 0; j < 10; ++j) CHECK(std::abs(sub.theta()(j)) == doctest::Approx(0.1));
  }
  SUBCASE("unbiased with O(S^2/N) mean-square error") {
    const Vector x = vec({0.3});
    const double target = evaluate(dense, x);
    const int trials = 4000, n = 16;
    double sum = 0.0, sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double v = evaluate(maurey_subsample(dense, 1.0, n, derive_seed(11, t)), x);
      sum += v;
      sq += (v - target) * (v - target);
    }
    const double mse = sq / trials;
    CHECK(mse <= 1.0 / n);
    CHECK(std::abs(sum / trials - target) < 4.0 * std::sqrt(mse / trials));
  }
  SUBCASE("non-convex weights are rejected") {
    CHECK_THROWS_AS(maurey_subsample(dense, 2.0, 10, 0), InvalidInputError);
    CHECK_THROWS_AS(maurey_subsample(dense, 1.0, 0, 0), InvalidSpecError);
  }
}
