#include "doctest.h"

#include <cmath>
#include <random>

#include "mollify/activation.hpp"
#include "mollify/error.hpp"

using namespace mollify;

TEST_CASE("step and relu values") {
  const auto step = Activation::step(2.0);
  CHECK(step(0.0) == 0.0);
  CHECK(step(-1e-300) == 0.0);
  CHECK(step(1e-300) == 2.0);
  CHECK(*step.bounded_constant() == 2.0);
  CHECK_FALSE(step.lipschitz_constant().has_value());

  const auto relu = Activation::relu();
  CHECK(relu(-3.0) == 0.0);
  CHECK(relu(0.0) == 0.0);
  CHECK(relu(2.5) == 2.5);
  CHECK(*relu.lipschitz_constant() == 1.0);
  CHECK_FALSE(relu.bounded_constant().has_value());
  CHECK(relu.sigma_at_zero() == 0.0);
}

TEST_CASE("shifted activation") {
  const auto sig = Activation::custom([](double u) { return 1.0 / (1.0 + std::exp(-u)); }, 1.0, 0.25, "sigmoid");
  CHECK(sig.sigma_at_zero() == doctest::Approx(0.5));
  CHECK(sig.shifted(0.0) == 0.0);
  CHECK(shifted_evaluate(sig, 2.0) == doctest::Approx(evaluate(sig, 2.0) - 0.5));
}

TEST_CASE("custom activation needs a constant") {
  CHECK_THROWS_AS(Activation::custom([](double u) { return u; }, std::nullopt, std::nullopt), InvalidInputError);
  CHECK_THROWS_AS(Activation::custom([](double u) { return u; }, std::nullopt, 0.0), InvalidInputError);
}

TEST_CASE("growth constants hold at random pairs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto step = Activation::step(1.5);
  const auto relu = Activation::relu();
  for (int i = 0; i < 10'000; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(std::abs(step(a) - step(b)) <= 1.5);
    CHECK(std::abs(relu(a) - relu(b)) <= std::abs(a - b) + 1e-15);
  }
}

TEST_CASE("growth constants are checked against a grid") {
  const auto relu = Activation::relu();
  const auto g = growth_constants(relu, {-2.0, 3.0});
  CHECK(*g.lipschitz == 1.0);
  const auto emp = empirical_growth(relu, {-2.0, 3.0});
  CHECK(*emp.bounded == doctest::Approx(3.0));
  CHECK(*emp.lipschitz == doctest::Approx(1.0));

  const auto liar = Activation::custom([](double u) { return 2.0 * u; }, std::nullopt, 1.0, "liar");
  CHECK_THROWS_AS(growth_constants(liar, {-1.0, 1.0}), ConstantViolationError);
  const auto tall = Activation::custom([](double u) { return u > 0 ? 3.0 : 0.0; }, 1.0, std::nullopt, "tall");
  CHECK_THROWS_AS(growth_constants(tall, {-1.0, 1.0}), ConstantViolationError);
  CHECK_NOTHROW(growth_constants(tall, {-1.0, -0.5}));
}

TEST_CASE("constant activation: bounded with any D") {
  const auto k = Activation::custom([](double) { return 0.7; }, 1.0, std::nullopt, "const");
  CHECK(k.shifted(4.0) == 0.0);
  CHECK_NOTHROW(growth_constants(k, {-1.0, 1.0}));
}
