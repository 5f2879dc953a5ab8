#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mollify/error.hpp"
#include "mollify/mrac.hpp"

using namespace mollify;
using namespace mollify::mrac;

namespace {
Matrix mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

FeatureMap tanh_features(int n) {
  Matrix g(n + 1, 3);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k <= n; ++k) g(k, j) = 0.3 * (j + 1) * ((k + j) % 2 == 0 ? 1.0 : -1.0);
  }
  return FeatureMap(g, Activation::custom([](double u) { return std::tanh(u); }, 2.0, 1.0, "tanh"));
}

struct Setup {
  PlantModel plant;
  ReferenceModel ref;
  GainSet gains;
  FeatureMap psi;
};

Setup double_integrator(double rate) {
  PlantModel plant;
  plant.a = mat(2, 2, {0, 1, 0, 0});
  plant.b = mat(2, 1, {0, 1});
  plant.theta = mat(3, 1, {0.5, -0.4, 0.3});
  plant.region_radius = 100.0;
  ReferenceModel ref{mat(2, 2, {0, 1, -4, -4}), mat(2, 1, {0, 4}),
                     ReferenceSignal::sinusoid(Vector::Constant(1, 0.5), Vector::Constant(1, 0.2))};
  auto psi = tanh_features(2);
  GainSet gains = design_gains(plant, ref, Matrix::Identity(2, 2), rate, psi.size());
  return {plant, ref, gains, psi};
}

AdaptiveState start(int n, int big_n, int l, Vector x0) {
  AdaptiveState s;
  s.x = std::move(x0);
  s.x_r = Vector::Zero(n);
  s.theta_hat = Matrix::Zero(big_n, l);
  return s;
}
}  // namespace

TEST_CASE("matching conditions") {
  const auto g = solve_matching(mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {-1}), mat(1, 1, {2}));
  CHECK(g.k_x(0, 0) == doctest::Approx(-2.0));
  CHECK(g.k_r(0, 0) == doctest::Approx(2.0));

  const auto a = mat(2, 2, {0, 1, 0, 0});
  const auto b = mat(2, 1, {0, 1});
  const auto h = solve_matching(a, b, mat(2, 2, {0, 1, -1, -2}), mat(2, 1, {0, 1}));
  CHECK(h.k_x(0, 0) == doctest::Approx(-1.0));
  CHECK(h.k_x(1, 0) == doctest::Approx(-2.0));
  CHECK(h.k_r(0, 0) == doctest::Approx(1.0));
  CHECK(h.residual_x <= 1e-8);
  CHECK(h.residual_r <= 1e-8);

  CHECK_THROWS_AS(solve_matching(a, b, mat(2, 2, {-1, 0, 0, -1}), mat(2, 1, {0, 1})), MatchingInfeasibleError);
}

TEST_CASE("Lyapunov equation") {
  const Matrix p = solve_lyapunov(mat(1, 1, {-2}), mat(1, 1, {3}));
  CHECK(p(0, 0) == doctest::Approx(0.75));

  const Matrix a_r = mat(3, 3, {-1, 2, 0, -3, -1, 1, 0, 0.5, -2});
  const Matrix q = mat(3, 3, {2, 0.5, 0, 0.5, 1, 0, 0, 0, 1});
  const Matrix px = solve_lyapunov(a_r, q);
  CHECK((px - px.transpose()).norm() <= 1e-12);
  CHECK((a_r.transpose() * px + px * a_r + q).norm() <= 1e-8);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(px).eigenvalues().minCoeff() > 0.0);

  CHECK_THROWS_AS(solve_lyapunov(mat(1, 1, {0.5}), mat(1, 1, {1})), NoSolutionError);
  CHECK(is_hurwitz(a_r));
  CHECK_FALSE(is_hurwitz(mat(2, 2, {0, 1, 0, 0})));
}

TEST_CASE("validation") {
  PlantModel plant;
  plant.a = mat(2, 2, {0, 1, 0, 0});
  plant.b = mat(2, 1, {1, 0});
  plant.theta = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(validate(plant), InvalidInputError);
  plant.b = mat(2, 1, {0, 1});
  CHECK_NOTHROW(validate(plant));
  plant.eps_bar = 0.05;
  plant.eps_f = [](const PointRef& x) { return Vector::Constant(1, 0.1 * x.norm()); };
  plant.region_radius = 0.4;
  CHECK_NOTHROW(validate(plant));
  plant.region_radius = 1.0;
  CHECK_THROWS_AS(validate(plant), InvalidInputError);

  ReferenceModel ref{mat(1, 1, {1}), mat(1, 1, {1}), ReferenceSignal::constant(Vector::Ones(1))};
  CHECK_THROWS_AS(validate(ref), InvalidInputError);
}

TEST_CASE("reference signals") {
  const auto s = ReferenceSignal::sinusoid(Vector::Constant(1, 2.0), Vector::Constant(1, 0.5));
  CHECK(s(0.5)(0) == doctest::Approx(2.0));
  CHECK(s.bound()(0) == 2.0);
  const auto q = ReferenceSignal::square(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0));
  CHECK(std::abs(q(0.25)(0)) == 1.0);
  CHECK(q(0.25)(0) == -q(0.75)(0));
  CHECK(ReferenceSignal::constant(Vector::Constant(2, 3.0))(7.0) == Vector::Constant(2, 3.0));
}

TEST_CASE("equilibrium is preserved") {
  auto st = double_integrator(10.0);
  st.plant.theta.setZero();
  st.ref.signal = ReferenceSignal::constant(Vector::Zero(1));
  auto s = start(2, 3, 1, Vector::Zero(2));
  for (int k = 0; k < 100; ++k) s = step(s, st.plant, st.ref, st.gains, st.psi, 1e-2);
  CHECK(s.x.norm() == 0.0);
  CHECK(s.theta_hat.norm() == 0.0);
}

TEST_CASE("exact parameters cancel the nonlinearity") {
  auto st = double_integrator(10.0);
  auto s = start(2, 3, 1, Vector::Zero(2));
  s.theta_hat = st.plant.theta;
  for (int k = 0; k < 2000; ++k) s = step(s, st.plant, st.ref, st.gains, st.psi, 1e-3);
  CHECK((s.x - s.x_r).norm() <= 1e-12);
  CHECK((s.theta_hat - st.plant.theta).norm() <= 1e-12);
}

TEST_CASE("scalar error decays at the reference rate") {
  PlantModel plant;
  plant.a = mat(1, 1, {0.5});
  plant.b = mat(1, 1, {1});
  plant.theta = Matrix::Zero(3, 1);
  plant.region_radius = 10.0;
  ReferenceModel ref{mat(1, 1, {-1}), mat(1, 1, {1}), ReferenceSignal::constant(Vector::Zero(1))};
  const auto psi = tanh_features(1);
  const auto gains = design_gains(plant, ref, Matrix::Identity(1, 1), 10.0, psi.size());
  SimulationConfig cfg;
  cfg.duration = 10.0;
  cfg.output_every = 1000;
  // With no features the error obeys e' = A_r e exactly.
  const FeatureMap zero_psi(Matrix::Zero(2, 0), Activation::relu());
  PlantModel p0 = plant;
  p0.theta = Matrix::Zero(0, 1);
  const auto g0 = design_gains(p0, ref, Matrix::Identity(1, 1), 10.0, 0);
  AdaptiveState s;
  s.x = Vector::Constant(1, 1.0);
  s.x_r = Vector::Zero(1);
  s.theta_hat = Matrix::Zero(0, 1);
  const auto traj = simulate(p0, ref, g0, zero_psi, s, cfg);
  REQUIRE(traj.status == SimulationStatus::completed);
  const auto& a = traj.samples[5];
  const auto& b = traj.samples[10];
  REQUIRE(a.t == doctest::Approx(5.0));
  const double slope = (std::log(b.e_norm) - std::log(a.e_norm)) / (b.t - a.t);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(gains.p_x(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("Lyapunov function never increases without residual") {
  const auto st = double_integrator(10.0);
  SimulationConfig cfg;
  cfg.duration = 20.0;
  cfg.dt = 1e-3;
  const auto traj = simulate(st.plant, st.ref, st.gains, st.psi, start(2, 3, 1, Vector::Constant(2, 0.5)), cfg);
  REQUIRE(traj.status == SimulationStatus::completed);
  CHECK(traj.max_lyapunov_increase <= 1e-6);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    CHECK(traj.samples[k].lyapunov <= traj.samples[k - 1].lyapunov + 1e-6);
  }
}

TEST_CASE("RK4 order") {
  const auto st = double_integrator(5.0);
  auto final_state = [&](double dt) {
    SimulationConfig cfg;
    cfg.dt = dt;
    cfg.duration = 5.0;
    cfg.output_every = 1000;
    return simulate(st.plant, st.ref, st.gains, st.psi, start(2, 3, 1, Vector::Constant(2, 0.5)), cfg).final_state;
  };
  const auto a = final_state(0.1);
  const auto b = final_state(0.05);
  const auto c = final_state(0.025);
  auto flat = [](const AdaptiveState& s) {
    Vector v(s.x.size() + s.x_r.size() + s.theta_hat.size());
    v << s.x, s.x_r, s.theta_hat.reshaped();
    return v;
  };
  const double ratio = (flat(a) - flat(b)).norm() / (flat(b) - flat(c)).norm();
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("divergence and region monitor") {
  auto st = double_integrator(10.0);
  st.plant.region_radius = 0.6;
  SimulationConfig cfg;
  cfg.duration = 5.0;
  const auto traj = simulate(st.plant, st.ref, st.gains, st.psi, start(2, 3, 1, Vector::Constant(2, 0.5)), cfg);
  CHECK(traj.status == SimulationStatus::left_region);
  CHECK_FALSE(traj.samples.empty());

  PlantModel wild = st.plant;
  wild.region_radius = 1e300;
  wild.a = mat(2, 2, {0, 1, 0, 0});
  GainSet bad = st.gains;
  bad.k_x = mat(2, 1, {50, 50});
  const auto boom = simulate(wild, st.ref, bad, st.psi, start(2, 3, 1, Vector::Constant(2, 0.5)), {1e-2, 200.0, 10, 5.0, false});
  CHECK(boom.status == SimulationStatus::diverged);
  CHECK(boom.message.find("t=") != std::string::npos);
}
