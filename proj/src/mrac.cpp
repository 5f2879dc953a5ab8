#include "mollify/mrac.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "mollify/error.hpp"
#include "mollify/rng.hpp"

namespace mollify::mrac {
namespace {

Vector fill_or(const Vector& v, Eigen::Index size, double value) {
  return v.size() == 0 ? Vector::Constant(size, value) : v;
}

struct Derivative {
  Vector x;
  Vector x_r;
  Matrix theta_hat;
};

Derivative rhs(const AdaptiveState& s, const PlantModel& plant, const ReferenceModel& ref, const GainSet& gains,
               const FeatureMap& psi) {
  const Vector features = psi(s.x);
  const Vector r = ref.signal(s.t);
  const Vector u = gains.k_x.transpose() * s.x - s.theta_hat.transpose() * features + gains.k_r.transpose() * r;
  Vector disturbance = plant.theta.transpose() * features;
  if (plant.eps_f) disturbance += plant.eps_f(s.x);
  const Vector e = s.x - s.x_r;
  Derivative d;
  d.x = plant.a * s.x + plant.b * (u + disturbance);
  d.x_r = ref.a_r * s.x_r + ref.b_r * r;
  d.theta_hat = gains.gamma * features * (e.transpose() * gains.p_x * plant.b);
  return d;
}

AdaptiveState advance(const AdaptiveState& s, const Derivative& d, double h) {
  return AdaptiveState{s.t + h, s.x + h * d.x, s.x_r + h * d.x_r, s.theta_hat + h * d.theta_hat};
}

}  // namespace

void validate(const PlantModel& plant, std::size_t samples, std::uint64_t seed) {
  const Eigen::Index n = plant.a.rows();
  if (n == 0 || plant.a.cols() != n) throw InvalidInputError("plant: A must be square and nonempty");
  if (plant.b.rows() != n || plant.b.cols() == 0) throw InvalidInputError("plant: B must be n x l");
  if (plant.theta.cols() != plant.b.cols()) throw InvalidInputError("plant: Theta must be N x l");
  Matrix ctrb(n, n * plant.b.cols());
  Matrix block = plant.b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * plant.b.cols(), plant.b.cols()) = block;
    block = plant.a * block;
  }
  if (Eigen::FullPivLU<Matrix>(ctrb).rank() != n) throw InvalidInputError("plant: (A, B) is not controllable");
  if (!(plant.region_radius > 0.0)) throw InvalidInputError("plant: region radius must be positive");
  if (!plant.eps_f) return;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t j = 0; j < samples; ++j) {
    Vector dir(n);
    for (Eigen::Index k = 0; k < n; ++k) dir(k) = normal(rng);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    const Vector x = dir * (plant.region_radius * std::pow(unit(rng), 1.0 / n) / norm);
    const Vector eps = plant.eps_f(x);
    if (eps.size() != plant.b.cols()) throw InvalidInputError("plant: eps_f must return l values");
    if (eps.norm() > plant.eps_bar * (1.0 + 1e-12)) {
      throw InvalidInputError("plant: ||eps_f(x)|| exceeds eps_bar inside B_0(r_f)");
    }
  }
}

ReferenceSignal ReferenceSignal::constant(Vector value) {
  const Eigen::Index l = value.size();
  return ReferenceSignal{SignalKind::constant, Vector::Zero(l), Vector::Zero(l), Vector::Zero(l), std::move(value)};
}

ReferenceSignal ReferenceSignal::sinusoid(Vector amplitude, Vector frequency, Vector phase) {
  const Eigen::Index l = amplitude.size();
  require_dimension(l, frequency.size(), "sinusoid frequency");
  return ReferenceSignal{SignalKind::sinusoid, std::move(amplitude), std::move(frequency), fill_or(phase, l, 0.0),
                         Vector::Zero(l)};
}

ReferenceSignal ReferenceSignal::square(Vector amplitude, Vector frequency, Vector phase) {
  ReferenceSignal s = sinusoid(std::move(amplitude), std::move(frequency), std::move(phase));
  s.kind = SignalKind::square;
  return s;
}

Vector ReferenceSignal::operator()(double t) const {
  Vector out = offset;
  if (kind == SignalKind::constant) return out;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double s = std::sin(2.0 * std::numbers::pi * frequency(k) * t + phase(k));
    out(k) += amplitude(k) * (kind == SignalKind::sinusoid ? s : (s >= 0.0 ? 1.0 : -1.0));
  }
  return out;
}

bool is_hurwitz(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) return false;
  return (Eigen::EigenSolver<Matrix>(a, false).eigenvalues().real().array() < 0.0).all();
}

void validate(const ReferenceModel& ref) {
  if (!is_hurwitz(ref.a_r)) throw InvalidInputError("reference model: A_r is not Hurwitz");
  if (ref.b_r.rows() != ref.a_r.rows()) throw InvalidInputError("reference model: B_r must be n x l");
  require_dimension(ref.b_r.cols(), ref.signal.offset.size(), "reference signal channels");
}

MatchingGains solve_matching(const Matrix& a, const Matrix& b, const Matrix& a_r, const Matrix& b_r,
                             double tolerance) {
  require_dimension(a.rows(), b.rows(), "solve_matching B");
  require_dimension(a.rows(), a_r.rows(), "solve_matching A_r");
  require_dimension(a.cols(), a_r.cols(), "solve_matching A_r");
  require_dimension(b.rows(), b_r.rows(), "solve_matching B_r");
  require_dimension(b.cols(), b_r.cols(), "solve_matching B_r");
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(b);
  MatchingGains g;
  const Matrix kx_t = cod.solve(a_r - a);
  const Matrix kr_t = cod.solve(b_r);
  g.k_x = kx_t.transpose();
  g.k_r = kr_t.transpose();
  g.residual_x = (a + b * kx_t - a_r).norm();
  g.residual_r = (b * kr_t - b_r).norm();
  if (g.residual_x > tolerance || g.residual_r > tolerance) {
    throw MatchingInfeasibleError("matching conditions infeasible: residuals " + std::to_string(g.residual_x) +
                                  ", " + std::to_string(g.residual_r));
  }
  return g;
}

Matrix solve_lyapunov(const Matrix& a_r, const Matrix& q) {
  const Eigen::Index n = a_r.rows();
  require_dimension(n, a_r.cols(), "solve_lyapunov A_r");
  require_dimension(n, q.rows(), "solve_lyapunov Q");
  require_dimension(n, q.cols(), "solve_lyapunov Q");
  if (!is_hurwitz(a_r)) throw NoSolutionError("solve_lyapunov: A_r is not Hurwitz");
  // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P)
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix at = a_r.transpose();
  Matrix kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) = eye(i, j) * at + at(i, j) * eye;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(Matrix(q).data(), n * n);
  const Vector vec_p = kron.fullPivLu().solve(rhs);
  Matrix p = Eigen::Map<const Matrix>(vec_p.data(), n, n);
  p = 0.5 * (p + p.transpose());
  return p;
}

GainSet design_gains(const PlantModel& plant, const ReferenceModel& ref, const Matrix& q, double adaptation_rate,
                     int feature_count) {
  if (!(adaptation_rate > 0.0)) throw InvalidInputError("design_gains: adaptation rate must be positive");
  if (Eigen::LLT<Matrix>(q).info() != Eigen::Success || !q.isApprox(q.transpose())) {
    throw InvalidInputError("design_gains: Q must be symmetric positive definite");
  }
  const MatchingGains m = solve_matching(plant.a, plant.b, ref.a_r, ref.b_r);
  GainSet g;
  g.k_x = m.k_x;
  g.k_r = m.k_r;
  g.q = q;
  g.p_x = solve_lyapunov(ref.a_r, q);
  g.gamma = adaptation_rate * Matrix::Identity(feature_count, feature_count);
  return g;
}

FeatureMap::FeatureMap(Matrix gammas, Activation activation)
    : gammas_(std::move(gammas)), activation_(std::move(activation)) {
  if (gammas_.rows() < 2) throw InvalidInputError("FeatureMap: parameters need dimension n+1 >= 2");
}

Vector FeatureMap::operator()(const PointRef& x) const {
  const Eigen::Index n = gammas_.rows() - 1;
  require_dimension(n, x.size(), "FeatureMap");
  Vector z = gammas_.topRows(n).transpose() * x + gammas_.row(n).transpose();
  return z.unaryExpr([&](double u) { return activation_(u); });
}

Vector control_law(const AdaptiveState& state, const GainSet& gains, const FeatureMap& psi, const PointRef& r_t) {
  return gains.k_x.transpose() * state.x - state.theta_hat.transpose() * psi(state.x) + gains.k_r.transpose() * r_t;
}

AdaptiveState step(const AdaptiveState& s, const PlantModel& plant, const ReferenceModel& ref, const GainSet& gains,
                   const FeatureMap& psi, double dt) {
  if (!(dt > 0.0)) throw InvalidSpecError("step: dt must be positive");
  const Derivative k1 = rhs(s, plant, ref, gains, psi);
  const Derivative k2 = rhs(advance(s, k1, 0.5 * dt), plant, ref, gains, psi);
  const Derivative k3 = rhs(advance(s, k2, 0.5 * dt), plant, ref, gains, psi);
  const Derivative k4 = rhs(advance(s, k3, dt), plant, ref, gains, psi);
  AdaptiveState next;
  next.t = s.t + dt;
  next.x = s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  next.x_r = s.x_r + dt / 6.0 * (k1.x_r + 2.0 * k2.x_r + 2.0 * k3.x_r + k4.x_r);
  next.theta_hat = s.theta_hat + dt / 6.0 * (k1.theta_hat + 2.0 * k2.theta_hat + 2.0 * k3.theta_hat + k4.theta_hat);
  if (!next.finite()) throw DivergenceError("simulation diverged (non-finite state)", next.t);
  return next;
}

double lyapunov_value(const AdaptiveState& state, const PlantModel& plant, const GainSet& gains) {
  const Vector e = state.x - state.x_r;
  const Matrix tilde = state.theta_hat - plant.theta;
  const Matrix gamma_inv_tilde = gains.gamma.llt().solve(tilde);
  return e.dot(gains.p_x * e) + (tilde.transpose() * gamma_inv_tilde).trace();
}

const char* to_string(SimulationStatus status) {
  switch (status) {
    case SimulationStatus::completed:
      return "completed";
    case SimulationStatus::diverged:
      return "diverged";
    case SimulationStatus::left_region:
      return "left-region";
  }
  return "unknown";
}

Trajectory simulate(const PlantModel& plant, const ReferenceModel& ref, const GainSet& gains, const FeatureMap& psi,
                    AdaptiveState initial, const SimulationConfig& config) {
  if (!(config.dt > 0.0) || !(config.duration > 0.0) || config.output_every <= 0) {
    throw InvalidSpecError("simulate: dt, duration and output interval must be positive");
  }
  require_dimension(plant.state_dim(), initial.x.size(), "simulate x0");
  require_dimension(plant.state_dim(), initial.x_r.size(), "simulate x_r0");
  require_dimension(psi.size(), initial.theta_hat.rows(), "simulate Theta_hat rows");
  require_dimension(plant.input_dim(), initial.theta_hat.cols(), "simulate Theta_hat cols");
  require_dimension(psi.size(), plant.theta.rows(), "simulate Theta rows");

  Trajectory traj;
  const auto steps = static_cast<long>(std::llround(config.duration / config.dt));
  const double window_start = config.duration - config.final_window;
  AdaptiveState s = std::move(initial);
  double v_prev = lyapunov_value(s, plant, gains);
  double window_sum = 0.0;
  long window_count = 0;

  auto record = [&](const AdaptiveState& st, double v) {
    TrajectorySample smp;
    smp.t = st.t;
    smp.x = st.x;
    smp.x_r = st.x_r;
    smp.e_norm = (st.x - st.x_r).norm();
    smp.u = control_law(st, gains, psi, ref.signal(st.t));
    smp.theta_err_fro = (st.theta_hat - plant.theta).norm();
    smp.lyapunov = v;
    traj.samples.push_back(std::move(smp));
  };
  record(s, v_prev);

  for (long k = 1; k <= steps; ++k) {
    try {
      s = step(s, plant, ref, gains, psi, config.dt);
    } catch (const DivergenceError& err) {
      traj.status = SimulationStatus::diverged;
      traj.message = std::string(err.what()) + " at t=" + std::to_string(err.time());
      break;
    }
    const double v = lyapunov_value(s, plant, gains);
    traj.max_lyapunov_increase = std::max(traj.max_lyapunov_increase, v - v_prev);
    v_prev = v;
    const double e = (s.x - s.x_r).norm();
    if (s.t >= window_start - 1e-12) {
      window_sum += e;
      ++window_count;
      traj.final_window_max_e = std::max(traj.final_window_max_e, e);
    }
    if (k % config.output_every == 0 || k == steps) record(s, v);
    if (config.monitor_region && s.x.norm() > plant.region_radius) {
      traj.status = SimulationStatus::left_region;
      traj.message = "state left B_0(r_f) at t=" + std::to_string(s.t);
      if (k % config.output_every != 0 && k != steps) record(s, v);
      break;
    }
  }
  traj.final_window_mean_e = window_count > 0 ? window_sum / window_count : 0.0;
  traj.final_state = s;
  return traj;
}

}  // namespace mollify::mrac
