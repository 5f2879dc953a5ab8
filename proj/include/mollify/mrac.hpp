#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mollify/activation.hpp"
#include "mollify/types.hpp"

namespace mollify::mrac {

/// x' = A x + B (u + Theta^T Psi(x) + eps_f(x))
struct PlantModel {
  Matrix a;
  Matrix b;
  Matrix theta;  // N x l
  std::function<Vector(const PointRef&)> eps_f;  // empty means zero
  double region_radius = 1.0;  // r_f: the eps_f bound holds on B_0(r_f)
  double eps_bar = 0.0;

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
};

/// Checks shapes, controllability of (A, B), and the eps_f bound on `samples` points of
/// B_0(r_f). Throws InvalidInputError.
void validate(const PlantModel& plant, std::size_t samples = 1000, std::uint64_t seed = 0);

enum class SignalKind { constant, sinusoid, square };

/// Per-channel r_k(t) = offset_k + amplitude_k * shape(2 pi frequency_k t + phase_k).
struct ReferenceSignal {
  SignalKind kind = SignalKind::constant;
  Vector amplitude;
  Vector frequency;
  Vector phase;
  Vector offset;

  static ReferenceSignal constant(Vector value);
  static ReferenceSignal sinusoid(Vector amplitude, Vector frequency, Vector phase = {});
  static ReferenceSignal square(Vector amplitude, Vector frequency, Vector phase = {});

  Vector operator()(double t) const;
  /// Declared sup-norm bound per channel.
  Vector bound() const { return offset.cwiseAbs() + amplitude.cwiseAbs(); }
};

/// x_r' = A_r x_r + B_r r(t) with A_r Hurwitz.
struct ReferenceModel {
  Matrix a_r;
  Matrix b_r;
  ReferenceSignal signal;
};

bool is_hurwitz(const Matrix& a);
void validate(const ReferenceModel& ref);

struct GainSet {
  Matrix k_x;    // n x l
  Matrix k_r;    // l x l
  Matrix gamma;  // N x N, symmetric positive definite
  Matrix p_x;    // n x n, symmetric positive definite
  Matrix q;      // n x n, symmetric positive definite
};

struct MatchingGains {
  Matrix k_x;
  Matrix k_r;
  double residual_x = 0.0;  // ||A + B K_x^T - A_r||_F
  double residual_r = 0.0;  // ||B K_r^T - B_r||_F
};

/// Least squares K_x^T = B^+ (A_r - A), K_r^T = B^+ B_r. Throws MatchingInfeasibleError
/// when either residual exceeds `tolerance`.
MatchingGains solve_matching(const Matrix& a, const Matrix& b, const Matrix& a_r, const Matrix& b_r,
                             double tolerance = 1e-8);

/// Solves A_r^T P + P A_r = -Q through the Kronecker-vectorized linear system.
/// Throws NoSolutionError when A_r is not Hurwitz.
Matrix solve_lyapunov(const Matrix& a_r, const Matrix& q);

/// Gains from the matching conditions, P_x from the Lyapunov equation, Gamma = rate * I.
GainSet design_gains(const PlantModel& plant, const ReferenceModel& ref, const Matrix& q, double adaptation_rate,
                     int feature_count);

/// Psi(x) = (sigma(gamma_1^T X), ..., sigma(gamma_N^T X)).
class FeatureMap {
 public:
  FeatureMap(Matrix gammas, Activation activation);

  Vector operator()(const PointRef& x) const;
  int size() const { return static_cast<int>(gammas_.cols()); }
  int input_dimension() const { return static_cast<int>(gammas_.rows()) - 1; }
  const Matrix& gammas() const { return gammas_; }
  const Activation& activation() const { return activation_; }

 private:
  Matrix gammas_;
  Activation activation_;
};

inline FeatureMap build_feature_map(Matrix gammas, Activation activation) {
  return FeatureMap(std::move(gammas), std::move(activation));
}

struct AdaptiveState {
  double t = 0.0;
  Vector x;
  Vector x_r;
  Matrix theta_hat;  // N x l

  bool finite() const { return x.allFinite() && x_r.allFinite() && theta_hat.allFinite(); }
};

/// u = K_x^T x - Theta_hat^T Psi(x) + K_r^T r
Vector control_law(const AdaptiveState& state, const GainSet& gains, const FeatureMap& psi, const PointRef& r_t);

/// One RK4 step of the plant, reference model, and Theta_hat' = Gamma Psi(x) e^T P_x B.
/// Throws DivergenceError on non-finite state.
AdaptiveState step(const AdaptiveState& state, const PlantModel& plant, const ReferenceModel& ref,
                   const GainSet& gains, const FeatureMap& psi, double dt);

/// V = e^T P_x e + tr(Theta_tilde^T Gamma^{-1} Theta_tilde)
double lyapunov_value(const AdaptiveState& state, const PlantModel& plant, const GainSet& gains);

struct SimulationConfig {
  double dt = 1e-3;
  double duration = 50.0;
  int output_every = 100;     // steps between trajectory samples
  double final_window = 5.0;  // seconds at the end used for summary statistics
  bool monitor_region = true; // stop when ||x|| leaves B_0(r_f)
};

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  Vector x_r;
  double e_norm = 0.0;
  Vector u;
  double theta_err_fro = 0.0;
  double lyapunov = 0.0;
};

enum class SimulationStatus { completed, diverged, left_region };

const char* to_string(SimulationStatus status);

struct Trajectory {
  std::vector<TrajectorySample> samples;
  SimulationStatus status = SimulationStatus::completed;
  std::string message;
  double final_window_mean_e = 0.0;
  double final_window_max_e = 0.0;
  double max_lyapunov_increase = 0.0;  // largest V_{k+1} - V_k over integrator steps
  AdaptiveState final_state;
};

Trajectory simulate(const PlantModel& plant, const ReferenceModel& ref, const GainSet& gains, const FeatureMap& psi,
                    AdaptiveState initial, const SimulationConfig& config);

}  // namespace mollify::mrac
