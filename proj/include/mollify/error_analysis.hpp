#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mollify/domain.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/random_approx.hpp"
#include "mollify/ridge_network.hpp"

namespace mollify {

/// (int |f|^2 d mu_B)^{1/2} against the uniform probability measure.
NormEstimate l2_norm(const ScalarField& f, const Domain& domain, const QuadratureSpec& spec = {});

struct LinfSpec {
  std::size_t grid_points = 1'000'000;  // total over the bounding box
  int refinement_rounds = 4;
  int refinement_points_per_axis = 21;
};

/// Grid maximum of |f|: a lower bound on the true supremum.
struct LinfEstimate {
  double value = 0.0;         // after local refinement
  double coarse_value = 0.0;  // plain grid maximum
  Vector argmax;
  std::size_t points = 0;
};

LinfEstimate linf_norm(const ScalarField& f, const Domain& domain, const LinfSpec& spec = {});

/// Which growth condition a bound uses: i) bounded (D_sigma), ii) Lipschitz (L_sigma).
enum class BoundCase { bounded, lipschitz };

const char* to_string(BoundCase c);

struct Theorem1Bound {
  double value = 0.0;
  BoundCase which = BoundCase::bounded;
};

/// i) S_N D_sigma, ii) S_N L_sigma sqrt(n+1) E_B / lambda; the smaller when both apply.
Theorem1Bound theorem1_bound(const BaseApproximation& net, const MollificationConfig& cfg, double e_b);
Theorem1Bound theorem1_bound(const BaseApproximation& net, const MollificationConfig& cfg, const Domain& domain);

struct BoundReport {
  BoundCase which = BoundCase::bounded;
  double epsilon_n = 0.0;
  double mollification_term = 0.0;
  double concentration_term = 0.0;  // S_N c_sigma lambda^{n+1} K / sqrt(R)
  double k_coefficient = 0.0;       // K_D(nu) or K_L(nu), including eta^{n+1} / (e^{n+1} P_min)
  double total = 0.0;
  double expectation_bound = 0.0;   // bound on E[h_B]: g_max B / (P_min sqrt(R))

  // echoed inputs
  double coefficient_size = 0.0;
  double sigma_constant = 0.0;
  double lambda = 0.0;
  int n = 0;
  int r = 0;
  double nu = 0.0;
  double e_b = 0.0;
  double expanded_diameter = 0.0;
  double gamma_max = 0.0;
  double p_min = 0.0;
  double sigma_at_zero = 0.0;
  double eta = 0.0;
};

/// Random-approximation error bound, holding with probability > 1 - nu. With
/// `which` unset the case with the smaller total is reported.
BoundReport theorem2_bound(const BaseApproximation& net, const MollificationConfig& cfg,
                           const SamplingDensity& density, int r, double nu, double epsilon_n, double e_b,
                           std::optional<BoundCase> which = std::nullopt);
BoundReport theorem2_bound(const BaseApproximation& net, const MollificationConfig& cfg, const Domain& domain,
                           const SamplingDensity& density, int r, double nu, double epsilon_n,
                           std::optional<BoundCase> which = std::nullopt);

/// D_hat (bounded approximation) or L_hat (Lipschitz approximation).
struct NetConstant {
  BoundCase kind = BoundCase::lipschitz;
  double value = 0.0;
};

struct LinfBoundReport {
  BoundCase which = BoundCase::lipschitz;
  double geometric_factor = 0.0;  // (r / (D (r + sqrt(r^2 + D^2))))^{-n/(n+2)}
  double k_eps = 0.0;
  double total = 0.0;             // 2 * geometric_factor * k_eps

  double lipschitz = 0.0;
  double a_norm = 0.0;
  double net_constant = 0.0;
  double epsilon_n = 0.0;
  int n = 0;
  double diameter = 0.0;
  double inscribed_radius = 0.0;
};

/// Sup-norm bound on the approximation error of an L-Lipschitz target from its L2 error.
LinfBoundReport linf_extension_bound(double epsilon_n, const DomainGeometry& geom, double lipschitz, double a_norm,
                                     const NetConstant& net_constant, int n);

struct ConcentrationTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double h_b = 0.0;
  double bound_level = 0.0;
  bool violated = false;
  double max_abs_coeff = 0.0;
  double coeff_bound = 0.0;
};

struct ConcentrationReport {
  BoundReport bound;
  std::vector<ConcentrationTrial> trials;
  double mean_h_b = 0.0;
  double mean_h_b_std_error = 0.0;
  double deviation_level = 0.0;     // h_B level exceeded with probability <= nu
  double violation_fraction = 0.0;
  double allowed_fraction = 0.0;    // nu + 3 sqrt(nu (1 - nu) / trials)
  std::size_t coefficient_violations = 0;
  double mollifier_error_estimate = 0.0;

  bool passed() const {
    return violation_fraction <= allowed_fraction && coefficient_violations == 0 &&
           mean_h_b <= bound.expectation_bound;
  }
};

/// Repeats the canonical random construction `trials` times with seeds derived from
/// `master_seed` and measures h_B = ||f_hat_{lambda,N} - F_hat_R||_B on the norm rule.
ConcentrationReport concentration_experiment(const BaseApproximation& net, const MollificationConfig& cfg,
                                             const Domain& domain, const SamplingDensity& density, int r, double nu,
                                             std::size_t trials, std::uint64_t master_seed,
                                             const QuadratureSpec& norm_spec = {},
                                             const MollifierQuadrature& mollifier_quad = {});

}  // namespace mollify
