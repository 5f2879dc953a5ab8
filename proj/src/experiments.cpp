#include "mollify/experiments.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mollify/error.hpp"
#include "mollify/io.hpp"
#include "mollify/rng.hpp"

namespace mollify::experiments {
namespace {

using io::field;
using io::format_number;

// Independent random streams below one master seed: stream(m, purpose, i) =
// derive_seed(derive_seed(m, purpose), i).
enum Purpose : std::uint64_t {
  kTestPoints = 1,
  kReplicates = 2,
  kTrials = 3,
  kFit = 4,
  kFeatures = 5,
  kTheta = 6,
  kQuadrature = 7,
  kSubsample = 8,
};

std::uint64_t stream(std::uint64_t master, Purpose purpose, std::uint64_t index) {
  return derive_seed(derive_seed(master, purpose), index);
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  Csv& operator<<(double v) { return cell(format_number(v)); }
  Csv& operator<<(int v) { return cell(std::to_string(v)); }
  Csv& operator<<(long v) { return cell(std::to_string(v)); }
  Csv& operator<<(unsigned long long v) { return cell(std::to_string(v)); }
  Csv& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  Csv& operator<<(bool v) { return cell(v ? "true" : "false"); }
  Csv& operator<<(const std::string& v) { return cell(v); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ostringstream out_;
  bool first_ = true;
};

std::vector<std::string> indexed(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::uint64_t master_seed(const json& config) { return io::unsigned_or(config, "seed", 0); }

json optional(const json& config, const std::string& key) {
  return config.is_object() && config.contains(key) ? config.at(key) : json();
}

std::vector<double> number_list(const json& j, const std::string& what) {
  const Vector v = io::to_vector(j, what);
  return {v.data(), v.data() + v.size()};
}

std::vector<int> integer_list(const json& j, const std::string& what) {
  std::vector<int> out;
  for (double d : number_list(j, what)) {
    if (d != std::floor(d) || d < 1) throw ConfigError(what + " must hold positive integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

QuadratureSpec quadrature_spec(const json& config, std::uint64_t seed) {
  QuadratureSpec defaults;
  defaults.seed = stream(seed, kQuadrature, 0);
  return io::quadrature_from_json(optional(config, "quadrature"), defaults);
}

// Slope check: |slope - value| <= tolerance, from {"value": v, "tolerance": t}.
Assertion slope_assertion(const std::string& name, double slope, const json& expect) {
  const double value = io::number(expect, "value");
  const double tol = io::number(expect, "tolerance");
  Assertion a{name, std::isfinite(slope) && std::abs(slope - value) <= tol, ""};
  a.detail = "slope " + format_number(slope) + ", expected " + format_number(value) + " +- " + format_number(tol);
  return a;
}

// Either explicit atoms or {"fit": {...}} against a closed-form target on `domain`.
BaseApproximation resolve_network(const json& spec, const Domain& domain, std::uint64_t seed) {
  if (!spec.contains("fit")) return io::network_from_json(spec, domain.dimension());
  const json& fit = spec.at("fit");
  const int n = domain.dimension();
  const io::Target target = io::target_from_json(field(fit, "target"), n);
  FitSpec fs;
  fs.atom_budget = static_cast<int>(io::integer_or(fit, "atom_budget", fs.atom_budget));
  fs.coefficient_budget = io::number_or(fit, "coefficient_budget", fs.coefficient_budget);
  fs.collocation_points = static_cast<std::size_t>(io::integer_or(fit, "collocation_points", 4096));
  fs.holdout_points = static_cast<std::size_t>(io::integer_or(fit, "holdout_points", 4096));
  fs.seed = stream(seed, kFit, 0);
  const AffineShift shift = fit.value("affine_shift", true) ? default_affine_shift(target.f, n) : AffineShift::none(n);
  return fit_base(target.f, domain, io::parameter_set_from_json(field(spec, "parameter_set"), n),
                  io::activation_from_json(field(spec, "activation")), fs, shift)
      .net;
}

}  // namespace

bool ExperimentResult::passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

json ExperimentResult::report() const {
  json list = json::array();
  for (const auto& a : assertions) list.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  json files_list = json::array();
  for (const auto& f : files) files_list.push_back(f.name);
  return {{"experiment", experiment}, {"seed", seed},         {"config_hash", config_hash}, {"passed", passed()},
          {"assertions", list},       {"results", summary}, {"files", files_list}};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"verify-mollification", "verify-expectation", "verify-concentration",
                                                 "verify-linf",          "verify-maurey",      "simulate-mrac"};
  return names;
}

ExperimentResult run(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  const std::string kind = io::string_or(config, "experiment", "");
  ExperimentResult r;
  if (kind == "verify-mollification") {
    r = verify_mollification(config);
  } else if (kind == "verify-expectation") {
    r = verify_expectation(config);
  } else if (kind == "verify-concentration") {
    r = verify_concentration(config);
  } else if (kind == "verify-linf") {
    r = verify_linf(config);
  } else if (kind == "verify-maurey") {
    r = verify_maurey(config);
  } else if (kind == "simulate-mrac") {
    r = simulate_mrac(config);
  } else {
    throw ConfigError("unknown experiment '" + kind + "'");
  }
  r.experiment = kind;
  r.seed = master_seed(config);
  r.config_hash = io::hex(io::config_hash(config));
  const std::string stamp = "# config_hash=" + r.config_hash + " seed=" + std::to_string(r.seed) + "\n";
  for (auto& f : r.files) f.content = stamp + f.content;
  return r;
}

ExperimentResult verify_mollification(const json& config) {
  const std::uint64_t seed = master_seed(config);
  const std::vector<double> lambdas = number_list(field(config, "lambdas"), "lambdas");
  const QuadratureSpec qspec = quadrature_spec(config, seed);
  const MollifierQuadrature mq = io::mollifier_quadrature_from_json(optional(config, "mollifier_quadrature"));
  json nets = config.contains("networks") ? config.at("networks") : json::array({field(config, "network")});
  if (!nets.is_array() || nets.empty()) throw ConfigError("networks must be a nonempty array");

  ExperimentResult r;
  r.summary = json::array();
  for (std::size_t k = 0; k < nets.size(); ++k) {
    const json& spec = nets[k];
    const std::string name = io::string_or(spec, "name", "net" + std::to_string(k));
    const Domain domain = io::domain_from_json(spec.contains("domain") ? spec.at("domain") : field(config, "domain"));
    const BaseApproximation net = resolve_network(spec, domain, derive_seed(seed, k));
    require_dimension(domain.dimension(), net.input_dimension(), "network input dimension");
    const QuadratureSpec net_qspec = io::quadrature_from_json(optional(spec, "quadrature"), qspec);
    const DomainQuadrature quad = domain_quadrature(domain, net_qspec);
    const double e_b = euclidean_norm_factor(domain, net_qspec).value;
    const Vector base = evaluate_many(net, quad.points);

    Csv csv({"lambda", "measured_l2", "thm1_bound", "ok"});
    json rows = json::array();
    std::vector<double> measured;
    bool all_ok = true;
    double quad_error = 0.0;
    for (double lambda : lambdas) {
      const MollificationConfig cfg(lambda, domain.dimension() + 1);
      const MollifiedValues mv = mollified_evaluate_many(net, cfg, quad.points, mq);
      const double err = l2_norm_of_values(base - mv.values, quad).value;
      const Theorem1Bound bound = theorem1_bound(net, cfg, e_b);
      const bool ok = err <= bound.value;
      all_ok = all_ok && ok;
      quad_error = std::max(quad_error, mv.max_error_estimate);
      measured.push_back(err);
      csv << lambda << err << bound.value << ok;
      csv.end_row();
      rows.push_back({{"lambda", lambda}, {"measured_l2", err}, {"thm1_bound", bound.value},
                      {"case", to_string(bound.which)}, {"ok", ok}});
    }
    const double slope = loglog_slope(lambdas, measured);
    r.files.push_back({"mollification_" + name + ".csv", csv.str()});
    r.assertions.push_back({"dominance_" + name, all_ok, "measured L2 error <= mollification bound at every lambda"});
    if (spec.contains("expect_slope")) r.assertions.push_back(slope_assertion("slope_" + name, slope, spec.at("expect_slope")));
    r.summary.push_back({{"name", name},
                         {"activation", io::to_json(net.activation())},
                         {"atoms", net.atom_count()},
                         {"coefficient_size", net.coefficient_size()},
                         {"e_b", e_b},
                         {"quadrature", to_string(quad.method)},
                         {"mollifier_error_estimate", quad_error},
                         {"loglog_slope", std::isfinite(slope) ? json(slope) : json()},
                         {"rows", rows}});
  }
  return r;
}

ExperimentResult verify_expectation(const json& config) {
  const std::uint64_t seed = master_seed(config);
  const Domain domain = io::domain_from_json(field(config, "domain"));
  const int n = domain.dimension();
  const BaseApproximation net = resolve_network(field(config, "network"), domain, seed);
  require_dimension(n, net.input_dimension(), "network input dimension");
  const double lambda = io::number(config, "lambda");
  const int big_r = static_cast<int>(io::integer(config, "R"));
  const int seeds = static_cast<int>(io::integer_or(config, "seeds", 2000));
  const double z_max = io::number_or(config, "z_threshold", 4.0);
  if (seeds < 2) throw ConfigError("seeds must be at least 2");
  const MollifierQuadrature mq = io::mollifier_quadrature_from_json(optional(config, "mollifier_quadrature"));

  const MollificationConfig cfg(lambda, n + 1);
  const SamplingDensity density =
      io::density_from_json(optional(config, "density"), expand_parameter_set(net.parameter_set(), lambda));
  const json& tp = field(config, "test_points");
  const Matrix points = tp.is_number_integer()
                            ? uniform_sample(domain, static_cast<std::size_t>(tp.get<std::int64_t>()),
                                             stream(seed, kTestPoints, 0))
                            : Matrix(io::to_matrix(tp, "test_points").transpose());
  require_dimension(n, points.rows(), "test point dimension");
  const Vector target = mollified_evaluate_many(net, cfg, points, mq).values;
  const double coeff_bound = coefficient_bound(net, cfg, density, big_r);

  Vector sum = Vector::Zero(points.cols());
  Vector sum_sq = Vector::Zero(points.cols());
  std::size_t coeff_violations = 0;
  double max_coeff = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const RandomApproximation f = build_random_approximation(net, cfg, density, big_r, stream(seed, kReplicates, s));
    const Vector v = evaluate_many(f, points) - target;
    sum += v;
    sum_sq += v.cwiseProduct(v);
    const Vector abs_c = f.coefficients().cwiseAbs();
    max_coeff = std::max(max_coeff, abs_c.maxCoeff());
    coeff_violations += static_cast<std::size_t>((abs_c.array() > coeff_bound).count());
  }

  Csv csv(concat(concat({"point"}, indexed("x_", n)), {"target", "mean", "std_error", "z", "ok"}));
  bool all_ok = true;
  double worst_z = 0.0;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mean_dev = sum(j) / seeds;
    const double var = std::max(0.0, (sum_sq(j) - seeds * mean_dev * mean_dev) / (seeds - 1));
    const double se = std::sqrt(var / seeds);
    const double z = se > 0.0 ? std::abs(mean_dev) / se : (mean_dev == 0.0 ? 0.0 : INFINITY);
    const bool ok = z <= z_max;
    all_ok = all_ok && ok;
    worst_z = std::max(worst_z, z);
    csv << static_cast<long>(j);
    for (int k = 0; k < n; ++k) csv << points(k, j);
    csv << target(j) << target(j) + mean_dev << se << z << ok;
    csv.end_row();
  }

  ExperimentResult r;
  r.files.push_back({"expectation.csv", csv.str()});
  r.assertions.push_back({"unbiased", all_ok, "max z-score " + format_number(worst_z) + " <= " + format_number(z_max)});
  r.assertions.push_back({"coefficient_bound", coeff_violations == 0,
                          std::to_string(coeff_violations) + " coefficients above " + format_number(coeff_bound)});
  r.summary = {{"lambda", lambda},
               {"R", big_r},
               {"seeds", seeds},
               {"test_points", points.cols()},
               {"max_z", worst_z},
               {"coefficient_bound", coeff_bound},
               {"max_abs_coefficient", max_coeff},
               {"coefficient_violations", coeff_violations},
               {"density", density.id()}};
  return r;
}

ExperimentResult verify_concentration(const json& config) {
  const std::uint64_t seed = master_seed(config);
  const Domain domain = io::domain_from_json(field(config, "domain"));
  const int n = domain.dimension();
  const BaseApproximation net = resolve_network(field(config, "network"), domain, seed);
  require_dimension(n, net.input_dimension(), "network input dimension");
  const double lambda = io::number(config, "lambda");
  const std::vector<int> rs = integer_list(field(config, "R"), "R");
  const std::vector<double> nus = number_list(field(config, "nu"), "nu");
  if (nus.empty()) throw ConfigError("nu must be nonempty");
  const auto trials = static_cast<std::size_t>(io::integer_or(config, "trials", 2000));
  const QuadratureSpec qspec = quadrature_spec(config, seed);
  const MollifierQuadrature mq = io::mollifier_quadrature_from_json(optional(config, "mollifier_quadrature"));
  const MollificationConfig cfg(lambda, n + 1);
  const SamplingDensity density =
      io::density_from_json(optional(config, "density"), expand_parameter_set(net.parameter_set(), lambda));

  ExperimentResult r;
  r.summary = json::array();
  std::vector<double> r_values;
  std::vector<double> means;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const ConcentrationReport rep =
        concentration_experiment(net, cfg, domain, density, rs[k], nus[0], trials, stream(seed, kTrials, k), qspec, mq);
    r_values.push_back(rs[k]);
    means.push_back(rep.mean_h_b);
    json per_nu = json::array();
    for (double nu : nus) {
      const BoundReport b = theorem2_bound(net, cfg, density, rs[k], nu, 0.0, rep.bound.e_b, rep.bound.which);
      const double level = b.concentration_term;
      Csv csv({"trial", "seed", "h_B", "bound_level", "violated", "max_abs_coeff", "coeff_bound"});
      std::size_t violations = 0;
      for (const auto& t : rep.trials) {
        const bool violated = t.h_b > level;
        violations += violated;
        csv << t.trial << t.seed << t.h_b << level << violated << t.max_abs_coeff << t.coeff_bound;
        csv.end_row();
      }
      const double m = static_cast<double>(trials);
      const double frac = violations / m;
      const double allowed = nu + 3.0 * std::sqrt(nu * (1.0 - nu) / m);
      const std::string tag = "R" + std::to_string(rs[k]) + "_nu" + format_number(nu);
      r.files.push_back({"concentration_" + tag + ".csv", csv.str()});
      r.assertions.push_back({"violation_rate_" + tag, frac <= allowed,
                              "fraction " + format_number(frac) + " <= " + format_number(allowed)});
      per_nu.push_back({{"nu", nu}, {"bound_level", level}, {"violation_fraction", frac}, {"allowed_fraction", allowed},
                        {"bound_total", b.total}, {"k_coefficient", b.k_coefficient}});
    }
    const std::string tag = "R" + std::to_string(rs[k]);
    r.assertions.push_back({"coefficient_bound_" + tag, rep.coefficient_violations == 0,
                            std::to_string(rep.coefficient_violations) + " trials with a coefficient above the bound"});
    r.assertions.push_back({"expectation_" + tag, rep.mean_h_b <= rep.bound.expectation_bound,
                            "mean h_B " + format_number(rep.mean_h_b) + " <= " +
                                format_number(rep.bound.expectation_bound)});
    r.summary.push_back({{"R", rs[k]},
                         {"case", to_string(rep.bound.which)},
                         {"mean_h_B", rep.mean_h_b},
                         {"mean_h_B_std_error", rep.mean_h_b_std_error},
                         {"expectation_bound", rep.bound.expectation_bound},
                         {"mollifier_error_estimate", rep.mollifier_error_estimate},
                         {"levels", per_nu}});
  }
  const double slope = loglog_slope(r_values, means);
  if (config.contains("expect_slope")) r.assertions.push_back(slope_assertion("mean_h_B_slope", slope, config.at("expect_slope")));
  r.summary = {{"per_R", r.summary}, {"loglog_slope", std::isfinite(slope) ? json(slope) : json()}};
  return r;
}

ExperimentResult verify_linf(const json& config) {
  const std::uint64_t seed = master_seed(config);
  const json& pairs = field(config, "pairs");
  if (!pairs.is_array() || pairs.empty()) throw ConfigError("pairs must be a nonempty array");
  const LinfSpec lspec = io::linf_spec_from_json(optional(config, "linf"));

  ExperimentResult r;
  r.summary = json::array();
  Csv csv({"pair", "domain", "n", "case", "epsilon_n", "linf_grid", "bound", "ok"});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const json& p = pairs[k];
    const std::string name = io::string_or(p, "name", "pair" + std::to_string(k));
    const Domain domain = io::domain_from_json(field(p, "domain"));
    const int n = domain.dimension();
    const io::Target target = io::target_from_json(field(p, "target"), n);
    const Activation act = io::activation_from_json(field(p, "activation"));
    const ParameterSet params = io::parameter_set_from_json(field(p, "parameter_set"), n);
    const json& fit = field(p, "fit");
    FitSpec fs;
    fs.atom_budget = static_cast<int>(io::integer_or(fit, "atom_budget", fs.atom_budget));
    fs.coefficient_budget = io::number_or(fit, "coefficient_budget", fs.coefficient_budget);
    fs.collocation_points = static_cast<std::size_t>(io::integer_or(fit, "collocation_points", 4096));
    fs.holdout_points = static_cast<std::size_t>(io::integer_or(fit, "holdout_points", 256));
    fs.seed = stream(seed, kFit, k);
    const AffineShift shift = default_affine_shift(target.f, n);
    const BaseApproximation net = fit_base(target.f, domain, params, act, fs, shift).net;
    const ScalarField residual = [&](const PointRef& x) { return shift.apply(target.f, x) - evaluate(net, x); };

    // epsilon_N on the deterministic rule (plus three standard errors under Monte Carlo).
    QuadratureSpec qspec = io::quadrature_from_json(optional(p, "quadrature"));
    qspec.seed = stream(seed, kQuadrature, k);
    const NormEstimate eps = l2_norm(residual, domain, qspec);
    const double epsilon_n = eps.value + 3.0 * eps.std_error;

    NetConstant nc;
    if (act.lipschitz_constant()) {
      nc = {BoundCase::lipschitz, lipschitz_constant(net)};
    } else {
      nc = {BoundCase::bounded, boundedness_constant(net)};
    }
    const DomainGeometry geom = geometry_summary(domain);
    const LinfBoundReport bound = linf_extension_bound(epsilon_n, geom, target.lipschitz, shift.a.norm(), nc, n);
    const LinfEstimate sup = linf_norm(residual, domain, lspec);
    const bool ok = sup.value <= bound.total;
    csv << name << std::string(domain.kind() == DomainKind::box ? "box" : "ball") << n << std::string(to_string(nc.kind))
        << epsilon_n << sup.value << bound.total << ok;
    csv.end_row();
    r.assertions.push_back({"linf_dominance_" + name, ok,
                            "grid sup " + format_number(sup.value) + " <= " + format_number(bound.total)});
    r.summary.push_back({{"name", name},
                         {"target", target.name},
                         {"target_lipschitz", target.lipschitz},
                         {"a_norm", shift.a.norm()},
                         {"net_constant", nc.value},
                         {"atoms", net.atom_count()},
                         {"epsilon_n", epsilon_n},
                         {"epsilon_quadrature", to_string(eps.method)},
                         {"geometric_factor", bound.geometric_factor},
                         {"k_eps", bound.k_eps},
                         {"bound", bound.total},
                         {"linf_grid", sup.value},
                         {"linf_coarse", sup.coarse_value},
                         {"argmax", io::from_vector(sup.argmax)}});
  }
  r.files.push_back({"linf.csv", csv.str()});
  return r;
}

ExperimentResult verify_maurey(const json& config) {
  const std::uint64_t seed = master_seed(config);
  const Domain domain = io::domain_from_json(field(config, "domain"));
  const BaseApproximation dense = resolve_network(field(config, "network"), domain, seed);
  require_dimension(domain.dimension(), dense.input_dimension(), "network input dimension");
  const std::vector<int> counts = integer_list(field(config, "N"), "N");
  const int seeds = static_cast<int>(io::integer_or(config, "seeds", 50));
  if (seeds < 2) throw ConfigError("seeds must be at least 2");
  const QuadratureSpec qspec = quadrature_spec(config, seed);
  const DomainQuadrature quad = domain_quadrature(domain, qspec);
  const double budget = dense.coefficient_size();
  const Vector dense_values = evaluate_many(dense, quad.points);

  // b = largest L2 norm of a single dictionary element sigma(gamma_i^T X).
  double b = 0.0;
  for (Eigen::Index i = 0; i < dense.atom_count(); ++i) {
    const BaseApproximation atom(dense.activation(), Vector::Ones(1), dense.gammas().col(i), dense.parameter_set());
    b = std::max(b, l2_norm_of_values(evaluate_many(atom, quad.points), quad).value);
  }
  const double f_norm = l2_norm_of_values(dense_values, quad).value;

  Csv rows({"N", "seed", "l2_error"});
  Csv table({"N", "mean_l2_error", "std_error", "rms_l2_error", "rate_bound"});
  std::vector<double> ns;
  std::vector<double> means;
  json summary = json::array();
  bool within_rate = true;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const int count = counts[k];
    double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t sub_seed = derive_seed(stream(seed, kSubsample, k), s);
      const BaseApproximation sub = maurey_subsample(dense, budget, count, sub_seed);
      const double err = l2_norm_of_values(dense_values - evaluate_many(sub, quad.points), quad).value;
      rows << count << sub_seed << err;
      rows.end_row();
      sum += err;
      sum_sq += err * err;
      sum_4 += err * err * err * err;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt(std::max(0.0, (sum_sq / seeds - mean * mean) / (seeds - 1)));
    const double ms = sum_sq / seeds;
    const double ms_se = std::sqrt(std::max(0.0, (sum_4 / seeds - ms * ms) / (seeds - 1)));
    const double rate_sq = std::max(0.0, budget * budget * b * b - f_norm * f_norm) / count;
    within_rate = within_rate && ms <= rate_sq + 3.0 * ms_se;
    table << count << mean << se << std::sqrt(ms) << std::sqrt(rate_sq);
    table.end_row();
    ns.push_back(count);
    means.push_back(mean);
    summary.push_back({{"N", count}, {"mean_l2_error", mean}, {"std_error", se}, {"rms_l2_error", std::sqrt(ms)},
                       {"rate_bound", std::sqrt(rate_sq)}});
  }
  const double slope = loglog_slope(ns, means);

  ExperimentResult r;
  r.files.push_back({"maurey.csv", rows.str()});
  r.files.push_back({"maurey_summary.csv", table.str()});
  r.assertions.push_back({"mean_square_rate", within_rate, "E||f - f_N||^2 <= (S^2 b^2 - ||f||^2) / N (3 s.e. slack)"});
  if (config.contains("expect_slope")) r.assertions.push_back(slope_assertion("loglog_slope", slope, config.at("expect_slope")));
  r.summary = {{"budget", budget},
               {"dense_atoms", dense.atom_count()},
               {"b", b},
               {"dense_l2", f_norm},
               {"loglog_slope", std::isfinite(slope) ? json(slope) : json()},
               {"per_N", summary}};
  return r;
}

ExperimentResult simulate_mrac(const json& config) {
  using namespace mrac;
  const std::uint64_t seed = master_seed(config);
  const json& pj = field(config, "plant");
  const json& fj = field(config, "features");
  const json& rj = field(config, "reference");
  const json gj = optional(config, "gains");

  PlantModel plant;
  plant.a = io::to_matrix(field(pj, "A"), "plant.A");
  plant.b = io::to_matrix(field(pj, "B"), "plant.B");
  plant.region_radius = io::number_or(pj, "region_radius", 1e6);
  const int n = plant.state_dim();
  const int l = plant.input_dim();

  const int count = static_cast<int>(io::integer(fj, "count"));
  if (count < 0) throw ConfigError("features.count must be nonnegative");
  const ParameterSet params = io::parameter_set_from_json(field(fj, "parameter_set"), n);
  Matrix gammas(n + 1, count);
  {
    Rng rng = make_rng(stream(seed, kFeatures, 0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 0; j < count; ++j)
      for (int a = 0; a <= n; ++a)
        gammas(a, j) = params.lower()(a) + (params.upper()(a) - params.lower()(a)) * unit(rng);
  }
  const FeatureMap psi(gammas, io::activation_from_json(field(fj, "activation")));

  const json& tj = field(pj, "theta");
  if (tj.is_object()) {
    const double scale = io::number(tj, "scale");
    Rng rng = make_rng(stream(seed, kTheta, 0));
    std::uniform_real_distribution<double> unit(-scale, scale);
    plant.theta.resize(count, l);
    for (int j = 0; j < count; ++j)
      for (int c = 0; c < l; ++c) plant.theta(j, c) = unit(rng);
  } else {
    plant.theta = io::to_matrix(tj, "plant.theta");
  }

  const json ej = optional(pj, "eps_f");
  const std::string eps_kind = ej.is_null() ? "none" : io::string_or(ej, "kind", "none");
  if (eps_kind == "sine") {
    const double bar = io::number(ej, "eps_bar");
    const double w = io::number_or(ej, "frequency", 1.0);
    plant.eps_bar = bar;
    plant.eps_f = [bar, w, l](const PointRef& x) {
      Vector out(l);
      for (int c = 0; c < l; ++c) out(c) = bar / std::sqrt(static_cast<double>(l)) * std::sin(w * x.sum() + c);
      return out;
    };
  } else if (eps_kind != "none") {
    throw ConfigError("plant.eps_f.kind must be 'none' or 'sine'");
  }
  validate(plant, 1000, stream(seed, kQuadrature, 0));

  ReferenceModel ref{io::to_matrix(field(rj, "A_r"), "reference.A_r"), io::to_matrix(field(rj, "B_r"), "reference.B_r"),
                     io::signal_from_json(field(rj, "signal"))};
  validate(ref);

  const Matrix q = gj.is_object() && gj.contains("Q") ? io::to_matrix(gj.at("Q"), "gains.Q") : Matrix::Identity(n, n);
  const double rate = io::number_or(gj, "gamma_a", 10.0);
  const GainSet gains = design_gains(plant, ref, q, rate, count);
  const MatchingGains match = solve_matching(plant.a, plant.b, ref.a_r, ref.b_r);
  const double lyap_residual = (ref.a_r.transpose() * gains.p_x + gains.p_x * ref.a_r + q).norm();
  const double p_min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(gains.p_x).eigenvalues().minCoeff();

  AdaptiveState init;
  init.x = config.contains("x0") ? io::to_vector(config.at("x0"), "x0") : Vector::Zero(n);
  init.x_r = config.contains("xr0") ? io::to_vector(config.at("xr0"), "xr0") : Vector::Zero(n);
  init.theta_hat = Matrix::Zero(count, l);
  require_dimension(n, init.x.size(), "x0");
  require_dimension(n, init.x_r.size(), "xr0");

  SimulationConfig sc;
  sc.dt = io::number_or(config, "dt", sc.dt);
  sc.duration = io::number_or(config, "duration", sc.duration);
  sc.output_every = static_cast<int>(io::integer_or(config, "output_every", sc.output_every));
  sc.final_window = io::number_or(config, "final_window", sc.final_window);
  const Trajectory traj = simulate(plant, ref, gains, psi, init, sc);

  Csv csv(concat(concat(concat(concat(concat({"t"}, indexed("x_", n)), indexed("xr_", n)), {"e_norm"}),
                        indexed("u_", l)),
                 {"theta_err_fro"}));
  for (const auto& s : traj.samples) {
    csv << s.t;
    for (int k = 0; k < n; ++k) csv << s.x(k);
    for (int k = 0; k < n; ++k) csv << s.x_r(k);
    csv << s.e_norm;
    for (int k = 0; k < l; ++k) csv << s.u(k);
    csv << s.theta_err_fro;
    csv.end_row();
  }

  ExperimentResult r;
  r.files.push_back({"trajectory.csv", csv.str()});
  const double match_res = std::max(match.residual_x, match.residual_r);
  r.assertions.push_back({"matching_residual", match_res <= 1e-8, format_number(match_res) + " <= 1e-8"});
  r.assertions.push_back({"lyapunov_residual", lyap_residual <= 1e-8 && p_min_eig > 0.0,
                          format_number(lyap_residual) + " <= 1e-8, min eig(P_x) " + format_number(p_min_eig)});
  r.assertions.push_back({"completed", traj.status == SimulationStatus::completed,
                          std::string(to_string(traj.status)) + (traj.message.empty() ? "" : ": " + traj.message)});
  const json aj = optional(config, "assert");
  if (!plant.eps_f) {
    const double tol = io::number_or(aj, "lyapunov_tolerance", 1e-6);
    r.assertions.push_back({"lyapunov_descent", traj.max_lyapunov_increase <= tol,
                            "max V increase per step " + format_number(traj.max_lyapunov_increase) + " <= " +
                                format_number(tol)});
  }
  if (aj.is_object() && aj.contains("final_window_max_e")) {
    const double limit = io::number(aj, "final_window_max_e");
    r.assertions.push_back({"tracking", traj.final_window_max_e <= limit,
                            "final-window max ||e|| " + format_number(traj.final_window_max_e) + " <= " +
                                format_number(limit)});
  }

  json richardson;
  if (config.contains("richardson")) {
    const json& rc = config.at("richardson");
    const std::vector<double> dts = number_list(field(rc, "dt"), "richardson.dt");
    if (dts.size() != 3) throw ConfigError("richardson.dt needs three step sizes");
    std::vector<Vector> finals;
    for (double dt : dts) {
      SimulationConfig c;
      c.dt = dt;
      c.duration = io::number(rc, "duration");
      c.output_every = std::numeric_limits<int>::max();
      c.final_window = 0.0;
      c.monitor_region = false;
      const AdaptiveState s = simulate(plant, ref, gains, psi, init, c).final_state;
      Vector flat(s.x.size() + s.x_r.size() + s.theta_hat.size());
      flat << s.x, s.x_r, s.theta_hat.reshaped();
      finals.push_back(flat);
    }
    const double coarse_diff = (finals[0] - finals[1]).norm();
    const double fine_diff = (finals[1] - finals[2]).norm();
    const double ratio = coarse_diff / fine_diff;
    const double lo = io::number_or(rc, "low", 12.0);
    const double hi = io::number_or(rc, "high", 20.0);
    r.assertions.push_back({"rk4_order", ratio >= lo && ratio <= hi,
                            "Richardson ratio " + format_number(ratio) + " in [" + format_number(lo) + ", " +
                                format_number(hi) + "]"});
    richardson = {{"dt", dts}, {"ratio", ratio}, {"coarse_difference", coarse_diff}, {"fine_difference", fine_diff}};
  }

  r.summary = {{"status", to_string(traj.status)},
               {"message", traj.message},
               {"final_window_mean_e", traj.final_window_mean_e},
               {"final_window_max_e", traj.final_window_max_e},
               {"max_lyapunov_increase", traj.max_lyapunov_increase},
               {"matching_residual_x", match.residual_x},
               {"matching_residual_r", match.residual_r},
               {"lyapunov_residual", lyap_residual},
               {"k_x", io::from_matrix(gains.k_x)},
               {"k_r", io::from_matrix(gains.k_r)},
               {"p_x", io::from_matrix(gains.p_x)},
               {"final_theta_err_fro", traj.samples.empty() ? 0.0 : traj.samples.back().theta_err_fro},
               {"eps_f", eps_kind},
               {"richardson", richardson}};
  return r;
}

}  // namespace mollify::experiments
