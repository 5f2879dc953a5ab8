#include "mollify/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "mollify/error.hpp"

namespace mollify::io {
namespace {

std::string describe(const json& j) {
  std::string s = j.dump();
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

}  // namespace

const json& field(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("expected an object while looking up '" + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number, got " + describe(v));
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

std::int64_t integer(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw ConfigError("field '" + key + "' must be an integer, got " + describe(v));
  return v.get<std::int64_t>();
}

std::int64_t integer_or(const json& j, const std::string& key, std::int64_t fallback) {
  return j.is_object() && j.contains(key) ? integer(j, key) : fallback;
}

std::uint64_t unsigned_or(const json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("field '" + key + "' must be a nonnegative integer");
}

std::string string_or(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

Vector to_vector(const json& j, const std::string& what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, const std::string& what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(what + " must be a nested array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = to_vector(j[static_cast<std::size_t>(r)], what);
    if (row.size() != cols) throw ConfigError(what + " has ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

json from_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json from_matrix(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(from_vector(m.row(r).transpose()));
  return out;
}

Domain domain_from_json(const json& j) {
  const std::string kind = string_or(j, "kind", "");
  const Vector center = to_vector(field(j, "center"), "domain.center");
  if (kind == "box") return Domain::box(center, to_vector(field(j, "half_widths"), "domain.half_widths"));
  if (kind == "ball") return Domain::ball(center, number(j, "radius"));
  throw ConfigError("domain.kind must be 'box' or 'ball'");
}

json to_json(const Domain& d) {
  if (d.kind() == DomainKind::box) {
    return {{"kind", "box"}, {"center", from_vector(d.center())}, {"half_widths", from_vector(d.half_widths())}};
  }
  return {{"kind", "ball"}, {"center", from_vector(d.center())}, {"radius", d.radius()}};
}

Activation activation_from_json(const json& j) {
  const std::string kind = string_or(j, "kind", "");
  if (kind == "relu") return Activation::relu();
  if (kind == "step") return Activation::step(number_or(j, "c", 1.0));
  if (kind == "tanh") return Activation::custom([](double u) { return std::tanh(u); }, 2.0, 1.0, "tanh");
  if (kind == "sigmoid") {
    return Activation::custom([](double u) { return 1.0 / (1.0 + std::exp(-u)); }, 1.0, 0.25, "sigmoid");
  }
  throw ConfigError("activation.kind must be one of relu, step, tanh, sigmoid");
}

json to_json(const Activation& a) {
  switch (a.kind()) {
    case ActivationKind::relu:
      return {{"kind", "relu"}};
    case ActivationKind::scaled_step:
      return {{"kind", "step"}, {"c", a.step_scale()}};
    case ActivationKind::custom:
      break;
  }
  return {{"kind", a.name()}};
}

ParameterSet parameter_set_from_json(const json& j, int input_dim) {
  if (j.is_object() && j.contains("half")) return ParameterSet::symmetric(input_dim, number(j, "half"));
  return ParameterSet(to_vector(field(j, "lower"), "parameter_set.lower"),
                      to_vector(field(j, "upper"), "parameter_set.upper"));
}

json to_json(const ParameterSet& p) { return {{"lower", from_vector(p.lower())}, {"upper", from_vector(p.upper())}}; }

BaseApproximation network_from_json(const json& j, int input_dim) {
  const Activation act = activation_from_json(field(j, "activation"));
  const json& atoms = j.contains("atoms") ? j.at("atoms") : json::array();
  if (!atoms.is_array()) throw ConfigError("network.atoms must be an array");
  int n = input_dim;
  if (!atoms.empty()) n = static_cast<int>(to_vector(field(atoms[0], "w"), "atom.w").size());
  const ParameterSet params = parameter_set_from_json(field(j, "parameter_set"), n);
  Vector theta(static_cast<Eigen::Index>(atoms.size()));
  Matrix gammas(n + 1, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Vector w = to_vector(field(atoms[i], "w"), "atom.w");
    require_dimension(n, w.size(), "atom.w");
    theta(c) = number(atoms[i], "theta");
    gammas.col(c).head(n) = w;
    gammas(n, c) = number(atoms[i], "b");
  }
  return BaseApproximation(act, theta, gammas, params);
}

json to_json(const BaseApproximation& net) {
  const int n = net.input_dimension();
  json atoms = json::array();
  for (Eigen::Index i = 0; i < net.atom_count(); ++i) {
    atoms.push_back({{"theta", net.theta()(i)},
                     {"w", from_vector(net.gammas().col(i).head(n))},
                     {"b", net.gammas()(n, i)}});
  }
  return {{"activation", to_json(net.activation())},
          {"parameter_set", to_json(net.parameter_set())},
          {"atoms", std::move(atoms)}};
}

json to_json(const RandomApproximation& net) {
  const int n = net.input_dimension();
  json atoms = json::array();
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    atoms.push_back({{"theta", net.coefficients()(i)},
                     {"w", from_vector(net.gammas().col(i).head(n))},
                     {"b", net.gammas()(n, i)}});
  }
  const Provenance& p = net.provenance();
  return {{"activation", to_json(net.activation())},
          {"atoms", std::move(atoms)},
          {"provenance",
           {{"seed", p.seed}, {"density", p.density_id}, {"source_net", p.source_net_id}, {"lambda", p.lambda}}}};
}

SamplingDensity density_from_json(const json& j, const ExpandedParameterSet& support) {
  const std::string kind = j.is_null() ? "uniform" : string_or(j, "kind", "uniform");
  if (kind == "uniform") return SamplingDensity::uniform(support);
  if (kind == "grid") {
    std::vector<int> cells;
    for (const auto& c : field(j, "cells")) cells.push_back(c.get<int>());
    return SamplingDensity::grid(support, cells, to_vector(field(j, "values"), "density.values"), number(j, "p_min"));
  }
  throw ConfigError("density.kind must be 'uniform' or 'grid'");
}

QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec q) {
  if (j.is_null()) return q;
  q.nodes_per_axis = static_cast<int>(integer_or(j, "nodes_per_axis", q.nodes_per_axis));
  q.mc_samples = static_cast<std::size_t>(integer_or(j, "mc_samples", static_cast<std::int64_t>(q.mc_samples)));
  q.max_tensor_dimension = static_cast<int>(integer_or(j, "max_tensor_dimension", q.max_tensor_dimension));
  q.seed = unsigned_or(j, "seed", q.seed);
  return q;
}

MollifierQuadrature mollifier_quadrature_from_json(const json& j, MollifierQuadrature q) {
  if (j.is_null()) return q;
  q.nodes_per_axis = static_cast<int>(integer_or(j, "nodes_per_axis", q.nodes_per_axis));
  q.max_tensor_dimension = static_cast<int>(integer_or(j, "max_tensor_dimension", q.max_tensor_dimension));
  q.mc_points = static_cast<std::size_t>(integer_or(j, "mc_points", static_cast<std::int64_t>(q.mc_points)));
  if (j.contains("estimate_error")) q.estimate_error = j.at("estimate_error").get<bool>();
  return q;
}

LinfSpec linf_spec_from_json(const json& j, LinfSpec s) {
  if (j.is_null()) return s;
  s.grid_points = static_cast<std::size_t>(integer_or(j, "grid_points", static_cast<std::int64_t>(s.grid_points)));
  s.refinement_rounds = static_cast<int>(integer_or(j, "refinement_rounds", s.refinement_rounds));
  s.refinement_points_per_axis =
      static_cast<int>(integer_or(j, "refinement_points_per_axis", s.refinement_points_per_axis));
  return s;
}

mrac::ReferenceSignal signal_from_json(const json& j) {
  const std::string kind = string_or(j, "kind", "");
  if (kind == "constant") return mrac::ReferenceSignal::constant(to_vector(field(j, "value"), "signal.value"));
  if (kind == "sinusoid" || kind == "square") {
    const Vector amp = to_vector(field(j, "amplitude"), "signal.amplitude");
    const Vector freq = to_vector(field(j, "frequency"), "signal.frequency");
    const Vector phase = j.contains("phase") ? to_vector(j.at("phase"), "signal.phase") : Vector();
    auto s = kind == "sinusoid" ? mrac::ReferenceSignal::sinusoid(amp, freq, phase)
                                : mrac::ReferenceSignal::square(amp, freq, phase);
    if (j.contains("offset")) s.offset = to_vector(j.at("offset"), "signal.offset");
    return s;
  }
  throw ConfigError("reference signal kind must be constant, sinusoid or square");
}

Target target_from_json(const json& j, int input_dim) {
  const std::string kind = string_or(j, "kind", "");
  if (kind == "sine") {
    const double a = number(j, "amplitude");
    const Vector w = to_vector(field(j, "frequency"), "target.frequency");
    require_dimension(input_dim, w.size(), "target.frequency");
    const double p = number_or(j, "phase", 0.0);
    return {[a, w, p](const PointRef& x) { return a * std::sin(w.dot(x) + p); }, std::abs(a) * w.norm(), "sine"};
  }
  if (kind == "ridge_sum") {
    std::vector<std::pair<double, Vector>> terms;
    double lip = 0.0;
    for (const auto& t : field(j, "terms")) {
      const Vector d = to_vector(field(t, "direction"), "target.direction");
      require_dimension(input_dim, d.size(), "target.direction");
      terms.emplace_back(number(t, "amplitude"), d);
      lip += std::abs(terms.back().first) * d.norm();
    }
    return {[terms](const PointRef& x) {
              double s = 0.0;
              for (const auto& [a, d] : terms) s += a * std::abs(d.dot(x));
              return s;
            },
            lip, "ridge_sum"};
  }
  throw ConfigError("target.kind must be 'sine' or 'ridge_sum'");
}

std::uint64_t config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override has an empty key: " + path);
    if (!node->is_object()) throw ConfigError("override path does not name an object: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace mollify::io
