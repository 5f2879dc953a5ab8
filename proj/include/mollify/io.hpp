#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "mollify/activation.hpp"
#include "mollify/domain.hpp"
#include "mollify/error_analysis.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/mrac.hpp"
#include "mollify/random_approx.hpp"
#include "mollify/ridge_network.hpp"

// JSON encodings of the library types. Matrices are row-major nested arrays.
// Malformed input raises ConfigError naming the offending field.
namespace mollify::io {

using json = nlohmann::json;

const json& field(const json& j, const std::string& key);
double number(const json& j, const std::string& key);
double number_or(const json& j, const std::string& key, double fallback);
std::int64_t integer(const json& j, const std::string& key);
std::int64_t integer_or(const json& j, const std::string& key, std::int64_t fallback);
std::uint64_t unsigned_or(const json& j, const std::string& key, std::uint64_t fallback);
std::string string_or(const json& j, const std::string& key, const std::string& fallback);

Vector to_vector(const json& j, const std::string& what);
/// Nested rows; a bare number is read as 1 x 1.
Matrix to_matrix(const json& j, const std::string& what);
json from_vector(const Vector& v);
json from_matrix(const Matrix& m);

/// {"kind":"box","center":[..],"half_widths":[..]} or {"kind":"ball","center":[..],"radius":r}
Domain domain_from_json(const json& j);
json to_json(const Domain& d);

/// {"kind":"relu"}, {"kind":"step","c":1}, {"kind":"tanh"}, {"kind":"sigmoid"}
Activation activation_from_json(const json& j);
json to_json(const Activation& a);

/// {"half":h} for [-h,h]^{n+1}, or {"lower":[..],"upper":[..]}
ParameterSet parameter_set_from_json(const json& j, int input_dim);
json to_json(const ParameterSet& p);

/// {"activation":{..},"parameter_set":{..},"atoms":[{"theta":t,"w":[..],"b":b},..]}.
/// `input_dim` is used when the atom list is empty.
BaseApproximation network_from_json(const json& j, int input_dim);
json to_json(const BaseApproximation& net);
json to_json(const RandomApproximation& net);

/// {"kind":"uniform"} or {"kind":"grid","cells":[..],"values":[..],"p_min":p}
SamplingDensity density_from_json(const json& j, const ExpandedParameterSet& support);

QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec defaults = {});
MollifierQuadrature mollifier_quadrature_from_json(const json& j, MollifierQuadrature defaults = {});
LinfSpec linf_spec_from_json(const json& j, LinfSpec defaults = {});

/// {"kind":"constant","value":[..]}, {"kind":"sinusoid"|"square","amplitude":[..],"frequency":[..],"phase":[..]}
mrac::ReferenceSignal signal_from_json(const json& j);

/// Closed-form targets with a known Lipschitz constant on the whole space.
struct Target {
  ScalarField f;
  double lipschitz = 0.0;
  std::string name;
};

/// {"kind":"sine","amplitude":a,"frequency":[..],"phase":p}: a sin(w^T x + p)
/// {"kind":"ridge_sum","terms":[{"amplitude":a,"direction":[..]}..]}: sum a_k |d_k^T x|
Target target_from_json(const json& j, int input_dim);

/// FNV-1a (64 bit) of the compact JSON dump; keys are sorted, so the hash is canonical.
std::uint64_t config_hash(const json& config);
std::string hex(std::uint64_t value);

/// Applies "a.b.c=value". The value is parsed as JSON when possible, else kept as a string.
void apply_override(json& config, const std::string& assignment);

/// Shortest round-trip decimal form ("%.17g"), locale independent.
std::string format_number(double value);

}  // namespace mollify::io
