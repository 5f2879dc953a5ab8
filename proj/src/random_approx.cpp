#include "mollify/random_approx.hpp"

#include <cmath>
#include <sstream>

#include "mollify/error.hpp"
#include "mollify/rng.hpp"

namespace mollify {

SamplingDensity::SamplingDensity(ExpandedParameterSet support) : support_(std::move(support)) {}

SamplingDensity SamplingDensity::uniform(const ExpandedParameterSet& support) {
  SamplingDensity d(support);
  d.kind_ = DensityKind::uniform;
  d.p_min_ = 1.0 / support.volume;
  return d;
}

SamplingDensity SamplingDensity::grid(const ExpandedParameterSet& support, std::vector<int> cells_per_axis,
                                      Vector cell_values, double p_min) {
  const int dim = support.box.dimension();
  if (static_cast<int>(cells_per_axis.size()) != dim) {
    throw InvalidInputError("grid density: need one cell count per parameter axis");
  }
  Eigen::Index total = 1;
  for (int c : cells_per_axis) {
    if (c <= 0) throw InvalidInputError("grid density: cell counts must be positive");
    total *= c;
  }
  require_dimension(total, cell_values.size(), "grid density values");
  if (!cell_values.allFinite() || (cell_values.array() <= 0.0).any()) {
    throw InvalidInputError("grid density: values must be strictly positive");
  }
  const double cell_volume = support.volume / static_cast<double>(total);
  const Vector normalized = cell_values / (cell_values.sum() * cell_volume);
  if (!(p_min > 0.0) || p_min > normalized.minCoeff() * (1.0 + 1e-12)) {
    throw InvalidInputError("grid density: declared p_min must be positive and below every cell value");
  }
  SamplingDensity d(support);
  d.kind_ = DensityKind::grid_tabulated;
  d.cells_ = std::move(cells_per_axis);
  d.values_ = normalized;
  d.p_min_ = p_min;
  return d;
}

std::string SamplingDensity::id() const {
  std::ostringstream os;
  os << (kind_ == DensityKind::uniform ? "uniform" : "grid") << "(lambda=" << support_.lambda << ")";
  return os.str();
}

Eigen::Index SamplingDensity::cell_of(const PointRef& gamma) const {
  const ParameterSet& box = support_.box;
  Eigen::Index flat = 0;
  for (int a = 0; a < box.dimension(); ++a) {
    const double rel = (gamma(a) - box.lower()(a)) / (box.upper()(a) - box.lower()(a));
    const int idx = std::clamp(static_cast<int>(rel * cells_[a]), 0, cells_[a] - 1);
    flat = flat * cells_[a] + idx;
  }
  return flat;
}

double SamplingDensity::operator()(const PointRef& gamma) const {
  if (!support_.box.contains(gamma)) return 0.0;
  if (kind_ == DensityKind::uniform) return 1.0 / support_.volume;
  return values_(cell_of(gamma));
}

Matrix SamplingDensity::sample(int count, std::uint64_t seed) const {
  if (count <= 0) throw InvalidSpecError("sample_parameters: R must be positive");
  const ParameterSet& box = support_.box;
  const int dim = box.dimension();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(dim, count);
  if (kind_ == DensityKind::uniform) {
    for (int j = 0; j < count; ++j) {
      for (int a = 0; a < dim; ++a) out(a, j) = box.lower()(a) + (box.upper()(a) - box.lower()(a)) * unit(rng);
    }
    return out;
  }
  std::discrete_distribution<Eigen::Index> pick(values_.data(), values_.data() + values_.size());
  for (int j = 0; j < count; ++j) {
    Eigen::Index flat = pick(rng);
    for (int a = dim - 1; a >= 0; --a) {
      const int idx = static_cast<int>(flat % cells_[a]);
      flat /= cells_[a];
      const double width = (box.upper()(a) - box.lower()(a)) / cells_[a];
      out(a, j) = box.lower()(a) + width * (idx + unit(rng));
    }
  }
  return out;
}

RandomApproximation::RandomApproximation(Activation activation, Vector coefficients, Matrix gammas,
                                         Provenance provenance)
    : activation_(std::move(activation)),
      coefficients_(std::move(coefficients)),
      gammas_(std::move(gammas)),
      provenance_(std::move(provenance)) {
  require_dimension(coefficients_.size(), gammas_.cols(), "RandomApproximation term count");
  if (gammas_.rows() < 2) throw InvalidInputError("RandomApproximation: parameters need dimension n+1 >= 2");
}

double evaluate(const RandomApproximation& net, const PointRef& x) {
  const int n = net.input_dimension();
  require_dimension(n, x.size(), "evaluate(RandomApproximation)");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < net.size(); ++j) {
    const auto g = net.gammas().col(j);
    sum += net.coefficients()(j) * net.activation()(g.head(n).dot(x) + g(n));
  }
  return sum;
}

Vector evaluate_many(const RandomApproximation& net, const Matrix& points) {
  const int n = net.input_dimension();
  require_dimension(n, points.rows(), "evaluate_many(RandomApproximation)");
  if (net.size() == 0) return Vector::Zero(points.cols());
  Matrix z = net.gammas().topRows(n).transpose() * points;
  z.colwise() += net.gammas().row(n).transpose();
  return z.unaryExpr([&](double u) { return net.activation()(u); }).transpose() * net.coefficients();
}

Vector canonical_coefficients(const BaseApproximation& net, const MollificationConfig& cfg,
                              const SamplingDensity& density, const Matrix& samples) {
  require_dimension(cfg.dimension(), samples.rows(), "canonical_coefficients");
  const double count = static_cast<double>(samples.cols());
  Vector out(samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const double p = density(samples.col(j));
    if (p <= 0.0) throw OutOfSetError("canonical_coefficients: sample outside the density support");
    out(j) = coefficient_function(net, cfg, samples.col(j)) / (p * count);
  }
  return out;
}

double coefficient_bound(const BaseApproximation& net, const MollificationConfig& cfg,
                         const SamplingDensity& density, int count) {
  return g_lambda_max(net, cfg) / (density.p_min() * count);
}

RandomApproximation build_random_approximation(const BaseApproximation& net, const MollificationConfig& cfg,
                                               const SamplingDensity& density, int count, std::uint64_t seed,
                                               std::string source_net_id) {
  Matrix samples = density.sample(count, seed);
  Vector coeffs = canonical_coefficients(net, cfg, density, samples);
  return RandomApproximation(net.activation(), std::move(coeffs), std::move(samples),
                             Provenance{seed, density.id(), std::move(source_net_id), cfg.lambda()});
}

}  // namespace mollify
