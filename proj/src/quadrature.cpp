#include "mollify/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "mollify/error.hpp"

namespace mollify {
namespace {

GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule rule{Vector(n), Vector(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

const GaussLegendreRule& gauss_legendre(int nodes) {
  if (nodes < 1) throw InvalidSpecError("gauss_legendre: node count must be positive");
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(nodes);
  if (it == cache.end()) it = cache.emplace(nodes, compute_rule(nodes)).first;
  return it->second;
}

GaussLegendreRule gauss_legendre(int nodes, double a, double b) {
  GaussLegendreRule rule = gauss_legendre(nodes);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  rule.nodes = (rule.nodes.array() * half + mid).matrix();
  rule.weights *= half;
  return rule;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_panels) {
  const auto& rule = gauss_legendre(16);
  auto panel_sum = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) s += rule.weights(i) * f(mid + half * rule.nodes(i));
    return s * half;
  };
  auto make_panel = [&](double lo, double hi) {
    const double whole = panel_sum(lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double split = panel_sum(lo, mid) + panel_sum(mid, hi);
    return Panel{lo, hi, split, std::abs(split - whole)};
  };

  std::priority_queue<Panel> panels;
  panels.push(make_panel(a, b));
  double total = panels.top().value;
  double error = panels.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(panels.size()) < max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = make_panel(worst.a, mid);
    const Panel right = make_panel(mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to avoid drift from incremental updates.
  total = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    panels.pop();
  }
  return total;
}

}  // namespace mollify
