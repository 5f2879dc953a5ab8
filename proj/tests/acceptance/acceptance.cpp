// Acceptance suite: one PASS/FAIL line per criterion, details indented below it.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mollify/experiments.hpp"
#include "mollify/io.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/quadrature.hpp"

namespace fs = std::filesystem;
using mollify::io::json;
using mollify::experiments::ExperimentResult;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    passed = passed && ok;
    details.push_back(std::string(ok ? "ok    " : "FAILED") + "  " + what);
  }
};

json load(const std::string& name) {
  std::ifstream in(fs::path(MOLLIFY_CONFIG_DIR) / name);
  if (!in) throw std::runtime_error("missing config " + name);
  return json::parse(in);
}

// Folds every assertion of an experiment run into the outcome.
void absorb(Outcome& out, const ExperimentResult& r, const std::string& prefix = "") {
  for (const auto& a : r.assertions) out.check(a.passed, prefix + a.name + ": " + a.detail);
}

Outcome normalization() {
  Outcome out;
  const double eta_inv = 1.0 / mollify::eta_constant();
  char buf[96];
  std::snprintf(buf, sizeof buf, "1/eta = %.6f (0.444 to three digits)", eta_inv);
  out.check(std::abs(eta_inv - 0.444) < 5e-4, buf);

  const auto& rule = mollify::gauss_legendre(200);
  for (int d = 1; d <= 3; ++d) {
    for (double lambda : {1.0, 2.0, 5.0}) {
      const mollify::MollificationConfig cfg(lambda, d);
      // Tensor Gauss-Legendre over the support [-1/lambda, 1/lambda]^d.
      const int m = static_cast<int>(rule.nodes.size());
      const double half = 1.0 / lambda;
      long total = 1;
      for (int k = 0; k < d; ++k) total *= m;
      std::vector<int> idx(d, 0);
      mollify::Vector u(d);
      double integral = 0.0;
      for (long j = 0; j < total; ++j) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
          u(k) = half * rule.nodes(idx[k]);
          w *= half * rule.weights(idx[k]);
        }
        integral += w * mollify::mollified_delta(cfg, u);
        for (int k = d - 1; k >= 0; --k) {
          if (++idx[k] < m) break;
          idx[k] = 0;
        }
      }
      std::snprintf(buf, sizeof buf, "lambda=%g d=%d integral=%.12f", lambda, d, integral);
      out.check(std::abs(integral - 1.0) <= 1e-6, buf);
    }
  }
  return out;
}

Outcome theorem1() {
  Outcome out;
  const json config = load("mollification.json");
  int nets = 0;
  for (const auto& n : config.at("networks")) nets += !n.at("atoms").empty();
  out.check(nets >= 5, std::to_string(nets) + " nonempty synthetic nets");
  absorb(out, mollify::experiments::run(config));
  return out;
}

Outcome lemma1() {
  Outcome out;
  absorb(out, mollify::experiments::run(load("expectation.json")));
  return out;
}

Outcome theorem2() {
  Outcome out;
  absorb(out, mollify::experiments::run(load("concentration.json")));
  return out;
}

Outcome lemma2() {
  Outcome out;
  const json config = load("linf.json");
  out.check(config.at("pairs").size() >= 5, std::to_string(config.at("pairs").size()) + " target/approximation pairs");
  absorb(out, mollify::experiments::run(config));
  return out;
}

Outcome maurey() {
  Outcome out;
  absorb(out, mollify::experiments::run(load("maurey.json")));
  return out;
}

Outcome mrac() {
  Outcome out;
  const json tracking = load("mrac.json");
  out.check(tracking.at("features").at("count") == 32 && tracking.at("dt") == 0.001 && tracking.at("duration") == 50,
            "tracking config: n=2, N=32, dt=1e-3, T=50");
  absorb(out, mollify::experiments::run(tracking), "tracking ");
  absorb(out, mollify::experiments::run(load("mrac_smooth.json")), "smooth ");
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  Outcome out;
  const fs::path work = fs::path(MOLLIFY_WORK_DIR) / "acceptance_runs";
  fs::remove_all(work);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"verify-mollification", "mollification.json"}, {"verify-expectation", "expectation.json"},
      {"verify-concentration", "concentration.json"}, {"verify-linf", "linf.json"},
      {"verify-maurey", "maurey.json"},               {"simulate-mrac", "mrac.json"},
      {"simulate-mrac", "mrac_residual.json"}};
  for (const auto& [experiment, file] : runs) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = work / (file + "." + std::to_string(rep));
      const std::string cmd = std::string("\"") + MOLLIFY_CLI + "\" " + experiment + " --config \"" +
                              (fs::path(MOLLIFY_CONFIG_DIR) / file).string() + "\" --out-dir \"" + dir.string() +
                              "\" > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (status == -1 || !fs::exists(dir / "summary.json")) {
        out.check(false, file + ": CLI run did not produce output");
        break;
      }
      dirs.push_back(dir);
    }
    if (dirs.size() != 2) continue;
    int csvs = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++csvs;
      const std::string a = slurp(entry.path());
      same = same && a == slurp(dirs[1] / entry.path().filename()) && a.rfind("# config_hash=", 0) == 0;
    }
    out.check(same && csvs > 0, file + ": " + std::to_string(csvs) + " CSV files byte-identical across reruns");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mollifier normalization", normalization},
      {"mollification error dominance and relu rate", theorem1},
      {"random approximation unbiasedness and coefficient bound", lemma1},
      {"concentration level and mean rate", theorem2},
      {"sup-norm extension dominance", lemma2},
      {"Maurey subsampling rate", maurey},
      {"adaptive control residuals, descent, tracking, RK4 order", mrac},
      {"byte-identical reruns", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.passed;
    std::printf("%s criterion %zu: %s (%.1fs)\n", out.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
    for (const auto& d : out.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
