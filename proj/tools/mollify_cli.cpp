// Experiment driver: one subcommand per verification suite plus the MRAC simulator.
//
//   mollify <experiment> --config cfg.json [--seed S] [--out-dir DIR] [--override key=value]...
//
// Exit status: 0 all assertions passed, 1 an assertion failed, 2 invalid config or input,
// 3 a numerical failure (divergence, infeasible matching).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mollify/error.hpp"
#include "mollify/experiments.hpp"
#include "mollify/io.hpp"

namespace fs = std::filesystem;
using mollify::io::json;

namespace {

int fail(const std::string& code, const std::string& message, int status) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  return status;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mollify::ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mollified integral representations: verification suites and MRAC simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::vector<std::string> overrides;

  for (const auto& name : mollify::experiments::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out-dir", out_dir, "directory for summary.json and CSV files");
    sub->add_option("--override", overrides, "key.path=value applied to the config")->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) return fail("invalid-config", "cannot read " + config_path, 2);
    json config;
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      return fail("invalid-config", e.what(), 2);
    }
    if (!config.is_object()) return fail("invalid-config", "config must be a JSON object", 2);
    for (const auto& o : overrides) mollify::io::apply_override(config, o);
    if (seed) config["seed"] = *seed;
    if (config.contains("experiment") && config["experiment"] != experiment) {
      return fail("invalid-config", "config is for " + config["experiment"].dump() + ", not \"" + experiment + "\"", 2);
    }
    config["experiment"] = experiment;

    const auto result = mollify::experiments::run(config);
    fs::create_directories(out_dir);
    for (const auto& f : result.files) write_file(fs::path(out_dir) / f.name, f.content);
    write_file(fs::path(out_dir) / "summary.json", result.report().dump(2) + "\n");

    for (const auto& a : result.assertions) {
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
    }
    return result.passed() ? 0 : 1;
  } catch (const mollify::DivergenceError& e) {
    return fail(e.code(), e.what(), 3);
  } catch (const mollify::MatchingInfeasibleError& e) {
    return fail(e.code(), e.what(), 3);
  } catch (const mollify::NoSolutionError& e) {
    return fail(e.code(), e.what(), 3);
  } catch (const mollify::Error& e) {
    return fail(e.code(), e.what(), 2);
  } catch (const json::exception& e) {
    return fail("invalid-config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 3);
  }
}
