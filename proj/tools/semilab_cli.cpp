#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "semilab/core/errors.hpp"
#include "semilab/harness/runner.hpp"

namespace {

using namespace semilab;
using namespace semilab::harness;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> tol;
  bool quiet = false;
};

int execute(ExperimentKind kind, const Options& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("", "cannot open config file '" + o.config + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("", "invalid JSON in '" + o.config + "': " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("", "top level must be an object");
  }
  // Command-line values go through the same validation as the file.
  if (o.seed) doc["seed"] = *o.seed;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.tol) {
    if (kind == ExperimentKind::Flow)
      doc["flow"]["tol"] = *o.tol;
    else
      doc["tol"] = *o.tol;
  }
  const auto cfg = parse_config(doc);
  const auto result = run(cfg, o.out, kind, o.quiet ? nullptr : &std::cout);
  if (!o.quiet) std::cout << "manifest: " << (std::filesystem::path(o.out) / "manifest.json").string() << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical localization experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Options opts;
  std::optional<ExperimentKind> chosen;
  const std::pair<ExperimentKind, const char*> commands[] = {
      {ExperimentKind::Flow, "Integrate the induced flow and check conservation and asymptotics"},
      {ExperimentKind::Quasimode, "Build a quasimode family and measure its residual scaling"},
      {ExperimentKind::Pairings, "Sweep symbol pairings and report localization verdicts"},
      {ExperimentKind::Observability, "Evolve quasimodes and integrate the mass seen by the observation region"},
      {ExperimentKind::Gaarding, "Estimate operator norms and lower bounds of a test symbol"},
      {ExperimentKind::Suite, "Run every stage"}};
  for (const auto& [kind, help] : commands) {
    auto* sub = app.add_subcommand(to_string(kind), help);
    sub->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory")->required();
    sub->add_option("--seed", opts.seed, "Seed of all random draws");
    sub->add_option("--threads", opts.threads, "Worker threads");
    sub->add_option("--tol", opts.tol, "Verdict tolerance (integration tolerance for flow)");
    sub->add_flag("--quiet", opts.quiet, "Suppress progress lines");
    sub->callback([&chosen, kind = kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    return execute(*chosen, opts);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
