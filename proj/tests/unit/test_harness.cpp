#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <map>

#include "semilab/core/errors.hpp"
#include "semilab/harness/runner.hpp"

using namespace semilab;
using namespace semilab::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("semilab_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") out[e.path().filename().string()] = slurp(e.path());
  return out;
}

// Expects a ConfigError whose path is `path` and whose message contains `fragment`.
void expect_config_error(const json& doc, const std::string& path, const std::string& fragment = "") {
  try {
    parse_config(doc);
    ADD_FAILURE() << "no error for " << doc.dump();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), path) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

json small_flow() {
  return {{"kind", "flow"},
          {"potential", {{"preset", "cosine"}}},
          {"flow", {{"t_end", 60}, {"initial_conditions", {{0.3, 1.0, 0.4}, {0.9, 4.0, -0.2}}}}}};
}

}  // namespace

TEST(Config, MinimalFlowGetsDocumentedDefaults) {
  const auto cfg = parse_config(json{{"kind", "flow"}});
  EXPECT_EQ(cfg.flow.tol, 1e-10);
  EXPECT_EQ(cfg.flow.t_end, 200.0);
  EXPECT_EQ(cfg.kind, ExperimentKind::Flow);
  const auto r = cfg.resolved();
  EXPECT_EQ(r["flow"]["tol"].get<double>(), 1e-10);
  EXPECT_EQ(r["flow"]["t_end"].get<double>(), 200.0);
  EXPECT_EQ(r["schema_version"].get<int>(), kSchemaVersion);
  // Family defaults are resolved against the potential: quartic minimum has order 3.
  EXPECT_EQ(r["quasimode"]["k"].get<int>(), 3);
  EXPECT_DOUBLE_EQ(r["observability"]["exponent"].get<double>(), 0.25);
}

TEST(Config, HListMustDecrease) {
  expect_config_error({{"quasimode", {{"h_list", {0.1, 0.2, 0.05, 0.025}}}}}, "quasimode.h_list", "decreasing");
  expect_config_error({{"observability", {{"h_list", {0.1, 0.1}}}}}, "observability.h_list", "decreasing");
  expect_config_error({{"pairings", {{"h_list", {0.2, 0.1, 0.06, 0.01}}}}}, "pairings.h_list", "geometric");
}

TEST(Config, UnknownKeysRejectedWithSuggestion) {
  expect_config_error({{"potentail", {{"preset", "cosine"}}}}, "potentail", "did you mean 'potential'");
  expect_config_error({{"flow", {{"t_ned", 5}}}}, "flow.t_ned", "did you mean 't_end'");
  expect_config_error({{"potential", {{"preset", "cosin"}}}}, "potential.preset", "did you mean 'cosine'");
  expect_config_error({{"zzzzzzzz", 1}}, "zzzzzzzz", "unknown key");
  EXPECT_EQ(closest_key("potentail", {"potential", "pairings"}), "potential");
  EXPECT_EQ(closest_key("qqqqqqq", {"flow"}), "");
}

TEST(Config, TypeAndRangeErrorsNameTheField) {
  expect_config_error({{"flow", {{"t_end", "long"}}}}, "flow.t_end", "number");
  expect_config_error({{"threads", 0}}, "threads");
  expect_config_error({{"schema_version", 2}}, "schema_version", "unsupported");
  expect_config_error({{"kind", "suiet"}}, "kind", "did you mean 'suite'");
  expect_config_error({{"quasimode", {{"case", 2}}}}, "quasimode.energy");
  expect_config_error({{"observability", {{"dt", 0.3}}}}, "observability.dt", "integer");
  expect_config_error({{"pairings", {{"cutoff", "r-weighted"}}}}, "pairings.cutoff");
  expect_config_error({{"potential", {{"modes", {{{"m", -1}, {"cos", 1.0}}}}}}}, "potential.modes[0].m");
  // θ0 = 1 is not critical for the quartic: the family cannot be built there.
  expect_config_error({{"quasimode", {{"theta0", 1.0}, {"k", 3}}}}, "quasimode");
}

TEST(Config, LoadFromFile) {
  const auto dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "ok.json") << small_flow().dump();
  std::ofstream(dir / "broken.json") << "{\"kind\": ";
  EXPECT_EQ(load_config(dir / "ok.json").flow.t_end, 60.0);
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "absent.json"), ConfigError);
}

TEST(Artifacts, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Artifacts, UnwritableOutputFailsWithoutPartialFiles) {
  const auto base = scratch("unwritable");
  fs::create_directories(base);
  std::ofstream(base / "plain") << "x";
  const auto target = base / "plain" / "out";
  const auto cfg = parse_config(small_flow());
  try {
    run(cfg, target);
    ADD_FAILURE() << "run accepted an unusable directory";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "output");
  }
  EXPECT_EQ(std::distance(fs::directory_iterator(base), fs::directory_iterator()), 1);
  EXPECT_THROW(ArtifactStore(base / "plain"), ConfigError);
}

TEST(Runner, FlowEmitsTrajectoriesAndDiagnostics) {
  const auto dir = scratch("flow");
  const auto res = run(parse_config(small_flow()), dir);
  EXPECT_EQ(res.exit_code, kPass);
  for (const char* f : {"trajectory_000.csv", "trajectory_001.csv", "flow_diagnostics.json", "config.resolved.json",
                        "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(slurp(dir / "trajectory_000.csv").rfind("t,rho,theta,eta,E,F,G,q_integral\n", 0), 0u);
  const auto diag = json::parse(slurp(dir / "flow_diagnostics.json"));
  EXPECT_TRUE(diag["pass"].get<bool>());
  EXPECT_LE(diag["max_energy_drift"].get<double>(), 1e-8);

  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["files"].size(), 4u);
  EXPECT_EQ(manifest["config_hash"], sha256_file(dir / "config.resolved.json"));
  EXPECT_EQ(manifest["stages"][0]["status"], "pass");
  std::string problem;
  EXPECT_TRUE(verify_manifest(dir, &problem)) << problem;
  std::ofstream(dir / "trajectory_001.csv", std::ios::app) << "tampered\n";
  EXPECT_FALSE(verify_manifest(dir, &problem));
  EXPECT_NE(problem.find("trajectory_001.csv"), std::string::npos);
}

TEST(Runner, DeterministicAcrossRunsAndThreadCounts) {
  auto doc = small_flow();
  doc["flow"].erase("initial_conditions");
  doc["flow"]["random_count"] = 4;
  doc["seed"] = 11;
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  run(parse_config(doc), a);
  run(parse_config(doc), b);
  doc["threads"] = 3;
  run(parse_config(doc), c);
  const auto fa = artifacts(a), fb = artifacts(b), fc = artifacts(c);
  EXPECT_EQ(fa, fb);
  // The resolved config records the thread count; everything else must agree.
  for (const auto& [name, content] : fa)
    if (name != "config.resolved.json") EXPECT_EQ(content, fc.at(name)) << name;

  doc["seed"] = 12;
  const auto d = scratch("det_d");
  run(parse_config(doc), d);
  EXPECT_NE(artifacts(d).at("trajectory_000.csv"), fa.at("trajectory_000.csv"));
}

TEST(Runner, ExitCodesFollowStageOutcomes) {
  // Too short a run for the tail to settle: verdict failure.
  auto doc = small_flow();
  doc["flow"]["t_end"] = 5;
  EXPECT_EQ(run(parse_config(doc), scratch("exit_fail")).exit_code, kVerdictFailure);

  // A 16-point box cannot resolve the transported state: numerical failure, recorded.
  json obs = {{"kind", "observability"}, {"observability", {{"points", 16}, {"h_list", {0.1}}}}};
  const auto dir = scratch("exit_num");
  const auto res = run(parse_config(obs), dir);
  EXPECT_EQ(res.exit_code, kNumericalFailure);
  ASSERT_EQ(res.manifest.stages.size(), 1u);
  EXPECT_EQ(res.manifest.stages[0].status, "numerical-error");
  EXPECT_TRUE(verify_manifest(dir));

  EXPECT_THROW(run(parse_config(small_flow()), scratch("exit_kind"), ExperimentKind::Quasimode), ConfigError);
  EXPECT_THROW(run(parse_config(json::object()), scratch("exit_nokind")), ConfigError);
}

TEST(Runner, SuiteOnDefaultsListsEveryArtifact) {
  const auto dir = scratch("suite");
  const auto res = run(parse_config(json{{"kind", "full-suite"}}), dir);
  EXPECT_EQ(res.exit_code, kPass);
  ASSERT_EQ(res.manifest.stages.size(), 5u);
  for (const auto& s : res.manifest.stages) EXPECT_EQ(s.status, "pass") << s.name << ": " << s.message;
  EXPECT_GE(res.manifest.files.size(), 6u);
  for (const char* f : {"residual.csv", "quasimode.json", "pairings.csv", "localization.json", "tail_mass.csv",
                        "observability.json", "evolution_h0.05.csv", "operator_bounds.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_TRUE(verify_manifest(dir));
}
