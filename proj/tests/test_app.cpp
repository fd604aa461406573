#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qlcontrol/config.hpp"
#include "qlcontrol/experiment.hpp"

using namespace qlc;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string &args) {
  const std::string cmd = std::string(QLC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const char *name) { return std::string(QLC_CONFIG_DIR) + "/" + name; }

std::string tmp_out(const char *name) {
  return (fs::temp_directory_path() / "qlc_tests" / name).string();
}

}  // namespace

TEST(Config, DefaultsComeFromTheNamedInstance) {
  const ExperimentConfig c = parse_config("[experiment]\ninstance = gap-family-1d\n");
  EXPECT_EQ(c.spec, builtin_spec("gap-family-1d"));
  EXPECT_EQ(c.kind, ExperimentKind::State);
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, RoundTripIsExact) {
  ExperimentConfig c = parse_config(
      "[experiment]\nkind = relax\ninstance = sin-gradient-1d\nseed = 9\n"
      "[coefficients]\nkappa = 0.3\nb = 0.7\n[cost]\nM = 1e-4\n[solver]\nj_list = 2, 8\n");
  EXPECT_EQ(c.kind, ExperimentKind::Relax);
  EXPECT_DOUBLE_EQ(c.spec.kappa, 0.3);
  ASSERT_TRUE(c.spec.zero_order.has_value());
  EXPECT_DOUBLE_EQ(*c.spec.zero_order, 0.7);
  EXPECT_EQ(c.solver.j_list, (std::vector<int>{2, 8}));
  c.spec.omega = 0.1 + 0.2;  // not exactly representable in short decimal
  const ExperimentConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
}

TEST(Config, DefaultZeroOrderRoundTrips) {
  const ExperimentConfig c = parse_config("[coefficients]\nb = default\n");
  EXPECT_FALSE(c.spec.zero_order.has_value());
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, RejectsUnknownNames) {
  EXPECT_THROW(parse_config("[experiment]\nkindd = state\n"), ConfigError);
  EXPECT_THROW(parse_config("[nonsense]\nkey = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nkind = optimize\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\ninstance = nope\n"), ConfigError);
  EXPECT_THROW(parse_config("[mesh]\ncells = many\n"), ConfigError);
  EXPECT_THROW(parse_config("", {"mesh.cellz=4"}), ConfigError);
  EXPECT_THROW(parse_config("", {"mesh.cells"}), ConfigError);
}

TEST(Config, OverridesWin) {
  const ExperimentConfig c = parse_config("[mesh]\ncells = 16\n", {"mesh.cells=24", "experiment.seed = 5"});
  EXPECT_EQ(c.spec.cells, 24);
  EXPECT_EQ(c.seed, 5u);
}

TEST(Config, ShippedConfigsParse) {
  for (const char *f : {"gap-demo.ini", "verify-identity.ini", "state-sin.ini", "below-threshold.ini",
                        "control-quartic.ini"})
    EXPECT_NO_THROW(load_config(config_path(f))) << f;
  EXPECT_THROW(load_config(config_path("missing.ini")), ConfigError);
}

TEST(Experiment, BelowThresholdIsAUsageError) {
  const ExperimentOutcome o = run_experiment(load_config(config_path("below-threshold.ini")));
  EXPECT_EQ(o.exit_code, 1);
  EXPECT_NE(o.error.find("threshold"), std::string::npos);
  EXPECT_NE(o.report_json.find("\"ERROR\""), std::string::npos);
}

TEST(Experiment, StateReportHasStableKeys) {
  const ExperimentOutcome o = run_experiment(load_config(config_path("state-sin.ini")));
  ASSERT_EQ(o.exit_code, 0) << o.error;
  for (const char *key : {"\"kind\"", "\"instance\"", "\"seed\"", "\"config\"", "\"constants\"",
                          "\"status\"", "\"certificates\"", "\"warnings\"", "\"result\"",
                          "\"wall_time_s\""})
    EXPECT_NE(o.report_json.find(key), std::string::npos) << key;
  EXPECT_EQ(strip_wall_time(o.report_json).find("wall_time_s"), std::string::npos);
  bool has_state = false;
  for (const auto &[name, body] : o.files) has_state |= (name == "state.csv" && !body.empty());
  EXPECT_TRUE(has_state);
}

TEST(Experiment, ReportsAreDeterministic) {
  for (const char *f : {"gap-demo.ini", "control-quartic.ini"}) {
    const ExperimentConfig c = load_config(config_path(f));
    const ExperimentOutcome a = run_experiment(c);
    const ExperimentOutcome b = run_experiment(c);
    EXPECT_EQ(strip_wall_time(a.report_json), strip_wall_time(b.report_json)) << f;
    EXPECT_EQ(a.files, b.files) << f;
  }
}

TEST(Experiment, WriteOutcomeCreatesFiles) {
  ExperimentConfig c = load_config(config_path("verify-identity.ini"));
  c.out = tmp_out("verify");
  fs::remove_all(c.out);
  const ExperimentOutcome o = run_experiment(c);
  EXPECT_EQ(o.exit_code, 0) << o.error;
  write_outcome(c, o);
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "report.json"));
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "summary.txt"));
}

TEST(Cli, ExitCodes) {
  const std::string out = " --out " + tmp_out("cli");
  EXPECT_EQ(run_cli("run " + config_path("state-sin.ini") + out), 0);
  EXPECT_EQ(run_cli("run " + config_path("below-threshold.ini") + out), 1);
  EXPECT_EQ(run_cli("run " + config_path("missing.ini") + out), 1);
  EXPECT_EQ(run_cli("run " + config_path("state-sin.ini") + out + " --override mesh.cellz=4"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("list"), 0);
  EXPECT_EQ(run_cli("list gap"), 0);
}

TEST(Cli, SeedFlagOverridesConfig) {
  const std::string out = tmp_out("cli-seed");
  ASSERT_EQ(run_cli("run " + config_path("state-sin.ini") + " --seed 17 --out " + out), 0);
  std::ifstream in(fs::path(out) / "report.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("\"seed\": 17"), std::string::npos);
}
