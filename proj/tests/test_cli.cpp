#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = KUZLAB_CLI_PATH;
const std::string kConfigs = KUZLAB_CONFIG_DIR;

fs::path fresh_dir(const std::string &tag) {
  static std::mt19937_64 gen(std::random_device{}());
  auto p = fs::temp_directory_path() / ("kuzlab_cli_" + tag + "_" + std::to_string(gen()));
  fs::remove_all(p);
  return p;
}

int run(const std::string &args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path &p) { return json::parse(slurp(p)); }

std::string config(const std::string &name) { return "--config \"" + kConfigs + "/" + name + "\""; }

}  // namespace

TEST(Cli, ConstantsFromArguments) {
  const auto out = fresh_dir("const");
  ASSERT_EQ(run("constants 2 1 --out " + out.string()), 0);
  const auto c = load(out / "constants.json");
  EXPECT_NEAR(c["Cns"].get<double>(), 0.318310, 1e-6);
  EXPECT_NEAR(c["gammaNS"].get<double>(), 0.282095, 1e-6);
  const auto m = load(out / "manifest.json");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["command"], "constants");
  fs::remove_all(out);
}

TEST(Cli, InvalidConfigWritesErrorRecord) {
  const auto out = fresh_dir("invalid");
  EXPECT_EQ(run("constants " + config("invalid_constants.json") + " --out " + out.string()), 2);
  ASSERT_TRUE(fs::exists(out / "error.json"));
  const auto e = load(out / "error.json");
  EXPECT_EQ(e["error"], "config");
  EXPECT_NE(e["message"].get<std::string>().find("0 < s < n"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_NE(load(out / "manifest.json")["status"], "ok");
  fs::remove_all(out);
}

TEST(Cli, UnknownCommandAndMissingConfigFail) {
  const auto out = fresh_dir("bad");
  EXPECT_NE(run("nosuchcommand --out " + out.string()), 0);
  EXPECT_NE(run("kuznecov --config /nonexistent/x.json --out " + out.string()), 0);
  fs::remove_all(out);
}

TEST(Cli, CircleKuznecovConverges) {
  const auto out = fresh_dir("kuz");
  ASSERT_EQ(run("kuznecov " + config("kuznecov_circle.json") + " --out " + out.string()), 0);
  const auto s = load(out / "summary.json");
  EXPECT_EQ(s["verdict"], "converges");
  const double r = s["final_ratio"].get<double>();
  EXPECT_GE(r, 0.99);
  EXPECT_LE(r, 1.01);
  EXPECT_TRUE(fs::exists(out / "kuznecov.csv"));
  EXPECT_TRUE(fs::exists(out / "sweep.csv"));
  fs::remove_all(out);
}

TEST(Cli, BudgetOverrideGivesBudgetExit) {
  const auto out = fresh_dir("budget");
  EXPECT_EQ(run("kuznecov " + config("kuznecov_circle.json") + " --budget-points 1000 --out " + out.string()), 3);
  EXPECT_EQ(load(out / "error.json")["error"], "budget");
  fs::remove_all(out);
}

TEST(Cli, RandomizedRunNeedsSeed) {
  const auto dir = fresh_dir("seed");
  fs::create_directories(dir);
  const auto cfgPath = dir / "energy.json";
  std::ofstream(cfgPath) << R"({"measure": {"type": "subtorus", "n": 2, "s": 1, "normal_offset": [0.5]},
    "profile": {"kind": "analytic"}, "u": [0.25], "pairs": 10000})";
  EXPECT_EQ(run("energy --config \"" + cfgPath.string() + "\" --out " + (dir / "a").string()), 2);
  EXPECT_EQ(run("energy --config \"" + cfgPath.string() + "\" --seed 5 --out " + (dir / "b").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "b" / "energy.csv"));
  fs::remove_all(dir);
}

TEST(Cli, RerunIsByteIdentical) {
  for (const std::string cmd : {"energy energy_circle.json", "kuznecov kuznecov_cantor.json"}) {
    const auto sp = cmd.find(' ');
    const std::string c = cmd.substr(0, sp), file = cmd.substr(sp + 1);
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    ASSERT_EQ(run(c + " " + config(file) + " --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run(c + " " + config(file) + " --threads 4 --out " + b.string()), 0);
    for (const auto &entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      ASSERT_TRUE(fs::exists(b / name)) << name;
      EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << cmd << " " << name;
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST(Cli, EveryExampleConfigRuns) {
  for (const auto &[cmd, file] : std::vector<std::pair<std::string, std::string>>{
           {"constants", "constants.json"},
           {"coeffs", "coeffs_cantor.json"},
           {"heat", "heat_circle.json"},
           {"distprof", "distprof_cantor.json"},
           {"distprof", "distprof_synthetic.json"},
           {"energy", "energy_cantor.json"},
           {"karamata", "karamata_synthetic.json"},
           {"mixture", "mixture.json"},
           {"blocks", "blocks_gside.json"},
           {"blocks", "blocks_full.json"}}) {
    const auto out = fresh_dir(cmd);
    EXPECT_EQ(run(cmd + " " + config(file) + " --out " + out.string()), 0) << file;
    const auto m = load(out / "manifest.json");
    EXPECT_EQ(m["status"], "ok") << file;
    for (const auto &o : m["outputs"]) EXPECT_TRUE(fs::exists(out / o.get<std::string>())) << o;
    fs::remove_all(out);
  }
}
