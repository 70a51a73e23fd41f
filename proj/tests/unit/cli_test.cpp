#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "slab_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, GenerateWritesSetAndReport) {
  const auto dir = work_dir();
  const auto out = dir / "gen.json";
  ASSERT_EQ(run("generate --kind lattice --d 2 --n 32 --spacing 4 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "gen.slab"));
  EXPECT_TRUE(fs::exists(dir / "gen.manifest.json"));
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_DOUBLE_EQ(j.at("result").at("density").get<double>(), 1.0 / 16.0);
  EXPECT_EQ(j.at("manifest_hash").get<std::string>().size(), 16u);
}

TEST(Cli, ExitCodes) {
  const auto dir = work_dir();
  ASSERT_EQ(run("generate --kind random --d 2 --n 64 --density 0.5 --out " + (dir / "r.json").string()), 0);
  const std::string set = (dir / "r.slab").string();
  // Malformed config value.
  std::ofstream(dir / "bad.ini") << "[dichotomy]\neps = often\n";
  EXPECT_EQ(run("dichotomy --config " + (dir / "bad.ini").string() + " --set " + set), 2);
  // Unknown key.
  std::ofstream(dir / "unknown.ini") << "epsilon = 0.1\n";
  EXPECT_EQ(run("dichotomy --config " + (dir / "unknown.ini").string() + " --set " + set), 2);
  // Missing set file and unknown flag.
  EXPECT_EQ(run("dichotomy --set " + (dir / "missing.slab").string()), 2);
  EXPECT_EQ(run("dichotomy --bogus 1"), 2);
  // Scale beyond eta^4 N.
  EXPECT_EQ(run("dichotomy --set " + set + " --eps 0.1 --eta 0.5 --lambda 30 --out " + (dir / "d.json").string()), 3);
  EXPECT_EQ(run("dichotomy --set " + set + " --eps 0.3 --eta 0.75 --lambda 4 --out " + (dir / "d.json").string()), 0);
}

TEST(Cli, ConfigFileSuppliesOptions) {
  const auto dir = work_dir();
  ASSERT_EQ(run("generate --kind random --d 2 --n 64 --density 0.5 --out " + (dir / "c.json").string()), 0);
  std::ofstream(dir / "run.ini") << "[dichotomy]\neps = 0.3\neta = 0.75\nlambda = 4\nset = " << (dir / "c.slab").string() << "\n";
  EXPECT_EQ(run("dichotomy --config " + (dir / "run.ini").string() + " --out " + (dir / "cfg.json").string()), 0);
  std::ifstream in(dir / "cfg.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_DOUBLE_EQ(j.at("result").at("eps").get<double>(), 0.3);
}
