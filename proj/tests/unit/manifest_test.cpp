#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "slab/errors.hpp"
#include "slab/manifest.hpp"

using namespace slab;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "slab_manifest_test";
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Config, SectionsCommentsAndTypes) {
  const Config c = Config::parse_string("# comment\nseed = 7\n; other\n[dichotomy]\neps = 0.02\nmode = pinned\n");
  EXPECT_EQ(c.get_uint("seed", 0), 7u);
  EXPECT_DOUBLE_EQ(c.get_double("dichotomy.eps", 0.0), 0.02);
  EXPECT_EQ(c.get_string("dichotomy.mode", ""), "pinned");
  EXPECT_EQ(c.get_int("missing", -3), -3);
}

TEST(Config, MalformedValueNamesKey) {
  const Config c = Config::parse_string("eta = fast\nlevel = 2.5\n");
  try {
    c.get_double("eta", 0.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'eta'"), std::string::npos);
  }
  EXPECT_THROW(c.get_int("level", 0), ConfigError);
  EXPECT_THROW(Config::parse_string("no equals sign\n"), ConfigError);
  EXPECT_THROW(Config::parse_string("[open\n"), ConfigError);
}

TEST(Config, IncludeRelativeToFile) {
  const auto dir = temp_dir();
  std::filesystem::create_directories(dir / "sub");
  write(dir / "sub" / "base.ini", "eps = 0.1\nlevel = 3\n");
  write(dir / "main.ini", "include = sub/base.ini\nlevel = 4\n");
  const Config c = Config::parse_file((dir / "main.ini").string());
  EXPECT_DOUBLE_EQ(c.get_double("eps", 0.0), 0.1);
  EXPECT_EQ(c.get_int("level", 0), 4);
  write(dir / "loop.ini", "include = loop.ini\n");
  EXPECT_THROW(Config::parse_file((dir / "loop.ini").string()), ConfigError);
  EXPECT_THROW(Config::parse_file((dir / "absent.ini").string()), ConfigError);
}

TEST(StableHash, KnownValue) {
  // FNV-1a 64 of the empty string and of "a".
  EXPECT_EQ(stable_hash(""), "cbf29ce484222325");
  EXPECT_EQ(stable_hash("a"), "af63dc4c8601ec8c");
}

TEST(RunManifest, RoundTripAndTimingExcludedFromHash) {
  RunManifest m;
  m.version = version();
  m.config = {{"eps", 0.02}};
  m.seed = 9;
  m.constants.c0 = 700.0;
  m.constants.mollifier[3] = MollifierConstants{2.2, 0.19, 0.99, 45.0};
  m.seconds = 1.5;
  const std::string h = m.hash();
  m.seconds = 99.0;
  EXPECT_EQ(m.hash(), h);
  const auto path = temp_dir() / "m.json";
  m.save(path.string());
  const RunManifest back = RunManifest::load(path.string());
  EXPECT_EQ(back.hash(), h);
  EXPECT_DOUBLE_EQ(back.constants.mollifier.at(3).C_shift, 0.99);
  m.seed = 10;
  EXPECT_NE(m.hash(), h);
}
