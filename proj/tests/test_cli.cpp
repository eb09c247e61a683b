#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>

#ifdef EDDY2D_CLI_PATH

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EDDY2D_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("eddy2d_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

const char* kSmall = "[domain]\nepsilon = 0.2\ntruncation_radius = 6\nh = 1\n";

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  EXPECT_EQ(run_cli("sweep"), 1);
  EXPECT_EQ(run_cli("sweep --config /nonexistent.cfg"), 1);
  EXPECT_EQ(run_cli("--version"), 0);
}

TEST(Cli, InvalidConfigExitsOne) {
  const fs::path dir = scratch("invalid");
  const fs::path cfg = write_config(dir, "[sweep]\nepslion = 0.1\n");
  EXPECT_EQ(run_cli("mesh --config " + cfg.string() + " --output " + (dir / "out").string()), 1);
  EXPECT_FALSE(fs::exists(dir / "out" / "summary.json"));
}

TEST(Cli, SingularGaugeExitsTwo) {
  const fs::path dir = scratch("singular");
  // The limit problem without Omega0 keeps constants in its kernel.
  const fs::path cfg = write_config(dir, std::string(kSmall) + "omega0 = absent\n[solver]\ngauge = none\n");
  EXPECT_EQ(run_cli("solve-limit --quiet --config " + cfg.string() + " --output " + (dir / "out").string()), 2);
}

TEST(Cli, MeshAndSolveWriteOutputs) {
  const fs::path dir = scratch("solve");
  const fs::path cfg = write_config(dir, kSmall);
  const fs::path out = dir / "out";
  ASSERT_EQ(run_cli("mesh --config " + cfg.string() + " --output " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "mesh.txt"));
  auto j = nlohmann::json::parse(std::ifstream(out / "summary.json"));
  EXPECT_EQ(j["command"], "mesh");
  EXPECT_GT(j["nodes"].get<int>(), 100);

  ASSERT_EQ(run_cli("solve-eps --config " + cfg.string() + " --output " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "field_eps.txt"));
  j = nlohmann::json::parse(std::ifstream(out / "summary.json"));
  EXPECT_EQ(j["gauge"], "omega0_mean");
  EXPECT_NEAR(j["total_currents"]["OMEGA1"][0].get<double>(), 1.0, 1e-8);
  EXPECT_LT(j["relative_residual"].get<double>(), 1e-10);

  ASSERT_EQ(run_cli("solve-limit --config " + cfg.string() + " --output " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "field_limit.txt"));
}

#endif
