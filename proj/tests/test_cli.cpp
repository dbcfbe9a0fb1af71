#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "rothe/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("rothe_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult cli(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + ROTHE_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, rothe::io::read_file(out.string()),
            rothe::io::read_file(err.string())};
  }

  fs::path write(const std::string& name, const std::string& body) const {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  static std::string config(const std::string& name) { return std::string(ROTHE_CONFIG_DIR) + "/" + name; }
  static std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

  fs::path dir_;
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(rothe::io::read_file(p.string()));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, RejectsSubunitExponent) {
  const auto out = dir_ / "run";
  const auto r = cli("run " + config("heat_single.json") + " --p 0.5 --output " + quoted(out));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("error[ConfigError]:", 0), 0u) << r.err;
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".partial"));
}

TEST_F(Cli, MissingFileFailsBeforeAnyOutput) {
  const auto cfg = write("bad.json", R"({"kind": "heat", "graph": {"file": "nope.graph"}, "initial": 1,
                                        "output": "out"})");
  const auto r = cli("run " + quoted(cfg));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("error[ConfigError]:", 0), 0u) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, UnknownConfigKey) {
  const auto cfg = write("bad.json", R"({"kind": "heat", "colour": 3, "output": "out"})");
  const auto r = cli("validate-config " + quoted(cfg));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  for (const char* name : {"a", "b"})
    ASSERT_EQ(cli("run " + config("vi_subspace.json") + " --output " + quoted(dir_ / name)).exit_code, 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    const auto other = dir_ / "b" / entry.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(rothe::io::read_file(entry.path().string()), rothe::io::read_file(other.string()));
    ++files;
  }
  EXPECT_GE(files, 4u);
}

TEST_F(Cli, RefinementShowsFirstOrder) {
  ASSERT_EQ(cli("run " + config("heat_single.json") + " --output " + quoted(dir_ / "heat")).exit_code, 0);
  const auto rows = read_csv(dir_ / "heat" / "refinement.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "ell", "error_T", "max_grid_error", "order"}));
  for (std::size_t k = 2; k < rows.size(); ++k) {
    const double order = std::stod(rows[k][4]);
    EXPECT_GT(order, 0.9);
    EXPECT_LT(order, 1.1);
  }
  EXPECT_TRUE(fs::exists(dir_ / "heat" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "heat" / "trajectory_n1000.csv"));
}

TEST_F(Cli, CompareWithItselfIsZero) {
  ASSERT_EQ(cli("run " + config("heat_single.json") + " --steps 20 --output " + quoted(dir_ / "h")).exit_code, 0);
  const auto traj = quoted(dir_ / "h" / "trajectory_n20.csv");
  const auto table = dir_ / "cmp.csv";
  const auto r = cli("compare " + traj + " " + traj + " --config " + config("heat_single.json") +
                     " --times 0,0.35,1 --output " + quoted(table));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = read_csv(table);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k][1], "0");
    EXPECT_EQ(rows[k][2], "0");
  }
  EXPECT_EQ(rows.back()[0], "max");
}

TEST_F(Cli, CompareAcrossResolutions) {
  ASSERT_EQ(cli("run " + config("heat_single.json") + " --steps 50 100 --output " + quoted(dir_ / "h")).exit_code, 0);
  const auto r = cli("compare " + quoted(dir_ / "h" / "trajectory_n50.csv") + " " +
                     quoted(dir_ / "h" / "trajectory_n100.csv") + " --config " + config("heat_single.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("max,"), std::string::npos);
}

TEST_F(Cli, SpectralKind) {
  ASSERT_EQ(cli("run " + config("spectral.json") + " --output " + quoted(dir_ / "s")).exit_code, 0);
  const auto rows = read_csv(dir_ / "s" / "eigenvalues.csv");
  ASSERT_EQ(rows.size(), 3u);  // header plus two interior modes
  EXPECT_TRUE(fs::exists(dir_ / "s" / "eigenfields.csv"));
}

TEST_F(Cli, ObstacleKind) {
  ASSERT_EQ(cli("run " + config("vi_obstacle.json") + " --output " + quoted(dir_ / "o")).exit_code, 0);
  const auto rows = read_csv(dir_ / "o" / "trajectory_n5.csv");
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k][0] != "0") EXPECT_EQ(std::stod(rows[k][3]), 0.0);
}

TEST_F(Cli, ValidateAndGraphInfo) {
  const auto v = cli("validate-config " + config("heat_lattice.json"));
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_EQ(v.out.rfind("ok heat config_hash=", 0), 0u);
  const auto g = cli("graph-info --graph " + config("p5.graph") + " --domain " + config("p5_single.domain"));
  ASSERT_EQ(g.exit_code, 0) << g.err;
  EXPECT_NE(g.out.find("\"interior\": 1"), std::string::npos);
  EXPECT_NE(g.out.find("\"vertices\": 5"), std::string::npos);
}

TEST_F(Cli, GraphErrorReportsLine) {
  const auto bad = write("bad.graph", "graph 2\nv a 1\nv b 1\ne a b 0\n");
  const auto r = cli("graph-info --graph " + quoted(bad));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("bad.graph:4"), std::string::npos) << r.err;
}
