#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "ratrelu_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& out_name = "out.txt") {
  const std::string cmd = std::string(RATRELU_CLI) + " " + args + " > " + (workdir() / out_name).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 64);
  EXPECT_EQ(run("no-such-command"), 64);
  EXPECT_EQ(run("figure 9"), 64);
  EXPECT_EQ(run("--format xml newman"), 64);
}

TEST(Cli, NewmanReport) {
  ASSERT_EQ(run("newman --r 9 --kind abs --out " + path("abs.json")), 0);
  const auto text = slurp(workdir() / "out.txt");
  EXPECT_NE(text.find("kind,r,b,sup_err,bound"), std::string::npos);
  EXPECT_TRUE(fs::exists(workdir() / "abs.json"));
  EXPECT_EQ(run("newman --r 3"), 1);
}

TEST(Cli, ConstraintViolationRefused) {
  ASSERT_EQ(run("--seed 3 net random --in 1 --widths 3 --scale 3 --out " + path("u.json")), 0);
  EXPECT_EQ(run("net check --net " + path("u.json")), 1);
  EXPECT_EQ(run("net2rat --net " + path("u.json") + " --eps 0.1"), 1);
  EXPECT_NE(slurp(workdir() / "out.txt").find("layer 0 node"), std::string::npos);
}

TEST(Cli, SubstituteOnlyCertifies) {
  ASSERT_EQ(run("net random --in 1 --widths 2,1 --constrained --out " + path("c.json")), 0);
  EXPECT_EQ(run("net check --net " + path("c.json")), 0);
  ASSERT_EQ(run("--grid-n 2001 net2rat --net " + path("c.json") + " --eps 0.1 --substitute-only --report " + path("rep.csv")), 0);
  const auto rep = slurp(workdir() / "rep.csv");
  EXPECT_NE(rep.find("certified"), std::string::npos);
  EXPECT_EQ(rep.back(), '\n');
  EXPECT_EQ(rep.substr(rep.size() - 2, 1), "1");
}

TEST(Cli, MissingFileIsIoError) { EXPECT_EQ(run("net eval --net " + path("missing.json") + " --x 0.5"), 3); }

TEST(Cli, JsonFormat) {
  ASSERT_EQ(run("--format json audit theorem2 --k 3 --samples 2", "t2.json"), 0);
  const auto text = slurp(workdir() / "t2.json");
  EXPECT_EQ(text.front(), '[');
  EXPECT_NE(text.find("\"l1_gap\""), std::string::npos);
}

TEST(Cli, FigureWritesFiles) {
  ASSERT_EQ(run("--grid-n 101 figure 3 --out " + path("fig3")), 0);
  EXPECT_TRUE(fs::exists(workdir() / "fig3" / "data.csv"));
  EXPECT_TRUE(fs::exists(workdir() / "fig3" / "plot.svg"));
}
