#include <matcomp/matcomp.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MATCOMP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string(MATCOMP_SAMPLES) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("matcomp_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return tmp(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CompleteCross) {
  const auto r = run("complete --in " + sample("cross.txt") + " --out " + tmp("out.txt"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "rank=1 deviation_bound=0\n");
  EXPECT_EQ(slurp(tmp("out.txt")), "field gf2\n2 2\n1 1\n1 1\n");
}

TEST_F(Cli, CompleteFullyKnownIsIdentity) {
  const auto r = run("complete --in " + sample("full.txt") + " --out " + tmp("out.txt"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "rank=2 deviation_bound=0\n");
  EXPECT_EQ(slurp(tmp("out.txt")), "field gf2\n3 3\n1 0 1\n0 1 1\n1 1 0\n");
}

TEST_F(Cli, CompleteOutputAgreesWithInput) {
  for (const auto* name : {"conjoined.txt", "rational.txt", "sparse.txt"}) {
    const auto r = run(std::string("complete --in ") + sample(name) + " --out " + tmp("out.txt"));
    ASSERT_EQ(r.status, 0) << name;
    std::ifstream a(sample(name)), b(tmp("out.txt"));
    const auto in = matcomp::read_matrix_text(a), out = matcomp::read_matrix_text(b);
    ASSERT_EQ(in.field, out.field);
    ASSERT_EQ(in.rows, out.rows);
    for (std::size_t i = 0; i < in.tokens.size(); ++i)
      for (std::size_t j = 0; j < in.cols; ++j) {
        ASSERT_NE(out.tokens[i][j], "?");
        if (in.tokens[i][j] != "?") {
          ASSERT_EQ(in.tokens[i][j], out.tokens[i][j]);
        }
      }
  }
}

TEST_F(Cli, CompleteFlagsAccepted) {
  const auto r = run("complete --in " + sample("conjoined.txt") + " --out " + tmp("o.txt") +
                     " --no-subdiag --no-approx --zero-budget 4");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("rank=", 0), 0u);
}

TEST_F(Cli, MalformedHeaderExitsOne) {
  const auto bad = write("bad.txt", "# comment\nfeld gf2\n1 1\n1\n");
  const std::string cmd = std::string(MATCOMP_CLI) + " complete --in " + bad + " --out " + tmp("o.txt") +
                          " 2>" + tmp("err.txt");
  const int st = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(st), 1);
  EXPECT_NE(slurp(tmp("err.txt")).find("line 2"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("o.txt")));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("complete --in " + sample("cross.txt")).status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("complete --in /nonexistent/file --out " + tmp("o.txt")).status, 1);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, Decompose) {
  EXPECT_EQ(run("decompose --in " + sample("cross.txt")).out,
            "junk rows: -\njunk cols: -\nclusters: 2\ncluster 0 rows: 0 cols: 0\ncluster 1 rows: 1 cols: 1\n");
  const auto all = write("junk.txt", "field gf2\n2 2\n? ?\n0 ?\n");
  EXPECT_EQ(run("decompose --in " + all).out, "junk rows: 0 1\njunk cols: 0 1\nclusters: 0\n");
  const auto j = nlohmann::json::parse(run("decompose --json --in " + sample("full.txt")).out);
  EXPECT_EQ(j["clusters"].size(), 1u);
}

TEST_F(Cli, SimulateEndpointsAndDeterminism) {
  ASSERT_EQ(run("simulate --n 8 --k-grid 0,64 --trials 5 --seed 3 --out " + tmp("a.csv")).status, 0);
  EXPECT_EQ(slurp(tmp("a.csv")), "n,k,mean_clusters,stddev\n8,0,0.000000,0.000000\n8,64,1.000000,0.000000\n");
  ASSERT_EQ(run("simulate --n 16 --k-steps 8 --trials 20 --seed 9 --out " + tmp("b.csv") + " --raw " +
                tmp("b_raw.csv"))
                .status,
            0);
  ASSERT_EQ(run("simulate --n 16 --k-steps 8 --trials 20 --seed 9 --out " + tmp("c.csv") + " --raw " +
                tmp("c_raw.csv"))
                .status,
            0);
  EXPECT_EQ(slurp(tmp("b.csv")), slurp(tmp("c.csv")));
  EXPECT_EQ(slurp(tmp("b_raw.csv")), slurp(tmp("c_raw.csv")));
  EXPECT_EQ(slurp(tmp("b_raw.csv")).rfind("n,k,trial,clusters\n", 0), 0u);
  EXPECT_EQ(run("simulate --n 4 --k-grid 17 --trials 1 --out " + tmp("d.csv")).status, 1);
  EXPECT_EQ(run("simulate --n 4 --trials 1 --out " + tmp("d.csv")).status, 1);
}

TEST_F(Cli, Oracle) {
  const auto r = run("oracle --in " + sample("cross.txt") + " --out " + tmp("w.txt"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "mr=1\n");
  EXPECT_EQ(slurp(tmp("w.txt")), "field gf2\n2 2\n1 1\n1 1\n");
  EXPECT_EQ(run("oracle --in " + sample("sparse.txt")).status, 3);
  EXPECT_EQ(run("oracle --in " + sample("cross.txt") + " --max-unknowns 1").status, 3);

  const std::string cmd = std::string(MATCOMP_CLI) + " oracle --in " + sample("rational.txt") + " 2>" +
                          tmp("err.txt");
  EXPECT_NE(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_NE(slurp(tmp("err.txt")).find("oracle requires a finite field"), std::string::npos);
}

TEST_F(Cli, Trim) {
  const auto r = run("trim --in " + sample("duplicate_columns.txt") + " --log " + tmp("log.json"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "field gf2\n2 2\n1 0\n1 1\n");
  const auto log = nlohmann::json::parse(slurp(tmp("log.json")));
  EXPECT_EQ(log["records"].size(), 1u);
  EXPECT_EQ(log["records"][0]["index"], 0);

  const auto stuck = run("trim --in " + sample("cross.txt") + " --log " + tmp("log2.json"));
  EXPECT_EQ(stuck.out, slurp(sample("cross.txt")));
  EXPECT_TRUE(nlohmann::json::parse(slurp(tmp("log2.json")))["records"].empty());

  EXPECT_EQ(run("trim --in " + write("empty.txt", "") + " --log " + tmp("log3.json")).status, 1);
}

TEST_F(Cli, EveryCommandIsRepeatable) {
  const std::vector<std::string> cmds{
      "complete --in " + sample("conjoined.txt") + " --out " + tmp("o.txt"),
      "decompose --json --in " + sample("sparse.txt"),
      "oracle --in " + sample("conjoined.txt") + " --out " + tmp("o.txt"),
      "trim --in " + sample("conjoined.txt") + " --log " + tmp("o.txt"),
  };
  for (const auto& c : cmds) {
    const auto a = run(c);
    const auto fa = slurp(tmp("o.txt"));
    const auto b = run(c);
    EXPECT_EQ(a.status, b.status) << c;
    EXPECT_EQ(a.out, b.out) << c;
    EXPECT_EQ(fa, slurp(tmp("o.txt"))) << c;
  }
}
