#include "potkit/cli.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

using potkit::cli::run;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::map<std::string, std::string> kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

double num(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw std::runtime_error("missing key " + key);
  return std::stod(it->second);
}

struct Process {
  int status = -1;
  std::string out;
};

Process spawn(const std::string& args) {
  Process p;
  const std::string cmd = std::string(POTKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return p;
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) p.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

}  // namespace

TEST(Cli, CapacityExample) {
  const auto r = run(split("capacity --generator circle --n 200"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto m = kv(r.out);
  EXPECT_NEAR(num(m, "capacity"), 1.0017, 1e-4);
  EXPECT_NEAR(num(m, "energy"), -1.69e-3, 1e-5);
  EXPECT_EQ(m.at("seed"), "0");
  EXPECT_EQ(m.at("command"), "capacity");
  EXPECT_EQ(m.at("converged"), "true");
}

TEST(Cli, HarmonicMeasureExample) {
  const auto r = run(split("harmonic-measure --domain half_plane --z 0,1 --interval -1,1"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NEAR(num(kv(r.out), "omega"), 0.5, 1e-12);
}

TEST(Cli, MonteCarloDirichletExample) {
  const auto r = run(split("solve-dirichlet --domain disc --f re --z 0.3,0.2 --mc --n-samples 100000 --seed 7"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto m = kv(r.out);
  const double se = num(m, "std_error");
  EXPECT_GT(se, 0.0);
  EXPECT_LT(se, 0.01);
  EXPECT_NEAR(num(m, "mean"), 0.3, 3 * se);
  EXPECT_EQ(m.at("seed"), "7");
  EXPECT_EQ(m.at("n_samples"), "100000");
}

TEST(Cli, PoissonDirichlet) {
  const auto r = run(split("solve-dirichlet --domain disc --f re2 --z 0.3,0.2"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NEAR(num(kv(r.out), "value"), 0.3 * 0.3 - 0.2 * 0.2, 1e-10);
}

TEST(Cli, EchoesDefaults) {
  const auto m = kv(run(split("means --field re --center 1,2 --radius 0.5")).out);
  for (const char* key : {"seed", "format", "field", "center", "radius", "n_nodes", "mollify"}) EXPECT_TRUE(m.count(key)) << key;
  EXPECT_NEAR(num(m, "surface_mean"), 1.0, 1e-12);
  EXPECT_NEAR(num(m, "center_value"), 1.0, 0.0);
}

TEST(Cli, GreenAndBernsteinWalsh) {
  const auto g = kv(run(split("green --domain half_plane --pole 0,1 --z 0,2 --check")).out);
  EXPECT_NEAR(num(g, "g"), std::log(3.0), 1e-14);
  EXPECT_EQ(g.at("axioms_pass"), "true");
  const auto inf = kv(run(split("green --domain disc_complement --pole inf --z 2.718281828459045,0")).out);
  EXPECT_NEAR(num(inf, "g"), 1.0, 1e-15);
  const auto bw = run({"bw-check", "--coeffs", "1,0;1,0;1,0", "--z", "1.1,0", "--z", "0,2", "--z", "10,0"});
  ASSERT_EQ(bw.exit_code, 0) << bw.err;
  const auto m = kv(bw.out);
  EXPECT_EQ(m.at("holds"), "true");
  EXPECT_GT(num(m, "min_relative_margin"), 0.0);
  EXPECT_NEAR(num(m, "sup_norm"), 3.0, 1e-12);
}

TEST(Cli, HausdorffCsv) {
  const auto r = run(split("hausdorff --cloud segment --n 10000 --a 0,0 --b 1,0 --deltas 0.02,0.01,0.005,0.002"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::istringstream in(r.out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "delta,estimate");
  EXPECT_EQ(rows[2].substr(0, 5), "0.01,");
  EXPECT_NEAR(std::stod(rows[2].substr(5)), std::sqrt(2.0), 0.1 * std::sqrt(2.0));
}

TEST(Cli, EquilibriumWritesMeasureFile) {
  const std::string path = ::testing::TempDir() + "potkit_cli_measure.txt";
  const auto r = run({"equilibrium", "--generator", "circle", "--n", "16", "--out", path});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "16");
  std::remove(path.c_str());
}

TEST(Cli, NonConvergenceExitsThreeAndStillPrints) {
  const auto r = run(split("capacity --generator segment --n 400 --max-iters 1"));
  EXPECT_EQ(r.exit_code, 3);
  const auto m = kv(r.out);
  EXPECT_EQ(m.at("converged"), "false");
  EXPECT_GT(num(m, "capacity"), 0.0);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, BadNumericFlagsNameTheFlag) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"capacity --generator circle --n abc", "--n"},
      {"capacity --generator circle --n 0", "--n"},
      {"capacity --generator circle --radius -1", "--radius"},
      {"capacity --generator circle --tol nan", "--tol"},
      {"capacity --generator circle --max-iters -4", "--max-iters"},
      {"solve-dirichlet --domain disc --f re --z 0.3,0.2 --mc --n-samples 5", "--n-samples"},
      {"solve-dirichlet --domain disc --f re --z 0.3,0.2 --eps 0", "--eps"},
      {"solve-dirichlet --domain disc --f re --z abc", "--z"},
      {"solve-dirichlet --domain disc --f re --z 2,0", "--z"},
      {"hausdorff --p 5", "--p"},
      {"hausdorff --p 0", "--p"},
      {"green --domain disc --pole 0,0 --check --n-probes 3", "--n-probes"},
      {"means --field re --radius inf", "--radius"},
      {"--threads 0 capacity", "--threads"},
      {"capacity --threads 1000", "--threads"},
  };
  for (const auto& [args, flag] : cases) {
    const auto r = run(split(args));
    EXPECT_EQ(r.exit_code, 2) << args;
    EXPECT_NE(r.err.find(flag), std::string::npos) << args << "\n" << r.err;
    EXPECT_TRUE(r.out.empty()) << args;
  }
}

TEST(Cli, UsageErrors) {
  const auto none = run(std::vector<std::string>{});
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_NE(none.err.find("solve-dirichlet"), std::string::npos);
  EXPECT_EQ(run(split("frobnicate")).exit_code, 2);
  EXPECT_EQ(run(split("capacity --no-such-flag 1")).exit_code, 2);
  EXPECT_EQ(run(split("capacity --generator moon")).exit_code, 2);
  const auto help = run(split("--help"));
  EXPECT_EQ(help.exit_code, 0);
  EXPECT_NE(help.out.find("capacity"), std::string::npos);
}

TEST(Cli, ThreadsNeverChangeOutput) {
  const std::string base = "solve-dirichlet --domain disc --f indicator:0.1,0.4 --z 0.2,-0.3 --mc --n-samples 20000 --seed 11";
  const auto one = run(split(base + " --threads 1"));
  const auto four = run(split(base + " --threads 4"));
  ASSERT_EQ(one.exit_code, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_NE(one.out, run(split(base.substr(0, base.size() - 2) + "12")).out);
}

TEST(Cli, ProcessOutputIsByteIdentical) {
  const std::string args = "harmonic-measure --domain half_plane --z 0.3,0.8 --interval -1,2 --mc --n-samples 5000 --seed 3";
  const auto a = spawn(args + " --threads 1");
  const auto b = spawn(args + " --threads 4");
  const auto c = spawn(args + " --threads 4");
  EXPECT_EQ(a.status, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
  EXPECT_EQ(a.out, run(split(args)).out);
  EXPECT_EQ(spawn("capacity --n 0").status, 2);
}
