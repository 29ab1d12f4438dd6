#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracsys/cli.hpp"
#include "fracsys/csv.hpp"
#include "fracsys/errors.hpp"
#include "fracsys/oscillator.hpp"
#include "fracsys/system_solver.hpp"

using namespace fracsys;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fracsys_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trajectory load(const fs::path& p) {
  std::ifstream in(p);
  return read_csv(in);
}

// Value following "key: " in the report.
double field(const std::string& report, const std::string& key) {
  const auto pos = report.find(key + ": ");
  if (pos == std::string::npos) return NAN;
  return std::stod(report.substr(pos + key.size() + 2));
}

std::vector<double> ml(const std::vector<std::string>& flags) {
  std::vector<std::string> args{"ml"};
  args.insert(args.end(), flags.begin(), flags.end());
  const auto r = run(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  std::istringstream is(r.out);
  double re = NAN, im = NAN;
  is >> re >> im;
  return {re, im};
}

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t j = 1; j < v.size(); ++j) n += (v[j - 1] < 0) != (v[j] < 0);
  return n;
}

std::vector<double> peaks(const std::vector<double>& x) {
  std::vector<double> p;
  for (std::size_t j = 1; j + 1 < x.size(); ++j) {
    const double m = std::abs(x[j]), l = std::abs(x[j - 1]), r = std::abs(x[j + 1]);
    if (!(m > l && m >= r)) continue;
    const double curv = l - 2 * m + r;
    p.push_back(curv < 0 ? m - (r - l) * (r - l) / (8 * curv) : m);
  }
  return p;
}

}  // namespace

TEST(CliMl, Exponential) {
  const auto r = run({"ml", "--alpha", "1", "--re", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "2.718281828459 0\n");
}

TEST(CliMl, HyperbolicAndUnit) {
  EXPECT_NEAR(ml({"--alpha", "2", "--beta", "2", "--re", "1"})[0], std::sinh(1.0), 1e-12);
  EXPECT_EQ(ml({"--alpha", "0.5", "--re", "0"})[0], 1.0);
  const auto z = ml({"--alpha", "1", "--re", "0", "--im", "1"});
  EXPECT_NEAR(z[0], std::cos(1.0), 1e-12);
  EXPECT_NEAR(z[1], std::sin(1.0), 1e-12);
}

TEST(CliErrors, InvalidInput) {
  EXPECT_EQ(run({"ml", "--alpha", "0", "--re", "1"}).code, kExitInvalidInput);
  EXPECT_EQ(run({"ml", "--alpha", "abc"}).code, kExitInvalidInput);
  EXPECT_EQ(run({"ml", "--bogus"}).code, kExitInvalidInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInvalidInput);
  EXPECT_EQ(run({}).code, kExitInvalidInput);
  EXPECT_EQ(run({"solve", "--alpha", "1.5", "--matrix", "1,0,0,1", "--x0", "1", "--y0", "0",
                 "--out", scratch("bad.csv").string()})
                .code,
            kExitInvalidInput);
  EXPECT_EQ(run({"solve", "--alpha", "0.5", "--matrix", "1,0,0", "--x0", "1", "--y0", "0",
                 "--out", scratch("bad.csv").string()})
                .code,
            kExitInvalidInput);
  const auto r = run({"ml", "--alpha", "0", "--re", "1"});
  EXPECT_FALSE(r.err.empty());
}

TEST(CliErrors, NonConvergence) {
  const auto r = run({"ml", "--alpha", "0.6", "--re", "-60"});
  EXPECT_EQ(r.code, kExitNonConvergence);
  EXPECT_NE(r.err.find("converge"), std::string::npos);
}

TEST(CliErrors, Help) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"residual", "--help"}).code, kExitOk);
}

TEST(CliSolve, GrowthExample) {
  const auto path = scratch("ex1.csv");
  const auto r = run({"solve", "--alpha", "0.8", "--matrix", "2,1,1,2", "--x0", "2", "--y0", "0",
                      "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("c1 = 1, c2 = 1"), std::string::npos) << r.out;
  const auto text = slurp(path);
  EXPECT_EQ(text.rfind("t,x,y\n0,2,0\n", 0), 0u);
  const auto tr = load(path);
  ASSERT_EQ(tr.size(), 501u);
  for (std::size_t j = 1; j < tr.size(); ++j) ASSERT_GT(tr.x[j], tr.x[j - 1]) << j;
}

TEST(CliSolve, DecayExample) {
  const auto path = scratch("ex2.csv");
  ASSERT_EQ(run({"solve", "--alpha", "1", "--matrix", "-2,1,1,-2", "--x0", "2", "--y0", "1",
                 "--t-max", "5", "--out", path.string()})
                .code,
            kExitOk);
  const auto tr = load(path);
  for (std::size_t j = 1; j < tr.size(); ++j) {
    ASSERT_LT(tr.x[j], tr.x[j - 1]);
    ASSERT_LT(tr.y[j], tr.y[j - 1]);
    ASSERT_GT(tr.y[j], 0.0);
  }
  EXPECT_LT(tr.x.back(), 0.02);
}

TEST(CliSolve, OscillatingExample) {
  const auto path = scratch("ex3.csv");
  const auto r = run({"solve", "--alpha", "1", "--matrix", "3,2,-5,1", "--x0", "2", "--y0", "1",
                      "--t-max", "3", "--steps", "601", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("M = 1, N = 0.666666666667"), std::string::npos) << r.out;
  EXPECT_GE(sign_changes(load(path).x), 2);
}

TEST(CliSolve, PaperFactoredMode) {
  const auto path = scratch("ex3f.csv");
  const auto r = run({"solve", "--alpha", "0.7", "--matrix", "3,2,-5,1", "--x0", "2", "--y0", "1",
                      "--mode", "paper-factored", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("paper-factored"), std::string::npos);
  const auto tr = load(path);
  EXPECT_EQ(tr.x[0], 2.0);
  EXPECT_EQ(tr.y[0], 1.0);
}

TEST(CliOscillator, Damped) {
  const auto path = scratch("osc.csv");
  ASSERT_EQ(run({"oscillator", "--alpha", "1", "--a", "0.1", "--b", "2", "--x0", "2", "--dx0",
                 "1", "--out", path.string()})
                .code,
            kExitOk);
  const auto p = peaks(load(path).x);
  ASSERT_GE(p.size(), 5u);
  for (std::size_t k = 1; k < p.size(); ++k) ASSERT_LT(p[k], p[k - 1]);
}

TEST(CliOscillator, Undamped) {
  const auto path = scratch("osc0.csv");
  ASSERT_EQ(run({"oscillator", "--alpha", "1", "--a", "0", "--b", "2", "--out", path.string()})
                .code,
            kExitOk);
  const auto p = peaks(load(path).x);
  ASSERT_GE(p.size(), 5u);
  for (double v : p) EXPECT_NEAR(v, p.front(), 1e-6);
}

TEST(CliOscillator, LowOrderLosesOscillation) {
  const auto path = scratch("osc02.csv");
  ASSERT_EQ(run({"oscillator", "--alpha", "0.2", "--a", "0.1", "--b", "2", "--out",
                 path.string()})
                .code,
            kExitOk);
  const auto tr = load(path);
  EXPECT_EQ(sign_changes(tr.x), 0);
  EXPECT_GT(tr.x.back(), 0.0);
}

TEST(CliResidual, GrowthExampleWithinBound) {
  const auto r = run({"residual", "--alpha", "0.6", "--matrix", "2,1,1,2", "--x0", "2", "--y0",
                      "0", "--h", "1e-3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(field(r.out, "residual"), 1e-2);
  EXPECT_NE(r.out.find("status: ok"), std::string::npos);
}

TEST(CliResidual, ZeroInitialState) {
  const auto r = run({"residual", "--alpha", "0.5", "--matrix", "4,-1,1,2", "--x0", "0", "--y0",
                      "0"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_LE(field(r.out, "residual"), 1e-12);
}

TEST(CliResidual, RepeatedRootFloor) {
  const auto r = run({"residual", "--alpha", "0.5", "--matrix", "4,-1,1,2", "--x0", "2", "--y0",
                      "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("status: floor"), std::string::npos) << r.out;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_GT(field(r.out, "refined_residual"), 0.8 * field(r.out, "residual"));
}

TEST(CliResidual, Oscillator) {
  const auto r = run({"residual", "--alpha", "0.8", "--a", "0.1", "--b", "2", "--x0", "2",
                      "--dx0", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(field(r.out, "residual"), 1e-2);
  EXPECT_LE(field(r.out, "oscillator_residual"), 1e-2);
}

TEST(CliResidual, MatrixAndOscillatorExclusive) {
  EXPECT_EQ(run({"residual", "--alpha", "0.8", "--matrix", "1,0,0,1", "--a", "0.1", "--b", "2"})
                .code,
            kExitInvalidInput);
}

TEST(CliCsv, Deterministic) {
  const std::vector<std::string> base{"solve", "--alpha", "0.45", "--matrix", "3,2,-5,1",
                                      "--x0",  "2",       "--y0",  "1",        "--out"};
  auto a = base, b = base;
  a.push_back(scratch("det_a.csv").string());
  b.push_back(scratch("det_b.csv").string());
  ASSERT_EQ(run(a).code, kExitOk);
  ASSERT_EQ(run(b).code, kExitOk);
  const auto ta = slurp(scratch("det_a.csv"));
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(scratch("det_b.csv")));
}

TEST(CliCsv, RoundTripWithinPrecision) {
  for (int precision : {6, 12, 17}) {
    const auto path = scratch("rt.csv");
    ASSERT_EQ(run({"solve", "--alpha", "0.7", "--matrix", "2,1,1,2", "--x0", "2", "--y0", "0",
                   "--t-max", "2", "--steps", "101", "--precision", std::to_string(precision),
                   "--out", path.string()})
                  .code,
              kExitOk);
    const auto sol = solve_system({2, 1, 1, 2, 0.7, 2, 0});
    const auto tr = load(path);
    ASSERT_EQ(tr.size(), 101u);
    const double tol = std::pow(10.0, 1 - precision);
    for (std::size_t j = 0; j < tr.size(); ++j) {
      const auto p = eval_solution(sol, tr.t[j]);
      ASSERT_LE(std::abs(tr.x[j] - p.x), tol * std::abs(p.x) + 1e-300) << precision;
      ASSERT_LE(std::abs(tr.y[j] - p.y), tol * std::abs(p.y) + 1e-300) << precision;
    }
  }
}

TEST(CliCsv, RejectsMalformed) {
  std::istringstream bad_header("a,b,c\n0,1,2\n");
  EXPECT_THROW(read_csv(bad_header), DomainError);
  std::istringstream bad_row("t,x,y\n0,1\n");
  EXPECT_THROW(read_csv(bad_row), DomainError);
}
