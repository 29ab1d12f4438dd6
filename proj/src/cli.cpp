#include "fracsys/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "fracsys/csv.hpp"
#include "fracsys/errors.hpp"
#include "fracsys/oscillator.hpp"
#include "fracsys/special_functions.hpp"
#include "fracsys/system_solver.hpp"

namespace fracsys {
namespace {

const std::map<std::string, SolutionMode> kModes{
    {"complex-exact", SolutionMode::ComplexExact},
    {"paper-factored", SolutionMode::PaperFactored}};

struct Config {
  double alpha = 0.0;
  double beta = 1.0;
  double re = 0.0;
  double im = 0.0;
  double tol = SeriesControl{}.rel_tol;
  std::vector<double> matrix;
  double x0 = 0.0;
  double y0 = 0.0;
  double osc_a = 0.0;
  double osc_b = 0.0;
  double dx0 = 1.0;
  double t_max = 0.0;
  std::size_t steps = 0;
  double h = 1e-3;
  std::string mode = "complex-exact";
  std::string out_path;
  int precision = kDefaultPrecision;
};

std::string num(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void add_alpha(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "fractional order in (0, 1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
}

void add_mode(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--mode", cfg.mode, "complex-exact or paper-factored")
      ->check(CLI::IsMember({"complex-exact", "paper-factored"}));
}

void add_output(CLI::App* cmd, Config& cfg, double t_max, std::size_t steps) {
  cfg.t_max = t_max;
  cfg.steps = steps;
  cmd->add_option("--t-max", cfg.t_max, "end of the time window")->capture_default_str();
  cmd->add_option("--steps", cfg.steps, "number of samples, both ends included")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  cmd->add_option("--out", cfg.out_path, "CSV output path")->required();
  cmd->add_option("--precision", cfg.precision, "significant digits in the CSV")
      ->capture_default_str()
      ->check(CLI::Range(1, 17));
}

void write_trajectory(const Config& cfg, const Trajectory& tr) {
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw DomainError("cannot open output file " + cfg.out_path);
  write_csv(file, tr, cfg.precision);
  if (!file.flush()) throw DomainError("cannot write output file " + cfg.out_path);
}

SystemSpec system_from(const Config& cfg) {
  SystemSpec s{cfg.matrix[0], cfg.matrix[1], cfg.matrix[2], cfg.matrix[3], cfg.alpha, cfg.x0,
               cfg.y0};
  s.validate();
  return s;
}

OscillatorSpec oscillator_from(const Config& cfg) {
  OscillatorSpec s{cfg.osc_a, cfg.osc_b, cfg.alpha, cfg.x0, cfg.dx0};
  s.validate();
  return s;
}

int cmd_ml(const Config& cfg, std::ostream& out) {
  SeriesControl ctl;
  ctl.rel_tol = cfg.tol;
  ctl.validate();
  const ComplexValue v = ml_two(cfg.alpha, cfg.beta, ComplexValue(cfg.re, cfg.im), ctl);
  const int p = cfg.precision;
  out << num(v.real(), p) << " " << num(v.imag(), p) << "\n";
  return kExitOk;
}

int cmd_solve(const Config& cfg, std::ostream& out) {
  const auto spec = system_from(cfg);
  const auto sol = solve_system(spec, kModes.at(cfg.mode));
  write_trajectory(cfg, sample_trajectory(sol, cfg.t_max, cfg.steps));
  out << describe(sol);
  return kExitOk;
}

int cmd_oscillator(const Config& cfg, std::ostream& out) {
  const auto spec = oscillator_from(cfg);
  const auto sol = solve_oscillator(spec, kModes.at(cfg.mode));
  write_trajectory(cfg, sample_trajectory(sol, cfg.t_max, cfg.steps));
  out << describe(sol);
  return kExitOk;
}

int cmd_residual(const Config& cfg, bool oscillator, std::ostream& out, std::ostream& err) {
  SystemSpec spec;
  if (oscillator) {
    spec = reduce_to_system(oscillator_from(cfg));
  } else {
    spec = system_from(cfg);
  }
  const auto sol = solve_system(spec, kModes.at(cfg.mode));
  const auto rep = verify_residual(spec, sol, cfg.t_max, cfg.h);
  const int p = 6;
  out << "classification: " << describe(sol.classification) << "\n";
  out << "mode: " << to_string(rep.mode) << "\n";
  out << "t_max: " << num(rep.t_max, p) << "\n";
  out << "h: " << num(rep.h, p) << "\n";
  out << "nodes: " << rep.nodes << "\n";
  out << "residual_x: " << num(rep.residual_x, p) << "\n";
  out << "residual_y: " << num(rep.residual_y, p) << "\n";
  out << "residual: " << num(rep.residual(), p) << "\n";
  out << "refined_residual: " << num(rep.refined_residual, p) << "\n";
  if (oscillator) {
    const auto osc = oscillator_from(cfg);
    out << "oscillator_residual: " << num(oscillator_residual(osc, sol, cfg.t_max, cfg.h), p)
        << "\n";
  }
  out << "status: " << (rep.floor_detected ? "floor" : rep.too_coarse ? "too-coarse" : "ok")
      << "\n";
  if (rep.floor_detected) {
    err << "warning: residual does not decrease when h is halved; the closed form is not an "
           "exact solution for this order\n";
  }
  if (rep.too_coarse) err << "warning: grid too coarse, refinement changes the derivative\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form solutions of 2x2 linear fractional systems", "fracsys"};
  app.require_subcommand(1);

  Config ml_cfg;
  ml_cfg.precision = 13;
  auto* ml = app.add_subcommand("ml", "evaluate E_{alpha,beta}(re + i im)");
  ml->add_option("--alpha", ml_cfg.alpha, "alpha > 0")->required()->check(CLI::PositiveNumber);
  ml->add_option("--beta", ml_cfg.beta, "beta > 0")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ml->add_option("--re", ml_cfg.re, "real part of the argument")->required();
  ml->add_option("--im", ml_cfg.im, "imaginary part of the argument")->capture_default_str();
  ml->add_option("--tol", ml_cfg.tol, "relative truncation tolerance")->capture_default_str();
  ml->add_option("--precision", ml_cfg.precision, "significant digits")
      ->capture_default_str()
      ->check(CLI::Range(1, 17));

  Config solve_cfg;
  auto* solve = app.add_subcommand("solve", "solve D^alpha X = A X and write a trajectory CSV");
  add_alpha(solve, solve_cfg);
  solve->add_option("--matrix", solve_cfg.matrix, "a,b,c,d")
      ->required()
      ->delimiter(',')
      ->expected(4);
  solve->add_option("--x0", solve_cfg.x0)->required();
  solve->add_option("--y0", solve_cfg.y0)->required();
  add_mode(solve, solve_cfg);
  add_output(solve, solve_cfg, 5.0, 501);

  Config osc_cfg;
  osc_cfg.x0 = 2.0;
  auto* osc = app.add_subcommand("oscillator", "damped oscillator trajectory CSV (t, x, D^alpha x)");
  add_alpha(osc, osc_cfg);
  osc->add_option("--a", osc_cfg.osc_a, "damping")->required();
  osc->add_option("--b", osc_cfg.osc_b, "stiffness")->required();
  osc->add_option("--x0", osc_cfg.x0, "initial displacement")->capture_default_str();
  osc->add_option("--dx0", osc_cfg.dx0, "initial D^alpha x")->capture_default_str();
  add_mode(osc, osc_cfg);
  add_output(osc, osc_cfg, 20.0, 2001);

  Config res_cfg;
  res_cfg.t_max = 1.0;
  auto* res = app.add_subcommand("residual", "check a closed form against the derivative oracle");
  res->set_help_flag("--help", "Print this help message and exit");
  add_alpha(res, res_cfg);
  auto* res_matrix =
      res->add_option("--matrix", res_cfg.matrix, "a,b,c,d")->delimiter(',')->expected(4);
  auto* res_y0 = res->add_option("--y0", res_cfg.y0, "initial y (with --matrix)");
  res->add_option("--x0", res_cfg.x0, "initial x");
  auto* res_a = res->add_option("--a", res_cfg.osc_a, "oscillator damping");
  auto* res_b = res->add_option("--b", res_cfg.osc_b, "oscillator stiffness");
  auto* res_dx0 = res->add_option("--dx0", res_cfg.dx0, "oscillator initial D^alpha x");
  res_matrix->excludes(res_a)->excludes(res_b)->excludes(res_dx0);
  res_y0->needs(res_matrix);
  res_a->needs(res_b);
  res_b->needs(res_a);
  res->add_option("--t-max", res_cfg.t_max, "end of the time window")->capture_default_str();
  res->add_option("--h", res_cfg.h, "grid step")->capture_default_str()->check(CLI::PositiveNumber);
  add_mode(res, res_cfg);

  std::vector<std::string> argv_store{"fracsys"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  try {
    if (ml->parsed()) return cmd_ml(ml_cfg, out);
    if (solve->parsed()) return cmd_solve(solve_cfg, out);
    if (osc->parsed()) return cmd_oscillator(osc_cfg, out);
    if (res_matrix->count() == 0 && res_a->count() == 0) {
      err << "error: residual needs --matrix or --a and --b\n";
      return kExitInvalidInput;
    }
    return cmd_residual(res_cfg, res_a->count() > 0, out, err);
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace fracsys
