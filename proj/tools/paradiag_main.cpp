#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paradiag/driver.hpp"

namespace {

using paradiag::driver::Equation;
using paradiag::driver::RunConfig;
using paradiag::driver::ScaleMode;
namespace pdrv = paradiag::driver;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& out_path,
                      double& alpha_flag, bool& alpha_given) {
  const std::map<std::string, paradiag::allatonce::Objective> objectives{
      {"tracking", paradiag::allatonce::Objective::tracking},
      {"terminal", paradiag::allatonce::Objective::terminal}};
  const std::map<std::string, Equation> equations{
      {"diffusion1d", Equation::diffusion1d},
      {"diffusion2d", Equation::diffusion2d},
      {"advdiff2d", Equation::advdiff2d}};
  const std::map<std::string, ScaleMode> modes{
      {"horizon", ScaleMode::horizon}, {"timestep", ScaleMode::timestep}};

  cmd->add_option("--objective", cfg.objective, "tracking | terminal")
      ->transform(CLI::CheckedTransformer(objectives, CLI::ignore_case));
  cmd->add_option("--equation", cfg.equation,
                  "diffusion1d | diffusion2d | advdiff2d")
      ->transform(CLI::CheckedTransformer(equations, CLI::ignore_case));
  cmd->add_option("--m", cfg.m, "grid side (2d) or point count (1d)");
  cmd->add_option("--L", cfg.L, "number of time steps");
  cmd->add_option("--T-ref", cfg.T_ref, "reference time horizon");
  cmd->add_option("--gamma", cfg.gamma, "control regularisation weight");
  cmd->add_option("--d", cfg.d, "diffusion coefficient (advdiff2d)");
  cmd->add_option("--alpha", alpha_flag,
                  "preconditioner parameter (defaults: tracking -1, terminal 1e-4)")
      ->each([&alpha_given](const std::string&) { alpha_given = true; });
  cmd->add_option("--tol", cfg.rel_tol, "GMRES relative tolerance");
  cmd->add_option("--max-iter", cfg.max_iter, "GMRES iteration cap");
  cmd->add_option("--scale-mode", cfg.scale_mode, "horizon | timestep")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<std::size_t>(std::stoul(item)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "paradiag: matrix-free ParaDiag solvers for linear-quadratic optimal "
      "control of parabolic problems"};
  app.set_config("--config", "", "plain key=value config file; flags win");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_path;
  double alpha_flag = 0.0;
  bool alpha_given = false;

  CLI::App* solve = app.add_subcommand("solve", "run a single solve");
  add_common_flags(solve, cfg, out_path, alpha_flag, alpha_given);

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "analytic preconditioned spectrum");
  add_common_flags(spectrum, cfg, out_path, alpha_flag, alpha_given);
  bool with_limits = false;
  spectrum->add_flag("--limits", with_limits,
                     "append the per-mode L->infinity values");

  CLI::App* sweep = app.add_subcommand("sweep", "weak-scaling iteration table");
  add_common_flags(sweep, cfg, out_path, alpha_flag, alpha_given);
  std::string l_list = "30,100,300";
  std::string param = "T_ref";
  std::string values;
  bool allow_large = false;
  sweep->add_option("--L-list", l_list, "comma-separated L values");
  sweep->add_option("--param", param, "column parameter: T_ref | T | gamma | d");
  sweep->add_option("--values", values, "comma-separated column values");
  sweep->add_flag("--allow-large-L", allow_large,
                  "permit L > 300 (slow; full-scale runs use up to 1000)");

  CLI::App* validate =
      app.add_subcommand("validate", "run the cross-module invariant battery");

  CLI11_PARSE(app, argc, argv);

  if (alpha_given) cfg.alpha = alpha_flag;

  try {
    if (solve->parsed()) {
      const pdrv::SolveRecord rec = pdrv::run_solve(cfg);
      write_output(pdrv::solve_csv(rec), out_path);
      return rec.converged ? 0 : 2;
    }
    if (spectrum->parsed()) {
      write_output(pdrv::run_spectrum(cfg, with_limits).csv, out_path);
      return 0;
    }
    if (sweep->parsed()) {
      pdrv::SweepSpec spec;
      spec.base = cfg;
      spec.L_values = parse_sizes(l_list);
      spec.column_param = param;
      if (!values.empty()) {
        spec.column_values = parse_values(values);
      } else if (param == "T_ref" || param == "T") {
        spec.column_values = {2e0, 2e-1, 2e-2, 2e-3, 2e-4};
      } else if (param == "gamma") {
        spec.column_values = {5e-8, 5e-5, 5e-2, 5e1, 5e4};
      } else {
        spec.column_values = {1e-3, 1e-2, 1e-1, 1e0, 1e1};
      }
      for (std::size_t l : spec.L_values) {
        if (l > 300) {
          if (!allow_large) {
            std::cerr << "sweep: L=" << l
                      << " exceeds the desk-scale cap of 300; rerun with "
                         "--allow-large-L (expect long runtimes)\n";
            return 1;
          }
          std::cerr << "sweep: L=" << l
                    << " is full-scale; this will take a while\n";
        }
      }
      write_output(pdrv::run_sweep(spec).csv, out_path);
      return 0;
    }
    if (validate->parsed()) {
      const auto results = pdrv::run_validate();
      bool all_ok = true;
      for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "ok" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all_ok = all_ok && r.pass;
      }
      std::printf("%s\n", all_ok ? "validate: all checks passed"
                                 : "validate: FAILURES detected");
      return all_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
