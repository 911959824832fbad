#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paradiag/allatonce.hpp"
#include "paradiag/krylov.hpp"
#include "paradiag/spectra.hpp"

/// End-to-end experiment driver: single solves, spectrum reports, and
/// weak-scaling sweeps in the two regimes (grow T with L at fixed tau, or
/// refine tau at fixed T), plus the cross-module validation battery.
namespace paradiag::driver {

using numkit::rvec;

enum class Equation { diffusion1d, diffusion2d, advdiff2d };
enum class ScaleMode { horizon, timestep };

std::string to_string(Equation e);
std::string to_string(allatonce::Objective o);
std::string to_string(ScaleMode s);

struct RunConfig {
  allatonce::Objective objective = allatonce::Objective::tracking;
  Equation equation = Equation::diffusion2d;
  std::size_t m = 32;  // grid side (2d) or number of points (1d)
  std::size_t L = 30;
  double T_ref = 2.0;
  double gamma = 0.05;
  double d = 0.1;  // advection-diffusion only
  std::optional<double> alpha;  // objective-dependent default
  double rel_tol = 1e-6;
  int max_iter = 25;
  ScaleMode scale_mode = ScaleMode::horizon;

  /// tracking defaults to alpha = -1, terminal to alpha = 1e-4.
  double alpha_value() const;
};

spatial::SpatialOperator build_operator(const RunConfig& cfg);

/// Problem data sampled on the solver grid (x = j/m on the periodic square,
/// cell centres on the 1D isolated-boundary domain).
allatonce::ControlProblem build_problem(const RunConfig& cfg, double T);

struct SolveRecord {
  std::string objective;
  std::string equation;
  std::size_t L = 0;
  std::size_t M = 0;
  double T = 0.0, tau = 0.0, gamma = 0.0, d = 0.0, alpha = 0.0;
  int iterations = 0;
  bool converged = false;
  double relres_precond = 0.0;  // final GMRES (preconditioned) residual
  double relres_true = 0.0;     // unpreconditioned residual of the solved system
  double wall_ms = 0.0;
  allatonce::StackedState state;  // physical solution (unrescaled adjoint)
  rvec control;                   // u = -lambda/gamma
};

/// Solves an already-built problem with the matching ParaDiag preconditioner.
SolveRecord solve_problem(const allatonce::ControlProblem& p, double alpha,
                          const krylov::GmresConfig& gc);

/// Builds the problem from cfg with horizon T = T_ref and solves it.
SolveRecord run_solve(const RunConfig& cfg);

std::string solve_csv(const SolveRecord& rec);

struct SweepSpec {
  RunConfig base;
  std::vector<std::size_t> L_values{30, 100, 300};
  std::string column_param = "T_ref";  // T_ref | T | gamma | d
  std::vector<double> column_values{2.0};
};

struct SweepCell {
  int iterations = 0;
  bool converged = false;
};

struct SweepTable {
  std::vector<std::vector<SweepCell>> cells;  // [L row][column value]
  std::string csv;
};

/// Regime bookkeeping: horizon mode fixes tau = T_ref/min(L) so T grows with
/// L; timestep mode fixes T = T_ref so tau shrinks. Cells that fail to
/// converge (or throw) are recorded as "inf-iters" and the sweep continues.
SweepTable run_sweep(const SweepSpec& spec);

struct SpectrumRun {
  spectra::SpectrumReport report;
  std::string csv;
};

/// Analytic spectrum of the preconditioned system, one row per spatial mode.
/// Requires an operator with a known closed-form spectrum. with_limits
/// appends the per-mode L -> infinity value.
SpectrumRun run_spectrum(const RunConfig& cfg, bool with_limits = false);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Desk-scale invariant battery across every module; used by the `validate`
/// CLI subcommand.
std::vector<CheckResult> run_validate();

}  // namespace paradiag::driver
