#include "paradiag/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "paradiag/precond.hpp"

namespace paradiag::driver {

namespace {

constexpr double kPi = std::numbers::pi;

using allatonce::ControlProblem;
using allatonce::Objective;
using allatonce::StackedState;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::pair<rvec, rvec> split_halves(const rvec& x) {
  const std::size_t n = x.size() / 2;
  return {rvec(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)),
          rvec(x.begin() + static_cast<std::ptrdiff_t>(n), x.end())};
}

rvec concat(const rvec& a, const rvec& b) {
  rvec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// section 5 experiment data on the periodic unit square, x = j/m
rvec sample_2d(std::size_t m, const std::function<double(double, double)>& f) {
  rvec out(m * m);
  const double h = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x1 = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = f(x1, static_cast<double>(j) * h);
    }
  }
  return out;
}

// 1D isolated-boundary example data, sampled at cell centres
rvec sample_1d(std::size_t m, const std::function<double(double)>& f) {
  rvec out(m);
  const double h = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = f((static_cast<double>(i) + 0.5) * h);
  }
  return out;
}

double gauss_bump(double x) { return std::exp(-100.0 * (x - 0.5) * (x - 0.5)); }

rvec y_init_for(const RunConfig& cfg, double T) {
  if (cfg.equation == Equation::diffusion1d) return sample_1d(cfg.m, gauss_bump);
  const double c = 12.0 * kPi * kPi;
  const double amp = (1.0 - T) / (c * cfg.gamma);
  return sample_2d(cfg.m, [&](double x1, double x2) {
    const double s2 = std::sin(2.0 * kPi * x2);
    return amp * sign(std::sin(2.0 * kPi * x1)) * s2 * s2;
  });
}

rvec y_d_for(const RunConfig& cfg, double T, double t) {
  if (cfg.equation == Equation::diffusion1d) return sample_1d(cfg.m, gauss_bump);
  const double c = 12.0 * kPi * kPi;
  const double factor =
      (c + 1.0 / (c * cfg.gamma)) * (t - T) - (1.0 + 1.0 / (c * c * cfg.gamma));
  return sample_2d(cfg.m, [&](double x1, double x2) {
    return factor * std::sin(2.0 * kPi * x1) * std::sin(2.0 * kPi * x2);
  });
}

rvec y_target_for(const RunConfig& cfg) {
  if (cfg.equation == Equation::diffusion1d) return sample_1d(cfg.m, gauss_bump);
  return sample_2d(cfg.m, [](double x1, double x2) {
    return std::sin(2.0 * kPi * x1) * std::sin(2.0 * kPi * x2);
  });
}

}  // namespace

std::string to_string(Equation e) {
  switch (e) {
    case Equation::diffusion1d: return "diffusion1d";
    case Equation::diffusion2d: return "diffusion2d";
    case Equation::advdiff2d: return "advdiff2d";
  }
  return "?";
}

std::string to_string(Objective o) {
  return o == Objective::tracking ? "tracking" : "terminal";
}

std::string to_string(ScaleMode s) {
  return s == ScaleMode::horizon ? "horizon" : "timestep";
}

double RunConfig::alpha_value() const {
  if (alpha) return *alpha;
  return objective == Objective::tracking ? -1.0 : 1e-4;
}

spatial::SpatialOperator build_operator(const RunConfig& cfg) {
  switch (cfg.equation) {
    case Equation::diffusion1d:
      return spatial::build_laplacian_1d_isolated(cfg.m);
    case Equation::diffusion2d:
      return spatial::build_laplacian_2d_periodic(cfg.m);
    case Equation::advdiff2d:
      return spatial::build_advdiff_2d_periodic(cfg.m, cfg.d);
  }
  throw std::logic_error("build_operator: unknown equation");
}

ControlProblem build_problem(const RunConfig& cfg, double T) {
  spatial::SpatialOperator K = build_operator(cfg);
  rvec y0 = y_init_for(cfg, T);
  if (cfg.objective == Objective::tracking) {
    const double tau = T / static_cast<double>(cfg.L);
    std::vector<rvec> yd;
    yd.reserve(cfg.L - 1);
    for (std::size_t l = 1; l < cfg.L; ++l) {
      yd.push_back(y_d_for(cfg, T, static_cast<double>(l) * tau));
    }
    return ControlProblem::tracking(std::move(K), cfg.gamma, T, cfg.L,
                                    std::move(y0), std::move(yd));
  }
  return ControlProblem::terminal(std::move(K), cfg.gamma, T, cfg.L,
                                  std::move(y0), y_target_for(cfg));
}

SolveRecord solve_problem(const ControlProblem& p, double alpha,
                          const krylov::GmresConfig& gc) {
  const auto t0 = std::chrono::steady_clock::now();

  rvec b;
  std::function<rvec(const rvec&)> apply_op;
  std::function<rvec(const rvec&)> apply_pinv;

  // Keep whichever preconditioner we build alive for the solve.
  std::optional<precond::TrackingPreconditioner> tp;
  std::optional<precond::TerminalPreconditioner> sp;

  if (p.objective == Objective::tracking) {
    auto [b1, b2h] = allatonce::assemble_tracking_rhs(p);
    b = concat(b1, b2h);
    tp.emplace(p, numkit::cxd(alpha, 0.0));
    apply_op = [&p](const rvec& x) {
      return allatonce::flatten(
          allatonce::apply_tracking_operator(p, allatonce::split(p, x, true)));
    };
    apply_pinv = [&tpref = *tp](const rvec& x) {
      auto [v, w] = split_halves(x);
      auto [xx, zz] = tpref.apply(v, w);
      return concat(xx, zz);
    };
  } else {
    b = allatonce::assemble_terminal_rhs(p);
    sp.emplace(p, numkit::cxd(alpha, 0.0));
    apply_op = [&p](const rvec& x) {
      return allatonce::flatten(
          allatonce::apply_terminal_operator(p, allatonce::split(p, x, false)));
    };
    apply_pinv = [&spref = *sp](const rvec& x) {
      auto [v, w] = split_halves(x);
      auto [xx, zz] = spref.apply(v, w);
      return concat(xx, zz);
    };
  }

  const krylov::KrylovOutcome<double> out =
      krylov::gmres<double>(apply_op, apply_pinv, b, gc);

  const auto t1 = std::chrono::steady_clock::now();

  SolveRecord rec;
  rec.objective = to_string(p.objective);
  rec.L = p.L;
  rec.M = p.space_dim();
  rec.T = p.T;
  rec.tau = p.tau();
  rec.gamma = p.gamma;
  rec.alpha = alpha;
  rec.iterations = out.iterations;
  rec.converged = out.converged;
  rec.relres_precond = out.residual_history.back();
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  // true (unpreconditioned) relative residual of the system GMRES solved
  const rvec ax = apply_op(out.solution);
  rvec resid(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) resid[i] = b[i] - ax[i];
  const double bnorm = numkit::norm2(b);
  rec.relres_true = bnorm > 0.0 ? numkit::norm2(resid) / bnorm : 0.0;

  if (p.objective == Objective::tracking) {
    StackedState x = allatonce::split(p, out.solution, true);
    rec.state = allatonce::rescale_adjoint(
        p, std::move(x), allatonce::RescaleDirection::to_physical);
  } else {
    rec.state = allatonce::split(p, out.solution, false);
  }
  rec.control = allatonce::reconstruct_control(rec.state.lam, p.gamma);
  return rec;
}

SolveRecord run_solve(const RunConfig& cfg) {
  const ControlProblem p = build_problem(cfg, cfg.T_ref);
  krylov::GmresConfig gc;
  gc.rel_tol = cfg.rel_tol;
  gc.max_iter = cfg.max_iter;
  SolveRecord rec = solve_problem(p, cfg.alpha_value(), gc);
  rec.equation = to_string(cfg.equation);
  rec.d = cfg.equation == Equation::advdiff2d ? cfg.d : 0.0;
  return rec;
}

std::string solve_csv(const SolveRecord& rec) {
  std::ostringstream os;
  os << "objective,equation,L,M,T,tau,gamma,d,alpha,iterations,converged,"
        "final_relres_precond,final_relres_true,wall_ms\n";
  os << rec.objective << ',' << rec.equation << ',' << rec.L << ',' << rec.M
     << ',' << fmt(rec.T) << ',' << fmt(rec.tau) << ',' << fmt(rec.gamma)
     << ',' << fmt(rec.d) << ',' << fmt(rec.alpha) << ',' << rec.iterations
     << ',' << (rec.converged ? "true" : "false") << ','
     << fmt(rec.relres_precond) << ',' << fmt(rec.relres_true) << ','
     << fmt(rec.wall_ms) << '\n';
  return os.str();
}

SweepTable run_sweep(const SweepSpec& spec) {
  if (spec.L_values.empty() || spec.column_values.empty()) {
    throw std::invalid_argument("run_sweep: empty sweep");
  }
  const std::size_t l_min =
      *std::min_element(spec.L_values.begin(), spec.L_values.end());

  SweepTable table;
  table.cells.resize(spec.L_values.size());

  for (std::size_t row = 0; row < spec.L_values.size(); ++row) {
    for (double value : spec.column_values) {
      RunConfig cfg = spec.base;
      cfg.L = spec.L_values[row];
      if (spec.column_param == "T_ref" || spec.column_param == "T") {
        cfg.T_ref = value;
      } else if (spec.column_param == "gamma") {
        cfg.gamma = value;
      } else if (spec.column_param == "d") {
        cfg.d = value;
      } else {
        throw std::invalid_argument("run_sweep: unknown column parameter '" +
                                    spec.column_param + "'");
      }
      const double T = cfg.scale_mode == ScaleMode::horizon
                           ? static_cast<double>(cfg.L) * cfg.T_ref /
                                 static_cast<double>(l_min)
                           : cfg.T_ref;
      SweepCell cell;
      try {
        const ControlProblem p = build_problem(cfg, T);
        krylov::GmresConfig gc;
        gc.rel_tol = cfg.rel_tol;
        gc.max_iter = cfg.max_iter;
        const SolveRecord rec = solve_problem(p, cfg.alpha_value(), gc);
        cell.iterations = rec.iterations;
        cell.converged = rec.converged;
      } catch (const std::exception&) {
        cell.converged = false;
        cell.iterations = -1;
      }
      table.cells[row].push_back(cell);
    }
  }

  std::ostringstream os;
  const RunConfig& base = spec.base;
  os << "# objective=" << to_string(base.objective)
     << " equation=" << to_string(base.equation) << " m=" << base.m
     << " gamma=" << fmt(base.gamma);
  if (base.equation == Equation::advdiff2d) os << " d=" << fmt(base.d);
  os << " alpha=" << fmt(base.alpha_value())
     << " scale_mode=" << to_string(base.scale_mode)
     << " column=" << spec.column_param;
  if (base.scale_mode == ScaleMode::horizon) {
    os << " tau=T_ref/" << l_min;
  } else {
    os << " T=T_ref";
  }
  os << "\n";
  os << "L";
  for (double v : spec.column_values) os << ',' << fmt(v);
  os << ",all_converged\n";
  for (std::size_t row = 0; row < spec.L_values.size(); ++row) {
    os << spec.L_values[row];
    bool all_ok = true;
    for (const SweepCell& cell : table.cells[row]) {
      if (cell.converged) {
        os << ',' << cell.iterations;
      } else {
        os << ",inf-iters";
        all_ok = false;
      }
    }
    os << ',' << (all_ok ? "true" : "false") << '\n';
  }
  table.csv = os.str();
  return table;
}

SpectrumRun run_spectrum(const RunConfig& cfg, bool with_limits) {
  const ControlProblem p = build_problem(cfg, cfg.T_ref);
  if (!p.K.eigenvalues()) {
    throw std::invalid_argument(
        "run_spectrum: operator has no closed-form spectrum; supply sigmas "
        "through the library interface");
  }
  const rvec& sigmas = *p.K.eigenvalues();
  SpectrumRun run;
  const double alpha = cfg.alpha_value();
  if (cfg.objective == Objective::tracking) {
    if (alpha != 1.0 && alpha != -1.0) {
      throw std::invalid_argument(
          "run_spectrum: tracking spectrum formulas cover alpha = +-1 only");
    }
    run.report = spectra::tracking_thetas(p, sigmas, static_cast<int>(alpha));
  } else {
    run.report = spectra::terminal_thetas(p, sigmas, alpha);
  }

  std::ostringstream os;
  os << "# objective=" << to_string(cfg.objective)
     << " equation=" << to_string(cfg.equation) << " m=" << cfg.m
     << " L=" << cfg.L << " T=" << fmt(cfg.T_ref)
     << " gamma=" << fmt(cfg.gamma) << " alpha=" << fmt(alpha)
     << " skipped_modes=" << run.report.skipped_modes << "\n";
  os << "sigma_hat,gamma_hat,phi,psi,theta1_re,theta1_im,theta2_re,theta2_im,"
        "in_semidisk";
  if (with_limits) os << ",theta_inf_re,theta_inf_im";
  os << "\n";
  for (const spectra::ModeRecord& rec : run.report.modes) {
    os << fmt(rec.sigma_hat) << ',' << fmt(rec.gamma_hat) << ','
       << fmt(rec.phi) << ',' << fmt(rec.psi) << ',' << fmt(rec.theta1.real())
       << ',' << fmt(rec.theta1.imag()) << ',' << fmt(rec.theta2.real()) << ','
       << fmt(rec.theta2.imag()) << ','
       << (rec.position != spectra::SemidiskPosition::outside ? "true"
                                                              : "false");
    if (with_limits) {
      const spectra::ModeParams m =
          spectra::ModeParams::from_rescaled(rec.sigma_hat, rec.gamma_hat);
      if (m.in_theory_domain()) {
        if (cfg.objective == Objective::tracking) {
          const auto lim = spectra::tracking_horizon_limit(m);
          os << ',' << fmt(lim.first.real()) << ',' << fmt(lim.first.imag());
        } else {
          os << ',' << fmt(spectra::terminal_horizon_limit(m)) << ",0";
        }
      } else {
        os << ",nan,nan";
      }
    }
    os << '\n';
  }
  run.csv = os.str();
  return run;
}

}  // namespace paradiag::driver
