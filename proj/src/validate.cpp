#include <cmath>
#include <random>
#include <sstream>

#include "paradiag/dense.hpp"
#include "paradiag/driver.hpp"
#include "paradiag/precond.hpp"

// Desk-scale invariant battery behind the `validate` subcommand. Each check
// condenses one of the module-level invariants; the unit-test suites cover
// the same ground in more depth.
namespace paradiag::driver {

namespace {

using allatonce::ControlProblem;
using allatonce::Objective;
using numkit::cvec;
using numkit::cxd;

std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}

cvec random_cvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cvec v(n);
  for (cxd& x : v) x = cxd(u(rng()), u(rng()));
  return v;
}

rvec random_rvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rvec v(n);
  for (double& x : v) x = u(rng());
  return v;
}

double rel_err(const cvec& a, const cvec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double rel_err(const rvec& a, const rvec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

cvec direct_dft(const cvec& v, bool forward) {
  const std::size_t n = v.size();
  const double sgn = forward ? -1.0 : 1.0;
  cvec out(n, cxd(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = sgn * 2.0 * std::numbers::pi *
                         static_cast<double>(j * k % n) / static_cast<double>(n);
      out[j] += v[k] * cxd(std::cos(ang), std::sin(ang));
    }
    if (!forward) out[j] /= static_cast<double>(n);
  }
  return out;
}

ControlProblem toy_problem(Objective obj, std::size_t L, std::size_t M,
                           double gamma, double T) {
  spatial::SpatialOperator K =
      M == 1 ? spatial::SpatialOperator::scalar(1.0)
             : spatial::build_laplacian_1d_isolated(M);
  rvec y0 = random_rvec(M);
  if (obj == Objective::tracking) {
    std::vector<rvec> yd;
    for (std::size_t l = 0; l + 1 < L; ++l) yd.push_back(random_rvec(M));
    return ControlProblem::tracking(std::move(K), gamma, T, L, std::move(y0),
                                    std::move(yd));
  }
  return ControlProblem::terminal(std::move(K), gamma, T, L, std::move(y0),
                                  random_rvec(M));
}

struct Battery {
  std::vector<CheckResult> results;

  void record(const std::string& name, bool pass, double worst,
              double budget) {
    std::ostringstream os;
    os << "worst " << worst << " (budget " << budget << ")";
    results.push_back({name, pass, os.str()});
  }
};

void check_dft(Battery& b) {
  double worst = 0.0;
  for (std::size_t n : {1, 2, 3, 16, 31, 64, 127, 128, 384, 509, 512}) {
    const cvec v = random_cvec(n);
    const cvec round =
        numkit::dft(numkit::dft(v, numkit::DftDirection::forward),
                    numkit::DftDirection::inverse);
    worst = std::max(worst, rel_err(round, v));
    const cvec fwd = numkit::dft(v, numkit::DftDirection::forward);
    worst = std::max(worst, rel_err(fwd, direct_dft(v, true)));
  }
  b.record("numkit.dft round-trip and direct agreement", worst < 1e-10, worst,
           1e-10);
}

void check_lu(Battery& b) {
  double worst = 0.0;
  for (std::size_t n : {4, 16, 33}) {
    numkit::DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = random_cvec(1)[0];
      a(i, i) += cxd(4.0, 0.0);  // keep well conditioned
    }
    const numkit::LuFactors f = numkit::lu_factor(a);
    const cvec x = random_cvec(n);
    const cvec bvec = a.matvec(x);
    worst = std::max(worst, rel_err(numkit::lu_solve(f, bvec), x));
  }
  b.record("numkit.lu solve round-trip", worst < 1e-10, worst, 1e-10);
}

void check_spatial(Battery& b) {
  double worst = 0.0;
  const std::vector<spatial::SpatialOperator> ops = {
      spatial::build_laplacian_1d_isolated(8),
      spatial::build_laplacian_2d_periodic(4),
      spatial::build_advdiff_2d_periodic(4, 0.1)};
  for (const spatial::SpatialOperator& K : ops) {
    const std::size_t M = K.size();
    const rvec v = random_rvec(M), w = random_rvec(M);
    const rvec kv = K.apply(v), kw = K.apply(w, true);
    double ip1 = 0.0, ip2 = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      ip1 += kv[i] * w[i];
      ip2 += v[i] * kw[i];
    }
    worst = std::max(worst, std::abs(ip1 - ip2) /
                                std::max(1.0, std::abs(ip1)));
    // dense materialisation agrees with the native apply
    const rvec kd = K.materialize();
    rvec ref(M, 0.0);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) ref[i] += kd[i * M + j] * v[j];
    worst = std::max(worst, rel_err(kv, ref));
  }
  b.record("spatial.adjoint identity + variant agreement", worst < 1e-10,
           worst, 1e-10);
}

void check_allatonce(Battery& b) {
  double worst = 0.0;
  for (Objective obj : {Objective::tracking, Objective::terminal}) {
    for (std::size_t L : {3, 5}) {
      for (std::size_t M : {std::size_t{1}, std::size_t{2}}) {
        const ControlProblem p = toy_problem(obj, L, M, 0.7, 1.3);
        const bool tracking = obj == Objective::tracking;
        const numkit::DenseMatrix a =
            tracking ? dense::tracking_system(p, true) : dense::terminal_system(p);
        const std::size_t dim = 2 * p.stack_len();
        for (std::size_t trial = 0; trial < 3; ++trial) {
          const rvec x = random_rvec(dim);
          const auto st = allatonce::split(p, x, tracking);
          const rvec mv = allatonce::flatten(
              tracking ? allatonce::apply_tracking_operator(p, st)
                       : allatonce::apply_terminal_operator(p, st));
          const cvec ref = a.matvec(numkit::to_complex(x));
          worst = std::max(worst, rel_err(numkit::to_complex(mv), ref));
        }
      }
    }
  }
  b.record("allatonce.matvec vs dense assembly", worst < 1e-12, worst, 1e-12);
}

void check_precond(Battery& b) {
  double worst = 0.0;
  for (std::size_t L : {3, 5}) {
    for (std::size_t M : {std::size_t{1}, std::size_t{2}}) {
      // tracking, alpha = -1
      {
        const ControlProblem p = toy_problem(Objective::tracking, L, M, 0.5, 1.0);
        const precond::TrackingPreconditioner P(p, cxd(-1.0, 0.0));
        const numkit::DenseMatrix pd = dense::tracking_precond(p, -1.0);
        const numkit::LuFactors lu = numkit::lu_factor(pd);
        for (std::size_t trial = 0; trial < 5; ++trial) {
          const rvec v = random_rvec(p.stack_len());
          const rvec w = random_rvec(p.stack_len());
          auto [x, z] = P.apply(v, w);
          cvec rhs = numkit::to_complex(v);
          const cvec wc = numkit::to_complex(w);
          rhs.insert(rhs.end(), wc.begin(), wc.end());
          const cvec ref = numkit::lu_solve(lu, rhs);
          rvec got = x;
          got.insert(got.end(), z.begin(), z.end());
          worst = std::max(worst, rel_err(numkit::to_complex(got), ref));
        }
      }
      // terminal, alpha = 1e-4
      {
        const ControlProblem p = toy_problem(Objective::terminal, L, M, 0.5, 1.0);
        const precond::TerminalPreconditioner P(p, cxd(1e-4, 0.0));
        const numkit::DenseMatrix pd = dense::terminal_precond(p, 1e-4);
        const numkit::LuFactors lu = numkit::lu_factor(pd);
        for (std::size_t trial = 0; trial < 5; ++trial) {
          const rvec v = random_rvec(p.stack_len());
          const rvec w = random_rvec(p.stack_len());
          auto [x, z] = P.apply(v, w);
          cvec rhs = numkit::to_complex(v);
          const cvec wc = numkit::to_complex(w);
          rhs.insert(rhs.end(), wc.begin(), wc.end());
          const cvec ref = numkit::lu_solve(lu, rhs);
          rvec got = x;
          got.insert(got.end(), z.begin(), z.end());
          worst = std::max(worst, rel_err(numkit::to_complex(got), ref));
        }
      }
    }
  }
  b.record("precond.apply vs dense LU", worst < 1e-9, worst, 1e-9);
}

void check_krylov(Battery& b) {
  double worst = 0.0;
  const std::size_t n = 24;
  numkit::DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = cxd(random_rvec(1)[0], 0.0);
    a(i, i) += cxd(6.0, 0.0);
  }
  const rvec bvec = random_rvec(n);
  auto apply = [&a](const rvec& x) {
    return numkit::real_part(a.matvec(numkit::to_complex(x)));
  };
  auto ident = [](const rvec& x) { return x; };
  krylov::GmresConfig gc;
  gc.rel_tol = 1e-13;
  gc.max_iter = static_cast<int>(n);
  const auto out = krylov::gmres<double>(apply, ident, bvec, gc);
  const rvec ax = apply(out.solution);
  rvec resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = bvec[i] - ax[i];
  worst = numkit::norm2(resid) / numkit::norm2(bvec);
  bool monotone = true;
  for (std::size_t i = 1; i < out.residual_history.size(); ++i) {
    if (out.residual_history[i] > out.residual_history[i - 1] + 1e-14) {
      monotone = false;
    }
  }
  b.record("krylov.gmres exactness + monotone residuals",
           worst < 1e-10 && monotone, worst, 1e-10);
}

void check_spectra(Battery& b) {
  double worst = 0.0;
  for (double phi : {0.2, 0.5, 0.8}) {
    for (double psi : {0.1, 1.0}) {
      const auto m = spectra::ModeParams::from_phi_psi(phi, psi);
      for (int alpha : {1, -1}) {
        for (std::size_t Lh : {5, 13}) {
          const auto analytic = spectra::tracking_omega(m, alpha, Lh);
          const auto oracle = spectra::oracle_preconditioned_spectrum(
              m, alpha, Lh, Objective::tracking);
          const double scale = std::max(std::abs(analytic.first), 1e-30);
          worst = std::max(
              worst, std::min(std::abs(analytic.first - oracle.first),
                              std::abs(analytic.first - oracle.second)) /
                         scale);
        }
      }
      for (double alpha : {1e-4, 0.3}) {
        for (std::size_t L : {5, 13}) {
          const auto analytic = spectra::terminal_omega(m, alpha, L);
          const auto oracle = spectra::oracle_preconditioned_spectrum(
              m, alpha, L, Objective::terminal);
          const double scale = std::max(std::abs(analytic.first), 1e-30);
          worst = std::max(
              worst, std::min(std::abs(analytic.first - oracle.first),
                              std::abs(analytic.first - oracle.second)) /
                         scale);
        }
      }
    }
  }
  b.record("spectra.analytic vs dense oracle", worst < 1e-8, worst, 1e-8);

  // semidisk containment at a few samples
  bool contained = true;
  std::uniform_real_distribution<double> uphi(0.05, 0.95), upsi(0.01, 5.0);
  std::uniform_int_distribution<int> ul(5, 50);
  for (int i = 0; i < 40; ++i) {
    const auto m = spectra::ModeParams::from_phi_psi(uphi(rng()), upsi(rng()));
    const auto t = spectra::tracking_theta(m, -1, static_cast<std::size_t>(ul(rng())));
    if (t.first.real() < 0.5 - 1e-12 ||
        std::abs(t.first - cxd(0.5, 0.0)) > 0.5 + 1e-12) {
      contained = false;
    }
  }
  b.results.push_back({"spectra.semidisk containment (alpha=-1)", contained,
                       contained ? "all samples inside" : "sample escaped"});
}

}  // namespace

std::vector<CheckResult> run_validate() {
  Battery b;
  check_dft(b);
  check_lu(b);
  check_spatial(b);
  check_allatonce(b);
  check_precond(b);
  check_krylov(b);
  check_spectra(b);
  return b.results;
}

}  // namespace paradiag::driver
