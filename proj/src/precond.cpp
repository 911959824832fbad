#include "paradiag/precond.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paradiag::precond {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRealnessTol = 1e-9;

// Multiply a stacked vector (n time blocks of size M) by (F (x) I) or
// (F^* (x) I), where F = {e^{2 pi i jk/n}/sqrt(n)} is the unitary DFT matrix
// with positive exponent. In terms of the numkit kernels:
//   F   v = sqrt(n) * inverse-dft(v)
//   F^* v = (1/sqrt(n)) * forward-dft(v)
void time_fourier(cvec& stack, std::size_t n, std::size_t M, bool star) {
  const double root = std::sqrt(static_cast<double>(n));
  cvec fiber(n);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t l = 0; l < n; ++l) fiber[l] = stack[l * M + i];
    cvec t = numkit::dft(fiber, star ? numkit::DftDirection::forward
                                     : numkit::DftDirection::inverse);
    const double scale = star ? 1.0 / root : root;
    for (std::size_t l = 0; l < n; ++l) stack[l * M + i] = t[l] * scale;
  }
}

// Multiply by (diag(w) (x) I).
void time_scale(cvec& stack, std::size_t n, std::size_t M, const cvec& w) {
  for (std::size_t l = 0; l < n; ++l) {
    const cxd wl = w[l];
    for (std::size_t i = 0; i < M; ++i) stack[l * M + i] *= wl;
  }
}

cvec inverted(const cvec& w) {
  cvec out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = 1.0 / w[i];
  return out;
}

cvec conjugated(const cvec& w) {
  cvec out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::conj(w[i]);
  return out;
}

}  // namespace

AlphaCirculantSpec alpha_circulant_spec(cxd alpha, std::size_t n) {
  if (alpha == cxd(0.0, 0.0)) {
    throw std::invalid_argument("alpha_circulant_spec: alpha = 0");
  }
  if (n < 1) throw std::invalid_argument("alpha_circulant_spec: n < 1");

  AlphaCirculantSpec spec;
  spec.alpha = alpha;
  spec.n = n;

  // principal branch of alpha^{1/n}
  const double mod = std::abs(alpha);
  const double arg = std::arg(alpha);
  const double nd = static_cast<double>(n);
  spec.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    spec.weights[j] = std::pow(mod, jd / nd) *
                      cxd(std::cos(arg * jd / nd), std::sin(arg * jd / nd));
  }

  const cxd root = spec.weights.size() > 1 ? spec.weights[1]
                                           : std::pow(mod, 1.0 / nd) *
                                                 cxd(std::cos(arg / nd),
                                                     std::sin(arg / nd));
  spec.eigs.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ang = 2.0 * kPi * static_cast<double>(j) / nd;
    spec.eigs[j] = 1.0 - root * cxd(std::cos(ang), std::sin(ang));
  }

  // Cross-check against D = diag(sqrt(n) F Gamma c1) with c1 = (1,-1,0,...);
  // at n = 1 the wrapped -alpha lands on the same entry as the 1.
  cvec c1(n, cxd(0.0, 0.0));
  if (n == 1) {
    c1[0] = cxd(1.0, 0.0) - alpha;
  } else {
    c1[0] = spec.weights[0];
    c1[1] = -spec.weights[1];
  }
  cvec d = numkit::dft(c1, numkit::DftDirection::inverse);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(d[j] * nd - spec.eigs[j]) > 1e-12 * (1.0 + std::abs(spec.eigs[j]))) {
      throw std::runtime_error("alpha_circulant_spec: eigenvalue cross-check failed");
    }
  }
  return spec;
}

TrackingPreconditioner::TrackingPreconditioner(
    const allatonce::ControlProblem& p, cxd alpha)
    : prob_(&p) {
  if (p.objective != allatonce::Objective::tracking) {
    throw std::invalid_argument("TrackingPreconditioner: not a tracking problem");
  }
  if (std::abs(std::abs(alpha) - 1.0) > 1e-14) {
    throw std::invalid_argument(
        "TrackingPreconditioner: requires |alpha| = 1 "
        "(C(alpha) and C*(alpha) must diagonalise simultaneously)");
  }
  spec_ = alpha_circulant_spec(alpha, p.time_blocks());
  g_ = p.tau() / std::sqrt(p.gamma);
  blocks_.reserve(spec_.n);
  for (std::size_t l = 0; l < spec_.n; ++l) {
    try {
      blocks_.emplace_back(p.K, spec_.eigs[l], p.tau(), g_);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("TrackingPreconditioner: block l=" +
                               std::to_string(l) + ": " + e.what());
    }
  }
}

std::pair<cvec, cvec> TrackingPreconditioner::apply(const cvec& v,
                                                    const cvec& w) const {
  const std::size_t M = prob_->space_dim();
  const std::size_t n = spec_.n;
  if (v.size() != n * M || w.size() != n * M) {
    throw std::invalid_argument("TrackingPreconditioner::apply: size mismatch");
  }

  // (F Gamma (x) I) on both stacks
  cvec r = v, s = w;
  time_scale(r, n, M, spec_.weights);
  time_scale(s, n, M, spec_.weights);
  time_fourier(r, n, M, /*star=*/false);
  time_fourier(s, n, M, /*star=*/false);

  // per-index coupled solves
  cvec rl(M), sl(M);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < M; ++i) {
      rl[i] = r[l * M + i];
      sl[i] = s[l * M + i];
    }
    auto [xl, zl] = blocks_[l].solve(rl, sl);
    for (std::size_t i = 0; i < M; ++i) {
      r[l * M + i] = xl[i];
      s[l * M + i] = zl[i];
    }
  }

  // (Gamma^{-1} F^* (x) I)
  time_fourier(r, n, M, /*star=*/true);
  time_fourier(s, n, M, /*star=*/true);
  const cvec winv = inverted(spec_.weights);
  time_scale(r, n, M, winv);
  time_scale(s, n, M, winv);
  return {std::move(r), std::move(s)};
}

std::pair<rvec, rvec> TrackingPreconditioner::apply(const rvec& v,
                                                    const rvec& w) const {
  auto [x, z] = apply(numkit::to_complex(v), numkit::to_complex(w));
  return {numkit::to_real_checked(x, kRealnessTol),
          numkit::to_real_checked(z, kRealnessTol)};
}

TerminalPreconditioner::TerminalPreconditioner(
    const allatonce::ControlProblem& p, cxd alpha)
    : prob_(&p) {
  if (p.objective != allatonce::Objective::terminal) {
    throw std::invalid_argument("TerminalPreconditioner: not a terminal problem");
  }
  spec_ = alpha_circulant_spec(alpha, p.time_blocks());
  c_ = p.tau() / p.gamma;
  adjoint_solves_.reserve(spec_.n);
  state_solves_.reserve(spec_.n);
  for (std::size_t l = 0; l < spec_.n; ++l) {
    try {
      adjoint_solves_.emplace_back(
          p.K, spatial::ShiftedSolveRequest{std::conj(spec_.eigs[l]), p.tau(),
                                            /*adjoint=*/true});
      state_solves_.emplace_back(
          p.K, spatial::ShiftedSolveRequest{spec_.eigs[l], p.tau(),
                                            /*adjoint=*/false});
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("TerminalPreconditioner: block l=" +
                               std::to_string(l) +
                               " is singular (choose alpha away from 1): " +
                               e.what());
    }
  }
}

std::pair<cvec, cvec> TerminalPreconditioner::apply(const cvec& v,
                                                    const cvec& w) const {
  const std::size_t M = prob_->space_dim();
  const std::size_t n = spec_.n;
  if (v.size() != n * M || w.size() != n * M) {
    throw std::invalid_argument("TerminalPreconditioner::apply: size mismatch");
  }

  // phase 1: (C*(alpha) (x) I + tau I (x) K*) z = w via
  //   z = (Gamma^* F^* (x) I) diag-solve (F Gamma^{-*} (x) I) w
  cvec z = w;
  const cvec w_conj = conjugated(spec_.weights);
  time_scale(z, n, M, inverted(w_conj));
  time_fourier(z, n, M, /*star=*/false);
  cvec block(M);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < M; ++i) block[i] = z[l * M + i];
    cvec sol = adjoint_solves_[l].solve(block);
    for (std::size_t i = 0; i < M; ++i) z[l * M + i] = sol[i];
  }
  time_fourier(z, n, M, /*star=*/true);
  time_scale(z, n, M, w_conj);

  // phase 2: (C(alpha) (x) I + tau I (x) K) x = v - (tau/gamma) z
  cvec x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] - c_ * z[i];
  time_scale(x, n, M, spec_.weights);
  time_fourier(x, n, M, /*star=*/false);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < M; ++i) block[i] = x[l * M + i];
    cvec sol = state_solves_[l].solve(block);
    for (std::size_t i = 0; i < M; ++i) x[l * M + i] = sol[i];
  }
  time_fourier(x, n, M, /*star=*/true);
  time_scale(x, n, M, inverted(spec_.weights));
  return {std::move(x), std::move(z)};
}

std::pair<rvec, rvec> TerminalPreconditioner::apply(const rvec& v,
                                                    const rvec& w) const {
  auto [x, z] = apply(numkit::to_complex(v), numkit::to_complex(w));
  return {numkit::to_real_checked(x, kRealnessTol),
          numkit::to_real_checked(z, kRealnessTol)};
}

std::pair<rvec, rvec> apply_tracking_precond(const allatonce::ControlProblem& p,
                                             cxd alpha, const rvec& v,
                                             const rvec& w) {
  return TrackingPreconditioner(p, alpha).apply(v, w);
}

std::pair<rvec, rvec> apply_terminal_precond(const allatonce::ControlProblem& p,
                                             cxd alpha, const rvec& v,
                                             const rvec& w) {
  return TerminalPreconditioner(p, alpha).apply(v, w);
}

}  // namespace paradiag::precond
