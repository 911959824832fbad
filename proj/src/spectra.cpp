#include "paradiag/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace paradiag::spectra {

namespace {

// Shared geometry of the z-roots, all difference-free:
//   q = 1 - phi^2 + psi^2,     s = sqrt(q^2 + 4 phi^2 psi^2) = z-discriminant,
//   z1 - phi = (q+s)/(2 phi),  z2 - phi = -2 phi psi^2/(q+s),
//   z1 - z2 = s/phi.
struct ZGeom {
  double q, s, z1, z2, z1_minus_phi, z2_minus_phi, z1_minus_z2;
};

ZGeom z_geometry(const ModeParams& m) {
  if (m.phi == 0.0) throw std::domain_error("z_pair: phi = 0");
  const double phi = m.phi;
  const double psi = m.psi;
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + phi);
  ZGeom g;
  g.q = one_minus_phi2 + psi * psi;
  g.s = std::sqrt(g.q * g.q + 4.0 * phi * phi * psi * psi);
  g.z1_minus_phi = (g.q + g.s) / (2.0 * phi);
  g.z2_minus_phi = (g.q + g.s) != 0.0
                       ? -2.0 * phi * psi * psi / (g.q + g.s)
                       : (g.q - g.s) / (2.0 * phi);
  g.z1 = phi + g.z1_minus_phi;
  g.z2 = phi + g.z2_minus_phi;
  g.z1_minus_z2 = g.s / phi;
  return g;
}

void require_tracking_hypotheses(const ModeParams& m, int alpha,
                                 std::size_t Lhat) {
  if (Lhat <= 3) throw std::domain_error("tracking spectrum: requires Lhat > 3");
  if (alpha != 1 && alpha != -1) {
    throw std::domain_error("tracking spectrum: alpha must be +-1");
  }
  if (m.phi == 0.0 || m.psi == 0.0) {
    throw std::domain_error("tracking spectrum: requires phi, psi != 0");
  }
}

void require_terminal_hypotheses(const ModeParams& m, double alpha,
                                 std::size_t L) {
  if (L < 2) throw std::domain_error("terminal spectrum: requires L >= 2");
  if (alpha == 0.0) throw std::domain_error("terminal spectrum: alpha = 0");
  if (m.phi == 1.0 || m.phi == -1.0) {
    throw std::domain_error("terminal spectrum: requires phi != +-1");
  }
}

}  // namespace

ModeParams ModeParams::from_rescaled(double sigma_hat, double gamma_hat) {
  if (sigma_hat == -1.0) {
    throw std::domain_error("ModeParams: sigma_hat = -1 makes phi infinite");
  }
  ModeParams m;
  m.sigma_hat = sigma_hat;
  m.gamma_hat = gamma_hat;
  m.phi = 1.0 / (1.0 + sigma_hat);
  m.psi = gamma_hat * m.phi;
  return m;
}

ModeParams ModeParams::from_phi_psi(double phi, double psi) {
  if (phi == 0.0) throw std::domain_error("ModeParams: phi = 0");
  ModeParams m;
  m.phi = phi;
  m.psi = psi;
  m.sigma_hat = (1.0 - phi) / phi;
  m.gamma_hat = psi / phi;
  return m;
}

double ModeParams::phi_pow(double k) const {
  if (phi > 0.0) return std::exp(-k * std::log1p(sigma_hat));
  return std::pow(phi, k);
}

ZPair z_pair(const ModeParams& m) {
  const ZGeom g = z_geometry(m);
  if (std::abs(g.z1 * g.z2 - 1.0) > 1e-12) {
    throw std::runtime_error("z_pair: z1*z2 = 1 identity violated");
  }
  if (m.in_theory_domain()) {
    if (!(0.0 < g.z2 && g.z2 < 1.0 && 1.0 < g.z1)) {
      throw std::runtime_error("z_pair: ordering 0 < z2 < 1 < z1 violated");
    }
  }
  return {g.z1, g.z2};
}

std::pair<cxd, cxd> tracking_omega(const ModeParams& m, int alpha,
                                   std::size_t Lhat) {
  require_tracking_hypotheses(m, alpha, Lhat);
  const ZGeom g = z_geometry(m);
  const double a = static_cast<double>(alpha);
  // t = z2^Lhat = z1^{-Lhat}; then 1/(1 - a z1^Lhat) = t/(t - a).
  const double t = std::pow(g.z2, static_cast<double>(Lhat));
  const cxd f1 = cxd(t, 0.0) / cxd(t - a, 0.0);
  const cxd f2 = cxd(1.0, 0.0) / cxd(1.0 - a * t, 0.0);
  const double pref = -m.phi / g.s;  // 1/(z2 - z1)

  const cxd num1_p(g.z1_minus_phi, m.psi);
  const cxd num2_p(g.z2_minus_phi, m.psi);
  const cxd omega1 = pref * (num1_p * f1 - num2_p * f2);
  const cxd num1_m(g.z1_minus_phi, -m.psi);
  const cxd num2_m(g.z2_minus_phi, -m.psi);
  const cxd omega2 = pref * (num1_m * f1 - num2_m * f2);
  if (!std::isfinite(omega1.real()) || !std::isfinite(omega1.imag())) {
    throw std::runtime_error("tracking_omega: non-finite result");
  }
  return {omega1, omega2};
}

std::pair<cxd, cxd> tracking_theta(const ModeParams& m, int alpha,
                                   std::size_t Lhat) {
  auto [w1, w2] = tracking_omega(m, alpha, Lhat);
  return {1.0 + w1, 1.0 + w2};
}

SemidiskPosition semidisk_check(cxd theta, double tol) {
  const double re = theta.real();
  const double dist = std::abs(theta - cxd(0.5, 0.0));
  if (re < 0.5 - tol || dist > 0.5 + tol) return SemidiskPosition::outside;
  if (re <= 0.5 + tol || dist >= 0.5 - tol) return SemidiskPosition::boundary;
  return SemidiskPosition::inside;
}

numkit::DenseMatrix terminal_mred(const ModeParams& m, double alpha,
                                  std::size_t L) {
  require_terminal_hypotheses(m, alpha, L);
  const double Ld = static_cast<double>(L);
  const double phiL = m.phi_pow(Ld);
  const double denom = 1.0 - alpha * phiL;
  if (denom == 0.0) throw std::domain_error("terminal_mred: alpha phi^L = 1");
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + m.phi);
  const double S = (1.0 - m.phi_pow(2.0 * Ld)) / one_minus_phi2;
  const double a = alpha * phiL / denom;
  const double b = m.psi * S / (denom * denom);

  numkit::DenseMatrix red(2, 2);
  red(0, 0) = a + b;
  red(0, 1) = -alpha * m.phi * b;
  red(1, 0) = -m.phi_pow(Ld - 1.0) / denom;
  red(1, 1) = a;
  return red;
}

std::pair<cxd, cxd> terminal_omega(const ModeParams& m, double alpha,
                                   std::size_t L) {
  require_terminal_hypotheses(m, alpha, L);
  const double Ld = static_cast<double>(L);
  const double phiL = m.phi_pow(Ld);
  const double denom = 1.0 - alpha * phiL;
  if (denom == 0.0) throw std::domain_error("terminal_omega: alpha phi^L = 1");
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + m.phi);
  const double S = (1.0 - m.phi_pow(2.0 * Ld)) / one_minus_phi2;
  const double a = alpha * phiL / denom;
  const double b = m.psi * S / (denom * denom);

  // tr = 2a + b, det = a^2; disc = tr^2 - 4 det = b (4a + b)
  const double tr = 2.0 * a + b;
  const cxd disc = std::sqrt(cxd(b * (4.0 * a + b), 0.0));
  cxd e1 = 0.5 * (tr + disc);
  if (std::abs(tr - disc) > std::abs(e1)) e1 = 0.5 * (tr - disc);
  const cxd e2 = std::abs(e1) > 0.0 ? cxd(a * a, 0.0) / e1 : cxd(0.0, 0.0);
  return {e1, e2};
}

double terminal_omega_alpha0(const ModeParams& m, std::size_t L) {
  if (m.phi == 1.0 || m.phi == -1.0) {
    throw std::domain_error("terminal_omega_alpha0: requires phi != +-1");
  }
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + m.phi);
  return m.psi * (1.0 - m.phi_pow(2.0 * static_cast<double>(L))) /
         one_minus_phi2;
}

TrackingCorners corner_entries_tracking(const ModeParams& m, int alpha,
                                        std::size_t Lhat) {
  require_tracking_hypotheses(m, alpha, Lhat);
  if (!m.in_theory_domain()) {
    throw std::domain_error("corner_entries_tracking: requires 0 < phi < 1");
  }
  const ZGeom g = z_geometry(m);
  const double t = std::pow(g.z2, static_cast<double>(Lhat));
  const double z2_pow_lm1 = std::pow(g.z2, static_cast<double>(Lhat) - 1.0);
  // factor psi/(phi (z2 - z1)) = -psi/s; z1/(1 -+ z1^Lh) folds to
  // z2^{Lh-1}/(t -+ 1) through z1 z2 = 1.
  const double factor = -m.psi / g.s;
  TrackingCorners c;
  if (alpha == 1) {
    c.h00 = factor * (t + 1.0) / (t - 1.0);
    c.h0n = factor * (z2_pow_lm1 + g.z2) / (t - 1.0);
  } else {
    c.h00 = factor * (t - 1.0) / (t + 1.0);
    c.h0n = -factor * (z2_pow_lm1 - g.z2) / (t + 1.0);
  }
  return c;
}

TerminalCorners corner_entries_terminal(const ModeParams& m, double alpha,
                                        std::size_t L) {
  if (m.phi == 1.0 || m.phi == -1.0) {
    throw std::domain_error("corner_entries_terminal: requires phi != +-1");
  }
  const double Ld = static_cast<double>(L);
  const double phiL = m.phi_pow(Ld);
  const double denom = 1.0 - alpha * phiL;
  if (denom == 0.0) {
    throw std::domain_error("corner_entries_terminal: alpha phi^L = 1");
  }
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + m.phi);
  TerminalCorners c;
  c.h_last0 = m.phi_pow(Ld - 1.0) / denom;
  c.g_lastlast = (1.0 - m.phi_pow(2.0 * Ld)) / (denom * denom * one_minus_phi2);
  return c;
}

std::pair<cxd, cxd> tracking_horizon_limit(const ModeParams& m) {
  if (!m.in_theory_domain()) {
    throw std::domain_error("tracking_horizon_limit: requires 0 < phi < 1");
  }
  const ZGeom g = z_geometry(m);
  const double scale = m.phi / g.s;  // 1/(z1 - z2)
  return {scale * cxd(g.z1_minus_phi, m.psi),
          scale * cxd(g.z1_minus_phi, -m.psi)};
}

double terminal_horizon_limit(const ModeParams& m) {
  if (!m.in_theory_domain()) {
    throw std::domain_error("terminal_horizon_limit: requires 0 < phi < 1");
  }
  const double one_minus_phi2 = m.one_minus_phi() * (1.0 + m.phi);
  return 1.0 + m.psi / one_minus_phi2;
}

std::pair<cxd, cxd> tracking_timestep_limit(double sigma, double gamma,
                                            double T, int alpha) {
  if (sigma <= 0.0 || gamma <= 0.0 || T <= 0.0) {
    throw std::domain_error("tracking_timestep_limit: needs sigma, gamma, T > 0");
  }
  if (alpha != 1 && alpha != -1) {
    throw std::domain_error("tracking_timestep_limit: alpha must be +-1");
  }
  const double root = std::sqrt(gamma * sigma * sigma + 1.0);
  const double th = std::tanh(T * root / (2.0 * std::sqrt(gamma)));
  const double factor = alpha == -1 ? th : 1.0 / th;
  const cxd dir(std::sqrt(gamma) * sigma, 1.0);
  const cxd t1 = 0.5 + factor * dir / (2.0 * root);
  return {t1, std::conj(t1)};
}

double terminal_timestep_limit(double sigma, double gamma, double T) {
  if (sigma <= 0.0 || gamma <= 0.0 || T <= 0.0) {
    throw std::domain_error("terminal_timestep_limit: needs sigma, gamma, T > 0");
  }
  return 1.0 + (1.0 - std::exp(-2.0 * sigma * T)) / (2.0 * gamma * sigma);
}

numkit::DenseMatrix dense_mode_precond(const ModeParams& m, double alpha,
                                       std::size_t n,
                                       allatonce::Objective objective) {
  if (n < 2) throw std::invalid_argument("dense_mode_precond: n < 2");
  numkit::DenseMatrix p(2 * n, 2 * n);
  const double phi = m.phi;
  const double psi = m.psi;
  for (std::size_t l = 0; l < n; ++l) {
    p(l, l) = 1.0;
    if (l > 0) p(l, l - 1) = -phi;
    p(n + l, n + l) = 1.0;
    if (l + 1 < n) p(n + l, n + l + 1) = -phi;
    p(l, n + l) = psi;
    if (objective == allatonce::Objective::tracking) p(n + l, l) = -psi;
  }
  p(0, n - 1) = -alpha * phi;
  p(2 * n - 1, n) = -alpha * phi;
  return p;
}

numkit::DenseMatrix dense_mode_operator(const ModeParams& m, std::size_t n,
                                        allatonce::Objective objective) {
  numkit::DenseMatrix a = dense_mode_precond(m, 0.0, n, objective);
  if (objective == allatonce::Objective::terminal) {
    a(2 * n - 1, n - 1) = -1.0;
  }
  return a;
}

std::pair<cxd, cxd> oracle_preconditioned_spectrum(
    const ModeParams& m, double alpha, std::size_t n,
    allatonce::Objective objective) {
  if (n > 200) {
    throw std::invalid_argument("oracle_preconditioned_spectrum: n > 200");
  }
  const numkit::DenseMatrix p = dense_mode_precond(m, alpha, n, objective);
  const numkit::DenseMatrix a = dense_mode_operator(m, n, objective);
  const numkit::DenseMatrix r = numkit::subtract(a, p);

  const numkit::LuFactors lu = numkit::lu_factor(p);
  const std::size_t dim = 2 * n;
  numkit::DenseMatrix mm(dim, dim);
  numkit::cvec col(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < dim; ++i) col[i] = r(i, j);
    numkit::cvec x = numkit::lu_solve(lu, col);
    for (std::size_t i = 0; i < dim; ++i) mm(i, j) = x[i];
  }
  auto [e1, e2] = numkit::rank2_eigs_from_traces(mm);
  // order with the nonnegative-imaginary (or larger) eigenvalue first
  if (e2.imag() > e1.imag() ||
      (e2.imag() == e1.imag() && std::abs(e2) > std::abs(e1))) {
    std::swap(e1, e2);
  }
  return {e1, e2};
}

namespace {

SpectrumReport build_report(const allatonce::ControlProblem& p,
                            const rvec& sigmas, cxd alpha, bool tracking,
                            double alpha_real, int alpha_int) {
  SpectrumReport rep;
  rep.alpha = alpha;
  rep.n = p.time_blocks();
  double max_dist = 0.0;
  double min_re = std::numeric_limits<double>::infinity();
  const double tau = p.tau();
  const double gamma_hat =
      tracking ? tau / std::sqrt(p.gamma) : tau / p.gamma;
  for (double sigma : sigmas) {
    const ModeParams m = ModeParams::from_rescaled(tau * sigma, gamma_hat);
    cxd t1, t2;
    if (tracking) {
      auto [a1, a2] = tracking_theta(m, alpha_int, rep.n);
      t1 = a1;
      t2 = a2;
    } else {
      if (m.phi == 1.0 || m.phi == -1.0) {
        ++rep.skipped_modes;
        continue;
      }
      auto [a1, a2] = terminal_omega(m, alpha_real, rep.n);
      t1 = 1.0 + a1;
      t2 = 1.0 + a2;
    }
    ModeRecord rec;
    rec.sigma_hat = m.sigma_hat;
    rec.gamma_hat = m.gamma_hat;
    rec.phi = m.phi;
    rec.psi = m.psi;
    rec.theta1 = t1;
    rec.theta2 = t2;
    const SemidiskPosition p1 = semidisk_check(t1);
    const SemidiskPosition p2 = semidisk_check(t2);
    rec.position = std::max(p1, p2);  // outside dominates boundary dominates inside
    rep.modes.push_back(rec);
    max_dist = std::max({max_dist, std::abs(t1 - cxd(0.5, 0.0)),
                         std::abs(t2 - cxd(0.5, 0.0))});
    min_re = std::min({min_re, t1.real(), t2.real()});
  }
  rep.max_dist_from_half = max_dist;
  rep.min_re = rep.modes.empty() ? 0.0 : min_re;
  return rep;
}

}  // namespace

SpectrumReport tracking_thetas(const allatonce::ControlProblem& p,
                               const rvec& sigmas, int alpha) {
  if (p.objective != allatonce::Objective::tracking) {
    throw std::invalid_argument("tracking_thetas: not a tracking problem");
  }
  if (!p.K.self_adjoint()) {
    throw std::invalid_argument("tracking_thetas: K is not self-adjoint");
  }
  return build_report(p, sigmas, cxd(static_cast<double>(alpha), 0.0), true,
                      0.0, alpha);
}

SpectrumReport terminal_thetas(const allatonce::ControlProblem& p,
                               const rvec& sigmas, double alpha) {
  if (p.objective != allatonce::Objective::terminal) {
    throw std::invalid_argument("terminal_thetas: not a terminal problem");
  }
  if (!p.K.self_adjoint()) {
    throw std::invalid_argument("terminal_thetas: K is not self-adjoint");
  }
  return build_report(p, sigmas, cxd(alpha, 0.0), false, alpha, 0);
}

}  // namespace paradiag::spectra
