#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "paradiag/allatonce.hpp"
#include "paradiag/numkit.hpp"

/// Closed-form spectra of the preconditioned all-at-once systems for
/// self-adjoint problems, their scaling limits, the corner-entry formulas
/// behind them, and a dense brute-force oracle that validates everything.
namespace paradiag::spectra {

using numkit::cxd;
using numkit::rvec;

/// Per-spatial-mode parameters. One eigenvalue sigma of K and the rescaled
/// control weight fully determine the non-unity preconditioned eigenvalues:
///   sigma_hat = tau*sigma, gamma_hat = tau/sqrt(gamma) (tracking)
///                                      tau/gamma        (terminal)
///   phi = 1/(1+sigma_hat), psi = gamma_hat * phi.
struct ModeParams {
  double sigma_hat = 0.0;
  double gamma_hat = 0.0;
  double phi = 0.0;
  double psi = 0.0;

  static ModeParams from_rescaled(double sigma_hat, double gamma_hat);
  static ModeParams from_phi_psi(double phi, double psi);

  /// Positive-definite-K regime where the semidisk theory applies.
  bool in_theory_domain() const { return phi > 0.0 && phi < 1.0; }
  /// 1 - phi = sigma_hat/(1+sigma_hat), free of cancellation near phi = 1.
  double one_minus_phi() const { return sigma_hat / (1.0 + sigma_hat); }
  /// phi^k through exp/log1p, stable for phi arbitrarily close to 1.
  double phi_pow(double k) const;
};

/// Roots of phi z^2 - (1+phi^2+psi^2) z + phi = 0; z1 > z2 with z1 z2 = 1.
struct ZPair {
  double z1;
  double z2;
};

/// Computed via the conjugate form to avoid cancellation; asserts z1*z2 = 1
/// to 1e-12 and, inside the theory domain, 0 < z2 < 1 < z1. Throws
/// std::domain_error for phi = 0.
ZPair z_pair(const ModeParams& m);

/// The two potentially non-zero eigenvalues of the preconditioned residual
/// for tracking, alpha = +-1:
///   omega = ((z1-phi+-psi i)/(1-a z1^Lh) - (z2-phi+-psi i)/(1-a z2^Lh))/(z2-z1).
/// Large powers of z1 are folded into z2 = 1/z1 so the evaluation stays
/// bounded up to Lh ~ 1e5. Requires Lh > 3, phi != 0, psi != 0.
std::pair<cxd, cxd> tracking_omega(const ModeParams& m, int alpha,
                                   std::size_t Lhat);

/// theta = 1 + omega.
std::pair<cxd, cxd> tracking_theta(const ModeParams& m, int alpha,
                                   std::size_t Lhat);

enum class SemidiskPosition { inside, boundary, outside };

/// Membership in D_{0.5,+}, the right half of the disk centred at 0.5 with
/// radius 0.5: inside iff Re theta >= 0.5 - tol and |theta - 0.5| <= 0.5 + tol,
/// with a band of width tol reported as boundary.
SemidiskPosition semidisk_check(cxd theta, double tol = 1e-9);

/// The 2x2 reduction whose eigenvalues are the non-unity terminal-cost
/// omegas. Requires alpha != 0 and phi != +-1.
numkit::DenseMatrix terminal_mred(const ModeParams& m, double alpha,
                                  std::size_t L);

/// Eigenvalues of terminal_mred via the stable trace/determinant route
/// (det M_red = (alpha phi^L / (1 - alpha phi^L))^2).
std::pair<cxd, cxd> terminal_omega(const ModeParams& m, double alpha,
                                   std::size_t L);

/// alpha -> 0 value: omega_1 = psi (1 - phi^{2L}) / (1 - phi^2).
double terminal_omega_alpha0(const ModeParams& m, std::size_t L);

/// Corner entries of H = psi (psi^2 I + C(alpha) C^T(alpha))^{-1} for the
/// tracking analysis; h00 = h_{0,0} and h0n = h_{0,Lh-1}.
struct TrackingCorners {
  double h00;
  double h0n;
};
TrackingCorners corner_entries_tracking(const ModeParams& m, int alpha,
                                        std::size_t Lhat);

/// Last-row corner entries for the terminal analysis:
/// h_last0 = phi^{L-1}/(1-alpha phi^L) of C^{-1}(alpha) and
/// g_lastlast = (1-phi^{2L}) / ((1-alpha phi^L)^2 (1-phi^2)).
struct TerminalCorners {
  double h_last0;
  double g_lastlast;
};
TerminalCorners corner_entries_terminal(const ModeParams& m, double alpha,
                                        std::size_t L);

/// L -> infinity with tau fixed: theta -> (z1 - phi +- psi i)/(z1 - z2)
/// (tracking, both alpha = +-1) and theta -> 1 + psi/(1-phi^2) (terminal,
/// alpha -> 0).
std::pair<cxd, cxd> tracking_horizon_limit(const ModeParams& m);
double terminal_horizon_limit(const ModeParams& m);

/// tau -> 0 with T fixed:
///   tracking: 1/2 + tanh(T sqrt(gamma sigma^2+1)/(2 sqrt(gamma)))^{-alpha}
///             (sqrt(gamma) sigma +- i) / (2 sqrt(gamma sigma^2+1))
///   terminal: 1 + (1 - e^{-2 sigma T}) / (2 gamma sigma).
std::pair<cxd, cxd> tracking_timestep_limit(double sigma, double gamma,
                                            double T, int alpha);
double terminal_timestep_limit(double sigma, double gamma, double T);

/// Dense scalar-mode assemblies of the rescaled preconditioner and system
/// matrices (2n x 2n). alpha = 0 with objective = tracking gives the system
/// matrix itself.
numkit::DenseMatrix dense_mode_precond(const ModeParams& m, double alpha,
                                       std::size_t n,
                                       allatonce::Objective objective);
numkit::DenseMatrix dense_mode_operator(const ModeParams& m, std::size_t n,
                                        allatonce::Objective objective);

/// Brute-force route: assemble P and R = A - P densely, solve P^{-1} R by LU
/// and extract the two non-trivial eigenvalues from power traces. The trace
/// consistency check doubles as a verification of the rank-2 structure.
/// Scalar spatial mode only; n is capped at 200.
std::pair<cxd, cxd> oracle_preconditioned_spectrum(
    const ModeParams& m, double alpha, std::size_t n,
    allatonce::Objective objective);

/// Full per-mode spectrum report for a self-adjoint problem.
struct ModeRecord {
  double sigma_hat;
  double gamma_hat;
  double phi;
  double psi;
  cxd theta1;
  cxd theta2;
  SemidiskPosition position;
};

struct SpectrumReport {
  std::vector<ModeRecord> modes;
  cxd alpha;
  std::size_t n = 0;            // Lhat (tracking) or L (terminal)
  std::size_t skipped_modes = 0;  // outside the closed-form hypotheses
  double max_dist_from_half = 0.0;
  double min_re = 0.0;
};

/// Tracking spectrum for the given K eigenvalues. Modes with phi exactly 1
/// (sigma = 0) are evaluated too: the closed form only excludes
/// phi, psi = 0.
SpectrumReport tracking_thetas(const allatonce::ControlProblem& p,
                               const rvec& sigmas, int alpha);

/// Terminal spectrum; modes with phi = +-1 are excluded (counted as skipped)
/// because the reduction divides by 1 - phi^2.
SpectrumReport terminal_thetas(const allatonce::ControlProblem& p,
                               const rvec& sigmas, double alpha);

}  // namespace paradiag::spectra
