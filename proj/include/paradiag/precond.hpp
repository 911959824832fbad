#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "paradiag/allatonce.hpp"
#include "paradiag/spatial.hpp"

/// Alpha-circulant machinery and the two ParaDiag preconditioner applications.
/// Both preconditioners work through the factorisation
///   C(alpha) = Gamma_alpha^{-1} F^* D(alpha) F Gamma_alpha
/// of the alpha-circulant difference matrix, so one application costs a pair
/// of Fourier transforms across the time index plus independent per-index
/// spatial solves.
namespace paradiag::precond {

using numkit::cvec;
using numkit::cxd;
using numkit::rvec;

/// Diagonalisation data of the alpha-circulant difference matrix C(alpha) of
/// order n: the geometric weights Gamma_alpha = diag(alpha^{j/n}) (principal
/// branch) and the eigenvalues d_j = 1 - alpha^{1/n} e^{2 pi i j/n}.
struct AlphaCirculantSpec {
  cxd alpha;
  std::size_t n = 0;
  cvec weights;  // Gamma_alpha diagonal
  cvec eigs;     // D(alpha) diagonal
};

/// Builds the spec and cross-checks the closed-form eigenvalues against an
/// explicit DFT of Gamma_alpha * c1(alpha) to 1e-12. Throws on alpha = 0.
AlphaCirculantSpec alpha_circulant_spec(cxd alpha, std::size_t n);

/// Tracking preconditioner P(alpha) (|alpha| = 1 required): scaled DFT across
/// time on both stacks, one coupled 2M-block solve per time-frequency index
/// with coupling tau/sqrt(gamma), inverse scaled DFT. All shifted blocks are
/// factored up front at construction.
class TrackingPreconditioner {
 public:
  TrackingPreconditioner(const allatonce::ControlProblem& p, cxd alpha);

  std::pair<cvec, cvec> apply(const cvec& v, const cvec& w) const;
  /// Real-valued convenience for real alpha (+-1): checks the imaginary
  /// residue stays below 1e-9 relative and truncates.
  std::pair<rvec, rvec> apply(const rvec& v, const rvec& w) const;

  const AlphaCirculantSpec& spec() const { return spec_; }

 private:
  const allatonce::ControlProblem* prob_;
  AlphaCirculantSpec spec_;
  double g_;  // tau/sqrt(gamma)
  std::vector<spatial::CoupledBlockSolver> blocks_;
};

/// Terminal-cost preconditioner P(alpha) (any alpha != 0), block-triangular:
/// phase 1 solves the adjoint block (C*(alpha) (x) I + tau I (x) K*) z = w,
/// phase 2 solves (C(alpha) (x) I + tau I (x) K) x = v - (tau/gamma) z.
class TerminalPreconditioner {
 public:
  TerminalPreconditioner(const allatonce::ControlProblem& p, cxd alpha);

  std::pair<cvec, cvec> apply(const cvec& v, const cvec& w) const;
  /// Real alpha gives a real preconditioner; checked/truncated as above.
  std::pair<rvec, rvec> apply(const rvec& v, const rvec& w) const;

  const AlphaCirculantSpec& spec() const { return spec_; }

 private:
  const allatonce::ControlProblem* prob_;
  AlphaCirculantSpec spec_;
  double c_;  // tau/gamma
  std::vector<spatial::ShiftedSolver> adjoint_solves_;
  std::vector<spatial::ShiftedSolver> state_solves_;
};

// One-shot wrappers.
std::pair<rvec, rvec> apply_tracking_precond(const allatonce::ControlProblem& p,
                                             cxd alpha, const rvec& v,
                                             const rvec& w);
std::pair<rvec, rvec> apply_terminal_precond(const allatonce::ControlProblem& p,
                                             cxd alpha, const rvec& v,
                                             const rvec& w);

}  // namespace paradiag::precond
