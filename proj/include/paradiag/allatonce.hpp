#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "paradiag/spatial.hpp"

/// The discretised all-at-once optimality systems: right-hand sides,
/// matrix-free matvecs, and the sqrt(gamma) rescaling of the adjoint stack
/// used by the tracking formulation.
namespace paradiag::allatonce {

using numkit::rvec;

enum class Objective { tracking, terminal };

/// A linear-quadratic control problem over [0, T], implicit Euler in time
/// with L steps of size tau = T/L. Tracking problems carry the target
/// trajectory sampled at the interior time points t = l*tau, l = 1..L-1;
/// terminal problems carry the target state.
struct ControlProblem {
  Objective objective = Objective::tracking;
  spatial::SpatialOperator K;
  double gamma = 0.0;
  double T = 0.0;
  std::size_t L = 0;
  rvec y_init;
  std::vector<rvec> y_d;  // tracking, size L-1
  rvec y_target;          // terminal

  double tau() const { return T / static_cast<double>(L); }
  std::size_t space_dim() const { return K.size(); }
  /// Number of time blocks per stack: L-1 for tracking (y_L and lambda_0 are
  /// not unknowns), L for terminal.
  std::size_t time_blocks() const {
    return objective == Objective::tracking ? L - 1 : L;
  }
  std::size_t stack_len() const { return time_blocks() * space_dim(); }

  static ControlProblem tracking(spatial::SpatialOperator K, double gamma,
                                 double T, std::size_t L, rvec y_init,
                                 std::vector<rvec> y_d);
  static ControlProblem terminal(spatial::SpatialOperator K, double gamma,
                                 double T, std::size_t L, rvec y_init,
                                 rvec y_target);
};

/// The stacked unknowns (state stack, adjoint stack). For tracking systems
/// the adjoint may be held in rescaled form lambda_hat = lambda / sqrt(gamma),
/// indicated by the flag.
struct StackedState {
  rvec y;
  rvec lam;
  bool rescaled_adjoint = false;
};

rvec flatten(const StackedState& x);
StackedState split(const ControlProblem& p, const rvec& flat,
                   bool rescaled_adjoint);

/// Tracking right-hand side: b1 = [y_init; 0; ...; 0] and the rescaled
/// b2_hat = -tau * y_d_stack / sqrt(gamma).
std::pair<rvec, rvec> assemble_tracking_rhs(const ControlProblem& p);

/// Terminal right-hand side, both stacks concatenated:
/// [y_init; 0; ...; 0 | 0; ...; 0; -(I + tau K*) y_target].
rvec assemble_terminal_rhs(const ControlProblem& p);

/// Matrix-free product with the rescaled tracking system
///   [ B (x) I + tau I (x) K        (tau/sqrt(gamma)) I       ]
///   [ -(tau/sqrt(gamma)) I     B^T (x) I + tau I (x) K*      ]
/// where B is the lower-bidiagonal implicit-Euler difference matrix of order
/// L-1. Requires x.rescaled_adjoint.
StackedState apply_tracking_operator(const ControlProblem& p,
                                     const StackedState& x);

/// Matrix-free product with the terminal-cost system
///   [ B (x) I + tau I (x) K                  (tau/gamma) I   ]
///   [ -E (x) (I + tau K*)              B^T (x) I + tau I (x) K* ]
/// where E selects the final time block.
StackedState apply_terminal_operator(const ControlProblem& p,
                                     const StackedState& x);

enum class RescaleDirection { to_rescaled, to_physical };

/// Multiplies/divides the adjoint stack by sqrt(gamma) and toggles the flag.
/// Tracking only; terminal systems are never rescaled.
StackedState rescale_adjoint(const ControlProblem& p, StackedState x,
                             RescaleDirection dir);

/// u = -lambda / gamma, applied to the physical (unrescaled) adjoint stack.
rvec reconstruct_control(const rvec& lam_stack, double gamma);

}  // namespace paradiag::allatonce
