#include "paradiag/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace paradiag::dense {

using allatonce::ControlProblem;
using allatonce::Objective;
using numkit::rvec;

namespace {

// out(r0+i, c0+j) += w * K[i][j] (or K^T)
void add_spatial_block(DenseMatrix& out, std::size_t r0, std::size_t c0,
                       const rvec& k, std::size_t m, double w, bool transpose) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out(r0 + i, c0 + j) += w * (transpose ? k[j * m + i] : k[i * m + j]);
}

void add_identity_block(DenseMatrix& out, std::size_t r0, std::size_t c0,
                        std::size_t m, double w) {
  for (std::size_t i = 0; i < m; ++i) out(r0 + i, c0 + i) += w;
}

// Shared skeleton: [[TL (x) I + tau I (x) K, c_up I], [low, TR' ...]] where
// the time blocks of the diagonal are bidiagonal (1, -phi pattern in time is
// 1/-1 here) with an optional -alpha corner.
DenseMatrix assemble(const ControlProblem& p, bool rescaled, bool precond,
                     double alpha) {
  const std::size_t m = p.space_dim();
  const std::size_t n = p.time_blocks();
  const std::size_t dim = 2 * n * m;
  const double tau = p.tau();
  const rvec k = p.K.materialize();

  DenseMatrix out(dim, dim);
  const double coupling_up =
      p.objective == Objective::tracking
          ? (rescaled ? tau / std::sqrt(p.gamma) : tau / p.gamma)
          : tau / p.gamma;

  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t yr = l * m;
    const std::size_t lr = (n + l) * m;
    // time difference matrix B (or C(alpha)) and its transpose
    add_identity_block(out, yr, yr, m, 1.0);
    if (l > 0) add_identity_block(out, yr, yr - m, m, -1.0);
    add_identity_block(out, lr, lr, m, 1.0);
    if (l + 1 < n) add_identity_block(out, lr, lr + m, m, -1.0);
    // tau K / tau K*
    add_spatial_block(out, yr, yr, k, m, tau, false);
    add_spatial_block(out, lr, lr, k, m, tau, true);
    // control coupling
    add_identity_block(out, yr, lr, m, coupling_up);
  }
  if (precond) {
    // alpha-circulant corners
    add_identity_block(out, 0, (n - 1) * m, m, -alpha);
    add_identity_block(out, (2 * n - 1) * m, n * m, m, -alpha);
  }

  if (p.objective == Objective::tracking) {
    const double coupling_low = rescaled ? tau / std::sqrt(p.gamma) : tau;
    for (std::size_t l = 0; l < n; ++l) {
      add_identity_block(out, (n + l) * m, l * m, m, -coupling_low);
    }
  } else if (!precond) {
    // terminal coupling: only the last adjoint row sees -(I + tau K*) y_L
    const std::size_t r0 = (2 * n - 1) * m;
    const std::size_t c0 = (n - 1) * m;
    add_identity_block(out, r0, c0, m, -1.0);
    add_spatial_block(out, r0, c0, k, m, -tau, true);
  }
  return out;
}

}  // namespace

DenseMatrix tracking_system(const ControlProblem& p, bool rescaled) {
  if (p.objective != Objective::tracking) {
    throw std::invalid_argument("tracking_system: not a tracking problem");
  }
  return assemble(p, rescaled, /*precond=*/false, 0.0);
}

DenseMatrix tracking_precond(const ControlProblem& p, double alpha) {
  if (p.objective != Objective::tracking) {
    throw std::invalid_argument("tracking_precond: not a tracking problem");
  }
  return assemble(p, /*rescaled=*/true, /*precond=*/true, alpha);
}

DenseMatrix terminal_system(const ControlProblem& p) {
  if (p.objective != Objective::terminal) {
    throw std::invalid_argument("terminal_system: not a terminal problem");
  }
  return assemble(p, /*rescaled=*/false, /*precond=*/false, 0.0);
}

DenseMatrix terminal_precond(const ControlProblem& p, double alpha) {
  if (p.objective != Objective::terminal) {
    throw std::invalid_argument("terminal_precond: not a terminal problem");
  }
  return assemble(p, /*rescaled=*/false, /*precond=*/true, alpha);
}

}  // namespace paradiag::dense
