#include "paradiag/allatonce.hpp"

#include <cmath>
#include <stdexcept>

namespace paradiag::allatonce {

namespace {

void check_common(const spatial::SpatialOperator& K, double gamma, double T,
                  std::size_t L, const rvec& y_init) {
  if (gamma <= 0.0) throw std::invalid_argument("ControlProblem: gamma <= 0");
  if (T <= 0.0) throw std::invalid_argument("ControlProblem: T <= 0");
  if (L < 2) throw std::invalid_argument("ControlProblem: L < 2");
  if (y_init.size() != K.size()) {
    throw std::invalid_argument("ControlProblem: y_init has wrong length");
  }
}

}  // namespace

ControlProblem ControlProblem::tracking(spatial::SpatialOperator K,
                                        double gamma, double T, std::size_t L,
                                        rvec y_init, std::vector<rvec> y_d) {
  check_common(K, gamma, T, L, y_init);
  if (y_d.size() != L - 1) {
    throw std::invalid_argument("ControlProblem: y_d needs L-1 samples");
  }
  for (const rvec& v : y_d) {
    if (v.size() != K.size()) {
      throw std::invalid_argument("ControlProblem: y_d sample has wrong length");
    }
  }
  ControlProblem p;
  p.objective = Objective::tracking;
  p.K = std::move(K);
  p.gamma = gamma;
  p.T = T;
  p.L = L;
  p.y_init = std::move(y_init);
  p.y_d = std::move(y_d);
  return p;
}

ControlProblem ControlProblem::terminal(spatial::SpatialOperator K,
                                        double gamma, double T, std::size_t L,
                                        rvec y_init, rvec y_target) {
  check_common(K, gamma, T, L, y_init);
  if (y_target.size() != K.size()) {
    throw std::invalid_argument("ControlProblem: y_target has wrong length");
  }
  ControlProblem p;
  p.objective = Objective::terminal;
  p.K = std::move(K);
  p.gamma = gamma;
  p.T = T;
  p.L = L;
  p.y_init = std::move(y_init);
  p.y_target = std::move(y_target);
  return p;
}

rvec flatten(const StackedState& x) {
  rvec out;
  out.reserve(x.y.size() + x.lam.size());
  out.insert(out.end(), x.y.begin(), x.y.end());
  out.insert(out.end(), x.lam.begin(), x.lam.end());
  return out;
}

StackedState split(const ControlProblem& p, const rvec& flat,
                   bool rescaled_adjoint) {
  const std::size_t n = p.stack_len();
  if (flat.size() != 2 * n) throw std::invalid_argument("split: size mismatch");
  StackedState x;
  x.y.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n));
  x.lam.assign(flat.begin() + static_cast<std::ptrdiff_t>(n), flat.end());
  x.rescaled_adjoint = rescaled_adjoint;
  return x;
}

std::pair<rvec, rvec> assemble_tracking_rhs(const ControlProblem& p) {
  if (p.objective != Objective::tracking) {
    throw std::invalid_argument("assemble_tracking_rhs: not a tracking problem");
  }
  const std::size_t M = p.space_dim();
  const std::size_t n = p.stack_len();
  const double scale = -p.tau() / std::sqrt(p.gamma);

  rvec b1(n, 0.0);
  for (std::size_t i = 0; i < M; ++i) b1[i] = p.y_init[i];

  rvec b2_hat(n, 0.0);
  for (std::size_t l = 0; l < p.time_blocks(); ++l) {
    for (std::size_t i = 0; i < M; ++i) b2_hat[l * M + i] = scale * p.y_d[l][i];
  }
  return {std::move(b1), std::move(b2_hat)};
}

rvec assemble_terminal_rhs(const ControlProblem& p) {
  if (p.objective != Objective::terminal) {
    throw std::invalid_argument("assemble_terminal_rhs: not a terminal problem");
  }
  const std::size_t M = p.space_dim();
  const std::size_t n = p.stack_len();
  rvec b(2 * n, 0.0);
  for (std::size_t i = 0; i < M; ++i) b[i] = p.y_init[i];
  // last adjoint block: -(I + tau K*) y_target
  const rvec ky = p.K.apply(p.y_target, /*adjoint=*/true);
  const double tau = p.tau();
  for (std::size_t i = 0; i < M; ++i) {
    b[2 * n - M + i] = -(p.y_target[i] + tau * ky[i]);
  }
  return b;
}

StackedState apply_tracking_operator(const ControlProblem& p,
                                     const StackedState& x) {
  if (p.objective != Objective::tracking) {
    throw std::invalid_argument("apply_tracking_operator: not a tracking problem");
  }
  if (!x.rescaled_adjoint) {
    throw std::invalid_argument(
        "apply_tracking_operator: expects the rescaled adjoint stack");
  }
  const std::size_t M = p.space_dim();
  const std::size_t Lh = p.time_blocks();
  if (x.y.size() != Lh * M || x.lam.size() != Lh * M) {
    throw std::invalid_argument("apply_tracking_operator: size mismatch");
  }
  const double tau = p.tau();
  const double g = tau / std::sqrt(p.gamma);

  StackedState out;
  out.y.assign(Lh * M, 0.0);
  out.lam.assign(Lh * M, 0.0);
  out.rescaled_adjoint = true;

  rvec block(M), kblock(M);
  for (std::size_t l = 0; l < Lh; ++l) {
    // state rows: (B (x) I) y + tau K y + g lam
    block.assign(x.y.begin() + static_cast<std::ptrdiff_t>(l * M),
                 x.y.begin() + static_cast<std::ptrdiff_t>((l + 1) * M));
    kblock = p.K.apply(block, /*adjoint=*/false);
    for (std::size_t i = 0; i < M; ++i) {
      double v = block[i] + tau * kblock[i] + g * x.lam[l * M + i];
      if (l > 0) v -= x.y[(l - 1) * M + i];
      out.y[l * M + i] = v;
    }
    // adjoint rows: -g y + (B^T (x) I) lam + tau K* lam
    block.assign(x.lam.begin() + static_cast<std::ptrdiff_t>(l * M),
                 x.lam.begin() + static_cast<std::ptrdiff_t>((l + 1) * M));
    kblock = p.K.apply(block, /*adjoint=*/true);
    for (std::size_t i = 0; i < M; ++i) {
      double v = block[i] + tau * kblock[i] - g * x.y[l * M + i];
      if (l + 1 < Lh) v -= x.lam[(l + 1) * M + i];
      out.lam[l * M + i] = v;
    }
  }
  return out;
}

StackedState apply_terminal_operator(const ControlProblem& p,
                                     const StackedState& x) {
  if (p.objective != Objective::terminal) {
    throw std::invalid_argument("apply_terminal_operator: not a terminal problem");
  }
  const std::size_t M = p.space_dim();
  const std::size_t L = p.time_blocks();
  if (x.y.size() != L * M || x.lam.size() != L * M) {
    throw std::invalid_argument("apply_terminal_operator: size mismatch");
  }
  const double tau = p.tau();
  const double c = tau / p.gamma;

  StackedState out;
  out.y.assign(L * M, 0.0);
  out.lam.assign(L * M, 0.0);

  rvec block(M), kblock(M);
  for (std::size_t l = 0; l < L; ++l) {
    block.assign(x.y.begin() + static_cast<std::ptrdiff_t>(l * M),
                 x.y.begin() + static_cast<std::ptrdiff_t>((l + 1) * M));
    kblock = p.K.apply(block, /*adjoint=*/false);
    for (std::size_t i = 0; i < M; ++i) {
      double v = block[i] + tau * kblock[i] + c * x.lam[l * M + i];
      if (l > 0) v -= x.y[(l - 1) * M + i];
      out.y[l * M + i] = v;
    }
    block.assign(x.lam.begin() + static_cast<std::ptrdiff_t>(l * M),
                 x.lam.begin() + static_cast<std::ptrdiff_t>((l + 1) * M));
    kblock = p.K.apply(block, /*adjoint=*/true);
    for (std::size_t i = 0; i < M; ++i) {
      double v = block[i] + tau * kblock[i];
      if (l + 1 < L) v -= x.lam[(l + 1) * M + i];
      out.lam[l * M + i] = v;
    }
  }
  // only the final adjoint equation couples back to the state:
  // -(I + tau K*) y_L
  block.assign(x.y.end() - static_cast<std::ptrdiff_t>(M), x.y.end());
  kblock = p.K.apply(block, /*adjoint=*/true);
  for (std::size_t i = 0; i < M; ++i) {
    out.lam[(L - 1) * M + i] -= block[i] + tau * kblock[i];
  }
  return out;
}

StackedState rescale_adjoint(const ControlProblem& p, StackedState x,
                             RescaleDirection dir) {
  if (p.objective != Objective::tracking) {
    throw std::invalid_argument("rescale_adjoint: defined for tracking only");
  }
  const bool want_rescaled = dir == RescaleDirection::to_rescaled;
  if (x.rescaled_adjoint == want_rescaled) {
    throw std::invalid_argument("rescale_adjoint: stack already in that form");
  }
  const double root = std::sqrt(p.gamma);
  const double factor = want_rescaled ? 1.0 / root : root;
  for (double& v : x.lam) v *= factor;
  x.rescaled_adjoint = want_rescaled;
  return x;
}

rvec reconstruct_control(const rvec& lam_stack, double gamma) {
  rvec u(lam_stack.size());
  for (std::size_t i = 0; i < lam_stack.size(); ++i) {
    u[i] = -lam_stack[i] / gamma;
  }
  return u;
}

}  // namespace paradiag::allatonce
