#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

/// Left-preconditioned full GMRES. The outer iteration runs in real or
/// complex arithmetic depending on the scalar type; the shipped solver setups
/// (alpha = +-1 tracking, real-alpha terminal) are real, so their complex
/// arithmetic stays inside the preconditioner callbacks.
namespace paradiag::krylov {

struct GmresConfig {
  double rel_tol = 1e-6;
  int max_iter = 25;
  // no restarts: full GMRES, so the residual history is nonincreasing
};

template <typename Scalar>
struct KrylovOutcome {
  std::vector<Scalar> solution;
  int iterations = 0;
  /// residual_history[k] = ||P^{-1}(b - A x_k)||_2 / ||P^{-1} b||_2; entry 0
  /// is the initial residual 1 (zero initial guess).
  std::vector<double> residual_history;
  bool converged = false;
};

namespace detail {

template <typename Scalar>
Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar acc{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      acc += a[i] * b[i];
    } else {
      acc += std::conj(a[i]) * b[i];
    }
  }
  return acc;
}

template <typename Scalar>
double norm2(const std::vector<Scalar>& a) {
  double acc = 0.0;
  for (const Scalar& x : a) {
    if constexpr (std::is_same_v<Scalar, double>) {
      acc += x * x;
    } else {
      acc += std::norm(x);
    }
  }
  return std::sqrt(acc);
}

template <typename Scalar>
bool all_finite(const std::vector<Scalar>& a) {
  for (const Scalar& x : a) {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (!std::isfinite(x)) return false;
    } else {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    }
  }
  return true;
}

template <typename Scalar>
Scalar conj_scalar(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return std::conj(x);
  }
}

}  // namespace detail

/// Runs Arnoldi (modified Gram-Schmidt + Givens rotations) on P^{-1} A with
/// zero initial guess, stopping on the relative preconditioned residual or
/// at max_iter. An Arnoldi breakdown ends the iteration and reports success
/// iff the tolerance was already met. Non-finite values abort with
/// std::runtime_error.
template <typename Scalar>
KrylovOutcome<Scalar> gmres(
    const std::function<std::vector<Scalar>(const std::vector<Scalar>&)>& apply_op,
    const std::function<std::vector<Scalar>(const std::vector<Scalar>&)>& apply_precond_inv,
    const std::vector<Scalar>& b, const GmresConfig& cfg = {}) {
  if (cfg.rel_tol <= 0.0) throw std::invalid_argument("gmres: rel_tol <= 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("gmres: max_iter < 1");
  if (!detail::all_finite(b)) throw std::runtime_error("gmres: non-finite rhs");

  const std::size_t n = b.size();
  KrylovOutcome<Scalar> out;
  out.solution.assign(n, Scalar{});

  std::vector<Scalar> g = apply_precond_inv(b);
  if (g.size() != n) throw std::invalid_argument("gmres: preconditioner size mismatch");
  const double beta = detail::norm2(g);
  if (beta == 0.0) {
    out.converged = true;
    out.residual_history = {0.0};
    return out;
  }
  out.residual_history = {1.0};

  const int m = cfg.max_iter;
  std::vector<std::vector<Scalar>> basis;
  basis.reserve(static_cast<std::size_t>(m) + 1);
  {
    std::vector<Scalar> v0 = g;
    for (Scalar& x : v0) x /= beta;
    basis.push_back(std::move(v0));
  }

  // Hessenberg columns after rotation, Givens pairs, rotated rhs
  std::vector<std::vector<Scalar>> hcols;
  std::vector<Scalar> cs(static_cast<std::size_t>(m));
  std::vector<Scalar> sn(static_cast<std::size_t>(m));
  std::vector<Scalar> rhs(static_cast<std::size_t>(m) + 1, Scalar{});
  rhs[0] = Scalar(beta);

  bool breakdown = false;
  int j = 0;
  for (; j < m; ++j) {
    std::vector<Scalar> w = apply_precond_inv(apply_op(basis[static_cast<std::size_t>(j)]));
    if (!detail::all_finite(w)) throw std::runtime_error("gmres: non-finite iterate");
    const double wnorm_in = detail::norm2(w);

    std::vector<Scalar> h(static_cast<std::size_t>(j) + 2, Scalar{});
    for (int i = 0; i <= j; ++i) {
      const Scalar hij = detail::dot(basis[static_cast<std::size_t>(i)], w);
      h[static_cast<std::size_t>(i)] = hij;
      const std::vector<Scalar>& vi = basis[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < n; ++k) w[k] -= hij * vi[k];
    }
    const double hlast = detail::norm2(w);
    h[static_cast<std::size_t>(j) + 1] = Scalar(hlast);
    breakdown = hlast <= 1e-14 * wnorm_in;
    if (!breakdown) {
      std::vector<Scalar> vnext = w;
      for (Scalar& x : vnext) x /= hlast;
      basis.push_back(std::move(vnext));
    }

    // previous rotations
    for (int i = 0; i < j; ++i) {
      const Scalar t = h[static_cast<std::size_t>(i)];
      h[static_cast<std::size_t>(i)] =
          cs[static_cast<std::size_t>(i)] * t +
          sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
      h[static_cast<std::size_t>(i) + 1] =
          -detail::conj_scalar(sn[static_cast<std::size_t>(i)]) * t +
          detail::conj_scalar(cs[static_cast<std::size_t>(i)]) *
              h[static_cast<std::size_t>(i) + 1];
    }
    // new rotation zeroing h[j+1]
    {
      const Scalar a = h[static_cast<std::size_t>(j)];
      const Scalar bb = h[static_cast<std::size_t>(j) + 1];
      const double r = std::hypot(std::abs(a), std::abs(bb));
      if (r == 0.0) {
        cs[static_cast<std::size_t>(j)] = Scalar(1);
        sn[static_cast<std::size_t>(j)] = Scalar(0);
      } else {
        cs[static_cast<std::size_t>(j)] = detail::conj_scalar(a) / r;
        sn[static_cast<std::size_t>(j)] = detail::conj_scalar(bb) / r;
      }
      h[static_cast<std::size_t>(j)] = Scalar(r);
      h[static_cast<std::size_t>(j) + 1] = Scalar(0);
      const Scalar t = rhs[static_cast<std::size_t>(j)];
      rhs[static_cast<std::size_t>(j)] = cs[static_cast<std::size_t>(j)] * t;
      rhs[static_cast<std::size_t>(j) + 1] =
          -detail::conj_scalar(sn[static_cast<std::size_t>(j)]) * t;
    }
    hcols.push_back(std::move(h));

    const double rel = std::abs(rhs[static_cast<std::size_t>(j) + 1]) / beta;
    out.residual_history.push_back(rel);
    out.iterations = j + 1;
    if (rel <= cfg.rel_tol) {
      out.converged = true;
      ++j;
      break;
    }
    if (breakdown) {
      ++j;
      break;
    }
  }

  // back substitution on the rotated Hessenberg system
  const int k = out.iterations;
  std::vector<Scalar> y(static_cast<std::size_t>(k), Scalar{});
  for (int i = k - 1; i >= 0; --i) {
    Scalar acc = rhs[static_cast<std::size_t>(i)];
    for (int l = i + 1; l < k; ++l) {
      acc -= hcols[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
             y[static_cast<std::size_t>(l)];
    }
    y[static_cast<std::size_t>(i)] =
        acc / hcols[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < k; ++i) {
    const std::vector<Scalar>& vi = basis[static_cast<std::size_t>(i)];
    const Scalar yi = y[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < n; ++l) out.solution[l] += yi * vi[l];
  }
  return out;
}

}  // namespace paradiag::krylov
