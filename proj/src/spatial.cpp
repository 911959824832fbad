#include "paradiag/spatial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paradiag::spatial {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRealnessTol = 1e-10;
constexpr double kSingularTol = 1e-14;

bool matrix_is_symmetric(const rvec& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a[i * n + j] - a[j * n + i]) > 1e-12) return false;
  return true;
}

bool symbol_is_real(const cvec& s) {
  for (const cxd& x : s)
    if (std::abs(x.imag()) > 1e-12) return false;
  return true;
}

}  // namespace

cvec dft2(const cvec& field, std::size_t m1, std::size_t m2,
          numkit::DftDirection dir) {
  if (field.size() != m1 * m2) throw std::invalid_argument("dft2: size mismatch");
  cvec out = field;
  // rows
  cvec tmp(m2);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) tmp[j] = out[i * m2 + j];
    cvec t = numkit::dft(tmp, dir);
    for (std::size_t j = 0; j < m2; ++j) out[i * m2 + j] = t[j];
  }
  // columns
  cvec col(m1);
  for (std::size_t j = 0; j < m2; ++j) {
    for (std::size_t i = 0; i < m1; ++i) col[i] = out[i * m2 + j];
    cvec t = numkit::dft(col, dir);
    for (std::size_t i = 0; i < m1; ++i) out[i * m2 + j] = t[i];
  }
  return out;
}

SpatialOperator SpatialOperator::dense(std::size_t n, rvec matrix_row_major) {
  if (matrix_row_major.size() != n * n) {
    throw std::invalid_argument("SpatialOperator::dense: size mismatch");
  }
  SpatialOperator op;
  op.variant_ = Variant::dense;
  op.size_ = n;
  op.matrix_ = std::move(matrix_row_major);
  op.self_adjoint_ = matrix_is_symmetric(op.matrix_, n);
  return op;
}

SpatialOperator SpatialOperator::spectral(std::size_t m1, std::size_t m2,
                                          cvec symbol) {
  if (symbol.size() != m1 * m2) {
    throw std::invalid_argument("SpatialOperator::spectral: size mismatch");
  }
  SpatialOperator op;
  op.variant_ = Variant::spectral;
  op.size_ = m1 * m2;
  op.m1_ = m1;
  op.m2_ = m2;
  op.symbol_ = std::move(symbol);
  op.self_adjoint_ = symbol_is_real(op.symbol_);
  if (op.self_adjoint_) {
    rvec eigs(op.size_);
    for (std::size_t i = 0; i < op.size_; ++i) eigs[i] = op.symbol_[i].real();
    op.eigenvalues_ = std::move(eigs);
  }
  return op;
}

SpatialOperator SpatialOperator::scalar(double sigma) {
  SpatialOperator op = dense(1, {sigma});
  op.eigenvalues_ = rvec{sigma};
  return op;
}

const rvec& SpatialOperator::matrix() const {
  if (variant_ != Variant::dense) {
    throw std::logic_error("SpatialOperator::matrix: not a dense operator");
  }
  return matrix_;
}

const cvec& SpatialOperator::symbol() const {
  if (variant_ != Variant::spectral) {
    throw std::logic_error("SpatialOperator::symbol: not a spectral operator");
  }
  return symbol_;
}

cvec SpatialOperator::apply(const cvec& v, bool adjoint) const {
  if (v.size() != size_) throw std::invalid_argument("apply: size mismatch");
  if (variant_ == Variant::dense) {
    cvec out(size_, cxd(0.0, 0.0));
    for (std::size_t i = 0; i < size_; ++i) {
      cxd acc(0.0, 0.0);
      for (std::size_t j = 0; j < size_; ++j) {
        const double kij = adjoint ? matrix_[j * size_ + i] : matrix_[i * size_ + j];
        acc += kij * v[j];
      }
      out[i] = acc;
    }
    return out;
  }
  cvec hat = dft2(v, m1_, m2_, numkit::DftDirection::forward);
  for (std::size_t i = 0; i < size_; ++i) {
    hat[i] *= adjoint ? std::conj(symbol_[i]) : symbol_[i];
  }
  return dft2(hat, m1_, m2_, numkit::DftDirection::inverse);
}

rvec SpatialOperator::apply(const rvec& v, bool adjoint) const {
  if (variant_ == Variant::dense) {
    if (v.size() != size_) throw std::invalid_argument("apply: size mismatch");
    rvec out(size_, 0.0);
    for (std::size_t i = 0; i < size_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < size_; ++j) {
        acc += (adjoint ? matrix_[j * size_ + i] : matrix_[i * size_ + j]) * v[j];
      }
      out[i] = acc;
    }
    return out;
  }
  return numkit::to_real_checked(apply(numkit::to_complex(v), adjoint),
                                 kRealnessTol);
}

rvec SpatialOperator::materialize(bool adjoint) const {
  if (variant_ == Variant::dense) {
    if (!adjoint) return matrix_;
    rvec t(size_ * size_);
    for (std::size_t i = 0; i < size_; ++i)
      for (std::size_t j = 0; j < size_; ++j) t[i * size_ + j] = matrix_[j * size_ + i];
    return t;
  }
  rvec full(size_ * size_);
  rvec e(size_, 0.0);
  for (std::size_t j = 0; j < size_; ++j) {
    e[j] = 1.0;
    rvec col = apply(e, adjoint);
    for (std::size_t i = 0; i < size_; ++i) full[i * size_ + j] = col[i];
    e[j] = 0.0;
  }
  return full;
}

SpatialOperator build_laplacian_1d_isolated(std::size_t m) {
  if (m < 2) throw std::invalid_argument("build_laplacian_1d_isolated: m < 2");
  const double s = static_cast<double>(m) * static_cast<double>(m);  // 1/dx^2
  rvec a(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    a[i * m + i] = (i == 0 || i == m - 1) ? s : 2.0 * s;
    if (i > 0) a[i * m + i - 1] = -s;
    if (i + 1 < m) a[i * m + i + 1] = -s;
  }
  SpatialOperator op = SpatialOperator::dense(m, std::move(a));
  rvec eigs(m);
  for (std::size_t k = 0; k < m; ++k) {
    eigs[k] = 2.0 * (1.0 - std::cos(static_cast<double>(k) * kPi /
                                    static_cast<double>(m))) * s;
  }
  op.eigenvalues_ = std::move(eigs);
  return op;
}

SpatialOperator build_laplacian_2d_periodic(std::size_t m) {
  if (m < 2) throw std::invalid_argument("build_laplacian_2d_periodic: m < 2");
  const double s = static_cast<double>(m) * static_cast<double>(m);
  cvec symbol(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    const double cp = std::cos(2.0 * kPi * static_cast<double>(p) /
                               static_cast<double>(m));
    for (std::size_t q = 0; q < m; ++q) {
      const double cq = std::cos(2.0 * kPi * static_cast<double>(q) /
                                 static_cast<double>(m));
      symbol[p * m + q] = cxd((4.0 - 2.0 * cp - 2.0 * cq) * s, 0.0);
    }
  }
  return SpatialOperator::spectral(m, m, std::move(symbol));
}

SpatialOperator build_advdiff_2d_periodic(std::size_t m, double d) {
  if (m < 2) throw std::invalid_argument("build_advdiff_2d_periodic: m < 2");
  if (d <= 0.0) throw std::invalid_argument("build_advdiff_2d_periodic: d <= 0");
  const double s2 = static_cast<double>(m) * static_cast<double>(m);
  const double s1 = static_cast<double>(m);
  cvec symbol(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    const double ap = 2.0 * kPi * static_cast<double>(p) / static_cast<double>(m);
    for (std::size_t q = 0; q < m; ++q) {
      const double aq = 2.0 * kPi * static_cast<double>(q) / static_cast<double>(m);
      const double re = d * (4.0 - 2.0 * std::cos(ap) - 2.0 * std::cos(aq)) * s2;
      const double im = (std::sin(ap) + std::sin(aq)) * s1;
      symbol[p * m + q] = cxd(re, im);
    }
  }
  return SpatialOperator::spectral(m, m, std::move(symbol));
}

ShiftedSolver::ShiftedSolver(const SpatialOperator& op,
                             const ShiftedSolveRequest& req)
    : op_(&op), req_(req) {
  if (req.tau <= 0.0) throw std::invalid_argument("ShiftedSolver: tau <= 0");
  if (op.variant() == SpatialOperator::Variant::dense) {
    const std::size_t n = op.size();
    const rvec& k = op.matrix();
    numkit::DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double kij = req.adjoint ? k[j * n + i] : k[i * n + j];
        a(i, j) = req.tau * kij;
      }
      a(i, i) += req.shift;
    }
    lu_ = numkit::lu_factor(std::move(a));
    if (lu_->singular()) {
      throw std::runtime_error("ShiftedSolver: shifted operator is singular");
    }
  } else {
    for (const cxd& sym : op.symbol()) {
      const cxd s = req.adjoint ? std::conj(sym) : sym;
      if (std::abs(req.shift + req.tau * s) <= kSingularTol) {
        throw std::runtime_error("ShiftedSolver: shifted symbol has a zero mode");
      }
    }
  }
}

cvec ShiftedSolver::solve(const cvec& rhs) const {
  if (rhs.size() != op_->size()) {
    throw std::invalid_argument("ShiftedSolver::solve: size mismatch");
  }
  if (lu_) return numkit::lu_solve(*lu_, rhs);
  cvec hat = dft2(rhs, op_->grid_rows(), op_->grid_cols(),
                  numkit::DftDirection::forward);
  const cvec& sym = op_->symbol();
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const cxd s = req_.adjoint ? std::conj(sym[i]) : sym[i];
    hat[i] /= req_.shift + req_.tau * s;
  }
  return dft2(hat, op_->grid_rows(), op_->grid_cols(),
              numkit::DftDirection::inverse);
}

cvec shifted_solve(const SpatialOperator& op, const ShiftedSolveRequest& req,
                   const cvec& v) {
  return ShiftedSolver(op, req).solve(v);
}

CoupledBlockSolver::CoupledBlockSolver(const SpatialOperator& op, cxd shift,
                                       double tau, double g)
    : op_(&op), shift_(shift), tau_(tau), g_(g) {
  if (tau <= 0.0) throw std::invalid_argument("CoupledBlockSolver: tau <= 0");
  if (op.variant() == SpatialOperator::Variant::dense) {
    const std::size_t n = op.size();
    const rvec& k = op.matrix();
    numkit::DenseMatrix a(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = tau * k[i * n + j];
        a(n + i, n + j) = tau * k[j * n + i];  // K* = K^T for real K
      }
      a(i, i) += shift;
      a(n + i, n + i) += std::conj(shift);
      a(i, n + i) = cxd(g, 0.0);
      a(n + i, i) = cxd(-g, 0.0);
    }
    lu_ = numkit::lu_factor(std::move(a));
    if (lu_->singular()) {
      throw std::runtime_error("CoupledBlockSolver: block system is singular");
    }
  } else {
    for (const cxd& sym : op.symbol()) {
      const cxd d1 = shift + tau * sym;
      const cxd d2 = std::conj(shift) + tau * std::conj(sym);
      if (std::abs(d1 * d2 + g * g) <= kSingularTol) {
        throw std::runtime_error("CoupledBlockSolver: singular 2x2 mode block");
      }
    }
  }
}

std::pair<cvec, cvec> CoupledBlockSolver::solve(const cvec& r,
                                                const cvec& s) const {
  const std::size_t n = op_->size();
  if (r.size() != n || s.size() != n) {
    throw std::invalid_argument("CoupledBlockSolver::solve: size mismatch");
  }
  if (lu_) {
    cvec rhs(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = r[i];
      rhs[n + i] = s[i];
    }
    cvec sol = numkit::lu_solve(*lu_, rhs);
    return {cvec(sol.begin(), sol.begin() + n), cvec(sol.begin() + n, sol.end())};
  }
  const std::size_t m1 = op_->grid_rows(), m2 = op_->grid_cols();
  cvec rhat = dft2(r, m1, m2, numkit::DftDirection::forward);
  cvec shat = dft2(s, m1, m2, numkit::DftDirection::forward);
  const cvec& sym = op_->symbol();
  for (std::size_t i = 0; i < n; ++i) {
    // per-mode 2x2: [[d1, g], [-g, d2]]
    const cxd d1 = shift_ + tau_ * sym[i];
    const cxd d2 = std::conj(shift_) + tau_ * std::conj(sym[i]);
    const cxd det = d1 * d2 + g_ * g_;
    const cxd x = (d2 * rhat[i] - g_ * shat[i]) / det;
    const cxd z = (g_ * rhat[i] + d1 * shat[i]) / det;
    rhat[i] = x;
    shat[i] = z;
  }
  return {dft2(rhat, m1, m2, numkit::DftDirection::inverse),
          dft2(shat, m1, m2, numkit::DftDirection::inverse)};
}

std::pair<cvec, cvec> coupled_block_solve(const SpatialOperator& op, cxd shift,
                                          double tau, double g, const cvec& r,
                                          const cvec& s) {
  return CoupledBlockSolver(op, shift, tau, g).solve(r, s);
}

}  // namespace paradiag::spatial
