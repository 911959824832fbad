#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "paradiag/numkit.hpp"

/// Spatial operators K appearing in y' = -K y - lambda/gamma, together witih
/// the shifted and coupled 2x2-block solves the preconditioners are built on.
namespace paradiag::spatial {

using numkit::cvec;
using numkit::cxd;
using numkit::rvec;

/// A discretised spatial operator. Two storage variants:
///  - dense: an explicit real M x M matrix;
///  - spectral: a periodic constant-coefficient stencil on an m1 x m2 grid,
///    held as its symbol (eigenvalues under the 2D DFT basis).
class SpatialOperator {
 public:
  enum class Variant { dense, spectral };

  SpatialOperator() = default;  // empty; assign from a builder before use

  static SpatialOperator dense(std::size_t n, rvec matrix_row_major);
  static SpatialOperator spectral(std::size_t m1, std::size_t m2, cvec symbol);
  static SpatialOperator scalar(double sigma);  // 1x1 dense

  Variant variant() const { return variant_; }
  std::size_t size() const { return size_; }
  std::size_t grid_rows() const { return m1_; }
  std::size_t grid_cols() const { return m2_; }
  bool self_adjoint() const { return self_adjoint_; }

  const rvec& matrix() const;  // dense variant only
  const cvec& symbol() const;  // spectral variant only

  cvec apply(const cvec& v, bool adjoint = false) const;
  /// Real-input apply; the spectral path checks the imaginary residue stays
  /// below 1e-10 relative before truncating.
  rvec apply(const rvec& v, bool adjoint = false) const;

  /// Closed-form eigenvalues where the builder knows them (1D isolated
  /// Laplacian, self-adjoint stencils). Empty for arbitrary dense input.
  const std::optional<rvec>& eigenvalues() const { return eigenvalues_; }

  /// Dense M x M image of the operator, built column-by-column. Used by the
  /// reference assemblies; intended for small M.
  rvec materialize(bool adjoint = false) const;

 private:
  Variant variant_ = Variant::dense;
  std::size_t size_ = 0;
  std::size_t m1_ = 0, m2_ = 0;
  rvec matrix_;
  cvec symbol_;
  bool self_adjoint_ = false;
  std::optional<rvec> eigenvalues_;

  friend SpatialOperator build_laplacian_1d_isolated(std::size_t m);
  friend SpatialOperator build_laplacian_2d_periodic(std::size_t m);
  friend SpatialOperator build_advdiff_2d_periodic(std::size_t m, double d);
};

/// 1D Laplacian on [0,1] with isolated boundary: (1/dx^2) tridiag(-1,2,-1)
/// with unit corner diagonal entries, dx = 1/m. Positive semidefinite with
/// the constants in its nullspace; spectrum 2(1-cos(k pi/m))/dx^2.
SpatialOperator build_laplacian_1d_isolated(std::size_t m);

/// K = -Laplacian on the periodic unit square, m x m grid, 5-point stencil.
/// Symbol (4 - 2cos(2 pi p/m) - 2cos(2 pi q/m))/dx^2.
SpatialOperator build_laplacian_2d_periodic(std::size_t m);

/// K for the advection-diffusion equation dy/dt = d*Lap y - y_x1 - y_x2 + u
/// with central differences; symbol d*(lap) + i(sin(2 pi p/m)+sin(2 pi q/m))/dx.
SpatialOperator build_advdiff_2d_periodic(std::size_t m, double d);

struct ShiftedSolveRequest {
  cxd shift;          // zeta
  double tau;         // > 0
  bool adjoint = false;
};

/// Solver for (zeta I + tau K) x = v (or the adjoint version). The dense
/// variant factors once at construction; the spectral variant divides by the
/// shifted symbol. Throws std::runtime_error when the shifted operator is
/// singular.
class ShiftedSolver {
 public:
  ShiftedSolver(const SpatialOperator& op, const ShiftedSolveRequest& req);
  cvec solve(const cvec& rhs) const;

 private:
  const SpatialOperator* op_;
  ShiftedSolveRequest req_;
  std::optional<numkit::LuFactors> lu_;  // dense variant
};

cvec shifted_solve(const SpatialOperator& op, const ShiftedSolveRequest& req,
                   const cvec& v);

/// Solver for the coupled 2M x 2M system
///   [ zeta I + tau K        g I          ] [x]   [r]
///   [   -g I        conj(zeta) I + tau K*] [z] = [s]
/// with real coupling g. The spectral variant reduces to an independent 2x2
/// complex solve per Fourier mode; the dense variant factors the assembled
/// block matrix once.
class CoupledBlockSolver {
 public:
  CoupledBlockSolver(const SpatialOperator& op, cxd shift, double tau, double g);
  std::pair<cvec, cvec> solve(const cvec& r, const cvec& s) const;

 private:
  const SpatialOperator* op_;
  cxd shift_;
  double tau_;
  double g_;
  std::optional<numkit::LuFactors> lu_;  // dense variant
};

std::pair<cvec, cvec> coupled_block_solve(const SpatialOperator& op, cxd shift,
                                          double tau, double g, const cvec& r,
                                          const cvec& s);

/// 2D DFT helpers over a row-major m1 x m2 field (unnormalised forward,
/// 1/(m1 m2) inverse), exposed for the spectral-operator tests.
cvec dft2(const cvec& field, std::size_t m1, std::size_t m2,
          numkit::DftDirection dir);

}  // namespace paradiag::spatial
