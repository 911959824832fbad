#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

/// Minimal dense linear algebra and Fourier kernels used by the rest of the
/// solver suite. Everything is complex<double>-based; callers that work in
/// real arithmetic convert at the boundary.
namespace paradiag::numkit {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;
using rvec = std::vector<double>;

// ---------------------------------------------------------------------------
// vectors

double norm2(const rvec& v);
double norm2(const cvec& v);

cvec to_complex(const rvec& v);
rvec real_part(const cvec& v);

/// Checks that the imaginary content of v is at most rel_tol * ||v|| and
/// truncates it. Throws std::runtime_error otherwise.
rvec to_real_checked(const cvec& v, double rel_tol);

// ---------------------------------------------------------------------------
// dense matrices

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cxd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const cvec& data() const { return data_; }

  double max_abs() const;
  cvec matvec(const cvec& x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  cvec data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
cxd trace(const DenseMatrix& a);

// ---------------------------------------------------------------------------
// LU with partial pivoting

class LuFactors {
 public:
  LuFactors(DenseMatrix lu, std::vector<int> piv, bool singular)
      : lu_(std::move(lu)), piv_(std::move(piv)), singular_(singular) {}

  std::size_t order() const { return lu_.rows(); }
  bool singular() const { return singular_; }
  const DenseMatrix& storage() const { return lu_; }
  const std::vector<int>& pivots() const { return piv_; }

 private:
  DenseMatrix lu_;
  std::vector<int> piv_;
  bool singular_ = false;
};

/// PA = LU with partial pivoting. The singular flag is raised when a pivot
/// falls below 1e-14 * maxabs(A). Throws std::invalid_argument for non-square
/// input.
LuFactors lu_factor(DenseMatrix a);

/// Back/forward substitution. Throws on singular factors or size mismatch.
cvec lu_solve(const LuFactors& f, const cvec& b);

// ---------------------------------------------------------------------------
// discrete Fourier transform

enum class DftDirection { forward, inverse };

/// Forward: X_j = sum_k v_k e^{-2 pi i jk/n} (unnormalised).
/// Inverse: x_k = (1/n) sum_j X_j e^{+2 pi i jk/n}.
/// Every length n >= 1 is supported. Power-of-two lengths use a radix-2
/// transform; other lengths below dft_direct_threshold use direct summation,
/// longer ones the Bluestein chirp transform.
cvec dft(const cvec& v, DftDirection dir);

inline constexpr std::size_t dft_direct_threshold = 256;

// ---------------------------------------------------------------------------
// eigenvalues of structurally rank-<=2 matrices

/// Returns the two potentially non-zero eigenvalues of a square matrix whose
/// rank is at most 2, from the power traces tr(M), tr(M^2) via Newton's
/// identities. tr(M^3) is compared against e1^3 + e2^3 as a consistency check;
/// a mismatch beyond 1e-8 (relative) throws std::runtime_error, which signals
/// rank > 2 or numerical breakdown.
std::pair<cxd, cxd> rank2_eigs_from_traces(const DenseMatrix& m);

}  // namespace paradiag::numkit
