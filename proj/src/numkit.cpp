#include "paradiag/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paradiag::numkit {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 transform, exponent sign given by `sign`
// (-1 forward, +1 inverse-style), no normalisation.
void fft_pow2(cvec& a, double sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    const cxd wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cxd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cxd u = a[i + k];
        const cxd t = w * a[i + k + len / 2];
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
        w *= wl;
      }
    }
  }
}

// Direct O(n^2) summation. Twiddle angles are reduced modulo n before the
// trig call so they stay accurate for large j*k.
cvec dft_direct(const cvec& v, double sign) {
  const std::size_t n = v.size();
  cvec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cxd acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t r = (j * k) % n;
      const double ang = sign * 2.0 * kPi * static_cast<double>(r) /
                         static_cast<double>(n);
      acc += v[k] * cxd(std::cos(ang), std::sin(ang));
    }
    out[j] = acc;
  }
  return out;
}

// Bluestein chirp transform for arbitrary n: jk = (j^2 + k^2 - (j-k)^2)/2
// turns the transform into a circular convolution at a power-of-two length.
// The chirp table and the transformed convolution kernel depend only on
// (n, sign), so they are memoised per thread.
struct BluesteinPlan {
  std::size_t n = 0;
  double sign = 0.0;
  std::size_t m = 0;
  cvec chirp;   // e^{sign * pi i k^2 / n}, k^2 reduced mod 2n
  cvec kernel;  // FFT of the wrapped conjugate chirp
};

const BluesteinPlan& bluestein_plan(std::size_t n, double sign) {
  thread_local std::vector<BluesteinPlan> cache;
  for (const BluesteinPlan& p : cache) {
    if (p.n == n && p.sign == sign) return p;
  }
  BluesteinPlan p;
  p.n = n;
  p.sign = sign;
  p.m = next_pow2(2 * n - 1);
  p.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(r) /
                       static_cast<double>(n);
    p.chirp[k] = cxd(std::cos(ang), std::sin(ang));
  }
  p.kernel.assign(p.m, cxd(0.0, 0.0));
  p.kernel[0] = std::conj(p.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    p.kernel[k] = std::conj(p.chirp[k]);
    p.kernel[p.m - k] = p.kernel[k];
  }
  fft_pow2(p.kernel, -1.0);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.push_back(std::move(p));
  return cache.back();
}

cvec dft_bluestein(const cvec& v, double sign) {
  const std::size_t n = v.size();
  const BluesteinPlan& plan = bluestein_plan(n, sign);
  const std::size_t m = plan.m;

  cvec a(m, cxd(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = v[k] * plan.chirp[k];
  fft_pow2(a, -1.0);
  for (std::size_t k = 0; k < m; ++k) a[k] *= plan.kernel[k];
  fft_pow2(a, +1.0);

  cvec out(n);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) out[j] = a[j] * inv_m * plan.chirp[j];
  return out;
}

cvec dft_unnormalised(const cvec& v, double sign) {
  const std::size_t n = v.size();
  if (n == 1) return v;
  if (is_pow2(n)) {
    cvec a = v;
    fft_pow2(a, sign);
    return a;
  }
  if (n < dft_direct_threshold) return dft_direct(v, sign);
  return dft_bluestein(v, sign);
}

}  // namespace

double norm2(const rvec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm2(const cvec& v) {
  double s = 0.0;
  for (const cxd& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cvec to_complex(const rvec& v) {
  cvec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cxd(v[i], 0.0);
  return out;
}

rvec real_part(const cvec& v) {
  rvec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

rvec to_real_checked(const cvec& v, double rel_tol) {
  double im = 0.0, all = 0.0;
  for (const cxd& x : v) {
    im += x.imag() * x.imag();
    all += std::norm(x);
  }
  if (std::sqrt(im) > rel_tol * std::sqrt(all)) {
    throw std::runtime_error("to_real_checked: imaginary residue exceeds tolerance");
  }
  return real_part(v);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = cxd(1.0, 0.0);
  return m;
}

double DenseMatrix::max_abs() const {
  double mx = 0.0;
  for (const cxd& x : data_) mx = std::max(mx, std::abs(x));
  return mx;
}

cvec DenseMatrix::matvec(const cvec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("matvec: size mismatch");
  cvec out(rows_, cxd(0.0, 0.0));
  for (std::size_t i = 0; i < rows_; ++i) {
    cxd acc(0.0, 0.0);
    const cxd* row = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cxd aik = a(i, k);
      if (aik == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("subtract: size mismatch");
  }
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

cxd trace(const DenseMatrix& a) {
  cxd t(0.0, 0.0);
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

LuFactors lu_factor(DenseMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  const std::size_t n = a.rows();
  const double pivot_floor = 1e-14 * a.max_abs();
  std::vector<int> piv(n);
  bool singular = false;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(a(i, k));
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    piv[k] = static_cast<int>(p);
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    }
    if (best <= pivot_floor) {
      singular = true;
      continue;
    }
    const cxd inv_piv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cxd lik = a(i, k) * inv_piv;
      a(i, k) = lik;
      if (lik == cxd(0.0, 0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return LuFactors(std::move(a), std::move(piv), singular);
}

cvec lu_solve(const LuFactors& f, const cvec& b) {
  if (f.singular()) throw std::runtime_error("lu_solve: singular factors");
  const std::size_t n = f.order();
  if (b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");
  const DenseMatrix& lu = f.storage();
  cvec x = b;
  // apply the full pivot sequence first; later swaps permute L rows in
  // earlier columns, so interleaving them with the substitution is wrong
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = static_cast<std::size_t>(f.pivots()[k]);
    if (p != k) std::swap(x[k], x[p]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu(i, k) * x[k];
  }
  for (std::size_t i = n; i-- > 0;) {
    cxd acc = x[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu(i, j) * x[j];
    x[i] = acc / lu(i, i);
  }
  return x;
}

cvec dft(const cvec& v, DftDirection dir) {
  if (v.empty()) throw std::invalid_argument("dft: empty input");
  if (dir == DftDirection::forward) return dft_unnormalised(v, -1.0);
  cvec out = dft_unnormalised(v, +1.0);
  const double inv_n = 1.0 / static_cast<double>(v.size());
  for (cxd& x : out) x *= inv_n;
  return out;
}

std::pair<cxd, cxd> rank2_eigs_from_traces(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("rank2_eigs_from_traces: matrix not square");
  }
  const std::size_t n = m.rows();

  const cxd p1 = trace(m);
  const DenseMatrix m2 = matmul(m, m);
  const cxd p2 = trace(m2);
  cxd p3(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p3 += m2(i, j) * m(j, i);

  // e1 + e2 = p1, e1*e2 = (p1^2 - p2)/2; larger root first, smaller via the
  // product to dodge cancellation.
  const cxd prod = 0.5 * (p1 * p1 - p2);
  const cxd disc = std::sqrt(p1 * p1 - 4.0 * prod);
  cxd e1 = 0.5 * (p1 + disc);
  if (std::abs(p1 - disc) > std::abs(e1)) e1 = 0.5 * (p1 - disc);
  const cxd e2 = (std::abs(e1) > 0.0) ? prod / e1 : cxd(0.0, 0.0);

  const cxd p3_check = e1 * e1 * e1 + e2 * e2 * e2;
  const double scale =
      std::max({1.0, std::abs(p3), std::pow(std::abs(e1), 3.0)});
  if (std::abs(p3_check - p3) > 1e-8 * scale) {
    throw std::runtime_error(
        "rank2_eigs_from_traces: trace consistency check failed (rank > 2?)");
  }
  return {e1, e2};
}

}  // namespace paradiag::numkit
