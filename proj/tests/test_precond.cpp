#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "paradiag/dense.hpp"
#include "paradiag/precond.hpp"

using namespace paradiag::precond;
using paradiag::allatonce::ControlProblem;
using paradiag::allatonce::Objective;
using paradiag::numkit::cvec;
using paradiag::numkit::cxd;
using paradiag::numkit::rvec;
using paradiag::spatial::SpatialOperator;

namespace {

std::mt19937 gen(23);

rvec random_rvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rvec v(n);
  for (double& x : v) x = u(gen);
  return v;
}

ControlProblem make_problem(Objective obj, SpatialOperator K, double gamma,
                            double T, std::size_t L) {
  const std::size_t M = K.size();
  if (obj == Objective::tracking) {
    std::vector<rvec> yd;
    for (std::size_t l = 0; l + 1 < L; ++l) yd.push_back(random_rvec(M));
    return ControlProblem::tracking(std::move(K), gamma, T, L, random_rvec(M),
                                    std::move(yd));
  }
  return ControlProblem::terminal(std::move(K), gamma, T, L, random_rvec(M),
                                  random_rvec(M));
}

double rel_dist(const rvec& a, const cvec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(cxd(a[i], 0.0) - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// reference apply of the dense-assembled preconditioner inverse
cvec dense_pinv(const paradiag::numkit::LuFactors& lu, const rvec& v,
                const rvec& w) {
  cvec rhs = paradiag::numkit::to_complex(v);
  const cvec wc = paradiag::numkit::to_complex(w);
  rhs.insert(rhs.end(), wc.begin(), wc.end());
  return paradiag::numkit::lu_solve(lu, rhs);
}

}  // namespace

TEST_CASE("alpha-circulant spec: eigenvalues for alpha = +-1, n = 2") {
  const AlphaCirculantSpec plus = alpha_circulant_spec(cxd(1, 0), 2);
  CHECK(std::abs(plus.eigs[0]) < 1e-14);  // C(1) is singular (row sums 0)
  CHECK(std::abs(plus.eigs[1] - cxd(2, 0)) < 1e-14);

  const AlphaCirculantSpec minus = alpha_circulant_spec(cxd(-1, 0), 2);
  // principal branch: (-1)^{1/2} = i
  CHECK(std::abs(minus.weights[1] - cxd(0, 1)) < 1e-14);
  CHECK(std::abs(minus.eigs[0] - cxd(1, -1)) < 1e-14);
  CHECK(std::abs(minus.eigs[1] - cxd(1, 1)) < 1e-14);

  for (std::size_t n : {3, 5, 8}) {
    CHECK(std::abs(alpha_circulant_spec(cxd(1, 0), n).eigs[0]) < 1e-13);
  }
  // n = 1: the single entry of C(alpha) is 1 - alpha
  const AlphaCirculantSpec tiny = alpha_circulant_spec(cxd(-1, 0), 1);
  CHECK(std::abs(tiny.eigs[0] - cxd(2, 0)) < 1e-14);
  CHECK_THROWS_AS(alpha_circulant_spec(cxd(0, 0), 4), std::invalid_argument);
}

TEST_CASE("alpha-circulant spec: unit-modulus weights satisfy inv = conj") {
  for (double arg : {0.0, 1.0, 2.5, 3.14159}) {
    const cxd alpha(std::cos(arg), std::sin(arg));
    const AlphaCirculantSpec spec = alpha_circulant_spec(alpha, 7);
    for (const cxd& w : spec.weights) {
      CHECK(std::abs(1.0 / w - std::conj(w)) < 1e-14);
    }
  }
}

TEST_CASE("tracking preconditioner: zero maps to zero, |alpha| = 1 enforced") {
  const ControlProblem p =
      make_problem(Objective::tracking, SpatialOperator::scalar(1.0), 1.0, 3.0, 3);
  const TrackingPreconditioner P(p, cxd(-1, 0));
  auto [x, z] = P.apply(rvec(2, 0.0), rvec(2, 0.0));
  for (double v : x) CHECK(v == 0.0);
  for (double v : z) CHECK(v == 0.0);
  CHECK_THROWS_AS(TrackingPreconditioner(p, cxd(0.5, 0)), std::invalid_argument);
}

TEST_CASE("tracking preconditioner: worked 4x4 case matches dense LU") {
  // L=3, M=1, K=sigma=1, tau=1, gamma=1, alpha=-1
  const ControlProblem p =
      make_problem(Objective::tracking, SpatialOperator::scalar(1.0), 1.0, 3.0, 3);
  const TrackingPreconditioner P(p, cxd(-1, 0));
  const auto lu = paradiag::numkit::lu_factor(paradiag::dense::tracking_precond(p, -1.0));
  for (int trial = 0; trial < 10; ++trial) {
    const rvec v = random_rvec(2), w = random_rvec(2);
    auto [x, z] = P.apply(v, w);
    const cvec ref = dense_pinv(lu, v, w);
    rvec got = x;
    got.insert(got.end(), z.begin(), z.end());
    CHECK(rel_dist(got, ref) < 1e-10);
  }
}

TEST_CASE("tracking preconditioner: round trip through the dense assembly") {
  const ControlProblem p =
      make_problem(Objective::tracking, SpatialOperator::scalar(1.0), 1.0, 3.0, 3);
  for (double alpha : {1.0, -1.0}) {
    const paradiag::numkit::DenseMatrix pd = paradiag::dense::tracking_precond(p, alpha);
    const TrackingPreconditioner P(p, cxd(alpha, 0));
    // P_dense * r fed through the FFT inverse recovers r
    const rvec r = random_rvec(4);
    const cvec pr = pd.matvec(paradiag::numkit::to_complex(r));
    rvec v(2), w(2);
    for (std::size_t i = 0; i < 2; ++i) {
      v[i] = pr[i].real();
      w[i] = pr[2 + i].real();
    }
    auto [x, z] = P.apply(v, w);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(x[i] - r[i]) < 1e-9);
      CHECK(std::abs(z[i] - r[2 + i]) < 1e-9);
    }
    // and the other way: P_dense * (P^{-1} s) recovers s
    const rvec s = random_rvec(4);
    auto [xi, zi] = P.apply(rvec(s.begin(), s.begin() + 2),
                            rvec(s.begin() + 2, s.end()));
    rvec inv = xi;
    inv.insert(inv.end(), zi.begin(), zi.end());
    const cvec back = pd.matvec(paradiag::numkit::to_complex(inv));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(back[i].real() - s[i]) < 1e-9);
    }
  }
}

TEST_CASE("tracking preconditioner: dense equivalence across sizes and operators") {
  for (std::size_t L : {3, 5}) {
    for (std::size_t M : {std::size_t{1}, std::size_t{2}}) {
      for (double alpha : {1.0, -1.0}) {
        SpatialOperator K =
            M == 1 ? SpatialOperator::scalar(1.0)
                   : paradiag::spatial::build_laplacian_1d_isolated(M);
        const ControlProblem p =
            make_problem(Objective::tracking, std::move(K), 0.5, 1.0, L);
        const TrackingPreconditioner P(p, cxd(alpha, 0));
        const auto lu = paradiag::numkit::lu_factor(
            paradiag::dense::tracking_precond(p, alpha));
        const std::size_t n = p.stack_len();
        for (int trial = 0; trial < 10; ++trial) {
          const rvec v = random_rvec(n), w = random_rvec(n);
          auto [x, z] = P.apply(v, w);
          const cvec ref = dense_pinv(lu, v, w);
          rvec got = x;
          got.insert(got.end(), z.begin(), z.end());
          CHECK(rel_dist(got, ref) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("tracking preconditioner: spectral operator path") {
  SpatialOperator K = paradiag::spatial::build_advdiff_2d_periodic(2, 0.3);
  const ControlProblem p =
      make_problem(Objective::tracking, std::move(K), 0.7, 1.0, 4);
  const TrackingPreconditioner P(p, cxd(-1, 0));
  const auto lu =
      paradiag::numkit::lu_factor(paradiag::dense::tracking_precond(p, -1.0));
  const std::size_t n = p.stack_len();
  for (int trial = 0; trial < 5; ++trial) {
    const rvec v = random_rvec(n), w = random_rvec(n);
    auto [x, z] = P.apply(v, w);
    const cvec ref = dense_pinv(lu, v, w);
    rvec got = x;
    got.insert(got.end(), z.begin(), z.end());
    CHECK(rel_dist(got, ref) < 1e-9);
  }
}

TEST_CASE("terminal preconditioner: triangular structure and worked case") {
  // w = 0 -> z = 0 and phase 2 reduces to a pure state solve
  {
    const ControlProblem p = make_problem(
        Objective::terminal, SpatialOperator::scalar(1.0), 1.0, 1.0, 2);
    const TerminalPreconditioner P(p, cxd(1e-4, 0));
    auto [x, z] = P.apply(random_rvec(2), rvec(2, 0.0));
    for (double val : z) CHECK(std::abs(val) < 1e-14);

    auto [x0, z0] = P.apply(rvec(2, 0.0), rvec(2, 0.0));
    for (double val : x0) CHECK(val == 0.0);
    for (double val : z0) CHECK(val == 0.0);
  }
  // L=2, M=1, K=sigma=1, tau=0.5, gamma=1, alpha=1e-4 vs dense 4x4
  {
    const ControlProblem p = make_problem(
        Objective::terminal, SpatialOperator::scalar(1.0), 1.0, 1.0, 2);
    const TerminalPreconditioner P(p, cxd(1e-4, 0));
    const auto lu = paradiag::numkit::lu_factor(
        paradiag::dense::terminal_precond(p, 1e-4));
    for (int trial = 0; trial < 10; ++trial) {
      const rvec v = random_rvec(2), w = random_rvec(2);
      auto [x, z] = P.apply(v, w);
      const cvec ref = dense_pinv(lu, v, w);
      rvec got = x;
      got.insert(got.end(), z.begin(), z.end());
      CHECK(rel_dist(got, ref) < 1e-10);
    }
  }
}

TEST_CASE("terminal preconditioner: dense equivalence across sizes") {
  for (std::size_t L : {3, 5}) {
    for (std::size_t M : {std::size_t{1}, std::size_t{2}}) {
      for (double alpha : {1e-4, 0.3}) {
        SpatialOperator K =
            M == 1 ? SpatialOperator::scalar(1.0)
                   : paradiag::spatial::build_laplacian_1d_isolated(M);
        const ControlProblem p =
            make_problem(Objective::terminal, std::move(K), 0.5, 1.0, L);
        const TerminalPreconditioner P(p, cxd(alpha, 0));
        const auto lu = paradiag::numkit::lu_factor(
            paradiag::dense::terminal_precond(p, alpha));
        const std::size_t n = p.stack_len();
        for (int trial = 0; trial < 10; ++trial) {
          const rvec v = random_rvec(n), w = random_rvec(n);
          auto [x, z] = P.apply(v, w);
          const cvec ref = dense_pinv(lu, v, w);
          rvec got = x;
          got.insert(got.end(), z.begin(), z.end());
          CHECK(rel_dist(got, ref) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("terminal preconditioner: spectral path and alpha=1 zero-mode clash") {
  SpatialOperator K = paradiag::spatial::build_laplacian_2d_periodic(2);
  {
    SpatialOperator K2 = K;
    const ControlProblem p =
        make_problem(Objective::terminal, std::move(K2), 0.7, 1.0, 4);
    const TerminalPreconditioner P(p, cxd(1e-4, 0));
    const auto lu = paradiag::numkit::lu_factor(
        paradiag::dense::terminal_precond(p, 1e-4));
    const std::size_t n = p.stack_len();
    const rvec v = random_rvec(n), w = random_rvec(n);
    auto [x, z] = P.apply(v, w);
    const cvec ref = dense_pinv(lu, v, w);
    rvec got = x;
    got.insert(got.end(), z.begin(), z.end());
    CHECK(rel_dist(got, ref) < 1e-9);
  }
  // alpha = 1: d_0 = 0 collides with the Laplacian's zero mode
  {
    const ControlProblem p =
        make_problem(Objective::terminal, std::move(K), 0.7, 1.0, 4);
    CHECK_THROWS_AS(TerminalPreconditioner(p, cxd(1.0, 0)), std::runtime_error);
  }
}

TEST_CASE("one-shot wrappers agree with the class interface") {
  SpatialOperator K = paradiag::spatial::build_laplacian_1d_isolated(4);
  const ControlProblem p =
      make_problem(Objective::tracking, std::move(K), 2.0, 1.0, 6);
  const std::size_t n = p.stack_len();
  const rvec v = random_rvec(n), w = random_rvec(n);
  const TrackingPreconditioner P(p, cxd(-1, 0));
  auto [x1, z1] = P.apply(v, w);
  auto [x2, z2] = apply_tracking_precond(p, cxd(-1, 0), v, w);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-14));
    CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-14));
  }
}
