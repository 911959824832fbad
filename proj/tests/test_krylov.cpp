#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "paradiag/krylov.hpp"
#include "paradiag/numkit.hpp"

using namespace paradiag::krylov;
using paradiag::numkit::cvec;
using paradiag::numkit::cxd;
using paradiag::numkit::DenseMatrix;
using paradiag::numkit::rvec;

namespace {

std::mt19937 gen(31);

rvec random_rvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rvec v(n);
  for (double& x : v) x = u(gen);
  return v;
}

DenseMatrix random_spd_shifted(std::size_t n, double shift) {
  DenseMatrix a(n, n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = cxd(u(gen), 0.0);
    a(i, i) += shift;
  }
  return a;
}

std::function<rvec(const rvec&)> real_op(const DenseMatrix& a) {
  return [&a](const rvec& x) {
    return paradiag::numkit::real_part(a.matvec(paradiag::numkit::to_complex(x)));
  };
}

const std::function<rvec(const rvec&)> identity_op = [](const rvec& x) {
  return x;
};

}  // namespace

TEST_CASE("identity system converges in one iteration") {
  const rvec b = random_rvec(8);
  const auto out = gmres<double>(identity_op, identity_op, b);
  CHECK(out.converged);
  CHECK(out.iterations == 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(out.solution[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("exact preconditioner gives one iteration") {
  const std::size_t n = 12;
  const DenseMatrix a = random_spd_shifted(n, 5.0);
  const auto lu = paradiag::numkit::lu_factor(a);
  const auto pinv = [&lu](const rvec& x) {
    return paradiag::numkit::real_part(
        paradiag::numkit::lu_solve(lu, paradiag::numkit::to_complex(x)));
  };
  const rvec b = random_rvec(n);
  const auto out = gmres<double>(real_op(a), pinv, b);
  CHECK(out.converged);
  CHECK(out.iterations == 1);
}

TEST_CASE("hand Arnoldi: diag(1,2), b = (1,1)") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  GmresConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iter = 5;
  const auto out = gmres<double>(real_op(a), identity_op, {1.0, 1.0}, cfg);
  CHECK(out.converged);
  CHECK(out.iterations == 2);
  CHECK(out.solution[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.solution[1] == doctest::Approx(0.5).epsilon(1e-12));
  // residual after the first iteration is 1/sqrt(10)
  REQUIRE(out.residual_history.size() == 3);
  CHECK(out.residual_history[0] == doctest::Approx(1.0));
  CHECK(out.residual_history[1] ==
        doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("zero right-hand side") {
  const auto out = gmres<double>(identity_op, identity_op, rvec(5, 0.0));
  CHECK(out.converged);
  CHECK(out.iterations == 0);
  for (double v : out.solution) CHECK(v == 0.0);
}

TEST_CASE("exactness: full GMRES solves dense systems to machine accuracy") {
  for (std::size_t n : {8, 17, 32}) {
    const DenseMatrix a = random_spd_shifted(n, 4.0);
    const rvec b = random_rvec(n);
    GmresConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.max_iter = static_cast<int>(n);
    const auto out = gmres<double>(real_op(a), identity_op, b, cfg);
    const rvec ax = real_op(a)(out.solution);
    rvec resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = b[i] - ax[i];
    CHECK(paradiag::numkit::norm2(resid) <=
          1e-10 * paradiag::numkit::norm2(b));
  }
}

TEST_CASE("residual history is monotone and matches explicit computation") {
  const std::size_t n = 14;
  const DenseMatrix a = random_spd_shifted(n, 3.0);
  // nontrivial diagonal preconditioner
  rvec dinv(n);
  for (std::size_t i = 0; i < n; ++i) dinv[i] = 1.0 / a(i, i).real();
  const auto pinv = [&dinv](const rvec& x) {
    rvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = dinv[i] * x[i];
    return out;
  };
  const rvec b = random_rvec(n);

  GmresConfig full;
  full.rel_tol = 1e-14;
  full.max_iter = static_cast<int>(n);
  const auto ref = gmres<double>(real_op(a), pinv, b, full);
  for (std::size_t i = 1; i < ref.residual_history.size(); ++i) {
    CHECK(ref.residual_history[i] <= ref.residual_history[i - 1] + 1e-14);
  }

  // ||P^{-1}(b - A x_k)|| / ||P^{-1} b|| recomputed per truncated run
  const double pb = paradiag::numkit::norm2(pinv(b));
  for (int k = 1; k <= 6; ++k) {
    GmresConfig cfg;
    cfg.rel_tol = 1e-16;
    cfg.max_iter = k;
    const auto out = gmres<double>(real_op(a), pinv, b, cfg);
    const rvec ax = real_op(a)(out.solution);
    rvec resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = b[i] - ax[i];
    const double explicit_res = paradiag::numkit::norm2(pinv(resid)) / pb;
    CHECK(std::abs(out.residual_history.back() - explicit_res) < 1e-12);
  }
}

TEST_CASE("breakdown: rhs inside a small invariant subspace") {
  // A diagonal, b supported on two eigen-directions: exact solution after
  // two iterations, then a lucky breakdown
  const std::size_t n = 10;
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0 + static_cast<double>(i);
  rvec b(n, 0.0);
  b[2] = 1.0;
  b[7] = -2.0;
  GmresConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iter = 8;
  const auto out = gmres<double>(real_op(a), identity_op, b, cfg);
  CHECK(out.converged);
  CHECK(out.iterations <= 2);
}

TEST_CASE("NaN input aborts") {
  const auto nan_op = [](const rvec& x) {
    rvec out = x;
    out[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
  };
  CHECK_THROWS_AS(gmres<double>(nan_op, identity_op, random_rvec(4)),
                  std::runtime_error);
  CHECK_THROWS_AS(
      gmres<double>(identity_op, identity_op,
                    {std::numeric_limits<double>::quiet_NaN(), 0.0}),
      std::runtime_error);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(
      gmres<double>(identity_op, identity_op, rvec{1.0}, GmresConfig{0.0, 10}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      gmres<double>(identity_op, identity_op, rvec{1.0}, GmresConfig{1e-6, 0}),
      std::invalid_argument);
}

TEST_CASE("non-convergence is reported honestly") {
  const std::size_t n = 24;
  const DenseMatrix a = random_spd_shifted(n, 2.5);
  const rvec b = random_rvec(n);
  GmresConfig cfg;
  cfg.rel_tol = 1e-15;
  cfg.max_iter = 3;
  const auto out = gmres<double>(real_op(a), identity_op, b, cfg);
  CHECK_FALSE(out.converged);
  CHECK(out.iterations == 3);
  CHECK(out.residual_history.back() > cfg.rel_tol);
}

TEST_CASE("complex scalar instantiation") {
  const std::size_t n = 9;
  DenseMatrix a(n, n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = cxd(u(gen), u(gen));
    a(i, i) += cxd(6.0, 1.0);
  }
  const auto op = [&a](const cvec& x) { return a.matvec(x); };
  const auto ident = [](const cvec& x) { return x; };
  cvec b(n);
  for (cxd& x : b) x = cxd(u(gen), u(gen));
  GmresConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iter = static_cast<int>(n);
  const auto out = gmres<cxd>(op, ident, b, cfg);
  CHECK(out.converged);
  const cvec ax = a.matvec(out.solution);
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) resid += std::norm(b[i] - ax[i]);
  CHECK(std::sqrt(resid) < 1e-10 * paradiag::numkit::norm2(b));
}
