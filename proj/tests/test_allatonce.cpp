#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "paradiag/allatonce.hpp"
#include "paradiag/dense.hpp"

using namespace paradiag::allatonce;
using paradiag::dense::DenseMatrix;
using paradiag::numkit::cvec;
using paradiag::numkit::cxd;
using paradiag::numkit::rvec;
using paradiag::spatial::SpatialOperator;

namespace {

std::mt19937 gen(11);

rvec random_rvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rvec v(n);
  for (double& x : v) x = u(gen);
  return v;
}

ControlProblem make_tracking(std::size_t L, std::size_t M, double gamma,
                             double T, bool laplacian = false) {
  SpatialOperator K = laplacian
                          ? paradiag::spatial::build_laplacian_1d_isolated(M)
                          : (M == 1 ? SpatialOperator::scalar(1.0)
                                    : SpatialOperator::dense(
                                          M, random_rvec(M * M)));
  std::vector<rvec> yd;
  for (std::size_t l = 0; l + 1 < L; ++l) yd.push_back(random_rvec(M));
  return ControlProblem::tracking(std::move(K), gamma, T, L, random_rvec(M),
                                  std::move(yd));
}

ControlProblem make_terminal(std::size_t L, std::size_t M, double gamma,
                             double T) {
  SpatialOperator K = M == 1 ? SpatialOperator::scalar(1.0)
                             : paradiag::spatial::build_laplacian_1d_isolated(M);
  return ControlProblem::terminal(std::move(K), gamma, T, L, random_rvec(M),
                                  random_rvec(M));
}

}  // namespace

TEST_CASE("tracking rhs: zero data and hand-computed case") {
  // y_d = 0 -> b2_hat = 0; y_init = 0 -> b1 = 0
  {
    ControlProblem p = ControlProblem::tracking(
        SpatialOperator::scalar(1.0), 4.0, 1.5, 3, {0.0},
        {rvec{0.0}, rvec{0.0}});
    auto [b1, b2] = assemble_tracking_rhs(p);
    for (double v : b1) CHECK(v == 0.0);
    for (double v : b2) CHECK(v == 0.0);
  }
  // L=3, M=1, tau=0.5, gamma=4, y_d = (1,1) -> b2_hat = (-0.25, -0.25)
  {
    ControlProblem p = ControlProblem::tracking(
        SpatialOperator::scalar(1.0), 4.0, 1.5, 3, {2.0},
        {rvec{1.0}, rvec{1.0}});
    auto [b1, b2] = assemble_tracking_rhs(p);
    CHECK(b1[0] == doctest::Approx(2.0));
    CHECK(b1[1] == doctest::Approx(0.0));
    CHECK(b2[0] == doctest::Approx(-0.25));
    CHECK(b2[1] == doctest::Approx(-0.25));
  }
}

TEST_CASE("terminal rhs: structure and hand-computed case") {
  // y_target = 0 -> adjoint half zero
  {
    ControlProblem p = ControlProblem::terminal(SpatialOperator::scalar(1.0),
                                                1.0, 1.0, 2, {1.0}, {0.0});
    const rvec b = assemble_terminal_rhs(p);
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(b[2] == 0.0);
    CHECK(b[3] == 0.0);
  }
  // M=1, K=1, tau=0.5, y_target=2 -> last entry -(1+0.5)*2 = -3
  {
    ControlProblem p = ControlProblem::terminal(SpatialOperator::scalar(1.0),
                                                1.0, 1.0, 2, {0.0}, {2.0});
    const rvec b = assemble_terminal_rhs(p);
    CHECK(b.back() == doctest::Approx(-3.0));
  }
  // K = 0: identity shift only
  {
    ControlProblem p = ControlProblem::terminal(SpatialOperator::scalar(0.0),
                                                1.0, 1.0, 2, {0.0}, {2.0});
    CHECK(assemble_terminal_rhs(p).back() == doctest::Approx(-2.0));
  }
}

TEST_CASE("tracking matvec: zero input and first basis column") {
  // L=3, M=1, K=1, tau=1, gamma=1
  const ControlProblem p = ControlProblem::tracking(
      SpatialOperator::scalar(1.0), 1.0, 3.0, 3, {0.0},
      {rvec{0.0}, rvec{0.0}});
  StackedState e1{{1.0, 0.0}, {0.0, 0.0}, true};
  const StackedState out = apply_tracking_operator(p, e1);
  CHECK(out.y[0] == doctest::Approx(2.0));   // 1 + tau*sigma
  CHECK(out.y[1] == doctest::Approx(-1.0));  // -y_1
  CHECK(out.lam[0] == doctest::Approx(-1.0));  // -g y_1
  CHECK(out.lam[1] == doctest::Approx(0.0));

  StackedState zero{{0.0, 0.0}, {0.0, 0.0}, true};
  const StackedState z = apply_tracking_operator(p, zero);
  for (double v : z.y) CHECK(v == 0.0);
  for (double v : z.lam) CHECK(v == 0.0);
}

TEST_CASE("matvec equals dense assembly on all basis vectors") {
  for (std::size_t L : {3, 5}) {
    for (std::size_t M : {std::size_t{1}, std::size_t{2}}) {
      // tracking (scalar / laplacian), rescaled system
      for (bool laplacian : {false, true}) {
        if (laplacian && M < 2) continue;
        const ControlProblem p = make_tracking(L, M, 0.8, 1.7, laplacian);
        const DenseMatrix a = paradiag::dense::tracking_system(p, true);
        const std::size_t dim = 2 * p.stack_len();
        for (std::size_t j = 0; j < dim; ++j) {
          rvec e(dim, 0.0);
          e[j] = 1.0;
          const rvec got = flatten(apply_tracking_operator(p, split(p, e, true)));
          const cvec ref = a.matvec(paradiag::numkit::to_complex(e));
          for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::abs(got[i] - ref[i].real()) < 1e-12);
          }
        }
      }
      // terminal
      const ControlProblem q = make_terminal(L, M, 0.8, 1.7);
      const DenseMatrix aq = paradiag::dense::terminal_system(q);
      const std::size_t dim = 2 * q.stack_len();
      for (std::size_t j = 0; j < dim; ++j) {
        rvec e(dim, 0.0);
        e[j] = 1.0;
        const rvec got = flatten(apply_terminal_operator(q, split(q, e, false)));
        const cvec ref = aq.matvec(paradiag::numkit::to_complex(e));
        for (std::size_t i = 0; i < dim; ++i) {
          CHECK(std::abs(got[i] - ref[i].real()) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("terminal matvec: only the last adjoint row sees the state") {
  const std::size_t L = 4, M = 2;
  const ControlProblem p = make_terminal(L, M, 1.0, 2.0);
  StackedState x;
  x.y = random_rvec(L * M);
  x.lam.assign(L * M, 0.0);
  const StackedState out = apply_terminal_operator(p, x);
  // adjoint rows 0..L-2 decouple from y entirely
  for (std::size_t l = 0; l + 1 < L; ++l) {
    for (std::size_t i = 0; i < M; ++i) {
      CHECK(std::abs(out.lam[l * M + i]) < 1e-14);
    }
  }
  // last row: -(I + tau K*) y_L
  rvec ylast(x.y.end() - 2, x.y.end());
  const rvec ky = p.K.apply(ylast, true);
  for (std::size_t i = 0; i < M; ++i) {
    CHECK(out.lam[(L - 1) * M + i] ==
          doctest::Approx(-(ylast[i] + p.tau() * ky[i])));
  }
}

TEST_CASE("rescaling: round trip, scalar case, and errors") {
  const ControlProblem p = make_tracking(3, 2, 4.0, 1.0);
  StackedState x;
  x.y = random_rvec(4);
  x.lam = {1.0, 2.0, -1.0, 0.5};
  x.rescaled_adjoint = true;

  // gamma = 4: lambda = 2 * lambda_hat
  const StackedState phys =
      rescale_adjoint(p, x, RescaleDirection::to_physical);
  CHECK(phys.lam[0] == doctest::Approx(2.0));
  CHECK(phys.lam[1] == doctest::Approx(4.0));
  CHECK_FALSE(phys.rescaled_adjoint);

  const StackedState back =
      rescale_adjoint(p, phys, RescaleDirection::to_rescaled);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.lam[i] == doctest::Approx(x.lam[i]));
  }

  CHECK_THROWS_AS(rescale_adjoint(p, back, RescaleDirection::to_rescaled),
                  std::invalid_argument);
  const ControlProblem t = make_terminal(3, 2, 4.0, 1.0);
  CHECK_THROWS_AS(rescale_adjoint(t, back, RescaleDirection::to_physical),
                  std::invalid_argument);
}

TEST_CASE("control reconstruction") {
  CHECK(reconstruct_control({0.0, 0.0}, 1.0) == rvec{0.0, 0.0});
  const rvec u = reconstruct_control({1.0, -2.0}, 0.5);
  CHECK(u[0] == doctest::Approx(-2.0));
  CHECK(u[1] == doctest::Approx(4.0));
  const rvec v = reconstruct_control({3.0}, 1.0);
  CHECK(v[0] == doctest::Approx(-3.0));
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(ControlProblem::tracking(SpatialOperator::scalar(1.0), 0.0,
                                           1.0, 3, {0.0}, {rvec{0}, rvec{0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ControlProblem::tracking(SpatialOperator::scalar(1.0), 1.0,
                                           1.0, 3, {0.0}, {rvec{0}}),
                  std::invalid_argument);  // wrong y_d count
  CHECK_THROWS_AS(ControlProblem::terminal(SpatialOperator::scalar(1.0), 1.0,
                                           -1.0, 3, {0.0}, {0.0}),
                  std::invalid_argument);
}
