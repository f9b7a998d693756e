#include <doctest.h>

#include <Eigen/Cholesky>
#include <random>

#include "mbgk/errors.hpp"
#include "mbgk/gst.hpp"
#include "test_support.hpp"

using namespace mbgk;
using mbgk::testing::random_system;

namespace {

MomentState equal_mass_pair(double u0, double u1, double T0, double T1) {
  return MomentState(1, Eigen::Vector2d(1.0, 1.0),
                     (MatrixXd(2, 1) << u0, u1).finished(), Eigen::Vector2d(T0, T1));
}

const SpeciesSet kPair(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, 1.0));

}  // namespace

TEST_CASE("be_residual: single species identity is exact") {
  const SpeciesSet sp(VectorXd::Constant(1, 1.4), VectorXd::Constant(1, 1.0));
  const MomentState st(3, VectorXd::Constant(1, 0.7),
                       (MatrixXd(1, 3) << 0.2, -0.1, 0.4).finished(),
                       VectorXd::Constant(1, 1.1));
  CHECK(be_residual(sp, st, st, 0.5, 0.01).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("be_residual: global Maxwellian equilibrium") {
  std::mt19937 rng(11);
  const SpeciesSet sp = mbgk::testing::random_species(rng, 3);
  MatrixXd u(3, 2);
  u.col(0).setConstant(0.3);
  u.col(1).setConstant(-0.5);
  const MomentState st(2, Eigen::Vector3d(1.0, 0.5, 2.0), u,
                       VectorXd::Constant(3, 0.9));
  CHECK(be_residual(sp, st, st, 1.0, 1e-3).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("be_residual: mismatched densities violate the contract") {
  std::mt19937 rng(12);
  auto [sp, st] = random_system(rng, 2, 1);
  const MomentState other(1, st.n() * 2.0, st.u(), st.T());
  CHECK_THROWS_AS(be_residual(sp, other, st, 1.0, 1.0), Error);
}

TEST_CASE("velocity step: dt = 0 and N = 1 are identities") {
  std::mt19937 rng(13);
  {
    auto [sp, st] = random_system(rng, 3, 2);
    const PairwiseCoefficients c = interaction_matrices(sp, st);
    const MatrixXd u1 = gst_velocity_step(sp, st, c, 0.0, 1.0);
    CHECK((u1 - st.u()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  {
    auto [sp, st] = random_system(rng, 1, 3);
    const PairwiseCoefficients c = interaction_matrices(sp, st);
    const MatrixXd u1 = gst_velocity_step(sp, st, c, 123.0, 1e-6);
    CHECK((u1 - st.u()).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("velocity step: symmetric pair matches the closed-form 2x2 inverse") {
  const MomentState st = equal_mass_pair(1.0, -1.0, 1.0, 1.0);
  const PairwiseCoefficients c = interaction_matrices(kPair, st);
  for (const double ratio : {0.01, 1.0, 100.0, 1e6}) {
    const MatrixXd u1 = gst_velocity_step(kPair, st, c, ratio, 1.0);
    // (I + r Z) on span{(1,-1)} has eigenvalue 1 + 2 r A12 / rho.
    const double expect = 1.0 / (1.0 + 2.0 * ratio * c.A(0, 1));
    CHECK(u1(0, 0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(u1(1, 0) == doctest::Approx(-expect).epsilon(1e-12));
    CHECK(expect > 0.0);
    CHECK(expect < 1.0);
  }
}

TEST_CASE("temperature step: equilibrium is a fixed point") {
  std::mt19937 rng(14);
  const SpeciesSet sp = mbgk::testing::random_species(rng, 3);
  MatrixXd u(3, 1);
  u.setConstant(0.25);
  const MomentState st(1, Eigen::Vector3d(0.5, 1.0, 1.5), u, VectorXd::Constant(3, 0.8));
  const PairwiseCoefficients c = interaction_matrices(sp, st);
  const MatrixXd u1 = gst_velocity_step(sp, st, c, 2.0, 1e-2);
  const VectorXd T1 = gst_temperature_step(sp, st, c, u1, 2.0, 1e-2);
  CHECK((u1 - st.u()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((T1 - st.T()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("temperature step: kinetic energy converts to heat") {
  // Counter-streaming equal-mass pair: friction heats both species while the
  // total energy stays fixed.
  const MomentState st = equal_mass_pair(1.0, -1.0, 1.0, 1.0);
  const PairwiseCoefficients c = interaction_matrices(kPair, st);
  double min_src = 0.0;
  const MatrixXd u1 = gst_velocity_step(kPair, st, c, 1.0, 1.0);
  const VectorXd T1 = gst_temperature_step(kPair, st, c, u1, 1.0, 1.0, &min_src);
  const MomentState next(1, st.n(), u1, T1);
  CHECK(std::abs(next.total_energy(kPair) - st.total_energy(kPair)) <=
        1e-13 * st.total_energy(kPair));
  CHECK(T1(0) > 1.0);
  CHECK(T1(1) > 1.0);
  CHECK(min_src >= -1e-12);
}

TEST_CASE("solve_moments: equilibrium and single species converge immediately") {
  GstConfig cfg;
  {
    std::mt19937 rng(15);
    const SpeciesSet sp = mbgk::testing::random_species(rng, 3);
    MatrixXd u = MatrixXd::Zero(3, 3);
    u.col(1).setConstant(-0.4);
    const MomentState st(3, Eigen::Vector3d(1.0, 2.0, 0.3), u, VectorXd::Constant(3, 1.7));
    auto [next, report] = solve_moments(sp, st, 0.7, 1e-4, cfg);
    CHECK(report.converged);
    CHECK(report.iterations == 1);
    CHECK((next.u() - st.u()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((next.T() - st.T()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  {
    std::mt19937 rng(16);
    auto [sp, st] = random_system(rng, 1, 2);
    auto [next, report] = solve_moments(sp, st, 5.0, 1e-6, cfg);
    CHECK(report.converged);
    CHECK(report.iterations == 1);
    CHECK((next.u() - st.u()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("solve_moments: conservation, bounds, and fixed-point residual") {
  std::mt19937 rng(17);
  GstConfig cfg;
  for (int trial = 0; trial < 60; ++trial) {
    const int N = 2 + int(rng() % 3);
    const int dim = 1 + 2 * int(rng() % 2);
    auto [sp, st] = random_system(rng, N, dim);
    const double ratio = std::pow(10.0, -2.0 + 4.0 * (rng() % 5) / 4.0);
    const double eps = 0.1;
    const double dt = ratio * eps;

    auto [next, report] = solve_moments(sp, st, dt, eps, cfg);
    REQUIRE(report.converged);

    CHECK(report.momentum_drift <= 1e-12);
    CHECK(report.energy_drift <= 1e-12);
    CHECK(report.min_temperature_source >= -1e-12);

    // iterate bounds hold at the returned state too
    const double T_floor = st.T().minCoeff();
    CHECK(next.T().minCoeff() >= T_floor - 1e-12 * std::max(1.0, T_floor));
    for (int k = 0; k < dim; ++k) {
      CHECK(next.u().col(k).minCoeff() >= st.u().col(k).minCoeff() - 1e-12);
      CHECK(next.u().col(k).maxCoeff() <= st.u().col(k).maxCoeff() + 1e-12);
    }

    // the fixed point solves the backward-Euler system
    const VectorXd res = be_residual(sp, next, st, dt, eps);
    CHECK(res.cwiseAbs().maxCoeff() <= 10.0 * report.tol_used);

    // conserved equilibrium quantities are unchanged
    const VectorXd uinf_n = equilibrium_velocity(sp, st);
    const VectorXd uinf_1 = equilibrium_velocity(sp, next);
    CHECK((uinf_1 - uinf_n).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + uinf_n.norm()));
    const double Tinf_n = equilibrium_temperature(sp, st);
    const double Tinf_1 = equilibrium_temperature(sp, next);
    CHECK(std::abs(Tinf_1 - Tinf_n) <= 1e-12 * (1.0 + std::abs(Tinf_n)));
  }
}

TEST_CASE("alpha and beta are invariant across iterates") {
  std::mt19937 rng(18);
  GstConfig cfg;
  for (int trial = 0; trial < 25; ++trial) {
    const int N = 2 + int(rng() % 4);
    auto [sp, st] = random_system(rng, N, 1);
    auto [next, report] = solve_moments(sp, st, 0.4, 0.05, cfg);
    const PairwiseCoefficients c0 = mixture_moments(sp, st);
    const PairwiseCoefficients c1 = mixture_moments(sp, next);
    CHECK((c0.alpha - c1.alpha).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((c0.beta - c1.beta).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("inverse norm bound on the range space") {
  // || (I + (dt/eps) Zhat)^{-1} v || <= eps/(eps + dt zhat_min) ||v|| for
  // v orthogonal to Q^{1/2} 1.
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int N = 2 + int(rng() % 5);
    auto [sp, st] = random_system(rng, N, 1);
    const PairwiseCoefficients c = interaction_matrices(sp, st);
    const SpectralBounds sb = spectral_bounds(sp, st);
    const double dt = std::pow(10.0, unit(rng) * 3.0);
    const double eps = std::pow(10.0, unit(rng) * 3.0);

    MatrixXd Zh(N, N);
    const VectorXd n = st.n();
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        Zh(i, j) = ((i == j ? c.Fdiag(i) : 0.0) - c.B(i, j)) / std::sqrt(n(i) * n(j));

    VectorXd v(N);
    for (int i = 0; i < N; ++i) v(i) = unit(rng);
    const VectorXd null = n.cwiseSqrt().normalized();
    v -= null * null.dot(v);
    if (v.norm() < 1e-12) continue;

    MatrixXd sys = (dt / eps) * Zh;
    sys.diagonal().array() += 1.0;
    const VectorXd w = sys.llt().solve(v);
    const double bound = eps / (eps + dt * sb.zhat_min);
    CHECK(w.norm() <= bound * v.norm() * (1.0 + 1e-10));
  }
}

TEST_CASE("contraction budget: limits of the Gamma factors") {
  std::mt19937 rng(20);
  auto [sp, st] = random_system(rng, 3, 3);

  // dt -> 0 at fixed eps: Gamma ~ dt/eps -> 0, so C_X Gamma_X < 1 eventually.
  double prev = std::numeric_limits<double>::infinity();
  for (const double dt : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const ContractionBudget b = contraction_budget(sp, st, dt, 1.0);
    CHECK(b.C_X * b.Gamma_X < prev);
    prev = b.C_X * b.Gamma_X;
  }
  CHECK(prev < 1.0);

  // eps -> 0 at fixed dt: Gamma_X ~ eps/(dt z^2) -> 0.
  const double dt = 0.5;
  for (const double eps : {1e-4, 1e-8}) {
    const ContractionBudget b = contraction_budget(sp, st, dt, eps);
    CHECK(b.Gamma_X == doctest::Approx(eps / (dt * b.z * b.z)).epsilon(1e-3));
  }

  // all constants positive and finite for a valid state
  const ContractionBudget b = contraction_budget(sp, st, 0.3, 0.1);
  for (const double v : {b.C_A, b.C_B, b.C_Z, b.C_Zhat, b.C_W, b.C_s, b.C_s2_0,
                         b.C_s2_1, b.C_s2_2, b.C_0, b.C_1_1, b.C_2_1, b.C_2_2,
                         b.C_3_1, b.C_3_2, b.C_3_3, b.C_X}) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK(b.Gamma_X == doctest::Approx(std::max(b.Gamma_W, b.Gamma_eta)).epsilon(1e-14));
}

TEST_CASE("contraction budget requires positive temperatures") {
  // T = 0 hits the non-Lipschitz point of the frequency model.
  std::mt19937 rng(21);
  auto [sp, st] = random_system(rng, 2, 1);
  CHECK_THROWS_AS(contraction_budget(
                      sp, MomentState(1, st.n(), st.u(), VectorXd::Constant(2, -1.0)),
                      0.1, 0.1),
                  Error);
}

TEST_CASE("select_time_step: small C_X is always contractive") {
  ContractionBudget b;
  b.eps = 1.0;
  b.z = 1.0;
  b.C_X = 3.0;  // C_X <= 4 r z for r = 0.9
  const TimeStepSelection sel = select_time_step(b, 7.0, 0.9);
  CHECK(sel.tag == StepCase::always_contractive);
  CHECK(sel.dt1 == 7.0);
  CHECK(sel.q_at_dt1 >= 0.0);
}

TEST_CASE("select_time_step: fabricated quadratic has the known roots") {
  // z = 1, eps = 1, C_X = 10, r = 1/2: roots 9 +- sqrt(80).
  ContractionBudget b;
  b.eps = 1.0;
  b.z = 1.0;
  b.C_X = 10.0;
  const TimeStepSelection sel = select_time_step(b, 1.0, 0.5);
  REQUIRE(sel.roots_real);
  CHECK(sel.dt_plus == doctest::Approx(9.0 + std::sqrt(80.0)).epsilon(1e-14));
  CHECK(sel.dt_minus == doctest::Approx(9.0 - std::sqrt(80.0)).epsilon(1e-14));
  // substituting the roots back kills the quadratic
  const auto q = [&](double t) { return 0.5 * t * t - 9.0 * t + 0.5; };
  CHECK(std::abs(q(sel.dt_plus)) <= 1e-12 * (1.0 + sel.dt_plus * sel.dt_plus));
  CHECK(std::abs(q(sel.dt_minus)) <= 1e-12);

  // dt0 inside the window shrinks to dt_-
  CHECK(sel.tag == StepCase::shrunk);
  CHECK(sel.dt1 == sel.dt_minus);
  CHECK(sel.dt1 / 1.0 >= sel.dt_minus / sel.dt_plus);

  // dt0 at the upper root stays put
  const TimeStepSelection at_root = select_time_step(b, sel.dt_plus, 0.5);
  CHECK(at_root.tag == StepCase::outside_window);
  CHECK(at_root.dt1 == sel.dt_plus);

  // dt0 below the window stays put
  const TimeStepSelection below = select_time_step(b, 0.5 * sel.dt_minus, 0.5);
  CHECK(below.tag == StepCase::outside_window);
  CHECK(below.dt1 == 0.5 * sel.dt_minus);
}

TEST_CASE("select_time_step: certified ratio is independent of eps") {
  std::mt19937 rng(22);
  auto [sp, st] = random_system(rng, 3, 1);
  double ratio0 = -1.0;
  for (const double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const ContractionBudget b = contraction_budget(sp, st, 1.0, eps);
    const TimeStepSelection sel = select_time_step(b, 1.0, 0.9);
    if (!sel.roots_real) continue;
    const double ratio = sel.dt_minus / sel.dt_plus;
    if (ratio0 < 0)
      ratio0 = ratio;
    else
      CHECK(std::abs(ratio - ratio0) <= 1e-10 * ratio0);
    CHECK(sel.dt1 / 1.0 >= ratio * (1.0 - 1e-14));
  }
}

TEST_CASE("certified steps contract in the X norm") {
  std::mt19937 rng(23);
  GstConfig cfg;
  int measured = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 2 + int(rng() % 3);
    auto [sp, st] = random_system(rng, N, 1);
    const double eps = 1e-3;
    const ContractionBudget b = contraction_budget(sp, st, 1.0, eps);
    const TimeStepSelection sel = select_time_step(b, 1.0, 0.9);
    CHECK(sel.q_at_dt1 >= -1e-10 * b.C_X * b.eps * sel.dt1);

    auto [next, report] = solve_moments(sp, st, sel.dt1, eps, cfg);
    CHECK(report.converged);
    const double bound = b.contraction_bound(sel.dt1);
    CHECK(bound <= 0.9 * (1.0 + 1e-12));
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() *
                         (1.0 + report.x_norms.front());
    for (size_t l = 1; l < report.x_norms.size(); ++l) {
      if (report.x_norms[l - 1] <= floor || report.x_norms[l] <= floor) break;
      CHECK(report.x_norms[l] <= report.x_norms[l - 1] * (1.0 + 1e-12));
      if (bound < 1.0) {
        CHECK(report.x_norms[l] <= bound * report.x_norms[l - 1] * (1.0 + 1e-10));
        ++measured;
      }
    }
  }
  CHECK(measured > 0);  // the suite really exercised the bound
}
