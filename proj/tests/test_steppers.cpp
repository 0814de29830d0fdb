#include <doctest.h>

#include "irk/problems.hpp"
#include "irk/steppers.hpp"
#include "irk/tableau.hpp"
#include "irk/transforms.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace irk;

namespace {

Vector random_state(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / (1.0 + want.norm());
}

// heat_1d restated as a nonlinear problem with Theta(u, t) = L u - f(t)
NonlinearIVP heat_as_nonlinear(const LinearIVP& lin) {
  NonlinearIVP p;
  p.M = lin.M;
  const SparseOperator L = lin.L;
  const auto f = lin.f;
  p.theta = [L, f](const Vector& u, double t) { return Vector(L.apply(u) - f(t)); };
  p.jacobian = [L](const Vector&, double) { return L; };
  p.y0 = lin.y0;
  p.T = lin.T;
  p.nt = lin.nt;
  return p;
}

}  // namespace

TEST_CASE("symmetric stage solve matches the dense stage oracle") {
  const LinearIVP p = heat_1d(16, 1.0, 1);
  const Vector y = random_state(16, 42);
  const double t_n = 0.3;
  const double h = 0.02;
  for (int s = 2; s <= 4; ++s) {
    const ButcherTableau t = build_tableau(Scheme::gauss, s);
    const CentroskewSplit split = centroskew_split(t);
    const StageBlock kb = stages_linear_symmetric(p, t, split, y, t_n, h);
    const Matrix ref = direct_stage_oracle(p, t, y, t_n, h);
    INFO("s=", s, " rel=", rel_err(kb.K, ref));
    CHECK(rel_err(kb.K, ref) <= 1e-9);
    CHECK(kb.report.krylov_dim >= 1);
  }
}

TEST_CASE("one-stage gauss reduces to the implicit midpoint formula") {
  const LinearIVP p = scalar_decay(1.0, 1);
  const ButcherTableau t = build_tableau(Scheme::gauss, 1);
  const CentroskewSplit split = centroskew_split(t);
  Vector y(1);
  y << 0.8;
  const double h = 0.25;
  const StageBlock kb = stages_linear_symmetric(p, t, split, y, 0.0, h);
  // K = -y / (1 + h/2)
  CHECK(std::abs(kb.K(0, 0) + y[0] / (1.0 + 0.5 * h)) <= 1e-14);
  const Vector y1 = advance_linear(p, t, kb, y, h);
  CHECK(std::abs(y1[0] - (y[0] + h * kb.K(0, 0))) <= 1e-15);
}

TEST_CASE("collocation stage solve matches the closed form on the scalar problem") {
  const LinearIVP p = scalar_decay(1.0, 1);
  const ButcherTableau t = build_tableau(Scheme::radau_iia, 2);
  const WTransformBundle wb = w_transform(t);
  Vector y(1);
  y << 1.0;
  const double h = 0.1;
  const StageBlock kb = stages_linear_collocation(p, t, wb, y, 0.0, h);
  // K (I + h A)^T = -y 1^T
  const Matrix lhs = Matrix::Identity(2, 2) + h * t.A;
  const Vector kref = -y[0] * lhs.partialPivLu().solve(Vector::Ones(2));
  CHECK((kb.K.transpose() - kref).norm() <= 1e-12);
}

TEST_CASE("collocation stage solve matches the dense stage oracle for every family") {
  const LinearIVP p = heat_1d(16, 1.0, 1);
  const Vector y = random_state(16, 43);
  const double h = 0.04;
  IntegrateOptions opt;  // tight correction: this test probes exactness, not defaults
  opt.sylvester_tol = 1e-12;
  for (const Scheme scheme :
       {Scheme::radau_ia, Scheme::radau_iia, Scheme::lobatto_iiia, Scheme::lobatto_iiib,
        Scheme::lobatto_iiic, Scheme::lobatto_iiic_star}) {
    for (int s = 2; s <= 4; ++s) {
      const ButcherTableau t = build_tableau(scheme, s);
      const WTransformBundle wb = w_transform(t);
      const StageBlock kb = stages_linear_collocation(p, t, wb, y, 0.1, h, opt);
      const Matrix ref = direct_stage_oracle(p, t, y, 0.1, h);
      INFO(to_string(scheme), " s=", s, " rel=", rel_err(kb.K, ref));
      CHECK(rel_err(kb.K, ref) <= 1e-9);
    }
  }
}

TEST_CASE("symmetric and collocation paths agree on gauss") {
  const LinearIVP p = heat_1d(16, 1.0, 1);
  const Vector y = random_state(16, 44);
  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  const StageBlock sym = stages_linear_symmetric(p, t, centroskew_split(t), y, 0.0, 0.03);
  const StageBlock col = stages_linear_collocation(p, t, w_transform(t), y, 0.0, 0.03);
  CHECK(rel_err(sym.K, col.K) <= 1e-9);
}

TEST_CASE("zero data produces zero stages and a fixed state") {
  LinearIVP p = heat_1d(12, 1.0, 1);
  p.f = {};  // drop the source: y = 0 is then a steady state
  const Vector y = Vector::Zero(12);
  const ButcherTableau t = build_tableau(Scheme::gauss, 2);
  const StageBlock kb = stages_linear_symmetric(p, t, centroskew_split(t), y, 0.0, 0.05);
  CHECK(kb.K.norm() == 0.0);
  const Vector y1 = advance_linear(p, t, kb, y, 0.05);
  CHECK(y1.norm() == 0.0);
}

TEST_CASE("newton residual vanishes at the interpolated linear stages") {
  const LinearIVP lin = heat_1d(16, 1.0, 1);
  const NonlinearIVP p = heat_as_nonlinear(lin);
  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  const Vector y = random_state(16, 45);
  const double t_n = 0.2;
  const double h = 0.03;
  const Matrix K = direct_stage_oracle(lin, t, y, t_n, h);
  // state stages kappa_i = y + h sum_j a_ij K_j make the residual vanish
  const Matrix kappa = y.replicate(1, 3) + h * K * t.A.transpose();
  const Matrix R = newton_residual(p, t, kappa, y, t_n, h);
  CHECK(R.norm() <= 1e-10 * (1.0 + kappa.norm()));
  // and a perturbed state does not
  const Matrix R2 = newton_residual(p, t, kappa.array() + 0.1, y, t_n, h);
  CHECK(R2.norm() > 1e-3);
}

TEST_CASE("simplified newton direction solves the frozen stage system") {
  const NonlinearIVP p = wave_nonlinear(32, 10.0, 1.0, 1);
  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  const SparseOperator J = p.jacobian(p.y0, 0.0);
  const double h = 0.01;
  Matrix R(64, 3);
  for (int j = 0; j < 3; ++j) R.col(j) = random_state(64, 100 + j);

  SolveReport report;
  const Matrix D = simplified_newton_direction(p.M, J, t, R, h, {}, &report);

  // dense oracle of (I_s (x) M + A (x) h J) vec(D) = vec(R)
  const Matrix Md = Matrix(p.M.storage);
  const Matrix Jd = Matrix(J.storage);
  Matrix big = Matrix::Zero(64 * 3, 64 * 3);
  for (int i = 0; i < 3; ++i) {
    big.block(64 * i, 64 * i, 64, 64) += Md;
    for (int j = 0; j < 3; ++j) big.block(64 * i, 64 * j, 64, 64) += h * t.A(i, j) * Jd;
  }
  const Vector vec = big.partialPivLu().solve(Eigen::Map<const Vector>(R.data(), R.size()));
  const Matrix ref = Eigen::Map<const Matrix>(vec.data(), 64, 3);
  CHECK(rel_err(D, ref) <= 1e-9);
  CHECK(report.krylov_dim >= 1);
}

TEST_CASE("a linear theta converges in exactly one newton iteration") {
  const int Nx = 128;
  const double h = 1.0 / 1270.0;
  const NonlinearIVP p = wave_nonlinear(Nx, 0.0, 100.0 * h, 100);
  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  const StageBlock kb = stages_nonlinear(p, t, p.y0, 0.0, h);
  CHECK(kb.report.newton_iters == 1);

  // the nonlinear path then reproduces the linear integrator on Theta = L y
  LinearIVP lin;
  lin.M = p.M;
  lin.L = p.jacobian(p.y0, 0.0);  // beta = 0: Theta(w) = J w exactly
  lin.y0 = p.y0;
  lin.T = 10.0 * h;
  lin.nt = 10;
  NonlinearIVP pn = p;
  pn.T = lin.T;
  pn.nt = lin.nt;
  // tighten the correction so its residual stays below the comparison budget
  IntegrateOptions opt;
  opt.sylvester_tol = 1e-12;
  const Vector ylin = integrate(lin, Scheme::gauss, 3, opt).y;
  const Vector ynl = integrate(pn, Scheme::gauss, 3, opt).y;
  CHECK((ylin - ynl).norm() <= 1e-10 * (1.0 + ylin.norm()));
}

TEST_CASE("the newton loop reports an exhausted budget with diagnostics") {
  const NonlinearIVP p = wave_nonlinear(64, 10.0, 1.0, 100);
  const ButcherTableau t = build_tableau(Scheme::gauss, 2);
  try {
    stages_nonlinear(p, t, p.y0, 0.0, 0.01, 1e-10, /*newton_max=*/1);
    FAIL("expected newton_error");
  } catch (const newton_error& e) {
    CHECK(e.iterations == 1);
    CHECK(e.last_residual.rows() == 128);
    CHECK(e.last_residual.cols() == 2);
    CHECK(std::isfinite(e.last_residual.norm()));
  }
}

TEST_CASE("nonlinear wave step matches a dense fully-coupled newton solve") {
  const int Nx = 24;
  const NonlinearIVP p = wave_nonlinear(Nx, 10.0, 1.0, 1);
  const ButcherTableau t = build_tableau(Scheme::radau_iia, 3);
  const double h = 0.005;
  const StageBlock kb = stages_nonlinear(p, t, p.y0, 0.0, h);

  // reference: full Newton on the coupled system with the exact Jacobian
  const int n = 2 * Nx;
  Matrix kappa = Matrix::Zero(n, 3);
  for (int it = 0; it < 30; ++it) {
    const Matrix R = newton_residual(p, t, kappa, p.y0, 0.0, h);
    if (R.norm() <= 1e-13) break;
    Matrix big = Matrix::Zero(3 * n, 3 * n);
    for (int i = 0; i < 3; ++i) {
      big.block(n * i, n * i, n, n) += Matrix(p.M.storage);
      for (int j = 0; j < 3; ++j) {
        const Matrix Jd = Matrix(p.jacobian(kappa.col(j), 0.0).storage);
        big.block(n * i, n * j, n, n) += h * t.A(i, j) * Jd;
      }
    }
    const Vector step =
        big.partialPivLu().solve(Eigen::Map<const Vector>(R.data(), R.size()));
    kappa -= Eigen::Map<const Matrix>(step.data(), n, 3);
  }
  CHECK(rel_err(kb.K, kappa) <= 1e-9);
}

TEST_CASE("linear integrate matches the per-step oracle over many steps") {
  const LinearIVP p = heat_1d(64, 0.5, 10);
  const IntegrateResult res = integrate(p, Scheme::gauss, 3);
  REQUIRE(res.reports.size() == 10);

  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  Vector y = p.y0;
  const double h = p.T / p.nt;
  for (int n = 0; n < p.nt; ++n) {
    const Matrix K = direct_stage_oracle(p, t, y, n * h, h);
    y += h * (K * t.b);
  }
  CHECK((res.y - y).norm() <= 1e-7 * (1.0 + y.norm()));
}

TEST_CASE("integration with zero steps returns the initial state") {
  LinearIVP p = scalar_decay(1.0, 0);
  IntegrateOptions opt;
  opt.store_trajectory = true;
  const IntegrateResult res = integrate(p, Scheme::gauss, 2, opt);
  CHECK((res.y.array() == p.y0.array()).all());
  REQUIRE(res.trajectory.size() == 1);
  CHECK((res.trajectory[0].array() == p.y0.array()).all());
}

TEST_CASE("trajectory has one state per step plus the initial state") {
  const LinearIVP p = heat_1d(8, 0.1, 4);
  IntegrateOptions opt;
  opt.store_trajectory = true;
  const IntegrateResult res = integrate(p, Scheme::gauss, 2, opt);
  REQUIRE(res.trajectory.size() == 5);
  CHECK((res.trajectory.front().array() == p.y0.array()).all());
  CHECK((res.trajectory.back().array() == res.y.array()).all());
}

TEST_CASE("results are bitwise invariant under the thread count") {
  const LinearIVP p = heat_1d(128, 0.2, 5);
  IntegrateOptions one;
  one.threads = 1;
  IntegrateOptions four;
  four.threads = 4;
  const Vector y1 = integrate(p, Scheme::gauss, 4, one).y;
  const Vector y4 = integrate(p, Scheme::gauss, 4, four).y;
  CHECK((y1.array() == y4.array()).all());

  const NonlinearIVP w = wave_nonlinear(64, 10.0, 0.05, 5);
  const Vector w1 = integrate(w, Scheme::gauss, 3, one).y;
  const Vector w4 = integrate(w, Scheme::gauss, 3, four).y;
  CHECK((w1.array() == w4.array()).all());
}

TEST_CASE("correction variants can be forced and agree") {
  const LinearIVP p = heat_1d(32, 0.2, 2);
  IntegrateOptions opt;
  Vector base;
  for (const CorrectionVariant v :
       {CorrectionVariant::automatic, CorrectionVariant::poly, CorrectionVariant::extended}) {
    opt.correction = v;
    const Vector y = integrate(p, Scheme::gauss, 3, opt).y;
    if (base.size() == 0)
      base = y;
    else
      CHECK((y - base).norm() <= 1e-9 * (1.0 + base.norm()));
  }
}

TEST_CASE("the w-transform path is available for symmetric schemes too") {
  const LinearIVP p = heat_1d(32, 0.25, 5);
  IntegrateOptions opt;
  const Vector sym = integrate(p, Scheme::gauss, 3, opt).y;
  opt.use_w_transform = true;
  const Vector col = integrate(p, Scheme::gauss, 3, opt).y;
  CHECK((sym - col).norm() <= 1e-8 * (1.0 + sym.norm()));
}

TEST_CASE("verification mode reports the true stage residual") {
  const LinearIVP p = heat_1d(24, 0.1, 3);
  IntegrateOptions opt;
  opt.verify = true;
  const IntegrateResult res = integrate(p, Scheme::gauss, 4, opt);
  for (const SolveReport& rep : res.reports) {
    CHECK(rep.residual > 0.0);
    CHECK(rep.residual <= 1e-8);
  }
}

TEST_CASE("averaged jacobian freezing converges as well") {
  const NonlinearIVP p = wave_nonlinear(64, 10.0, 0.05, 10);
  IntegrateOptions opt;
  opt.averaged_jacobian = true;
  const IntegrateResult res = integrate(p, Scheme::gauss, 3, opt);
  for (const SolveReport& rep : res.reports) {
    CHECK(rep.newton_iters >= 1);
    CHECK(rep.newton_iters <= 6);
  }
  CHECK(std::isfinite(res.y.norm()));
}

TEST_CASE("nonlinear integrate timings and reports are populated") {
  const NonlinearIVP p = wave_nonlinear(48, 10.0, 0.02, 4);
  const IntegrateResult res = integrate(p, Scheme::gauss, 4);
  REQUIRE(res.reports.size() == 4);
  for (const SolveReport& rep : res.reports) {
    CHECK(rep.newton_iters >= 1);
    CHECK(rep.krylov_dim >= 1);
    CHECK(rep.residual <= 1e-10);
  }
}

TEST_CASE("the dense stage oracle rejects oversized systems") {
  const LinearIVP p = heat_1d(2000, 1.0, 1);
  const ButcherTableau t = build_tableau(Scheme::gauss, 3);
  CHECK_THROWS_AS(direct_stage_oracle(p, t, p.y0, 0.0, 0.01), std::invalid_argument);
}
