#include "irk/steppers.hpp"

#include "irk/shifted.hpp"
#include "irk/sylvester.hpp"
#include "irk/tableau.hpp"
#include "irk/thread_pool.hpp"
#include "irk/transforms.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <optional>
#include <utility>

namespace irk {

namespace {

using SpMat = Eigen::SparseMatrix<double>;  // column major, as SparseLU requires
using clock_type = std::chrono::steady_clock;

/// Elapsed seconds since `tp`; advances `tp` to now.
double lap(clock_type::time_point& tp) {
  const auto now = clock_type::now();
  const double dt = std::chrono::duration<double>(now - tp).count();
  tp = now;
  return dt;
}

/// Engine for M X + h L X A^T = G with fixed operators and step size: the
/// perturbed system is diagonalized and solved stage-parallel, then a
/// low-rank-RHS Sylvester correction restores the exact stages.  Holds the
/// complex shifted factorizations and the real factorization of L so that
/// repeated right-hand sides (time steps, Newton iterations) reuse them.
class stage_system {
 public:
  stage_system(const SparseOperator& M, const SparseOperator& L, const ButcherTableau& t,
               CentroskewSplit split, double h, const IntegrateOptions& opt,
               CorrectionVariant fallback)
      : M_(M), L_(L), t_(t), h_(h), opt_(opt), split_(std::move(split)) {
    variant_ = opt.correction == CorrectionVariant::automatic ? fallback : opt.correction;
    factors_ = factor_all(M_, L_, h_, split_->eig, opt_.threads);
    init_solvers();
  }

  stage_system(const SparseOperator& M, const SparseOperator& L, const ButcherTableau& t,
               WTransformBundle bundle, double h, const IntegrateOptions& opt)
      : M_(M), L_(L), t_(t), h_(h), opt_(opt), bundle_(std::move(bundle)) {
    variant_ = CorrectionVariant::block;  // rank-3 RHS with diagonal D
    factors_ = factor_all(M_, L_, h_, bundle_->eig, opt_.threads);
    init_solvers();
  }

  /// Solve M X + h L X A^T = G; records the correction dimension, residual
  /// estimate, and phase timings into `report`.
  Matrix solve(const Matrix& G, SolveReport& report) const {
    const int s = t_.s;
    const Eigen::Index N = G.rows();
    auto tp = clock_type::now();

    const EigBundle& eig = split_ ? split_->eig : bundle_->eig;
    Matrix G0;
    if (split_)
      G0 = G;
    else
      G0 = G * t_.b.asDiagonal() * bundle_->W;
    const ComplexMatrix Rhat = G0.cast<Complex>() * eig.inv_vectors.transpose();
    const ComplexMatrix Y = solve_all(factors_, Rhat, opt_.threads);
    const ComplexMatrix Xc = Y * eig.vectors.transpose();
    const Matrix Xhat = Xc.real();
    const double residue = Xc.imag().norm();
    if (residue > 1e-6 * (1.0 + Xhat.norm()))
      throw std::runtime_error(
          "stage solve: back-transform left a complex residue of " + std::to_string(residue));
    report.timings.stage_solves += lap(tp);

    SylvesterProblem cp;
    cp.applyZ = applyZ_;
    cp.applyZinv = applyZinv_;
    cp.tol = opt_.sylvester_tol;
    cp.kmax = opt_.sylvester_kmax;

    SylvesterSolution sol;
    Matrix X;
    if (split_) {
      cp.R = t_.A.transpose();
      cp.U = -0.5 * (Xhat * t_.b);
      cp.V = Vector::Ones(s);
      switch (variant_) {
        case CorrectionVariant::extended: sol = solve_extended(cp); break;
        case CorrectionVariant::block: sol = solve_block(cp); break;
        default: sol = solve_arnoldi(cp); break;
      }
      X = Xhat + sol.E;
    } else {
      const auto& wb = *bundle_;
      Matrix U = Matrix::Zero(N, 3);
      Matrix V = Matrix::Zero(s, 3);
      if (wb.eD != 0.0) U.col(0) = (wb.eD / h_) * L_lu_.solve(mass_apply(Xhat.col(s - 1)));
      U.rightCols(2) = Xhat * wb.C2;
      V(s - 1, 0) = 1.0;
      V.rightCols(2) = wb.C1;
      cp.R = wb.Xs.transpose();
      cp.U = U;
      cp.V = V;
      sol = solve_block(cp, wb.D);
      X = (Xhat + sol.E) * wb.W.transpose();
    }
    if (!sol.converged) {
      std::ostringstream msg;
      msg << "stage solve: Sylvester correction did not converge (dim " << sol.space_dim
          << ", iterations " << sol.iterations << ", residual estimate "
          << sol.residual_estimate << ")";
      throw std::runtime_error(msg.str());
    }
    if (sol.space_dim > report.krylov_dim) report.krylov_dim = sol.space_dim;
    report.residual = sol.residual_estimate;
    report.timings.correction += lap(tp);
    return X;
  }

  /// Relative stage residual ||M X + h L X A^T - G||_F / (1 + ||G||_F).
  double stage_residual(const Matrix& X, const Matrix& G) const {
    const Matrix R = M_.storage * X + h_ * (L_.storage * X) * t_.A.transpose() - G;
    return R.norm() / (1.0 + G.norm());
  }

  const ButcherTableau& tableau() const { return t_; }

 private:
  void init_solvers() {
    Lcol_ = L_.storage;
    L_lu_.compute(Lcol_);
    if (L_lu_.info() != Eigen::Success)
      throw std::runtime_error("stage solve: factorization of the spatial operator failed");
    if (!M_.identity) {
      Mcol_ = M_.storage;
      M_lu_.emplace();
      M_lu_->compute(Mcol_);
      if (M_lu_->info() != Eigen::Success)
        throw std::runtime_error("stage solve: mass factorization failed");
    }
    // Z = (h L)^{-1} M, the coefficient of the correction equation
    applyZ_ = [this](const Vector& x) { return Vector(L_lu_.solve(mass_apply(x)) / h_); };
    applyZinv_ = [this](const Vector& x) { return Vector(h_ * mass_solve(L_.apply(x))); };
  }

  Vector mass_apply(const Vector& x) const { return M_.identity ? x : M_.apply(x); }
  Vector mass_solve(const Vector& x) const { return M_.identity ? x : Vector(M_lu_->solve(x)); }

  const SparseOperator& M_;
  const SparseOperator& L_;
  ButcherTableau t_;
  double h_ = 0.0;
  IntegrateOptions opt_;
  CorrectionVariant variant_ = CorrectionVariant::poly;
  std::optional<CentroskewSplit> split_;
  std::optional<WTransformBundle> bundle_;
  ShiftedFactorSet factors_;
  SpMat Lcol_, Mcol_;
  Eigen::SparseLU<SpMat> L_lu_;
  std::optional<Eigen::SparseLU<SpMat>> M_lu_;
  std::function<Vector(const Vector&)> applyZ_, applyZinv_;
};

/// Source samples F(:,i) = f(t_n + c_i h), assembled in parallel.
Matrix assemble_sources(const LinearIVP& p, const ButcherTableau& t, double t_n, double h,
                        int threads) {
  Matrix F = Matrix::Zero(p.y0.size(), t.s);
  if (p.f)
    parallel_for(t.s, threads, [&](int i) { F.col(i) = p.f(t_n + t.c[i] * h); });
  return F;
}

/// Theta samples column-wise at the stage states.
Matrix assemble_theta(const NonlinearIVP& p, const ButcherTableau& t, const Matrix& kappa,
                      double t_n, double h, int threads) {
  Matrix Theta(kappa.rows(), t.s);
  parallel_for(t.s, threads,
               [&](int i) { Theta.col(i) = p.theta(kappa.col(i), t_n + t.c[i] * h); });
  return Theta;
}

StageBlock run_linear_step(const stage_system& sys, const LinearIVP& p, const Vector& y_n,
                           double t_n, double h, const IntegrateOptions& opt) {
  const ButcherTableau& t = sys.tableau();
  StageBlock kb;
  auto tp = clock_type::now();
  kb.F = assemble_sources(p, t, t_n, h, opt.threads);
  Matrix G = kb.F;
  G.colwise() -= p.L.apply(y_n);
  kb.report.timings.rhs_assembly += lap(tp);
  kb.K = sys.solve(G, kb.report);
  if (opt.verify) kb.report.residual = sys.stage_residual(kb.K, G);
  return kb;
}

ButcherTableau checked_tableau(const ButcherTableau& t) {
  if (t.s < 1 || t.A.rows() != t.s || t.A.cols() != t.s || t.b.size() != t.s ||
      t.c.size() != t.s)
    throw std::invalid_argument("stage solve: inconsistent tableau dimensions");
  return t;
}

}  // namespace

StageBlock stages_linear_symmetric(const LinearIVP& p, const ButcherTableau& t,
                                   const CentroskewSplit& split, const Vector& y_n,
                                   double t_n, double h, const IntegrateOptions& opt) {
  if (!is_symmetric_scheme(t.scheme))
    throw std::invalid_argument("stages_linear_symmetric: scheme is not symmetric");
  stage_system sys(p.M, p.L, checked_tableau(t), split, h, opt, CorrectionVariant::poly);
  return run_linear_step(sys, p, y_n, t_n, h, opt);
}

StageBlock stages_linear_collocation(const LinearIVP& p, const ButcherTableau& t,
                                     const WTransformBundle& w, const Vector& y_n,
                                     double t_n, double h, const IntegrateOptions& opt) {
  stage_system sys(p.M, p.L, checked_tableau(t), w, h, opt);
  return run_linear_step(sys, p, y_n, t_n, h, opt);
}

Vector advance_linear(const LinearIVP&, const ButcherTableau& t, const StageBlock& kb,
                      const Vector& y_n, double h) {
  return y_n + h * (kb.K * t.b);
}

Matrix direct_stage_oracle(const LinearIVP& p, const ButcherTableau& t, const Vector& y_n,
                           double t_n, double h) {
  const Eigen::Index N = p.y0.size();
  const int s = t.s;
  if (N * s > 5000)
    throw std::invalid_argument("direct_stage_oracle: dense block system too large");
  const Matrix Md = Matrix(p.M.storage);
  const Matrix Ld = Matrix(p.L.storage);
  Matrix big = Matrix::Zero(N * s, N * s);
  Vector rhs(N * s);
  const Vector Ly = Ld * y_n;
  const Matrix F = assemble_sources(p, t, t_n, h, 1);
  for (int i = 0; i < s; ++i) {
    big.block(i * N, i * N, N, N) += Md;
    for (int j = 0; j < s; ++j) big.block(i * N, j * N, N, N) += h * t.A(i, j) * Ld;
    rhs.segment(i * N, N) = F.col(i) - Ly;
  }
  const Vector k = big.partialPivLu().solve(rhs);
  Matrix K(N, s);
  for (int i = 0; i < s; ++i) K.col(i) = k.segment(i * N, N);
  return K;
}

Matrix newton_residual(const NonlinearIVP& p, const ButcherTableau& t, const Matrix& kappa,
                       const Vector& y_n, double t_n, double h) {
  const Matrix Theta = assemble_theta(p, t, kappa, t_n, h, 1);
  Matrix R = p.M.storage * kappa + h * Theta * t.A.transpose();
  R.colwise() -= p.M.apply(y_n);
  return R;
}

Matrix simplified_newton_direction(const SparseOperator& M, const SparseOperator& J,
                                   const ButcherTableau& t, const Matrix& residual, double h,
                                   const IntegrateOptions& opt, SolveReport* report) {
  SolveReport local;
  Matrix d;
  if (is_symmetric_scheme(t.scheme) && !opt.use_w_transform) {
    stage_system sys(M, J, checked_tableau(t), centroskew_split(t), h, opt,
                     CorrectionVariant::extended);
    d = sys.solve(residual, local);
  } else {
    stage_system sys(M, J, checked_tableau(t), w_transform(t), h, opt);
    d = sys.solve(residual, local);
  }
  if (report) {
    report->krylov_dim = std::max(report->krylov_dim, local.krylov_dim);
    report->residual = local.residual;
    report->timings.stage_solves += local.timings.stage_solves;
    report->timings.correction += local.timings.correction;
  }
  return d;
}

namespace {

/// Frozen Jacobian for one nonlinear step: midpoint state by default, or the
/// average of the stage-node evaluations at the current iterate.
SparseOperator freeze_jacobian(const NonlinearIVP& p, const ButcherTableau& t,
                               const Matrix& kappa, const Vector& y_n, double t_n, double h,
                               bool averaged) {
  if (!averaged) return p.jacobian(y_n, t_n + 0.5 * h);
  SparseOperator first = p.jacobian(kappa.col(0), t_n + t.c[0] * h);
  Eigen::SparseMatrix<double, Eigen::RowMajor> sum = first.storage;
  for (int i = 1; i < t.s; ++i)
    sum = sum + p.jacobian(kappa.col(i), t_n + t.c[i] * h).storage;
  SparseOperator J;
  J.n = first.n;
  J.storage = sum * (1.0 / t.s);
  J.storage.makeCompressed();
  J.symmetry_hint = first.symmetry_hint;
  return J;
}

/// Newton loop body shared by the free function and the time loop.
StageBlock newton_stages(const NonlinearIVP& p, const ButcherTableau& t, const Vector& y_n,
                         double t_n, double h, double newton_tol, int newton_max,
                         const IntegrateOptions& opt) {
  if (!(newton_tol > 0.0) || newton_max < 1)
    throw std::invalid_argument("stages_nonlinear: need newton_tol > 0 and newton_max >= 1");
  const Eigen::Index N = y_n.size();
  const int s = t.s;
  StageBlock kb;
  auto tp = clock_type::now();
  Matrix kappa = Matrix::Zero(N, s);

  const SparseOperator J = freeze_jacobian(p, t, kappa, y_n, t_n, h, opt.averaged_jacobian);
  std::optional<stage_system> sys;
  if (is_symmetric_scheme(t.scheme) && !opt.use_w_transform)
    sys.emplace(p.M, J, t, centroskew_split(t), h, opt, CorrectionVariant::extended);
  else
    sys.emplace(p.M, J, t, w_transform(t), h, opt);

  const Vector My = p.M.apply(y_n);
  const auto residual_at = [&](const Matrix& k, Matrix& theta_out) {
    theta_out = assemble_theta(p, t, k, t_n, h, opt.threads);
    Matrix R = p.M.storage * k + h * theta_out * t.A.transpose();
    R.colwise() -= My;
    return R;
  };

  Matrix Theta;
  Matrix R = residual_at(kappa, Theta);
  double rnorm = R.norm();
  kb.report.timings.rhs_assembly += lap(tp);

  int iters = 0;
  while (rnorm > newton_tol) {
    if (iters >= newton_max)
      throw newton_error("stages_nonlinear: no convergence after " +
                             std::to_string(newton_max) + " iterations (residual " +
                             std::to_string(rnorm) + ")",
                         R, iters);
    const Matrix d = sys->solve(R, kb.report);
    kappa -= d;
    ++iters;
    tp = clock_type::now();
    R = residual_at(kappa, Theta);
    rnorm = R.norm();
    kb.report.timings.rhs_assembly += lap(tp);
  }

  kb.K = std::move(kappa);
  kb.F = std::move(Theta);
  kb.report.newton_iters = iters;
  kb.report.residual = rnorm;
  return kb;
}

}  // namespace

StageBlock stages_nonlinear(const NonlinearIVP& p, const ButcherTableau& t, const Vector& y_n,
                            double t_n, double h, double newton_tol, int newton_max,
                            const IntegrateOptions& opt) {
  return newton_stages(p, checked_tableau(t), y_n, t_n, h, newton_tol, newton_max, opt);
}

Vector advance_nonlinear(const NonlinearIVP& p, const ButcherTableau& t, const StageBlock& kb,
                         const Vector& y_n, double t_n, double h) {
  Matrix Theta;
  if (kb.F.rows() == y_n.size() && kb.F.cols() == t.s)
    Theta = kb.F;
  else
    Theta = assemble_theta(p, t, kb.K, t_n, h, 1);
  const Vector rhs = p.M.apply(y_n) - h * (Theta * t.b);
  if (p.M.identity) return rhs;
  SpMat Mc = p.M.storage;
  Eigen::SparseLU<SpMat> lu(Mc);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("advance_nonlinear: mass factorization failed");
  return lu.solve(rhs);
}

IntegrateResult integrate(const LinearIVP& p, Scheme scheme, int s,
                          const IntegrateOptions& opt) {
  const ButcherTableau t = build_tableau(scheme, s);
  const double h = p.T / std::max(p.nt, 1);
  std::optional<stage_system> sys;
  if (is_symmetric_scheme(scheme) && !opt.use_w_transform)
    sys.emplace(p.M, p.L, t, centroskew_split(t), h, opt, CorrectionVariant::poly);
  else
    sys.emplace(p.M, p.L, t, w_transform(t), h, opt);

  IntegrateResult out;
  out.y = p.y0;
  if (opt.store_trajectory) out.trajectory.push_back(out.y);
  out.reports.reserve(p.nt);
  for (int n = 0; n < p.nt; ++n) {
    const double t_n = n * h;
    StageBlock kb = run_linear_step(*sys, p, out.y, t_n, h, opt);
    auto tp = clock_type::now();
    out.y += h * (kb.K * t.b);
    kb.report.timings.advance += lap(tp);
    if (opt.store_trajectory) out.trajectory.push_back(out.y);
    out.reports.push_back(kb.report);
  }
  return out;
}

IntegrateResult integrate(const NonlinearIVP& p, Scheme scheme, int s,
                          const IntegrateOptions& opt) {
  const ButcherTableau t = build_tableau(scheme, s);
  const double h = p.T / std::max(p.nt, 1);

  IntegrateResult out;
  out.y = p.y0;
  if (opt.store_trajectory) out.trajectory.push_back(out.y);
  out.reports.reserve(p.nt);
  for (int n = 0; n < p.nt; ++n) {
    const double t_n = n * h;
    StageBlock kb = newton_stages(p, t, out.y, t_n, h, opt.newton_tol, opt.newton_max, opt);
    auto tp = clock_type::now();
    out.y = advance_nonlinear(p, t, kb, out.y, t_n, h);
    kb.report.timings.advance += lap(tp);
    if (opt.store_trajectory) out.trajectory.push_back(out.y);
    out.reports.push_back(kb.report);
  }
  return out;
}

}  // namespace irk
