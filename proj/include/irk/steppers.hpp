#pragma once

#include "irk/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

/// One-step solvers for implicit Runge--Kutta stage systems.  The stage
/// equation M K + h L K A^T = G is solved by perturbing A to a matrix with a
/// cheap eigenstructure (the centroskew part S for symmetric schemes, or the
/// skew-corrected W-transform image for general collocation schemes), solving
/// the decoupled shifted systems in parallel across stages, and restoring
/// exactness through a low-rank-RHS Sylvester correction.
namespace irk {

/// Krylov variant used for the correction equation.  `automatic` picks
/// polynomial Arnoldi for linear symmetric steps and extended Krylov for
/// Newton directions; collocation corrections always use the block variant
/// (their right-hand sides have rank up to three and carry the diagonal D).
enum class CorrectionVariant { automatic, poly, extended, block };

/// Knobs shared by the per-step operations and the time loop.
struct IntegrateOptions {
  int threads = 1;
  bool verify = false;  ///< recompute the true stage residual after each step
  double newton_tol = 1e-10;
  int newton_max = 25;
  double sylvester_tol = 1e-10;
  int sylvester_kmax = 200;
  CorrectionVariant correction = CorrectionVariant::automatic;
  bool averaged_jacobian = false;  ///< freeze J as the mean over stage nodes
                                   ///< instead of the midpoint evaluation
  bool use_w_transform = false;    ///< force the collocation path on symmetric schemes
  bool store_trajectory = false;
};

struct IntegrateResult {
  Vector y;                          ///< terminal state
  std::vector<Vector> trajectory;    ///< y_0..y_nt when store_trajectory is set
  std::vector<SolveReport> reports;  ///< one entry per step
};

/// Thrown when the simplified-Newton loop exhausts its iteration budget.
struct newton_error : std::runtime_error {
  newton_error(const std::string& what, Matrix residual, int iters)
      : std::runtime_error(what), last_residual(std::move(residual)), iterations(iters) {}
  Matrix last_residual;  ///< stage residual at the last iterate
  int iterations = 0;
};

/// Linear stage solve via the centroskew split: K-hat solves the perturbed
/// system M K + h L K S^T = -L y_n 1^T + F stage-parallel, then the rank-one
/// correction M E + h L E A^T = -(h/2) (L K-hat b) 1^T restores exactness.
StageBlock stages_linear_symmetric(const LinearIVP& p, const ButcherTableau& t,
                                   const CentroskewSplit& split, const Vector& y_n,
                                   double t_n, double h, const IntegrateOptions& opt = {});

/// Linear stage solve via the W-transform: the transformed system with the
/// skew-corrected coefficient (and unit diagonal) is solved stage-parallel,
/// the correction M E D + h L E Xs^T = (1-d_s) M Z-hat e_s e_s^T
/// + h L Z-hat C2 C1^T is handled by the block Krylov solver, and the stages
/// are mapped back through W^T.
StageBlock stages_linear_collocation(const LinearIVP& p, const ButcherTableau& t,
                                     const WTransformBundle& w, const Vector& y_n,
                                     double t_n, double h, const IntegrateOptions& opt = {});

/// Advance y_{n+1} = y_n + h K b (the stages are derivative stages, so the
/// mass matrix is already accounted for by the stage solve).
Vector advance_linear(const LinearIVP& p, const ButcherTableau& t, const StageBlock& kb,
                      const Vector& y_n, double h);

/// Dense Kronecker solve of (I_s (x) M + h A (x) L) vec(K) = vec(G); only
/// for verification, requires N*s <= 5000.
Matrix direct_stage_oracle(const LinearIVP& p, const ButcherTableau& t, const Vector& y_n,
                           double t_n, double h);

/// Stage residual of the nonlinear system: column i is
/// M kappa_i - M y_n + h sum_j a_{ij} Theta(kappa_j, t_n + c_j h).
Matrix newton_residual(const NonlinearIVP& p, const ButcherTableau& t, const Matrix& kappa,
                       const Vector& y_n, double t_n, double h);

/// Simplified-Newton direction: solves M D + h J D A^T = residual with the
/// frozen Jacobian J through the same perturb-and-correct pipeline as the
/// linear stage solve (extended Krylov correction by default).
Matrix simplified_newton_direction(const SparseOperator& M, const SparseOperator& J,
                                   const ButcherTableau& t, const Matrix& residual, double h,
                                   const IntegrateOptions& opt = {},
                                   SolveReport* report = nullptr);

/// Simplified-Newton iteration kappa <- kappa - direction from kappa = 0 with
/// the Jacobian frozen once per step (midpoint state by default, stage-node
/// average when opt.averaged_jacobian is set).  K holds the converged stage
/// states and F the Theta samples at them.
StageBlock stages_nonlinear(const NonlinearIVP& p, const ButcherTableau& t, const Vector& y_n,
                            double t_n, double h, double newton_tol = 1e-10,
                            int newton_max = 25, const IntegrateOptions& opt = {});

/// Advance M y_{n+1} = M y_n - h sum_i b_i Theta(k_i, t_n + c_i h).
Vector advance_nonlinear(const NonlinearIVP& p, const ButcherTableau& t, const StageBlock& kb,
                         const Vector& y_n, double t_n, double h);

/// Time loop for linear problems.  The complex shifted factorizations are
/// built once and reused across all steps.
IntegrateResult integrate(const LinearIVP& p, Scheme scheme, int s,
                          const IntegrateOptions& opt = {});

/// Time loop for nonlinear problems.  The Jacobian is re-frozen and
/// re-factored every step.
IntegrateResult integrate(const NonlinearIVP& p, Scheme scheme, int s,
                          const IntegrateOptions& opt = {});

}  // namespace irk
