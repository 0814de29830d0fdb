#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// Core value types shared across the stage-parallel implicit Runge--Kutta
/// library: tableau data, transform bundles, matrix-equation problem
/// descriptions, sparse operators, and per-step diagnostics.
namespace irk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Supported collocation / Runge--Kutta scheme families.
enum class Scheme {
  gauss,
  radau_ia,
  radau_iia,
  lobatto_iiia,
  lobatto_iiib,
  lobatto_iiic,
  lobatto_iiic_star,
  lobatto_iiid,
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// True for families that are invariant under time reflection
/// (c + Jc = 1, b = Jb, JAJ + A = 1 b^T).
bool is_symmetric_scheme(Scheme scheme);

/// Runge--Kutta coefficients (A, b, c) with stage count s.
struct ButcherTableau {
  int s = 0;
  Matrix A;       ///< s x s stage coefficients a_{i,j}
  Vector b;       ///< length-s weights
  Vector c;       ///< length-s nodes in [0, 1]
  Scheme scheme = Scheme::gauss;
};

/// Deviations of the three time-reflection identities.
struct SymmetryReport {
  double c_reflection = 0.0;  ///< max |c_i + c_{s+1-i} - 1|
  double b_reflection = 0.0;  ///< max |b_i - b_{s+1-i}|
  double a_centro = 0.0;      ///< max entry of |JAJ + A - 1 b^T|
  bool symmetric = false;     ///< all deviations <= 1e-10
  double max_deviation() const;
};

/// Residuals of the B(p) and C(floor(p/2)) simplifying conditions.
struct OrderReport {
  int p_requested = 0;
  std::vector<double> b_residuals;  ///< |sum_i b_i c_i^{k-1} - 1/k|, k = 1..p
  std::vector<double> c_residuals;  ///< max_i |sum_j a_ij c_j^{k-1} - c_i^k/k|
  int b_order = 0;                  ///< largest consecutive k with B(k) <= tol
  int c_order = 0;                  ///< largest consecutive k with C(k) <= tol
  double tol = 1e-9;
};

/// Complex eigendecomposition with conditioning diagnostics.  Conjugate
/// eigenvalue pairs are stored adjacently (positive imaginary part first)
/// and the partner entries are exact conjugates of the representative.
struct EigBundle {
  ComplexVector values;       ///< eigenvalues
  ComplexMatrix vectors;      ///< right eigenvector columns
  ComplexMatrix inv_vectors;  ///< inverse of the eigenvector matrix
  double cond2 = 0.0;         ///< two-norm condition number of `vectors`
  bool unitary = false;       ///< true when vectors^H vectors = I
};

/// Split A = S + (1/2) 1 b^T with S centroskew (J S J = -S).
struct CentroskewSplit {
  Matrix S;
  Vector rank1_left;   ///< (1/2) * ones(s)
  Vector rank1_right;  ///< b
  EigBundle eig;       ///< eigendecomposition of S
};

/// Orthonormal-polynomial change of basis for collocation schemes together
/// with the skew-symmetrizing low-rank corner correction.
struct WTransformBundle {
  Matrix W;        ///< W(i,j) = P_{j-1}(c_i), shifted orthonormal Legendre
  Matrix Xs;       ///< W^T diag(b) A W (tridiagonal + corner entries)
  Vector D;        ///< diagonal of W^T diag(b) W = (1, ..., 1, d_s)
  Eigen::Vector3d zeta;  ///< corner entries (zeta_{s,s-1}, zeta_{s-1,s}, zeta_{s,s})
  Matrix Xhat;     ///< Xs + C1 C2^T, exactly skew-symmetric
  Matrix C1;       ///< s x 2 corner correction factor
  Matrix C2;       ///< s x 2 selector factor
  double eD = 0.0; ///< diagonal correction coefficient (1 - d_s)
  EigBundle eig;   ///< eigendecomposition of Xhat (unitary basis)
  Scheme scheme = Scheme::gauss;
};

/// Low-rank right-hand-side Sylvester problem Z E + E R = U V^T where Z is
/// available only through its action (and optionally its inverse action).
struct SylvesterProblem {
  std::function<Vector(const Vector&)> applyZ;
  std::function<Vector(const Vector&)> applyZinv;  ///< empty unless extended Krylov
  Matrix R;  ///< k x k right coefficient
  Matrix U;  ///< N x r left factor of the right-hand side
  Matrix V;  ///< k x r right factor of the right-hand side
  double tol = 1e-10;
  int kmax = 200;
};

struct SylvesterSolution {
  Matrix E;  ///< N x k solution
  int iterations = 0;
  double residual_estimate = 0.0;
  std::optional<double> residual_true;
  int space_dim = 0;
  bool converged = false;
};

enum class SymmetryHint { general, symmetric };

/// Compressed-sparse-row operator wrapper used for mass/stiffness matrices
/// and frozen Jacobians.
struct SparseOperator {
  Eigen::Index n = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> storage;  ///< CSR
  SymmetryHint symmetry_hint = SymmetryHint::general;
  bool identity = false;  ///< structural identity pattern (skips mass solves)

  Vector apply(const Vector& x) const { return storage * x; }
};

SparseOperator make_sparse_operator(Eigen::Index n,
                                    const std::vector<Eigen::Triplet<double>>& entries,
                                    SymmetryHint hint = SymmetryHint::general);
SparseOperator make_sparse_operator(Eigen::SparseMatrix<double, Eigen::RowMajor> storage,
                                    SymmetryHint hint = SymmetryHint::general);
SparseOperator identity_operator(Eigen::Index n);

/// Linear initial value problem M y'(t) = -L y(t) + f(t).
struct LinearIVP {
  SparseOperator M;
  SparseOperator L;
  std::function<Vector(double)> f;  ///< source term at time t (may be empty: zero)
  Vector y0;
  double T = 1.0;
  int nt = 1;
};

/// Nonlinear initial value problem M u'(t) = -Theta(u, t).
struct NonlinearIVP {
  SparseOperator M;
  std::function<Vector(const Vector&, double)> theta;
  std::function<SparseOperator(const Vector&, double)> jacobian;  ///< J_Theta
  Vector y0;
  double T = 1.0;
  int nt = 1;
};

/// Per-step diagnostics.
struct SolveReport {
  int krylov_dim = 0;    ///< correction-space dimension (max over the step)
  int newton_iters = 0;  ///< 0 for linear steps
  double residual = 0.0; ///< final stage/correction residual
  struct Timings {
    double rhs_assembly = 0.0;
    double stage_solves = 0.0;
    double correction = 0.0;
    double advance = 0.0;
  } timings;
};

/// Stage solution of one step.
struct StageBlock {
  Matrix K;  ///< N x s stages (derivative stages for linear problems,
             ///< state stages for the nonlinear path)
  Matrix F;  ///< N x s source/Theta samples used in the step
  SolveReport report;
};

/// Named problem builder used by the CLI and benchmark harness.
struct ProblemSpec {
  std::string name;
  int N_space = 0;
  std::map<std::string, double> params;
  std::function<LinearIVP()> build_linear;        ///< set for linear problems
  std::function<NonlinearIVP()> build_nonlinear;  ///< set for nonlinear problems
  bool linear() const { return static_cast<bool>(build_linear); }
};

/// Benchmark grid configuration.
struct BenchConfig {
  ProblemSpec problem;
  std::vector<Scheme> schemes;
  int stage_min = 2;
  int stage_max = 2;
  int thread_min = 1;
  int thread_max = 1;
  int nt = 1;
  int repetitions = 3;
  std::string out_csv = "bench.csv";
  std::string out_json = "bench.json";
};

/// One benchmark grid cell.
struct BenchRecord {
  std::string scheme;
  int s = 0;
  int threads = 0;
  double elapsed_seconds = 0.0;  ///< median over repetitions
  double speedup = 1.0;          ///< elapsed(1 thread) / elapsed(this)
  double krylov_dim_mean = 0.0;
  double newton_iters_mean = 0.0;
  double stage_residual_max = 0.0;
  bool failed = false;
  std::string error;
};

}  // namespace irk
