#include "irk/sylvester.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace irk {

namespace {

/// Complex Schur factors of the (fixed) right coefficient, computed once per
/// solver run and reused by every projected solve.
struct SchurCache {
  ComplexMatrix T;  ///< upper triangular
  ComplexMatrix U;  ///< unitary
};

SchurCache make_schur_cache(const Matrix& R) {
  Eigen::ComplexSchur<ComplexMatrix> schur(R.cast<Complex>(), /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("projected_solve: Schur decomposition failed");
  return {schur.matrixT(), schur.matrixU()};
}

/// H Y + Y R = rhs via back-substitution over the Schur columns of R.
Matrix projected_solve_cached(const Matrix& H, const SchurCache& sc, const Matrix& rhs) {
  const Eigen::Index j = H.rows();
  const Eigen::Index k = sc.T.rows();
  const ComplexMatrix Hc = H.cast<Complex>();
  const ComplexMatrix C = rhs.cast<Complex>() * sc.U;
  ComplexMatrix Yt(j, k);
  for (Eigen::Index m = 0; m < k; ++m) {
    ComplexVector col = C.col(m);
    for (Eigen::Index i = 0; i < m; ++i) col -= sc.T(i, m) * Yt.col(i);
    ComplexMatrix shifted = Hc;
    shifted.diagonal().array() += sc.T(m, m);
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    const auto diag = lu.matrixLU().diagonal();
    const double dmax = diag.cwiseAbs().maxCoeff();
    const double dmin = diag.cwiseAbs().minCoeff();
    if (dmax == 0.0 || dmin < 1e-14 * dmax)
      throw std::runtime_error(
          "projected_solve: spectral clash, an eigenvalue of H is numerically equal to "
          "the negated eigenvalue " + std::to_string(-sc.T(m, m).real()) + " + " +
          std::to_string(-sc.T(m, m).imag()) + "i of R");
    Yt.col(m) = lu.solve(col);
  }
  return (Yt * sc.U.adjoint()).real();
}

void check_problem(const SylvesterProblem& p, bool need_zinv) {
  if (!p.applyZ) throw std::invalid_argument("sylvester: applyZ is required");
  if (need_zinv && !p.applyZinv)
    throw std::invalid_argument("solve_extended: applyZinv is required");
  if (p.R.rows() != p.R.cols()) throw std::invalid_argument("sylvester: R must be square");
  if (p.V.rows() != p.R.rows())
    throw std::invalid_argument("sylvester: V row count must match the dimension of R");
  if (p.U.cols() != p.V.cols())
    throw std::invalid_argument("sylvester: U and V must have the same number of columns");
  if (!(p.tol > 0.0) || p.kmax < 1)
    throw std::invalid_argument("sylvester: tol must be positive and kmax >= 1");
}

SylvesterSolution zero_solution(Eigen::Index N, Eigen::Index k) {
  SylvesterSolution sol;
  sol.E = Matrix::Zero(N, k);
  sol.converged = true;
  return sol;
}

/// Orthogonalize w against the first m columns of basis (modified
/// Gram--Schmidt plus one classical refinement pass); coefficients are
/// accumulated into coeffs[0..m-1].  Returns the remaining norm.
double orthogonalize(const Eigen::Ref<const Matrix>& basis, Eigen::Index m, Vector& w,
                     Vector* coeffs) {
  for (Eigen::Index i = 0; i < m; ++i) {
    const double hij = basis.col(i).dot(w);
    w -= hij * basis.col(i);
    if (coeffs) (*coeffs)[i] += hij;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double cij = basis.col(i).dot(w);
    w -= cij * basis.col(i);
    if (coeffs) (*coeffs)[i] += cij;
  }
  return w.norm();
}

}  // namespace

Matrix projected_solve(const Matrix& H, const Matrix& R, const Matrix& rhs) {
  if (H.rows() != H.cols() || R.rows() != R.cols())
    throw std::invalid_argument("projected_solve: H and R must be square");
  if (rhs.rows() != H.rows() || rhs.cols() != R.rows())
    throw std::invalid_argument("projected_solve: rhs must be H.rows() x R.rows()");
  return projected_solve_cached(H, make_schur_cache(R), rhs);
}

void rank_compress(const Matrix& U, const Matrix& V, double threshold, Matrix& U_out,
                   Matrix& V_out) {
  const Eigen::Index m = U.cols();
  if (m != V.cols()) throw std::invalid_argument("rank_compress: column counts differ");
  if (m == 0) {
    U_out.resize(U.rows(), 0);
    V_out.resize(V.rows(), 0);
    return;
  }
  // for wide factors (rows < m) the R factor is upper trapezoidal with only
  // rows(U) rows; request no more than that or the views run out of bounds
  const Eigen::Index ru = std::min(U.rows(), m);
  const Eigen::Index rv = std::min(V.rows(), m);
  Eigen::HouseholderQR<Matrix> qru(U);
  Eigen::HouseholderQR<Matrix> qrv(V);
  const Matrix Qu = qru.householderQ() * Matrix::Identity(U.rows(), ru);
  const Matrix Qv = qrv.householderQ() * Matrix::Identity(V.rows(), rv);
  const Matrix Ru = qru.matrixQR().topRows(ru).triangularView<Eigen::Upper>();
  const Matrix Rv = qrv.matrixQR().topRows(rv).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(Ru * Rv.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  Eigen::Index r = 0;
  if (sv.size() > 0 && sv[0] > 0.0)
    while (r < sv.size() && sv[r] > threshold * sv[0]) ++r;
  U_out = Qu * svd.matrixU().leftCols(r) * sv.head(r).asDiagonal();
  V_out = Qv * svd.matrixV().leftCols(r);
}

double sylvester_true_residual(const SylvesterProblem& p, const Matrix& E) {
  Matrix res = E * p.R - p.U * p.V.transpose();
  for (Eigen::Index j = 0; j < E.cols(); ++j) res.col(j) += p.applyZ(E.col(j));
  return res.norm();
}

SylvesterSolution solve_arnoldi(const SylvesterProblem& p, bool want_true_residual) {
  check_problem(p, /*need_zinv=*/false);
  if (p.U.cols() != 1)
    throw std::invalid_argument("solve_arnoldi: rank-1 right-hand side required");
  const Eigen::Index N = p.U.rows();
  const Eigen::Index k = p.R.rows();
  const double unorm = p.U.col(0).norm();
  const double vnorm = p.V.col(0).norm();
  if (unorm * vnorm == 0.0) return zero_solution(N, k);

  const double threshold = p.tol * unorm * vnorm;
  const Eigen::Index jmax = std::min<Eigen::Index>(p.kmax, N);
  const SchurCache sc = make_schur_cache(p.R);

  Matrix basis(N, jmax + 1);
  Matrix H = Matrix::Zero(jmax + 1, jmax);
  basis.col(0) = p.U.col(0) / unorm;

  SylvesterSolution sol;
  Matrix rhs_small;
  for (Eigen::Index j = 1; j <= jmax; ++j) {
    Vector w = p.applyZ(basis.col(j - 1));
    Vector coeffs = Vector::Zero(j);
    const double hnext = orthogonalize(basis, j, w, &coeffs);
    H.col(j - 1).head(j) = coeffs;
    H(j, j - 1) = hnext;

    rhs_small = Matrix::Zero(j, k);
    rhs_small.row(0) = unorm * p.V.col(0).transpose();
    const Matrix Y = projected_solve_cached(H.topLeftCorner(j, j), sc, rhs_small);
    const double rho = hnext * Y.row(j - 1).norm();

    sol.iterations = static_cast<int>(j);
    sol.space_dim = static_cast<int>(j);
    sol.residual_estimate = rho;
    // rho == 0 on lucky breakdown (h_{j+1,j} = 0), which exits here too
    if (rho < threshold || j == jmax) {
      sol.converged = rho < threshold;
      sol.E = basis.leftCols(j) * Y;
      break;
    }
    basis.col(j) = w / hnext;
  }
  if (want_true_residual) sol.residual_true = sylvester_true_residual(p, sol.E);
  return sol;
}

SylvesterSolution solve_extended(const SylvesterProblem& p, bool want_true_residual) {
  check_problem(p, /*need_zinv=*/true);
  if (p.U.cols() != 1)
    throw std::invalid_argument("solve_extended: rank-1 right-hand side required");
  const Eigen::Index N = p.U.rows();
  const Eigen::Index k = p.R.rows();
  const double unorm = p.U.col(0).norm();
  const double vnorm = p.V.col(0).norm();
  if (unorm * vnorm == 0.0) return zero_solution(N, k);

  const double threshold = p.tol * unorm * vnorm;
  const SchurCache sc = make_schur_cache(p.R);
  const Eigen::Index mcap = std::min<Eigen::Index>(N, 2 * p.kmax + 2);

  Matrix basis(N, mcap);
  Matrix Zbasis(N, mcap);  // applyZ of each accepted basis column
  Eigen::Index m = 0;
  // chain heads: last basis index descending from powers of Z and of Z^{-1}
  Eigen::Index z_head = -1, w_head = -1;

  const auto append = [&](Vector cand) -> Eigen::Index {
    const double n0 = cand.norm();
    if (!(n0 > 0.0) || m >= mcap) return -1;
    const double nrm = orthogonalize(basis, m, cand, nullptr);
    if (nrm <= 1e-12 * n0) return -1;
    basis.col(m) = cand / nrm;
    Zbasis.col(m) = p.applyZ(basis.col(m));
    return m++;
  };

  z_head = append(p.U.col(0));
  w_head = append(p.applyZinv(p.U.col(0)));
  if (w_head < 0) w_head = z_head;
  if (z_head < 0) throw std::runtime_error("solve_extended: zero starting vector");

  SylvesterSolution sol;
  for (int cycle = 1; cycle <= p.kmax; ++cycle) {
    const Matrix H = basis.leftCols(m).transpose() * Zbasis.leftCols(m);
    Matrix rhs_small = (basis.leftCols(m).transpose() * p.U.col(0)) * p.V.col(0).transpose();
    const Matrix Y = projected_solve_cached(H, sc, rhs_small);
    // exact Galerkin residual: (Z V - V H) Y, nonzero only through the
    // components of Z V outside the current space
    const Matrix G = Zbasis.leftCols(m) - basis.leftCols(m) * H;
    const double rho = (G * Y).norm();

    sol.iterations = cycle;
    sol.space_dim = static_cast<int>(m);
    sol.residual_estimate = rho;
    if (rho < threshold || cycle == p.kmax || m >= mcap) {
      sol.converged = rho < threshold;
      sol.E = basis.leftCols(m) * Y;
      break;
    }
    const Eigen::Index nz = append(Zbasis.col(z_head));  // Z * (Z-chain head)
    const Eigen::Index nw = append(p.applyZinv(basis.col(w_head)));
    if (nz >= 0) z_head = nz;
    if (nw >= 0) w_head = nw;
    if (nz < 0 && nw < 0) {  // invariant subspace; the solve above is exact
      sol.converged = rho < threshold;
      sol.E = basis.leftCols(m) * Y;
      break;
    }
  }
  if (want_true_residual) sol.residual_true = sylvester_true_residual(p, sol.E);
  return sol;
}

SylvesterSolution solve_block(const SylvesterProblem& p, const std::optional<Vector>& D,
                              bool want_true_residual) {
  check_problem(p, /*need_zinv=*/false);
  const Eigen::Index N = p.U.rows();
  const Eigen::Index k = p.R.rows();

  // reduce the generalized form Z E D + E R = U V^T by right-multiplying
  // with D^{-1}: R <- R D^{-1} (column scaling), V <- D^{-1} V (row scaling)
  Matrix R2 = p.R;
  Matrix V2 = p.V;
  if (D) {
    if (D->size() != k) throw std::invalid_argument("solve_block: D must have length k");
    for (Eigen::Index j = 0; j < k; ++j) {
      if ((*D)[j] == 0.0) throw std::invalid_argument("solve_block: D must be nonsingular");
      R2.col(j) /= (*D)[j];
      V2.row(j) /= (*D)[j];
    }
  }

  Matrix Uc, Vc;
  rank_compress(p.U, V2, 1e-13, Uc, Vc);
  const Eigen::Index r = Uc.cols();
  if (r == 0) return zero_solution(N, k);

  const double threshold = p.tol * Uc.norm() * Vc.norm();
  const SchurCache sc = make_schur_cache(R2);
  const Eigen::Index mcap = std::min<Eigen::Index>(N, p.kmax * r + r);

  Matrix basis(N, mcap);
  Matrix H = Matrix::Zero(mcap, mcap);
  Vector dropped = Vector::Zero(mcap);  // remainder norms discarded at the cap
  Eigen::Index m = 0;

  // first block: orthonormalized Uc; record B0 = Q^T Uc for the projected RHS
  Eigen::HouseholderQR<Matrix> qr(Uc);
  basis.leftCols(r) = qr.householderQ() * Matrix::Identity(N, r);
  const Matrix B0 = basis.leftCols(r).transpose() * Uc;
  m = r;

  Eigen::Index block_begin = 0, block_end = r;
  SylvesterSolution sol;
  for (int j = 1; j <= p.kmax; ++j) {
    // expand: apply Z to each column of the current block, orthogonalize,
    // deflate columns that fall inside the current space
    const Eigen::Index msq = block_end;  // square projected dimension
    for (Eigen::Index c = block_begin; c < block_end; ++c) {
      Vector w = p.applyZ(basis.col(c));
      const double n0 = w.norm();
      Vector coeffs = Vector::Zero(m);
      const double nrm = orthogonalize(basis, m, w, &coeffs);
      H.col(c).head(m) = coeffs;
      if (nrm > 1e-12 * n0) {
        if (m < mcap) {
          basis.col(m) = w / nrm;
          H(m, c) = nrm;
          ++m;
        } else {
          dropped[c] = nrm;  // cap reached: charge the lost component to the residual
        }
      }
    }

    Matrix rhs_small = Matrix::Zero(msq, k);
    rhs_small.topRows(r) = B0 * Vc.transpose();
    const Matrix Y = projected_solve_cached(H.topLeftCorner(msq, msq), sc, rhs_small);
    double rho = (H.block(msq, 0, m - msq, msq) * Y).norm();
    for (Eigen::Index c = 0; c < msq; ++c)
      if (dropped[c] > 0.0) rho += dropped[c] * Y.row(c).norm();

    sol.iterations = j;
    sol.space_dim = static_cast<int>(msq);
    sol.residual_estimate = rho;
    // m == msq means no direction survived expansion: the space is invariant
    // (complete deflation) or the cap is saturated, so the solve cannot improve
    if (rho < threshold || m == msq || j == p.kmax) {
      sol.converged = rho < threshold;
      sol.E = basis.leftCols(msq) * Y;
      break;
    }
    block_begin = msq;
    block_end = m;
  }
  if (want_true_residual) {
    SylvesterProblem reduced = p;
    reduced.R = R2;
    reduced.V = V2;
    sol.residual_true = sylvester_true_residual(reduced, sol.E);
  }
  return sol;
}

}  // namespace irk
