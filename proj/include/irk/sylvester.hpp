#pragma once

#include "irk/types.hpp"

namespace irk {

/// Galerkin projection onto the polynomial Krylov space K_j(Z, u) for
/// Z E + E R = u v^T with a rank-1 right-hand side (U, V single columns).
/// Modified Gram--Schmidt with one re-orthogonalization pass per step; exits
/// when the residual estimate rho_j = |h_{j+1,j}| ||e_j^T Y_j||_F drops
/// below tol * ||u|| * ||v||, on lucky breakdown, or at kmax.
SylvesterSolution solve_arnoldi(const SylvesterProblem& p, bool want_true_residual = false);

/// Same contract over the extended space spanned by powers of Z and Z^{-1}
/// (two basis vectors per iteration); requires p.applyZinv.
SylvesterSolution solve_extended(const SylvesterProblem& p, bool want_true_residual = false);

/// Block-Krylov variant for right-hand-side ranks up to 3; accepts the
/// generalized left form Z E D + E R = U V^T through the optional diagonal D
/// (reduced internally to standard form via D^{-1}).  The right-hand side is
/// rank-compressed first; a rank-0 result returns E = 0 immediately.
SylvesterSolution solve_block(const SylvesterProblem& p,
                              const std::optional<Vector>& D = std::nullopt,
                              bool want_true_residual = false);

/// Compress a dyadic product U V^T to numerical rank: thin QR of both
/// factors and an SVD of the small core, truncating singular values below
/// threshold * sigma_max.
void rank_compress(const Matrix& U, const Matrix& V, double threshold, Matrix& U_out,
                   Matrix& V_out);

/// Small dense Sylvester solve H Y + Y R = rhs via a complex Schur
/// decomposition of R and column back-substitution.  Throws when the spectra
/// of H and -R intersect.
Matrix projected_solve(const Matrix& H, const Matrix& R, const Matrix& rhs);

/// Frobenius norm of Z E + E R - U V^T evaluated through the operator.
double sylvester_true_residual(const SylvesterProblem& p, const Matrix& E);

}  // namespace irk
