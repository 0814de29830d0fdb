#pragma once

#include "irk/types.hpp"

#include <map>
#include <string>

/// Finite-difference model problems used by the tests, the CLI, and the
/// benchmark harness.  All builders are pure: rebuilding with the same
/// parameters yields bitwise-identical operators.
namespace irk {

/// 1D heat equation y_t = y_xx + f on the unit interval with Dirichlet value
/// 2 at both ends, N interior unknowns, source f(x, t) = (1.5 - x)
/// + (1/2) sin(2 pi t), zero initial state.  Mass matrix is the identity.
LinearIVP heat_1d(int N, double T, int nt);

/// 2D heat equation on the unit square with the 5-point Laplacian, N interior
/// unknowns per axis (N^2 total), Dirichlet value 2 on the whole boundary,
/// source f(x, y, t) = (1.5 - x)(1 - y) + (1/2) sin(2 pi t).
LinearIVP heat_2d(int N, double T, int nt);

/// Nonlinear wave equation u_tt = u_xx + beta u^2 on x in (-1/2, 1/2) written
/// as a first-order system for [u; v].  The difference operator B keeps the
/// unusual boundary rows [1, 0, ...]/dx^2 and [..., 0, 1]/dx^2 of the
/// reference benchmark; `corrected_boundary` switches them to the standard
/// Dirichlet rows [-2, 1, ...]/dx^2.  Initial pulse u0 = exp(-100 x^2), v0 = 0.
NonlinearIVP wave_nonlinear(int Nx, double beta, double T, int nt,
                            bool corrected_boundary = false);

/// Scalar test equation y' = -y, y(0) = 1 (used for order studies).
LinearIVP scalar_decay(double T, int nt);

/// Matrix Market export/import of operators for external verification.
void save_operator_market(const SparseOperator& op, const std::string& path);
SparseOperator load_operator_market(const std::string& path,
                                    SymmetryHint hint = SymmetryHint::general);

/// Named problem factory for the CLI and the benchmark harness.  Known names:
/// "heat1d" (params N, T, nt), "heat2d" (N per axis, T, nt), "wave" (N, beta,
/// T, nt, corrected), "scalar" (T, nt).  Unspecified params take defaults.
ProblemSpec make_problem(const std::string& name,
                         const std::map<std::string, double>& overrides = {});

}  // namespace irk
