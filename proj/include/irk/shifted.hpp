#pragma once

#include "irk/types.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace irk {

/// Complex sparse LU factorizations of the stage-decoupled matrices
/// M + h lambda_j L, with one factorization per distinct shift (conjugate
/// pairs are resolved through conjugation).
struct ShiftedFactorSet {
  Eigen::Index n = 0;
  double h = 0.0;
  ComplexVector shifts;            ///< h * lambda_j per stage
  std::vector<int> rep;            ///< representative stage index per stage
  std::vector<bool> conjugated;    ///< stage solves via conj of the representative
  std::vector<int> factor_index;   ///< representative stage -> index into factors
  std::vector<std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>>> factors;
  std::vector<Eigen::SparseMatrix<Complex>> shifted_matrices;  ///< aligned with factors

  /// Solve (M + h lambda_j L) x = b for stage j with one iterative
  /// refinement pass.
  ComplexVector solve_stage(int j, const ComplexVector& b) const;
};

/// Factor every distinct shifted matrix (concurrently across shifts when
/// threads > 1) and verify each factor against a probe right-hand side.
ShiftedFactorSet factor_all(const SparseOperator& M, const SparseOperator& L, double h,
                            const EigBundle& eig, int threads = 1);

/// Solve all per-stage systems for the columns of Rhs (concurrently across
/// stages when threads > 1).  When the columns of a conjugate shift pair are
/// exact conjugates the partner solution is obtained by conjugation.
ComplexMatrix solve_all(const ShiftedFactorSet& fs, const ComplexMatrix& Rhs, int threads = 1);

}  // namespace irk
