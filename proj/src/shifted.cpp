#include "irk/shifted.hpp"

#include "irk/thread_pool.hpp"

#include <cmath>
#include <stdexcept>

namespace irk {

namespace {

using ComplexSparse = Eigen::SparseMatrix<Complex>;

ComplexVector refined_solve(const Eigen::SparseLU<ComplexSparse>& lu, const ComplexSparse& S,
                            const ComplexVector& b) {
  ComplexVector x = lu.solve(b);
  const ComplexVector r = b - S * x;
  x += lu.solve(r);
  return x;
}

}  // namespace

ComplexVector ShiftedFactorSet::solve_stage(int j, const ComplexVector& b) const {
  const int r = rep[j];
  const int f = factor_index[r];
  if (!conjugated[j]) return refined_solve(*factors[f], shifted_matrices[f], b);
  // (M + conj(s) L) x = b  <=>  x = conj((M + s L)^{-1} conj(b)) for real M, L
  return refined_solve(*factors[f], shifted_matrices[f], b.conjugate()).conjugate();
}

ShiftedFactorSet factor_all(const SparseOperator& M, const SparseOperator& L, double h,
                            const EigBundle& eig, int threads) {
  if (M.n != L.n) throw std::invalid_argument("factor_all: operator dimensions differ");
  if (!(h > 0.0)) throw std::invalid_argument("factor_all: h must be positive");
  const int s = static_cast<int>(eig.values.size());

  ShiftedFactorSet fs;
  fs.n = M.n;
  fs.h = h;
  fs.shifts = h * eig.values;
  fs.rep.assign(s, -1);
  fs.conjugated.assign(s, false);
  fs.factor_index.assign(s, -1);

  // deduplicate: exact duplicates share a factor, exact conjugates share the
  // partner's factor through conjugation
  std::vector<int> reps;
  for (int j = 0; j < s; ++j) {
    if (fs.rep[j] >= 0) continue;
    fs.rep[j] = j;
    fs.factor_index[j] = static_cast<int>(reps.size());
    reps.push_back(j);
    for (int l = j + 1; l < s; ++l) {
      if (fs.rep[l] >= 0) continue;
      if (fs.shifts[l] == fs.shifts[j]) {
        fs.rep[l] = j;
      } else if (fs.shifts[j].imag() != 0.0 && fs.shifts[l] == std::conj(fs.shifts[j])) {
        fs.rep[l] = j;
        fs.conjugated[l] = true;
      }
    }
  }

  const ComplexSparse Mc = M.storage.cast<Complex>();
  const ComplexSparse Lc = L.storage.cast<Complex>();
  fs.factors.resize(reps.size());
  fs.shifted_matrices.resize(reps.size());

  parallel_for(static_cast<int>(reps.size()), threads, [&](int i) {
    const int j = reps[i];
    ComplexSparse S = Mc + fs.shifts[j] * Lc;
    S.makeCompressed();
    auto lu = std::make_unique<Eigen::SparseLU<ComplexSparse>>();
    lu->compute(S);
    if (lu->info() != Eigen::Success)
      throw std::runtime_error("factor_all: singular shifted matrix at stage index " +
                               std::to_string(j));
    // probe the factorization quality on a deterministic right-hand side
    ComplexVector probe(fs.n);
    for (Eigen::Index t = 0; t < fs.n; ++t)
      probe[t] = Complex(std::sin(1.0 + static_cast<double>(t)),
                         std::cos(0.5 + 2.0 * static_cast<double>(t)));
    const ComplexVector x = refined_solve(*lu, S, probe);
    const double rel = (probe - S * x).norm() / probe.norm();
    if (rel > 1e-10)
      throw std::runtime_error("factor_all: factorization probe residual " +
                               std::to_string(rel) + " at stage index " + std::to_string(j));
    fs.shifted_matrices[i] = std::move(S);
    fs.factors[i] = std::move(lu);
  });
  return fs;
}

ComplexMatrix solve_all(const ShiftedFactorSet& fs, const ComplexMatrix& Rhs, int threads) {
  const int s = static_cast<int>(fs.shifts.size());
  if (Rhs.cols() != s)
    throw std::invalid_argument("solve_all: right-hand side column count must equal the "
                                "number of shifts");
  if (Rhs.rows() != fs.n) throw std::invalid_argument("solve_all: dimension mismatch");

  ComplexMatrix Z(fs.n, s);
  std::vector<int> reps;
  for (int j = 0; j < s; ++j)
    if (fs.rep[j] == j) reps.push_back(j);

  // one task per representative: solve it, then fill its dependents (using
  // the conjugate shortcut when the data allows), so results never depend on
  // the thread count
  parallel_for(static_cast<int>(reps.size()), threads, [&](int i) {
    const int j = reps[i];
    Z.col(j) = fs.solve_stage(j, Rhs.col(j));
    for (int l = 0; l < s; ++l) {
      if (l == j || fs.rep[l] != j) continue;
      if (fs.conjugated[l] &&
          (Rhs.col(l).array() == Rhs.col(j).conjugate().array()).all()) {
        Z.col(l) = Z.col(j).conjugate();
      } else if (!fs.conjugated[l] && (Rhs.col(l).array() == Rhs.col(j).array()).all()) {
        Z.col(l) = Z.col(j);
      } else {
        Z.col(l) = fs.solve_stage(l, Rhs.col(l));
      }
    }
  });
  return Z;
}

}  // namespace irk
