#include "irk/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace irk {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::gauss: return "gauss";
    case Scheme::radau_ia: return "radau_ia";
    case Scheme::radau_iia: return "radau_iia";
    case Scheme::lobatto_iiia: return "lobatto_iiia";
    case Scheme::lobatto_iiib: return "lobatto_iiib";
    case Scheme::lobatto_iiic: return "lobatto_iiic";
    case Scheme::lobatto_iiic_star: return "lobatto_iiic_star";
    case Scheme::lobatto_iiid: return "lobatto_iiid";
  }
  throw std::logic_error("to_string: unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
  static const std::map<std::string, Scheme> table = {
      {"gauss", Scheme::gauss},
      {"radau_ia", Scheme::radau_ia},
      {"radau_iia", Scheme::radau_iia},
      {"lobatto_iiia", Scheme::lobatto_iiia},
      {"lobatto_iiib", Scheme::lobatto_iiib},
      {"lobatto_iiic", Scheme::lobatto_iiic},
      {"lobatto_iiic_star", Scheme::lobatto_iiic_star},
      {"lobatto_iiid", Scheme::lobatto_iiid},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown scheme name: " + name);
  return it->second;
}

bool is_symmetric_scheme(Scheme scheme) {
  switch (scheme) {
    case Scheme::gauss:
    case Scheme::lobatto_iiia:
    case Scheme::lobatto_iiib:
    case Scheme::lobatto_iiid:
      return true;
    default:
      return false;
  }
}

double SymmetryReport::max_deviation() const {
  return std::max({c_reflection, b_reflection, a_centro});
}

SparseOperator make_sparse_operator(Eigen::SparseMatrix<double, Eigen::RowMajor> storage,
                                    SymmetryHint hint) {
  if (storage.rows() != storage.cols())
    throw std::invalid_argument("make_sparse_operator: matrix must be square");
  SparseOperator op;
  op.n = storage.rows();
  op.storage = std::move(storage);
  op.storage.makeCompressed();
  op.symmetry_hint = hint;
  for (Eigen::Index i = 0; i < op.n; ++i) {
    if (op.storage.outerIndexPtr()[i + 1] == op.storage.outerIndexPtr()[i])
      throw std::invalid_argument("make_sparse_operator: empty row " + std::to_string(i));
  }
  // structural identity: exactly one stored entry per row, on the diagonal,
  // with value exactly 1
  op.identity = (op.storage.nonZeros() == op.n);
  if (op.identity) {
    for (Eigen::Index i = 0; i < op.n && op.identity; ++i) {
      const Eigen::Index k = op.storage.outerIndexPtr()[i];
      op.identity = (op.storage.innerIndexPtr()[k] == i) && (op.storage.valuePtr()[k] == 1.0);
    }
  }
  return op;
}

SparseOperator make_sparse_operator(Eigen::Index n,
                                    const std::vector<Eigen::Triplet<double>>& entries,
                                    SymmetryHint hint) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> storage(n, n);
  storage.setFromTriplets(entries.begin(), entries.end());
  return make_sparse_operator(std::move(storage), hint);
}

SparseOperator identity_operator(Eigen::Index n) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
  return make_sparse_operator(n, trips, SymmetryHint::symmetric);
}

}  // namespace irk
