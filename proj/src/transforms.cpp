#include "irk/transforms.hpp"

#include "irk/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace irk {

namespace {

double matrix_scale(const Matrix& m) {
  const double n = m.norm();
  return n > 0.0 ? n : 1.0;
}

/// Rotate a complex column by a unit phase so its largest entry is real
/// positive, then drop the (numerically zero) imaginary part and renormalize.
ComplexVector realign_null_vector(const ComplexVector& q) {
  Eigen::Index imax = 0;
  q.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = q[imax];
  ComplexVector out = q;
  if (std::abs(pivot) > 0.0) out *= std::conj(pivot) / std::abs(pivot);
  Vector re = out.real();
  re.normalize();
  return re.cast<Complex>();
}

double cond2_of(const ComplexMatrix& V) {
  Eigen::JacobiSVD<ComplexMatrix> svd(V);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

/// Reorder a general eigendecomposition so complex-conjugate pairs sit next
/// to each other (positive imaginary part first) and overwrite the partner
/// value/column/row with the exact conjugate of the representative.
void pair_conjugates(EigBundle& eb, double scale) {
  const int s = static_cast<int>(eb.values.size());
  const double tol = 1e-10 * scale;
  std::vector<int> order;
  std::vector<bool> used(s, false);
  for (int j = 0; j < s; ++j) {
    if (used[j]) continue;
    used[j] = true;
    if (std::abs(eb.values[j].imag()) <= tol) {
      order.push_back(j);
      continue;
    }
    int partner = -1;
    double best = tol;
    for (int l = j + 1; l < s; ++l) {
      if (used[l]) continue;
      const double d = std::abs(eb.values[l] - std::conj(eb.values[j]));
      if (d < best) {
        best = d;
        partner = l;
      }
    }
    if (partner < 0) {
      order.push_back(j);  // unmatched; leave untouched
      continue;
    }
    used[partner] = true;
    if (eb.values[j].imag() > 0.0) {
      order.push_back(j);
      order.push_back(partner);
    } else {
      order.push_back(partner);
      order.push_back(j);
    }
  }
  ComplexVector values(s);
  ComplexMatrix vectors(s, s), inv(s, s);
  for (int k = 0; k < s; ++k) {
    values[k] = eb.values[order[k]];
    vectors.col(k) = eb.vectors.col(order[k]);
    inv.row(k) = eb.inv_vectors.row(order[k]);
  }
  for (int k = 0; k < s; ++k) {
    if (std::abs(values[k].imag()) <= tol) {
      values[k] = Complex(values[k].real(), 0.0);
      continue;
    }
    if (k + 1 < s && std::abs(values[k + 1] - std::conj(values[k])) <= 2.0 * tol) {
      values[k + 1] = std::conj(values[k]);
      vectors.col(k + 1) = vectors.col(k).conjugate();
      inv.row(k + 1) = inv.row(k).conjugate();
      ++k;
    }
  }
  eb.values = std::move(values);
  eb.vectors = std::move(vectors);
  eb.inv_vectors = std::move(inv);
}

EigBundle eigendecompose_general(const Matrix& Mx) {
  Eigen::EigenSolver<Matrix> solver(Mx, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: dense eigensolver did not converge");
  EigBundle eb;
  eb.values = solver.eigenvalues();
  eb.vectors = solver.eigenvectors();
  eb.inv_vectors = eb.vectors.partialPivLu().solve(
      ComplexMatrix::Identity(Mx.rows(), Mx.cols()));
  pair_conjugates(eb, matrix_scale(Mx));
  eb.cond2 = cond2_of(eb.vectors);
  eb.unitary = false;
  return eb;
}

EigBundle eigendecompose_skew(const Matrix& Mx) {
  const int s = static_cast<int>(Mx.rows());
  const double scale = matrix_scale(Mx);
  if ((Mx + Mx.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("eigendecompose: matrix is not skew-symmetric");
  // i * Mx is Hermitian; its real eigenvalues mu give Mx = Q diag(-i mu) Q^H
  ComplexMatrix herm = Complex(0.0, 1.0) * Mx.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: Hermitian eigensolver did not converge");
  const Vector mu = solver.eigenvalues();  // ascending: -mu_max .. mu_max
  const ComplexMatrix& Q = solver.eigenvectors();

  EigBundle eb;
  eb.values.resize(s);
  eb.vectors.resize(s, s);
  // mu is ascending and symmetric about zero: index k < s/2 pairs with
  // s-1-k.  lambda = -i mu, so negative mu yields positive imaginary part.
  int out = 0;
  for (int k = 0; k < s / 2; ++k) {
    const double m = 0.5 * (std::abs(mu[k]) + std::abs(mu[s - 1 - k]));
    eb.values[out] = Complex(0.0, m);
    eb.vectors.col(out) = Q.col(k);
    eb.values[out + 1] = std::conj(eb.values[out]);
    eb.vectors.col(out + 1) = Q.col(k).conjugate();
    out += 2;
  }
  if (s % 2 == 1) {
    eb.values[out] = Complex(0.0, 0.0);
    eb.vectors.col(out) = realign_null_vector(Q.col(s / 2));
  }
  eb.inv_vectors = eb.vectors.adjoint();
  eb.cond2 = cond2_of(eb.vectors);
  eb.unitary = true;
  return eb;
}

}  // namespace

EigBundle eigendecompose(const Matrix& Mx, EigStructure structure) {
  if (Mx.rows() != Mx.cols()) throw std::invalid_argument("eigendecompose: square input required");
  if (Mx.rows() > 64) throw std::invalid_argument("eigendecompose: dense kernel limited to s <= 64");
  return structure == EigStructure::skew ? eigendecompose_skew(Mx) : eigendecompose_general(Mx);
}

CentroskewSplit centroskew_split(const ButcherTableau& t) {
  const SymmetryReport rep = validate_symmetry(t);
  if (!rep.symmetric) {
    std::string which = "JAJ + A = 1 b^T";
    double worst = rep.a_centro;
    if (rep.c_reflection > worst) {
      worst = rep.c_reflection;
      which = "c + Jc = 1";
    }
    if (rep.b_reflection > worst) {
      worst = rep.b_reflection;
      which = "b = Jb";
    }
    throw std::invalid_argument("centroskew_split: tableau is not symmetric, identity '" +
                                which + "' deviates by " + std::to_string(worst));
  }
  CentroskewSplit split;
  const int s = t.s;
  split.rank1_left = Vector::Constant(s, 0.5);
  split.rank1_right = t.b;
  split.S = t.A - split.rank1_left * split.rank1_right.transpose();
  split.eig = eigendecompose(split.S, EigStructure::general);
  return split;
}

Matrix w_matrix(const Vector& c) {
  const int s = static_cast<int>(c.size());
  Matrix W(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) W(i, j) = legendre_shifted(j, c[i]);
  return W;
}

void skew_correction(WTransformBundle& wb) {
  const int s = static_cast<int>(wb.Xs.rows());
  wb.C1 = Matrix::Zero(s, 2);
  wb.C2 = Matrix::Zero(s, 2);
  wb.C1(0, 0) = -0.5;
  wb.C2(0, 0) = 1.0;
  if (s == 1) {
    // the two corners coincide; the (1,1) cancellation already does the job
    wb.C2(0, 1) = 1.0;
  } else if (wb.scheme == Scheme::lobatto_iiib) {
    // zeta_{s,s-1} = 0 here, so the asymmetry sits in row s of column s-1;
    // placing the correction on row s keeps the corner pair nonzero.
    wb.C1(s - 1, 1) = -(wb.zeta[0] + wb.zeta[1]);
    wb.C2(s - 2, 1) = 1.0;
  } else {
    wb.C1(s - 2, 1) = -(wb.zeta[0] + wb.zeta[1]);
    wb.C1(s - 1, 1) = -wb.zeta[2];
    wb.C2(s - 1, 1) = 1.0;
  }
  wb.Xhat = wb.Xs + wb.C1 * wb.C2.transpose();
}

WTransformBundle w_transform(const ButcherTableau& t) {
  const int s = t.s;
  if (s < 2 && t.scheme != Scheme::gauss)
    throw std::invalid_argument("w_transform: s >= 2 required for non-Gauss schemes");
  WTransformBundle wb;
  wb.scheme = t.scheme;
  wb.W = w_matrix(t.c);
  const Matrix BW = t.b.asDiagonal() * wb.W;
  wb.Xs = wb.W.transpose() * t.b.asDiagonal() * t.A * wb.W;
  const Matrix Dfull = wb.W.transpose() * BW;
  const double offdiag = (Dfull - Matrix(Dfull.diagonal().asDiagonal())).norm();
  if (offdiag > 1e-8)
    throw std::runtime_error(
        "w_transform: W^T diag(b) W deviates from diagonal by " + std::to_string(offdiag) +
        "; nodes and weights are inconsistent");
  wb.D = Dfull.diagonal();
  wb.eD = 1.0 - wb.D[s - 1];
  if (s >= 2) {
    wb.zeta = Eigen::Vector3d(wb.Xs(s - 1, s - 2), wb.Xs(s - 2, s - 1), wb.Xs(s - 1, s - 1));
  } else {
    wb.zeta.setZero();
  }
  skew_correction(wb);
  wb.eig = eigendecompose(wb.Xhat, EigStructure::skew);
  return wb;
}

double xi_coefficient(int k) {
  if (k < 1) throw std::invalid_argument("xi_coefficient: k >= 1 required");
  return 1.0 / (2.0 * std::sqrt(4.0 * k * k - 1.0));
}

CornerReference corner_coefficients_reference(Scheme scheme, int s) {
  if (s < 2) throw std::invalid_argument("corner_coefficients_reference: s >= 2 required");
  CornerReference r;
  const double xi = xi_coefficient(s - 1);
  const double omega = (2.0 * s - 1.0) / (s - 1.0);
  switch (scheme) {
    case Scheme::gauss:
      r = {xi, -xi, 0.0, 1.0, 1};
      break;
    case Scheme::radau_ia:
    case Scheme::radau_iia:
      r = {xi, -xi, 1.0 / (4.0 * s - 2.0), 1.0, 2};
      break;
    case Scheme::lobatto_iiia:
      r = {omega * xi, 0.0, 0.0, omega, 2};
      break;
    case Scheme::lobatto_iiib:
      r = {0.0, -omega * xi, 0.0, omega, 2};
      break;
    case Scheme::lobatto_iiic:
      r = {omega * xi, -omega * xi, omega / (2.0 * s - 2.0), omega, 2};
      break;
    case Scheme::lobatto_iiic_star:
      r = {omega * xi, -omega * xi, -omega / (2.0 * s - 2.0), omega, 2};
      break;
    case Scheme::lobatto_iiid:
      r = {omega * xi, -omega * xi, 0.0, omega, 1};
      break;
  }
  return r;
}

}  // namespace irk
