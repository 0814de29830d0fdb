#pragma once

#include "irk/orthopoly.hpp"
#include "irk/types.hpp"

namespace irk {

/// Split a symmetric tableau as A = S + (1/2) 1 b^T with S centroskew and
/// attach the eigendecomposition of S.  Throws when the tableau fails the
/// symmetry identities, naming the violated one.
CentroskewSplit centroskew_split(const ButcherTableau& t);

/// Matrix W(i, j) = P_{j-1}(c_i) of shifted orthonormal Legendre values at
/// the collocation nodes.
Matrix w_matrix(const Vector& c);

/// Full change-of-basis bundle: Xs = W^T diag(b) A W, the diagonal
/// D = W^T diag(b) W, the corner coefficients, the skew-symmetrized
/// Xhat = Xs + C1 C2^T, and the unitary eigendecomposition of Xhat.
WTransformBundle w_transform(const ButcherTableau& t);

/// Fill Xhat, C1, C2 of a bundle whose Xs and zeta are already populated.
/// The corner correction cancels the (1,1) entry and the trailing-corner
/// asymmetry so Xhat is exactly skew-symmetric; the selector C2 = [e_1, e_s]
/// except for Lobatto IIIB where C2 = [e_1, e_{s-1}].
void skew_correction(WTransformBundle& wb);

enum class EigStructure { general, skew };

/// Dense complex eigendecomposition for small stage matrices.  The skew
/// structure is handled through the Hermitian matrix i*Mx, giving an exactly
/// unitary basis and a purely imaginary spectrum.  Conjugate pairs are
/// stored adjacently (positive imaginary part first) with the partner data
/// set to the exact conjugate of the representative.
EigBundle eigendecompose(const Matrix& Mx, EigStructure structure);

/// Closed-form reference values for the transformed-matrix corner entries
/// (zeta_{s,s-1}, zeta_{s-1,s}, zeta_{s,s}), the trailing diagonal entry d_s,
/// and the correction rank, per scheme family (s >= 2; s >= 3 where the
/// formulas have an s-2 denominator).
struct CornerReference {
  double zeta_ss1 = 0.0;
  double zeta_s1s = 0.0;
  double zeta_ss = 0.0;
  double d_s = 1.0;
  int correction_rank = 1;
};
CornerReference corner_coefficients_reference(Scheme scheme, int s);

/// xi_k = 1 / (2 sqrt(4 k^2 - 1)), the tridiagonal off-diagonal entries of
/// the transformed Gauss matrix.
double xi_coefficient(int k);

}  // namespace irk
