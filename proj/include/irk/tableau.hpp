#pragma once

#include "irk/types.hpp"

namespace irk {

/// s-point Gauss--Legendre nodes and weights on [0, 1] (s >= 1).
void gauss_nodes_weights(int s, Vector& c, Vector& b);

/// Right-Radau nodes (c_s = 1) and interpolatory weights on [0, 1] (s >= 2).
void radau_iia_nodes_weights(int s, Vector& c, Vector& b);

/// Left-Radau nodes (c_1 = 0) and interpolatory weights on [0, 1] (s >= 2);
/// nodes are the reflection 1 - c of the right-Radau nodes.
void radau_ia_nodes_weights(int s, Vector& c, Vector& b);

/// Lobatto nodes (c_1 = 0, c_s = 1) and weights on [0, 1] (s >= 2).
void lobatto_nodes_weights(int s, Vector& c, Vector& b);

/// Collocation coefficients a_{i,j} = int_0^{c_i} l_j(tau) dtau from the
/// Lagrange basis of distinct nodes c.
Matrix collocation_matrix(const Vector& c);

/// Construct a fully populated tableau for the given family.  Lobatto IIID
/// has no node-based construction here and is rejected; supply its
/// coefficients externally when calling the transform layer.
ButcherTableau build_tableau(Scheme scheme, int s);

/// Deviations of the time-reflection identities for the tableau.
SymmetryReport validate_symmetry(const ButcherTableau& t);

/// Residuals of the B(k), k = 1..p, and C(k), k = 1..floor(p/2),
/// simplifying conditions.
OrderReport validate_order_conditions(const ButcherTableau& t, int p);

}  // namespace irk
