#include "irk/tableau.hpp"

#include "irk/orthopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace irk {

namespace {

/// Bracketed Newton refinement with bisection safeguard.  `g` returns the
/// function value and writes the derivative; [lo, hi] must bracket a sign
/// change.
double refine_root(const std::function<double(double, double&)>& g, double lo, double hi) {
  double d = 0.0;
  double flo = g(lo, d);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double v = g(x, d);
    if (v == 0.0 || hi - lo < 1e-16) break;
    if ((v > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = v;
    } else {
      hi = x;
    }
    double xn = (d != 0.0) ? x - v / d : x;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-16) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

/// All roots of g inside (lo, hi) found by a dense sign-change scan followed
/// by safeguarded Newton.
std::vector<double> scan_roots(const std::function<double(double, double&)>& g, double lo,
                               double hi, int samples) {
  std::vector<double> roots;
  double d = 0.0;
  double prev_x = lo;
  double prev_v = g(lo, d);
  if (prev_v == 0.0) roots.push_back(prev_x);
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = g(x, d);
    if (v == 0.0) {
      // exact hit on a grid point: record it once and skip the surrounding
      // sign-change pairing
      roots.push_back(x);
    } else if (prev_v != 0.0 && (prev_v > 0.0) != (v > 0.0)) {
      roots.push_back(refine_root(g, prev_x, x));
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

/// Interpolatory quadrature weights b_j = int_0^1 l_j for the Lagrange basis
/// of the nodes c, via a Gauss rule exact for the degree-(s-1) integrands.
Vector interpolatory_weights(const Vector& c) {
  const int s = static_cast<int>(c.size());
  Vector b(s);
  for (int j = 0; j < s; ++j) {
    b[j] = gauss_integrate(
        [&](double x) {
          double p = 1.0;
          for (int m = 0; m < s; ++m)
            if (m != j) p *= (x - c[m]) / (c[j] - c[m]);
          return p;
        },
        0.0, 1.0, s);
  }
  return b;
}

/// Matrix W(i, k) = P~_k(c_i) of shifted orthonormal Legendre values.
Matrix legendre_vandermonde(const Vector& c) {
  const int s = static_cast<int>(c.size());
  Matrix W(s, s);
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < s; ++k) W(i, k) = legendre_shifted(k, c[i]);
  return W;
}

/// Coefficient matrix from the moment conditions
/// sum_i b_i c_i^{k-1} a_{i,j} = (b_j / k)(1 - c_j^k), k = 1..s,
/// assembled and solved in the orthonormal Legendre basis.
Matrix matrix_from_weight_moments(const Vector& c, const Vector& b) {
  const int s = static_cast<int>(c.size());
  const Matrix W = legendre_vandermonde(c);
  const Matrix lhs = W.transpose() * b.asDiagonal();
  Matrix T(s, s);
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j) {
      const double tail = (k == 0 ? 1.0 : 0.0) - legendre_shifted_integral(k, c[j]);
      T(k, j) = b[j] * tail;
    }
  return lhs.partialPivLu().solve(T);
}

/// Coefficient matrix from the row collocation conditions
/// sum_j a_{i,j} c_j^{k-1} = c_i^k / k, k = 1..s-1, closed per row by pinning
/// column `pinned_col` to `pinned_value`.
Matrix matrix_from_row_conditions(const Vector& c, int pinned_col, double pinned_value) {
  const int s = static_cast<int>(c.size());
  Matrix lhs = Matrix::Zero(s, s);
  lhs(0, pinned_col) = 1.0;
  for (int k = 1; k < s; ++k)
    for (int j = 0; j < s; ++j) lhs(k, j) = legendre_shifted(k - 1, c[j]);
  const auto lu = lhs.partialPivLu();
  Matrix A(s, s);
  Vector rhs(s);
  for (int i = 0; i < s; ++i) {
    rhs[0] = pinned_value;
    for (int k = 1; k < s; ++k) rhs[k] = legendre_shifted_integral(k - 1, c[i]);
    A.row(i) = lu.solve(rhs).transpose();
  }
  return A;
}

void check_nodes(const ButcherTableau& t) {
  const int s = t.s;
  for (int i = 0; i + 1 < s; ++i)
    if (!(t.c[i] < t.c[i + 1]))
      throw std::runtime_error("build_tableau: nodes not strictly increasing");
  if (std::abs(t.b.sum() - 1.0) > 1e-12)
    throw std::runtime_error("build_tableau: weights do not sum to 1");
  if (t.scheme == Scheme::gauss) {
    if (t.c[0] <= 0.0 || t.c[s - 1] >= 1.0)
      throw std::runtime_error("build_tableau: Gauss nodes must be interior");
  }
  if (t.scheme == Scheme::lobatto_iiia || t.scheme == Scheme::lobatto_iiib ||
      t.scheme == Scheme::lobatto_iiic || t.scheme == Scheme::lobatto_iiic_star) {
    if (std::abs(t.c[0]) > 1e-14 || std::abs(t.c[s - 1] - 1.0) > 1e-14)
      throw std::runtime_error("build_tableau: Lobatto nodes must include 0 and 1");
  }
}

}  // namespace

void gauss_nodes_weights(int s, Vector& c, Vector& b) {
  if (s < 1) throw std::invalid_argument("gauss_nodes_weights: s must be >= 1");
  gauss_rule_unit(s, c, b);
}

void radau_iia_nodes_weights(int s, Vector& c, Vector& b) {
  if (s < 2) throw std::invalid_argument("radau_iia_nodes_weights: s must be >= 2");
  // interior roots of P_s - P_{s-1} on (-1, 1), plus the fixed endpoint u = 1
  const auto g = [s](double u, double& der) {
    double v1, d1, v0, d0;
    legendre_pair(s, u, v1, d1);
    legendre_pair(s - 1, u, v0, d0);
    der = d1 - d0;
    return v1 - v0;
  };
  std::vector<double> roots = scan_roots(g, -1.0 + 1e-12, 1.0 - 1e-9, 200 * s);
  if (static_cast<int>(roots.size()) != s - 1)
    throw std::runtime_error("radau_iia_nodes_weights: root scan failed");
  c.resize(s);
  for (int i = 0; i < s - 1; ++i) c[i] = 0.5 * (1.0 + roots[i]);
  c[s - 1] = 1.0;
  b = interpolatory_weights(c);
}

void radau_ia_nodes_weights(int s, Vector& c, Vector& b) {
  if (s < 2) throw std::invalid_argument("radau_ia_nodes_weights: s must be >= 2");
  Vector c2, b2;
  radau_iia_nodes_weights(s, c2, b2);
  c.resize(s);
  for (int i = 0; i < s; ++i) c[i] = 1.0 - c2[s - 1 - i];
  c[0] = 0.0;
  b = interpolatory_weights(c);
}

void lobatto_nodes_weights(int s, Vector& c, Vector& b) {
  if (s < 2) throw std::invalid_argument("lobatto_nodes_weights: s must be >= 2");
  c.resize(s);
  b.resize(s);
  c[0] = 0.0;
  c[s - 1] = 1.0;
  if (s > 2) {
    // interior nodes are the roots of P'_{s-1}
    const auto g = [s](double u, double& der) {
      double v, d;
      legendre_pair(s - 1, u, v, d);
      // P''_n = (2 t P'_n - n (n+1) P_n) / (1 - t^2)
      der = (2.0 * u * d - (s - 1.0) * s * v) / (1.0 - u * u);
      return d;
    };
    std::vector<double> roots = scan_roots(g, -1.0 + 1e-9, 1.0 - 1e-9, 200 * s);
    if (static_cast<int>(roots.size()) != s - 2)
      throw std::runtime_error("lobatto_nodes_weights: root scan failed");
    for (int i = 0; i < s - 2; ++i) c[i + 1] = 0.5 * (1.0 + roots[i]);
  }
  for (int i = 0; i < s; ++i) {
    const double p = legendre(s - 1, 2.0 * c[i] - 1.0);
    b[i] = 1.0 / (s * (s - 1.0) * p * p);
  }
}

Matrix collocation_matrix(const Vector& c) {
  const int s = static_cast<int>(c.size());
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (c[i] == c[j]) throw std::invalid_argument("collocation_matrix: duplicate nodes");
  Matrix A(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      A(i, j) = gauss_integrate(
          [&](double x) {
            double p = 1.0;
            for (int m = 0; m < s; ++m)
              if (m != j) p *= (x - c[m]) / (c[j] - c[m]);
            return p;
          },
          0.0, c[i], s);
    }
  return A;
}

ButcherTableau build_tableau(Scheme scheme, int s) {
  ButcherTableau t;
  t.s = s;
  t.scheme = scheme;
  switch (scheme) {
    case Scheme::gauss:
      gauss_nodes_weights(s, t.c, t.b);
      t.A = collocation_matrix(t.c);
      break;
    case Scheme::radau_iia:
      radau_iia_nodes_weights(s, t.c, t.b);
      t.A = collocation_matrix(t.c);
      break;
    case Scheme::radau_ia:
      radau_ia_nodes_weights(s, t.c, t.b);
      t.A = matrix_from_weight_moments(t.c, t.b);
      break;
    case Scheme::lobatto_iiia:
      lobatto_nodes_weights(s, t.c, t.b);
      t.A = collocation_matrix(t.c);
      break;
    case Scheme::lobatto_iiib:
      lobatto_nodes_weights(s, t.c, t.b);
      t.A = matrix_from_weight_moments(t.c, t.b);
      break;
    case Scheme::lobatto_iiic:
      lobatto_nodes_weights(s, t.c, t.b);
      t.A = matrix_from_row_conditions(t.c, 0, t.b[0]);
      break;
    case Scheme::lobatto_iiic_star:
      lobatto_nodes_weights(s, t.c, t.b);
      t.A = matrix_from_row_conditions(t.c, s - 1, 0.0);
      break;
    case Scheme::lobatto_iiid:
      throw std::invalid_argument(
          "build_tableau: lobatto_iiid coefficients are not constructed here; "
          "supply A, b, c externally to the transform layer");
  }
  check_nodes(t);
  return t;
}

SymmetryReport validate_symmetry(const ButcherTableau& t) {
  const int s = t.s;
  SymmetryReport rep;
  for (int i = 0; i < s; ++i) {
    rep.c_reflection = std::max(rep.c_reflection, std::abs(t.c[i] + t.c[s - 1 - i] - 1.0));
    rep.b_reflection = std::max(rep.b_reflection, std::abs(t.b[i] - t.b[s - 1 - i]));
    for (int j = 0; j < s; ++j) {
      const double v = t.A(s - 1 - i, s - 1 - j) + t.A(i, j) - t.b[j];
      rep.a_centro = std::max(rep.a_centro, std::abs(v));
    }
  }
  rep.symmetric = rep.max_deviation() <= 1e-10;
  return rep;
}

OrderReport validate_order_conditions(const ButcherTableau& t, int p) {
  if (p < 1) throw std::invalid_argument("validate_order_conditions: p must be >= 1");
  const int s = t.s;
  OrderReport rep;
  rep.p_requested = p;
  for (int k = 1; k <= p; ++k) {
    double moment = 0.0;
    for (int i = 0; i < s; ++i) moment += t.b[i] * std::pow(t.c[i], k - 1);
    rep.b_residuals.push_back(std::abs(moment - 1.0 / k));
  }
  for (int k = 1; k <= p / 2; ++k) {
    double worst = 0.0;
    for (int i = 0; i < s; ++i) {
      double row = 0.0;
      for (int j = 0; j < s; ++j) row += t.A(i, j) * std::pow(t.c[j], k - 1);
      worst = std::max(worst, std::abs(row - std::pow(t.c[i], k) / k));
    }
    rep.c_residuals.push_back(worst);
  }
  auto consecutive = [&](const std::vector<double>& r) {
    int n = 0;
    for (double v : r) {
      if (v > rep.tol) break;
      ++n;
    }
    return n;
  };
  rep.b_order = consecutive(rep.b_residuals);
  rep.c_order = consecutive(rep.c_residuals);
  return rep;
}

}  // namespace irk
