#include <doctest.h>

#include "irk/tableau.hpp"

#include <cmath>

using namespace irk;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("gauss tableaux match the closed forms for s = 1, 2, 3") {
  const double r3 = std::sqrt(3.0);
  const double r15 = std::sqrt(15.0);

  {
    const ButcherTableau t = build_tableau(Scheme::gauss, 1);
    CHECK(t.s == 1);
    CHECK(std::abs(t.c[0] - 0.5) <= 1e-14);
    CHECK(std::abs(t.b[0] - 1.0) <= 1e-14);
    CHECK(std::abs(t.A(0, 0) - 0.5) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::gauss, 2);
    Vector c(2), b(2);
    c << 0.5 - r3 / 6.0, 0.5 + r3 / 6.0;
    b << 0.5, 0.5;
    Matrix A(2, 2);
    A << 0.25, 0.25 - r3 / 6.0, 0.25 + r3 / 6.0, 0.25;
    CHECK(max_abs_diff(t.c, c) <= 1e-14);
    CHECK(max_abs_diff(t.b, b) <= 1e-14);
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::gauss, 3);
    Vector c(3), b(3);
    c << 0.5 - r15 / 10.0, 0.5, 0.5 + r15 / 10.0;
    b << 5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0;
    Matrix A(3, 3);
    A << 5.0 / 36.0, 2.0 / 9.0 - r15 / 15.0, 5.0 / 36.0 - r15 / 30.0,  //
        5.0 / 36.0 + r15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r15 / 24.0,  //
        5.0 / 36.0 + r15 / 30.0, 2.0 / 9.0 + r15 / 15.0, 5.0 / 36.0;
    CHECK(max_abs_diff(t.c, c) <= 1e-13);
    CHECK(max_abs_diff(t.b, b) <= 1e-13);
    CHECK(max_abs_diff(t.A, A) <= 1e-13);
  }
}

TEST_CASE("radau tableaux match the closed forms") {
  {
    const ButcherTableau t = build_tableau(Scheme::radau_iia, 2);
    Vector c(2), b(2);
    c << 1.0 / 3.0, 1.0;
    b << 0.75, 0.25;
    Matrix A(2, 2);
    A << 5.0 / 12.0, -1.0 / 12.0, 0.75, 0.25;
    CHECK(max_abs_diff(t.c, c) <= 1e-14);
    CHECK(max_abs_diff(t.b, b) <= 1e-14);
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const double r6 = std::sqrt(6.0);
    const ButcherTableau t = build_tableau(Scheme::radau_iia, 3);
    Vector c(3), b(3);
    c << (4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0;
    b << (16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0;
    Matrix A(3, 3);
    A << (88.0 - 7.0 * r6) / 360.0, (296.0 - 169.0 * r6) / 1800.0, (-2.0 + 3.0 * r6) / 225.0,
        (296.0 + 169.0 * r6) / 1800.0, (88.0 + 7.0 * r6) / 360.0, (-2.0 - 3.0 * r6) / 225.0,
        (16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0;
    CHECK(max_abs_diff(t.c, c) <= 1e-13);
    CHECK(max_abs_diff(t.b, b) <= 1e-13);
    CHECK(max_abs_diff(t.A, A) <= 1e-13);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::radau_ia, 2);
    Vector c(2), b(2);
    c << 0.0, 2.0 / 3.0;
    b << 0.25, 0.75;
    Matrix A(2, 2);
    A << 0.25, -0.25, 0.25, 5.0 / 12.0;
    CHECK(max_abs_diff(t.c, c) <= 1e-14);
    CHECK(max_abs_diff(t.b, b) <= 1e-14);
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
}

TEST_CASE("lobatto tableaux match the closed forms") {
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiia, 2);
    Matrix A(2, 2);
    A << 0.0, 0.0, 0.5, 0.5;  // trapezoidal rule
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiia, 3);
    Vector c(3), b(3);
    c << 0.0, 0.5, 1.0;
    b << 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    Matrix A(3, 3);
    A << 0.0, 0.0, 0.0, 5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    CHECK(max_abs_diff(t.c, c) <= 1e-14);
    CHECK(max_abs_diff(t.b, b) <= 1e-14);
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiib, 3);
    Matrix A(3, 3);
    A << 1.0 / 6.0, -1.0 / 6.0, 0.0, 1.0 / 6.0, 1.0 / 3.0, 0.0, 1.0 / 6.0, 5.0 / 6.0, 0.0;
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiic, 2);
    Matrix A(2, 2);
    A << 0.5, -0.5, 0.5, 0.5;
    CHECK(max_abs_diff(t.A, A) <= 1e-14);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiic, 3);
    Matrix A(3, 3);
    A << 1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 5.0 / 12.0, -1.0 / 12.0, 1.0 / 6.0,
        2.0 / 3.0, 1.0 / 6.0;
    CHECK(max_abs_diff(t.A, A) <= 1e-13);
  }
  {
    const ButcherTableau t = build_tableau(Scheme::lobatto_iiic_star, 3);
    Matrix A(3, 3);
    A << 0.0, 0.0, 0.0, 0.25, 0.25, 0.0, 0.0, 1.0, 0.0;
    CHECK(max_abs_diff(t.A, A) <= 1e-13);
  }
}

TEST_CASE("lobatto iiid has no node-based construction") {
  CHECK_THROWS_AS(build_tableau(Scheme::lobatto_iiid, 3), std::invalid_argument);
}

TEST_CASE("time-reflection symmetry holds exactly where expected") {
  for (const Scheme scheme : {Scheme::gauss, Scheme::lobatto_iiia, Scheme::lobatto_iiib}) {
    for (int s = (scheme == Scheme::gauss ? 1 : 2); s <= 8; ++s) {
      const SymmetryReport rep = validate_symmetry(build_tableau(scheme, s));
      INFO(to_string(scheme), " s=", s, " deviation ", rep.max_deviation());
      CHECK(rep.symmetric);
      CHECK(rep.max_deviation() <= 1e-12);
    }
  }
  for (const Scheme scheme :
       {Scheme::radau_ia, Scheme::radau_iia, Scheme::lobatto_iiic, Scheme::lobatto_iiic_star}) {
    const SymmetryReport rep = validate_symmetry(build_tableau(scheme, 4));
    CHECK_FALSE(rep.symmetric);
  }
}

TEST_CASE("radau nodes reflect onto each other, not onto themselves") {
  const ButcherTableau t = build_tableau(Scheme::radau_iia, 2);
  // c_i + c_{s+1-i} = 4/3 for both i: the scheme misses the symmetry identity
  CHECK(std::abs(t.c[0] + t.c[1] - 4.0 / 3.0) <= 1e-14);
  const ButcherTableau ia = build_tableau(Scheme::radau_ia, 3);
  const ButcherTableau iia = build_tableau(Scheme::radau_iia, 3);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(ia.c[i] - (1.0 - iia.c[2 - i])) <= 1e-13);
}

TEST_CASE("quadrature and stage order match the classical values") {
  for (int s = 1; s <= 6; ++s) {
    const OrderReport rep = validate_order_conditions(build_tableau(Scheme::gauss, s), 2 * s);
    CHECK(rep.b_order == 2 * s);
    CHECK(rep.c_order >= s);
  }
  for (int s = 2; s <= 6; ++s) {
    const OrderReport rep =
        validate_order_conditions(build_tableau(Scheme::radau_iia, s), 2 * s);
    CHECK(rep.b_order == 2 * s - 1);
    CHECK(rep.c_order >= s);
  }
  for (int s = 2; s <= 6; ++s) {
    const OrderReport rep =
        validate_order_conditions(build_tableau(Scheme::lobatto_iiia, s), 2 * s);
    CHECK(rep.b_order == 2 * s - 2);
    CHECK(rep.c_order >= s);
  }
  {
    // IIIB satisfies only C(s - 2); IIIC reaches C(s - 1)
    const OrderReport iiib =
        validate_order_conditions(build_tableau(Scheme::lobatto_iiib, 4), 8);
    CHECK(iiib.b_order == 6);
    CHECK(iiib.c_order == 2);
    const OrderReport iiic =
        validate_order_conditions(build_tableau(Scheme::lobatto_iiic, 4), 8);
    CHECK(iiic.b_order == 6);
    CHECK(iiic.c_order == 3);
  }
}

TEST_CASE("collocation matrix reproduces the gauss tableau") {
  const ButcherTableau t = build_tableau(Scheme::gauss, 5);
  const Matrix A = collocation_matrix(t.c);
  CHECK(max_abs_diff(A, t.A) <= 1e-13);
}

TEST_CASE("scheme names round-trip") {
  for (const Scheme scheme :
       {Scheme::gauss, Scheme::radau_ia, Scheme::radau_iia, Scheme::lobatto_iiia,
        Scheme::lobatto_iiib, Scheme::lobatto_iiic, Scheme::lobatto_iiic_star,
        Scheme::lobatto_iiid}) {
    CHECK(scheme_from_string(to_string(scheme)) == scheme);
  }
  CHECK_THROWS_AS(scheme_from_string("midpointish"), std::invalid_argument);
}

TEST_CASE("invalid stage counts are rejected") {
  CHECK_THROWS_AS(build_tableau(Scheme::gauss, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_tableau(Scheme::radau_iia, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_tableau(Scheme::lobatto_iiic, 1), std::invalid_argument);
}
