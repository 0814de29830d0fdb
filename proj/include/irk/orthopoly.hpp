#pragma once

#include "irk/types.hpp"

namespace irk {

/// Legendre polynomial P_k(t) on [-1, 1] (standard normalization P_k(1) = 1)
/// via the three-term recurrence.
double legendre(int k, double t);

/// Derivative P_k'(t) on (-1, 1); uses the endpoint limit formula at t = +-1.
double legendre_derivative(int k, double t);

/// Value and derivative in one recurrence pass.
void legendre_pair(int k, double t, double& value, double& derivative);

/// Shifted Legendre polynomial on [0, 1], scaled to be orthonormal:
/// P~_l(x) = sqrt(2l+1) * P_l(2x - 1), so that int_0^1 P~_p P~_q = delta_pq.
double legendre_shifted(int l, double x);

/// Antiderivative int_0^x P~_l(tau) dtau of the shifted orthonormal
/// Legendre polynomial, evaluated in closed form.
double legendre_shifted_integral(int l, double x);

/// s-point Gauss--Legendre nodes and weights on [0, 1]
/// (weights sum to 1; exact for polynomials of degree 2s-1).
void gauss_rule_unit(int s, Vector& nodes, Vector& weights);

/// Integral int_a^b of a callable via an s-point Gauss rule scaled to [a, b].
double gauss_integrate(const std::function<double(double)>& fn, double a, double b, int s);

}  // namespace irk
