#include "irk/orthopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace irk {

void legendre_pair(int k, double t, double& value, double& derivative) {
  if (k == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  double pm1 = 1.0;  // P_0
  double p = t;      // P_1
  for (int n = 1; n < k; ++n) {
    const double pp1 = ((2.0 * n + 1.0) * t * p - n * pm1) / (n + 1.0);
    pm1 = p;
    p = pp1;
  }
  value = p;
  const double denom = t * t - 1.0;
  if (std::abs(denom) > 1e-12) {
    derivative = k * (t * p - pm1) / denom;
  } else {
    // limit at the endpoints: P_k'(+-1) = (+-1)^{k-1} k (k+1) / 2
    const double sign = (t > 0.0) ? 1.0 : ((k % 2 == 0) ? -1.0 : 1.0);
    derivative = sign * 0.5 * k * (k + 1.0);
  }
}

double legendre(int k, double t) {
  double v, d;
  legendre_pair(k, t, v, d);
  return v;
}

double legendre_derivative(int k, double t) {
  double v, d;
  legendre_pair(k, t, v, d);
  return d;
}

double legendre_shifted(int l, double x) {
  return std::sqrt(2.0 * l + 1.0) * legendre(l, 2.0 * x - 1.0);
}

double legendre_shifted_integral(int l, double x) {
  if (l == 0) return x;
  // int P_l on [-1,1] has antiderivative (P_{l+1} - P_{l-1})/(2l+1); the
  // boundary terms at u = -1 cancel because P_{l+1} and P_{l-1} share parity.
  const double u = 2.0 * x - 1.0;
  return std::sqrt(2.0 * l + 1.0) * 0.5 * (legendre(l + 1, u) - legendre(l - 1, u)) /
         (2.0 * l + 1.0);
}

void gauss_rule_unit(int s, Vector& nodes, Vector& weights) {
  if (s < 1) throw std::invalid_argument("gauss_rule_unit: s must be >= 1");
  nodes.resize(s);
  weights.resize(s);
  for (int i = 1; i <= s; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_s, then Newton.
    double t = std::cos(M_PI * (i - 0.25) / (s + 0.5));
    double v = 0.0, d = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(s, t, v, d);
      const double step = v / d;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    legendre_pair(s, t, v, d);
    const double w = 2.0 / ((1.0 - t * t) * d * d);
    // map from [-1,1] to [0,1]; guesses descend in t so ascend in index here
    nodes[s - i] = 0.5 * (1.0 + t);
    weights[s - i] = 0.5 * w;
  }
}

double gauss_integrate(const std::function<double(double)>& fn, double a, double b, int s) {
  Vector x, w;
  gauss_rule_unit(s, x, w);
  const double len = b - a;
  double acc = 0.0;
  for (int i = 0; i < s; ++i) acc += w[i] * fn(a + len * x[i]);
  return len * acc;
}

}  // namespace irk
