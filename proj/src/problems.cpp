#include "irk/problems.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace irk {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

LinearIVP heat_1d(int N, double T, int nt) {
  if (N < 3) throw std::invalid_argument("heat_1d: N >= 3 required");
  const double dx = 1.0 / (N + 1);
  const double w = 1.0 / (dx * dx);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * N);
  for (int i = 0; i < N; ++i) {
    trips.emplace_back(i, i, 2.0 * w);
    if (i > 0) trips.emplace_back(i, i - 1, -w);
    if (i < N - 1) trips.emplace_back(i, i + 1, -w);
  }

  LinearIVP p;
  p.M = identity_operator(N);
  p.L = make_sparse_operator(N, trips, SymmetryHint::symmetric);
  Vector base(N);
  for (int i = 0; i < N; ++i) base[i] = 1.5 - (i + 1) * dx;
  base[0] += 2.0 * w;      // Dirichlet value 2 folded at the first node
  base[N - 1] += 2.0 * w;  // and at the last node
  p.f = [base](double t) { return Vector(base.array() + 0.5 * std::sin(two_pi * t)); };
  p.y0 = Vector::Zero(N);
  p.T = T;
  p.nt = nt;
  return p;
}

LinearIVP heat_2d(int N, double T, int nt) {
  if (N < 3) throw std::invalid_argument("heat_2d: N >= 3 per axis required");
  const double dx = 1.0 / (N + 1);
  const double w = 1.0 / (dx * dx);
  const Eigen::Index n = static_cast<Eigen::Index>(N) * N;
  const auto idx = [N](int i, int j) { return static_cast<Eigen::Index>(j) * N + i; };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * n);
  Vector base(n);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const Eigen::Index k = idx(i, j);
      trips.emplace_back(k, k, 4.0 * w);
      int missing = 0;
      if (i > 0) trips.emplace_back(k, idx(i - 1, j), -w); else ++missing;
      if (i < N - 1) trips.emplace_back(k, idx(i + 1, j), -w); else ++missing;
      if (j > 0) trips.emplace_back(k, idx(i, j - 1), -w); else ++missing;
      if (j < N - 1) trips.emplace_back(k, idx(i, j + 1), -w); else ++missing;
      const double x = (i + 1) * dx;
      const double y = (j + 1) * dx;
      base[k] = (1.5 - x) * (1.0 - y) + missing * 2.0 * w;
    }
  }

  LinearIVP p;
  p.M = identity_operator(n);
  p.L = make_sparse_operator(n, trips, SymmetryHint::symmetric);
  p.f = [base](double t) { return Vector(base.array() + 0.5 * std::sin(two_pi * t)); };
  p.y0 = Vector::Zero(n);
  p.T = T;
  p.nt = nt;
  return p;
}

NonlinearIVP wave_nonlinear(int Nx, double beta, double T, int nt, bool corrected_boundary) {
  if (Nx < 3) throw std::invalid_argument("wave_nonlinear: Nx >= 3 required");
  if (beta < 0.0) throw std::invalid_argument("wave_nonlinear: beta >= 0 required");
  const double dx = 1.0 / (Nx - 1);
  const double w = 1.0 / (dx * dx);

  std::vector<Eigen::Triplet<double>> btrips;
  btrips.reserve(3 * Nx);
  if (corrected_boundary) {
    btrips.emplace_back(0, 0, -2.0 * w);
    btrips.emplace_back(0, 1, w);
    btrips.emplace_back(Nx - 1, Nx - 2, w);
    btrips.emplace_back(Nx - 1, Nx - 1, -2.0 * w);
  } else {
    // boundary rows of the reference benchmark, kept verbatim
    btrips.emplace_back(0, 0, w);
    btrips.emplace_back(Nx - 1, Nx - 1, w);
  }
  for (int i = 1; i < Nx - 1; ++i) {
    btrips.emplace_back(i, i - 1, w);
    btrips.emplace_back(i, i, -2.0 * w);
    btrips.emplace_back(i, i + 1, w);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> B(Nx, Nx);
  B.setFromTriplets(btrips.begin(), btrips.end());
  B.makeCompressed();

  // fixed part of J_Theta = -[[0, I], [B + 2 beta diag(u), 0]]
  std::vector<Eigen::Triplet<double>> jfixed;
  jfixed.reserve(B.nonZeros() + Nx);
  for (int i = 0; i < Nx; ++i) jfixed.emplace_back(i, Nx + i, -1.0);
  for (int r = 0; r < Nx; ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(B, r); it; ++it)
      jfixed.emplace_back(Nx + r, it.col(), -it.value());

  NonlinearIVP p;
  p.M = identity_operator(2 * Nx);
  p.theta = [B, beta, Nx](const Vector& state, double) {
    Vector out(2 * Nx);
    const Vector u = state.head(Nx);
    out.head(Nx) = -state.tail(Nx);
    out.tail(Nx) = -(B * u) - beta * u.array().square().matrix();
    return out;
  };
  p.jacobian = [jfixed, beta, Nx](const Vector& state, double) {
    std::vector<Eigen::Triplet<double>> trips = jfixed;
    for (int i = 0; i < Nx; ++i) trips.emplace_back(Nx + i, i, -2.0 * beta * state[i]);
    return make_sparse_operator(2 * Nx, trips, SymmetryHint::general);
  };
  p.y0 = Vector::Zero(2 * Nx);
  for (int i = 0; i < Nx; ++i) {
    const double x = -0.5 + i * dx;
    p.y0[i] = std::exp(-100.0 * x * x);
  }
  p.T = T;
  p.nt = nt;
  return p;
}

LinearIVP scalar_decay(double T, int nt) {
  LinearIVP p;
  p.M = identity_operator(1);
  p.L = identity_operator(1);
  p.y0 = Vector::Ones(1);
  p.T = T;
  p.nt = nt;
  return p;
}

void save_operator_market(const SparseOperator& op, const std::string& path) {
  const Eigen::SparseMatrix<double> col = op.storage;
  if (!Eigen::saveMarket(col, path))
    throw std::runtime_error("save_operator_market: cannot write " + path);
}

SparseOperator load_operator_market(const std::string& path, SymmetryHint hint) {
  Eigen::SparseMatrix<double> col;
  if (!Eigen::loadMarket(col, path))
    throw std::runtime_error("load_operator_market: cannot read " + path);
  return make_sparse_operator(Eigen::SparseMatrix<double, Eigen::RowMajor>(col), hint);
}

ProblemSpec make_problem(const std::string& name,
                         const std::map<std::string, double>& overrides) {
  ProblemSpec spec;
  spec.name = name;
  if (name == "heat1d") {
    const int N = static_cast<int>(param_or(overrides, "N", 64));
    const double T = param_or(overrides, "T", 1.0);
    const int nt = static_cast<int>(param_or(overrides, "nt", 10));
    spec.N_space = N;
    spec.params = {{"N", double(N)}, {"T", T}, {"nt", double(nt)}};
    spec.build_linear = [N, T, nt]() { return heat_1d(N, T, nt); };
  } else if (name == "heat2d") {
    const int N = static_cast<int>(param_or(overrides, "N", 16));
    const double T = param_or(overrides, "T", 1.0);
    const int nt = static_cast<int>(param_or(overrides, "nt", 10));
    spec.N_space = N * N;
    spec.params = {{"N", double(N)}, {"T", T}, {"nt", double(nt)}};
    spec.build_linear = [N, T, nt]() { return heat_2d(N, T, nt); };
  } else if (name == "wave") {
    const int Nx = static_cast<int>(param_or(overrides, "N", 128));
    const double beta = param_or(overrides, "beta", 10.0);
    const int nt = static_cast<int>(param_or(overrides, "nt", 100));
    const double T = param_or(overrides, "T", nt / 1270.0);
    const bool corrected = param_or(overrides, "corrected", 0.0) != 0.0;
    spec.N_space = Nx;
    spec.params = {{"N", double(Nx)}, {"beta", beta}, {"T", T}, {"nt", double(nt)},
                   {"corrected", corrected ? 1.0 : 0.0}};
    spec.build_nonlinear = [Nx, beta, T, nt, corrected]() {
      return wave_nonlinear(Nx, beta, T, nt, corrected);
    };
  } else if (name == "scalar") {
    const double T = param_or(overrides, "T", 1.0);
    const int nt = static_cast<int>(param_or(overrides, "nt", 10));
    spec.N_space = 1;
    spec.params = {{"T", T}, {"nt", double(nt)}};
    spec.build_linear = [T, nt]() { return scalar_decay(T, nt); };
  } else {
    throw std::invalid_argument("make_problem: unknown problem name '" + name + "'");
  }
  return spec;
}

}  // namespace irk
