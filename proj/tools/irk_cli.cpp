#include "irk/bench.hpp"
#include "irk/problems.hpp"
#include "irk/steppers.hpp"
#include "irk/sylvester.hpp"
#include "irk/tableau.hpp"
#include "irk/transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/SparseLU>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

namespace {

using nlohmann::ordered_json;

void print_matrix(const char* name, const irk::Matrix& m) {
  std::printf("%s =\n", name);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) std::printf(" % .15e", m(i, j));
    std::printf("\n");
  }
}

int cmd_tableau(const std::string& scheme_name, int s, bool check, bool as_json) {
  const irk::ButcherTableau t = irk::build_tableau(irk::scheme_from_string(scheme_name), s);
  if (as_json) {
    ordered_json j;
    j["scheme"] = scheme_name;
    j["s"] = s;
    j["c"] = std::vector<double>(t.c.data(), t.c.data() + t.s);
    j["b"] = std::vector<double>(t.b.data(), t.b.data() + t.s);
    std::vector<std::vector<double>> A(t.s);
    for (int i = 0; i < t.s; ++i)
      A[i] = std::vector<double>(t.A.row(i).begin(), t.A.row(i).end());
    j["A"] = A;
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("%s, s = %d\n", scheme_name.c_str(), s);
    print_matrix("c", t.c.transpose());
    print_matrix("b", t.b.transpose());
    print_matrix("A", t.A);
  }
  if (check) {
    const irk::SymmetryReport sym = irk::validate_symmetry(t);
    std::printf("symmetry: %s (max deviation %.3e)\n", sym.symmetric ? "yes" : "no",
                sym.max_deviation());
    const irk::OrderReport ord = irk::validate_order_conditions(t, 2 * s);
    std::printf("quadrature order B(k): %d, stage order C(k): %d\n", ord.b_order, ord.c_order);
  }
  return 0;
}

int cmd_cond(const std::string& scheme_name, int s_min, int s_max, const std::string& out) {
  const auto rows =
      irk::run_conditioning_sweep(irk::scheme_from_string(scheme_name), s_max, s_min);
  std::printf("%4s %22s %22s\n", "s", "cond(A eigvecs)", "cond(perturbed eigvecs)");
  for (const auto& r : rows) std::printf("%4d %22.6e %22.6e\n", r.s, r.cond_A, r.cond_perturbed);
  if (!out.empty()) {
    irk::write_conditioning_csv(rows, out);
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int cmd_sylvester(const std::string& demo, const std::string& variant, double tol, int kmax) {
  irk::SylvesterProblem p;
  p.tol = tol;
  p.kmax = kmax;
  std::mt19937 rng(20240915);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Eigen::SparseMatrix<double> Lcol;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  irk::Matrix Zdense;
  if (demo == "heat") {
    const int N = 256;
    const irk::LinearIVP ivp = irk::heat_1d(N, 1.0, 20);
    const double h = ivp.T / ivp.nt;
    Lcol = ivp.L.storage;
    lu = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>(Lcol);
    const Eigen::SparseMatrix<double, Eigen::RowMajor> Lrow = ivp.L.storage;
    p.applyZ = [lu, h](const irk::Vector& x) { return irk::Vector(lu->solve(x) / h); };
    p.applyZinv = [Lrow, h](const irk::Vector& x) { return irk::Vector(h * (Lrow * x)); };
    const irk::ButcherTableau t = irk::build_tableau(irk::Scheme::gauss, 4);
    p.R = t.A.transpose();
    p.U.resize(N, 1);
    for (int i = 0; i < N; ++i) p.U(i, 0) = unit(rng);
    p.V = irk::Vector::Ones(t.s);
  } else if (demo == "random") {
    const int N = 100, k = 5;
    irk::Matrix Q =
        Eigen::HouseholderQR<irk::Matrix>(
            irk::Matrix::NullaryExpr(N, N, [&](Eigen::Index, Eigen::Index) { return unit(rng); }))
            .householderQ();
    irk::Vector d(N);
    for (int i = 0; i < N; ++i) d[i] = 0.5 + 4.5 * (0.5 + 0.5 * unit(rng));
    Zdense = Q * d.asDiagonal() * Q.transpose();
    p.applyZ = [&Zdense](const irk::Vector& x) { return irk::Vector(Zdense * x); };
    irk::Matrix Zinv = Q * d.cwiseInverse().asDiagonal() * Q.transpose();
    p.applyZinv = [Zinv](const irk::Vector& x) { return irk::Vector(Zinv * x); };
    p.R = irk::Matrix::NullaryExpr(k, k, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
    p.R += (0.3 + p.R.cwiseAbs().rowwise().sum().maxCoeff()) * irk::Matrix::Identity(k, k);
    p.U = irk::Matrix::NullaryExpr(N, 2, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
    p.V = irk::Matrix::NullaryExpr(k, 2, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
  } else {
    std::fprintf(stderr, "unknown demo '%s' (use heat or random)\n", demo.c_str());
    return 1;
  }

  irk::SylvesterSolution sol;
  if (variant == "poly") {
    if (p.U.cols() != 1) {
      irk::Matrix Uc, Vc;
      irk::rank_compress(p.U, p.V, 1e-13, Uc, Vc);
      std::fprintf(stderr, "poly variant needs a rank-1 right-hand side; keeping only the "
                           "leading singular direction\n");
      p.U = Uc.col(0);
      p.V = Vc.col(0);
    }
    sol = irk::solve_arnoldi(p, true);
  } else if (variant == "extended") {
    if (p.U.cols() != 1) {
      irk::Matrix Uc, Vc;
      irk::rank_compress(p.U, p.V, 1e-13, Uc, Vc);
      p.U = Uc.col(0);
      p.V = Vc.col(0);
    }
    sol = irk::solve_extended(p, true);
  } else if (variant == "block") {
    sol = irk::solve_block(p, std::nullopt, true);
  } else {
    std::fprintf(stderr, "unknown variant '%s' (use poly, extended, or block)\n",
                 variant.c_str());
    return 1;
  }
  std::printf("demo=%s variant=%s\n", demo.c_str(), variant.c_str());
  std::printf("iterations        : %d\n", sol.iterations);
  std::printf("space dimension   : %d\n", sol.space_dim);
  std::printf("converged         : %s\n", sol.converged ? "yes" : "no");
  std::printf("residual estimate : %.6e\n", sol.residual_estimate);
  if (sol.residual_true) std::printf("residual true     : %.6e\n", *sol.residual_true);
  return sol.converged ? 0 : 1;
}

ordered_json report_json(const irk::SolveReport& r) {
  ordered_json j;
  j["krylov_dim"] = r.krylov_dim;
  j["newton_iters"] = r.newton_iters;
  j["residual"] = r.residual;
  j["timings"] = {{"rhs_assembly", r.timings.rhs_assembly},
                  {"stage_solves", r.timings.stage_solves},
                  {"correction", r.timings.correction},
                  {"advance", r.timings.advance}};
  return j;
}

int cmd_solve(const std::string& problem, const std::string& scheme_name, int s, int N, int nt,
              double T, double beta, bool corrected, int threads, bool verify,
              const std::string& variant, const std::string& out,
              const std::string& export_prefix) {
  std::map<std::string, double> params;
  if (N > 0) params["N"] = N;
  if (nt > 0) params["nt"] = nt;
  if (T > 0) params["T"] = T;
  if (beta >= 0) params["beta"] = beta;
  params["corrected"] = corrected ? 1.0 : 0.0;
  const irk::ProblemSpec spec = irk::make_problem(problem, params);

  irk::IntegrateOptions opt;
  opt.threads = threads;
  opt.verify = verify;
  if (variant == "poly") opt.correction = irk::CorrectionVariant::poly;
  else if (variant == "extended") opt.correction = irk::CorrectionVariant::extended;
  else if (variant == "block") opt.correction = irk::CorrectionVariant::block;

  const irk::Scheme scheme = irk::scheme_from_string(scheme_name);
  irk::IntegrateResult res;
  if (spec.linear()) {
    const irk::LinearIVP p = spec.build_linear();
    if (!export_prefix.empty()) {
      irk::save_operator_market(p.M, export_prefix + "_M.mtx");
      irk::save_operator_market(p.L, export_prefix + "_L.mtx");
    }
    res = irk::integrate(p, scheme, s, opt);
  } else {
    const irk::NonlinearIVP p = spec.build_nonlinear();
    if (!export_prefix.empty()) {
      irk::save_operator_market(p.M, export_prefix + "_M.mtx");
      irk::save_operator_market(p.jacobian(p.y0, 0.0), export_prefix + "_J0.mtx");
    }
    res = irk::integrate(p, scheme, s, opt);
  }

  double krylov_mean = 0.0, newton_mean = 0.0, res_max = 0.0;
  for (const auto& r : res.reports) {
    krylov_mean += r.krylov_dim;
    newton_mean += r.newton_iters;
    res_max = std::max(res_max, r.residual);
  }
  if (!res.reports.empty()) {
    krylov_mean /= res.reports.size();
    newton_mean /= res.reports.size();
  }

  std::printf("problem=%s scheme=%s s=%d steps=%zu threads=%d\n", problem.c_str(),
              scheme_name.c_str(), s, res.reports.size(), threads);
  std::printf("terminal state    : norm %.12e, min %.6e, max %.6e\n", res.y.norm(),
              res.y.minCoeff(), res.y.maxCoeff());
  std::printf("checksum (sum)    : %.15e\n", res.y.sum());
  std::printf("krylov dim mean   : %.2f\n", krylov_mean);
  std::printf("newton iters mean : %.2f\n", newton_mean);
  std::printf("max %s : %.3e\n", verify ? "stage residual   " : "residual estimate",
              res_max);

  if (!out.empty()) {
    ordered_json j;
    j["problem"] = problem;
    j["params"] = spec.params;
    j["scheme"] = scheme_name;
    j["s"] = s;
    j["threads"] = threads;
    j["verified_residuals"] = verify;
    j["terminal"] = {{"norm", res.y.norm()},
                     {"min", res.y.minCoeff()},
                     {"max", res.y.maxCoeff()},
                     {"checksum", res.y.sum()}};
    ordered_json steps = ordered_json::array();
    for (const auto& r : res.reports) steps.push_back(report_json(r));
    j["steps"] = steps;
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << j.dump(2) << '\n';
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int cmd_convergence(const std::string& problem, const std::string& scheme_name, int s,
                    std::vector<int> nt_list, const std::string& out) {
  if (nt_list.empty()) nt_list = {4, 8, 16, 32, 64};
  const irk::ProblemSpec spec = irk::make_problem(problem);
  const irk::ConvergenceStudy study =
      irk::run_convergence_study(spec, irk::scheme_from_string(scheme_name), s, nt_list);
  std::printf("%8s %14s %14s %6s\n", "nt", "h", "error", "fit");
  for (const auto& r : study.rows)
    std::printf("%8d %14.6e %14.6e %6s\n", r.nt, r.h, r.error, r.in_fit ? "yes" : "no");
  std::printf("observed order: %.3f\n", study.slope);
  if (!out.empty()) {
    irk::write_convergence_csv(study, out);
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  std::ifstream f(config_path);
  if (!f) {
    std::fprintf(stderr, "cannot open config %s\n", config_path.c_str());
    return 1;
  }
  const nlohmann::json j = nlohmann::json::parse(f);

  irk::BenchConfig cfg;
  std::map<std::string, double> params;
  if (j.contains("params"))
    for (const auto& [key, value] : j["params"].items()) params[key] = value.get<double>();
  cfg.problem = irk::make_problem(j.at("problem").get<std::string>(), params);
  for (const auto& name : j.at("schemes"))
    cfg.schemes.push_back(irk::scheme_from_string(name.get<std::string>()));
  cfg.stage_min = j.value("stage_min", 2);
  cfg.stage_max = j.value("stage_max", cfg.stage_min);
  cfg.thread_min = j.value("thread_min", 1);
  cfg.thread_max = j.value("thread_max", 1);
  cfg.nt = j.value("nt", 0);
  cfg.repetitions = j.value("repetitions", 3);
  cfg.out_csv = j.value("out_csv", std::string("bench.csv"));
  cfg.out_json = j.value("out_json", std::string("bench.json"));

  const std::string prefix = out_dir.empty() ? "" : out_dir + "/";
  const irk::BenchResult result = irk::run_bench_grid(cfg);
  irk::emit_report(result, cfg, prefix + cfg.out_csv, prefix + cfg.out_json);
  std::printf("%zu records -> %s, %s\n", result.records.size(),
              (prefix + cfg.out_csv).c_str(), (prefix + cfg.out_json).c_str());
  for (const auto& r : result.records)
    if (r.failed)
      std::fprintf(stderr, "cell %s s=%d threads=%d failed: %s\n", r.scheme.c_str(), r.s,
                   r.threads, r.error.c_str());
  return result.all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stage-parallel implicit Runge-Kutta integrator"};
  app.require_subcommand(1);

  std::string scheme = "gauss", problem = "heat1d", variant = "automatic";
  std::string out, config, out_dir, demo = "heat", export_prefix;
  int s = 3, s_min = 1, s_max = 16, N = 0, nt = 0, threads = 1, kmax = 200;
  double tol = 1e-10, T = 0.0, beta = -1.0;
  bool check = false, as_json = false, verify = false, corrected = false;
  std::vector<int> nt_list;

  auto* c_tab = app.add_subcommand("tableau", "Print Runge-Kutta coefficients");
  c_tab->add_option("--scheme", scheme, "scheme name")->capture_default_str();
  c_tab->add_option("--stages", s, "stage count")->capture_default_str();
  c_tab->add_flag("--check", check, "validate symmetry and order conditions");
  c_tab->add_flag("--json", as_json, "emit JSON");

  auto* c_cond = app.add_subcommand("cond", "Eigenvector conditioning sweep");
  c_cond->add_option("--scheme", scheme)->capture_default_str();
  c_cond->add_option("--min-stages", s_min)->capture_default_str();
  c_cond->add_option("--max-stages", s_max)->capture_default_str();
  c_cond->add_option("--out", out, "CSV output path");

  auto* c_syl = app.add_subcommand("sylvester", "Low-rank Sylvester solver demo");
  c_syl->add_option("--demo", demo, "heat or random")->capture_default_str();
  c_syl->add_option("--variant", variant, "poly, extended, or block")
      ->default_val("extended");
  c_syl->add_option("--tol", tol)->capture_default_str();
  c_syl->add_option("--kmax", kmax)->capture_default_str();

  auto* c_solve = app.add_subcommand("solve", "Integrate a model problem");
  c_solve->add_option("--problem", problem, "heat1d, heat2d, wave, or scalar")
      ->capture_default_str();
  c_solve->add_option("--scheme", scheme)->capture_default_str();
  c_solve->add_option("--stages", s)->capture_default_str();
  c_solve->add_option("--N", N, "spatial resolution (0 = problem default)");
  c_solve->add_option("--nt", nt, "step count (0 = problem default)");
  c_solve->add_option("--T", T, "horizon (0 = problem default)");
  c_solve->add_option("--beta", beta, "wave nonlinearity strength (-1 = default)");
  c_solve->add_flag("--corrected", corrected, "standard Dirichlet rows in the wave operator");
  c_solve->add_option("--threads", threads, "stage-parallel worker count")
      ->envname("IRK_THREADS");
  c_solve->add_flag("--verify", verify, "recompute true stage residuals per step");
  c_solve->add_option("--variant", variant, "correction solver (automatic default)");
  c_solve->add_option("--out", out, "JSON run report path");
  c_solve->add_option("--export-ops", export_prefix, "Matrix Market export prefix");

  auto* c_conv = app.add_subcommand("convergence", "Observed-order study");
  c_conv->add_option("--problem", problem)->default_val("scalar");
  c_conv->add_option("--scheme", scheme)->capture_default_str();
  c_conv->add_option("--stages", s)->capture_default_str();
  c_conv->add_option("--nt-list", nt_list, "step counts")->delimiter(',');
  c_conv->add_option("--out", out, "CSV output path");

  auto* c_bench = app.add_subcommand("bench", "Stage x thread benchmark grid");
  c_bench->add_option("--config", config, "JSON config")->required();
  c_bench->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_tab->parsed()) return cmd_tableau(scheme, s, check, as_json);
    if (c_cond->parsed()) return cmd_cond(scheme, s_min, s_max, out);
    if (c_syl->parsed()) return cmd_sylvester(demo, variant, tol, kmax);
    if (c_solve->parsed())
      return cmd_solve(problem, scheme, s, N, nt, T, beta, corrected, threads, verify, variant,
                       out, export_prefix);
    if (c_conv->parsed()) return cmd_convergence(problem, scheme, s, nt_list, out);
    if (c_bench->parsed()) return cmd_bench(config, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
