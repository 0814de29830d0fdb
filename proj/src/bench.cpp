#include "irk/bench.hpp"

#include "irk/tableau.hpp"
#include "irk/transforms.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace irk {

namespace {

using clock_type = std::chrono::steady_clock;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string full_precision(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// Commas and newlines would break the single-line CSV records.
std::string sanitize_csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

IntegrateResult run_problem(const ProblemSpec& spec, Scheme scheme, int s, int nt_override,
                            const IntegrateOptions& opt) {
  if (spec.linear()) {
    LinearIVP p = spec.build_linear();
    if (nt_override >= 1) p.nt = nt_override;
    return integrate(p, scheme, s, opt);
  }
  NonlinearIVP p = spec.build_nonlinear();
  if (nt_override >= 1) p.nt = nt_override;
  return integrate(p, scheme, s, opt);
}

}  // namespace

std::vector<ConditioningRow> run_conditioning_sweep(Scheme scheme, int s_max, int s_min) {
  if (s_max > 30) throw std::invalid_argument("run_conditioning_sweep: s_max <= 30 required");
  if (scheme != Scheme::gauss && s_min < 2) s_min = 2;
  std::vector<ConditioningRow> rows;
  for (int s = s_min; s <= s_max; ++s) {
    const ButcherTableau t = build_tableau(scheme, s);
    ConditioningRow row;
    row.s = s;
    row.cond_A = eigendecompose(t.A, EigStructure::general).cond2;
    if (is_symmetric_scheme(scheme))
      row.cond_perturbed = centroskew_split(t).eig.cond2;
    else
      row.cond_perturbed = w_transform(t).eig.cond2;
    rows.push_back(row);
  }
  return rows;
}

void write_conditioning_csv(const std::vector<ConditioningRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_conditioning_csv: cannot open " + path);
  out << "s,cond_A,cond_perturbed\n";
  for (const auto& r : rows)
    out << r.s << ',' << full_precision(r.cond_A) << ',' << full_precision(r.cond_perturbed)
        << '\n';
}

ConvergenceStudy run_convergence_study(const ProblemSpec& spec, Scheme scheme, int s,
                                       const std::vector<int>& nt_list,
                                       const IntegrateOptions& opt) {
  if (nt_list.empty())
    throw std::invalid_argument("run_convergence_study: nt_list must be nonempty");
  const double T = spec.linear() ? spec.build_linear().T : spec.build_nonlinear().T;

  Vector y_ref;
  if (spec.name == "scalar") {
    y_ref = spec.build_linear().y0 * std::exp(-T);
  } else {
    const int nt_ref = 8 * *std::max_element(nt_list.begin(), nt_list.end());
    y_ref = run_problem(spec, Scheme::gauss, 6, nt_ref, opt).y;
  }

  ConvergenceStudy study;
  for (const int nt : nt_list) {
    ConvergenceRow row;
    row.nt = nt;
    row.h = T / nt;
    row.error = (run_problem(spec, scheme, s, nt, opt).y - y_ref).norm();
    row.in_fit = row.error >= 1e-13;
    study.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& row : study.rows) {
    if (!row.in_fit) continue;
    const double x = std::log(row.h);
    const double y = std::log(row.error);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m >= 2) study.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return study;
}

void write_convergence_csv(const ConvergenceStudy& study, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_convergence_csv: cannot open " + path);
  out << "nt,h,error,in_fit\n";
  for (const auto& r : study.rows)
    out << r.nt << ',' << full_precision(r.h) << ',' << full_precision(r.error) << ','
        << (r.in_fit ? 1 : 0) << '\n';
  out << "# slope," << full_precision(study.slope) << '\n';
}

BenchResult run_bench_grid(const BenchConfig& cfg) {
  if (cfg.repetitions < 1)
    throw std::invalid_argument("run_bench_grid: repetitions >= 1 required");
  if (cfg.stage_min > cfg.stage_max || cfg.thread_min > cfg.thread_max)
    throw std::invalid_argument("run_bench_grid: empty stage or thread range");

  BenchResult out;
  for (const Scheme scheme : cfg.schemes) {
    for (int s = cfg.stage_min; s <= cfg.stage_max; ++s) {
      for (int threads = cfg.thread_min; threads <= cfg.thread_max; ++threads) {
        BenchRecord rec;
        rec.scheme = to_string(scheme);
        rec.s = s;
        rec.threads = threads;
        try {
          IntegrateOptions opt;
          opt.threads = threads;
          run_problem(cfg.problem, scheme, s, cfg.nt, opt);  // warm-up
          std::vector<double> times(cfg.repetitions);
          IntegrateResult last;
          for (int rep = 0; rep < cfg.repetitions; ++rep) {
            const auto t0 = clock_type::now();
            last = run_problem(cfg.problem, scheme, s, cfg.nt, opt);
            times[rep] = std::chrono::duration<double>(clock_type::now() - t0).count();
          }
          rec.elapsed_seconds = median_of(times);
          for (const auto& rep : last.reports) {
            rec.krylov_dim_mean += rep.krylov_dim;
            rec.newton_iters_mean += rep.newton_iters;
            rec.stage_residual_max = std::max(rec.stage_residual_max, rep.residual);
          }
          if (!last.reports.empty()) {
            rec.krylov_dim_mean /= last.reports.size();
            rec.newton_iters_mean /= last.reports.size();
          }
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.error = e.what();
          out.all_ok = false;
        }
        out.records.push_back(rec);
      }
    }
  }

  // speedup against the lowest thread count of the same (scheme, s)
  std::map<std::pair<std::string, int>, double> baseline;
  for (const auto& rec : out.records) {
    if (rec.failed) continue;
    const auto key = std::make_pair(rec.scheme, rec.s);
    if (!baseline.count(key)) baseline[key] = rec.elapsed_seconds;
  }
  for (auto& rec : out.records) {
    const auto it = baseline.find(std::make_pair(rec.scheme, rec.s));
    if (!rec.failed && it != baseline.end() && rec.elapsed_seconds > 0.0)
      rec.speedup = it->second / rec.elapsed_seconds;
  }
  return out;
}

void emit_report(const BenchResult& result, const BenchConfig& cfg, const std::string& csv_path,
                 const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("emit_report: cannot open " + csv_path);
  csv << "schema_version,scheme,s,threads,elapsed_seconds,speedup,krylov_dim_mean,"
         "newton_iters_mean,stage_residual_max,failed,error\n";
  for (const auto& r : result.records) {
    csv << 1 << ',' << r.scheme << ',' << r.s << ',' << r.threads << ','
        << full_precision(r.elapsed_seconds) << ',' << full_precision(r.speedup) << ','
        << full_precision(r.krylov_dim_mean) << ',' << full_precision(r.newton_iters_mean)
        << ',' << full_precision(r.stage_residual_max) << ',' << (r.failed ? 1 : 0) << ','
        << sanitize_csv_field(r.error) << '\n';
  }
  csv.close();

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  nlohmann::ordered_json jc;
  jc["problem"] = cfg.problem.name;
  jc["params"] = cfg.problem.params;
  std::vector<std::string> scheme_names;
  for (const Scheme s : cfg.schemes) scheme_names.push_back(to_string(s));
  jc["schemes"] = scheme_names;
  jc["stage_min"] = cfg.stage_min;
  jc["stage_max"] = cfg.stage_max;
  jc["thread_min"] = cfg.thread_min;
  jc["thread_max"] = cfg.thread_max;
  jc["nt"] = cfg.nt;
  jc["repetitions"] = cfg.repetitions;
  j["config"] = jc;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : result.records) {
    nlohmann::ordered_json jr;
    jr["scheme"] = r.scheme;
    jr["s"] = r.s;
    jr["threads"] = r.threads;
    jr["elapsed_seconds"] = r.elapsed_seconds;
    jr["speedup"] = r.speedup;
    jr["krylov_dim_mean"] = r.krylov_dim_mean;
    jr["newton_iters_mean"] = r.newton_iters_mean;
    jr["stage_residual_max"] = r.stage_residual_max;
    jr["failed"] = r.failed;
    jr["error"] = r.error;
    arr.push_back(jr);
  }
  j["records"] = arr;
  j["all_ok"] = result.all_ok;
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("emit_report: cannot open " + json_path);
  js << j.dump(2) << '\n';
}

std::vector<BenchRecord> parse_bench_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_bench_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_bench_csv: empty file");

  const auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!text.empty() && text.back() == ',') fields.push_back("");
    return fields;
  };

  const std::vector<std::string> header = split(line);
  std::map<std::string, size_t> col;
  for (size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"scheme", "s", "threads", "elapsed_seconds", "speedup",
                               "krylov_dim_mean", "newton_iters_mean", "stage_residual_max",
                               "failed", "error"})
    if (!col.count(required))
      throw std::runtime_error(std::string("parse_bench_csv: missing column ") + required);

  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line);
    BenchRecord r;
    r.scheme = fields.at(col["scheme"]);
    r.s = std::stoi(fields.at(col["s"]));
    r.threads = std::stoi(fields.at(col["threads"]));
    r.elapsed_seconds = std::stod(fields.at(col["elapsed_seconds"]));
    r.speedup = std::stod(fields.at(col["speedup"]));
    r.krylov_dim_mean = std::stod(fields.at(col["krylov_dim_mean"]));
    r.newton_iters_mean = std::stod(fields.at(col["newton_iters_mean"]));
    r.stage_residual_max = std::stod(fields.at(col["stage_residual_max"]));
    r.failed = fields.at(col["failed"]) == "1";
    r.error = col["error"] < fields.size() ? fields.at(col["error"]) : "";
    records.push_back(r);
  }
  return records;
}

}  // namespace irk
