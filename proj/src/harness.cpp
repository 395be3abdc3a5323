#include "adanorm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "adanorm/rng.hpp"
#include "adanorm/trace_io.hpp"

#ifndef ADANORM_BUNDLED_CONFIG_DIR
#define ADANORM_BUNDLED_CONFIG_DIR "configs"
#endif

namespace adanorm {
namespace {

constexpr std::uint64_t kInitialPointStream = 0x5f0;

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::optional<double> best_or_empty(const Trace& trace) {
  if (trace.records.empty()) return std::nullopt;
  return best_error(trace);
}

template <class F>
void for_each_cell(std::size_t count, F&& body) {
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
    body(static_cast<std::size_t>(k));
  }
}

std::string read_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    const auto pos = line.find("description");
    if (pos == std::string::npos || line.find_first_not_of(" \t") != pos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto s = line.substr(eq + 1);
    s.erase(0, s.find_first_not_of(" \t"));
    return s;
  }
  return {};
}

}  // namespace

ProblemPtr build_problem(const ProblemSpec& s) {
  if (s.generator == "least_squares") {
    return make_least_squares(s.n, s.d, s.seed, NoiseModel::noiseless(), s.allow_degenerate);
  }
  if (s.generator == "least_squares_noisy") {
    return make_least_squares(s.n, s.d, s.seed, NoiseModel::gaussian(s.sigma), s.allow_degenerate);
  }
  if (s.generator == "regularized") return make_regularized_strongly_convex(s.n, s.d, s.lambda, s.seed);
  if (s.generator == "two_layer_relu") return make_two_layer_relu(s.n, s.m, s.d, s.seed);
  throw ConfigError(0, "problem: unknown generator '" + s.generator + "'");
}

Vector initial_point(const ExperimentConfig& config, const ProblemInstance& problem) {
  if (config.x0 == "default") return problem.default_initial_point();
  const auto d = static_cast<Eigen::Index>(problem.dimension());
  if (config.x0 == "zero") return Vector::Zero(d);
  const std::string scale_text = config.x0.substr(std::string("gaussian:").size());
  char* end = nullptr;
  const double scale = std::strtod(scale_text.c_str(), &end);
  if (scale_text.empty() || end != scale_text.c_str() + scale_text.size()) {
    throw ConfigError(0, "x0: bad gaussian scale '" + scale_text + "'");
  }
  auto engine = make_engine(config.seed, kInitialPointStream);
  std::normal_distribution<double> normal;
  Vector x(d);
  for (auto& v : x) v = scale * normal(engine);
  return x;
}

double resolve(const ScaledValue& v, const ProblemInstance& problem, const Vector& x0) {
  if (v.unit.empty()) return v.value;
  if (v.unit == "L") return v.value * problem.smoothness();
  if (v.unit == "mu") return v.value * problem.strong_convexity();
  const double d0 = problem.minimizer() ? (x0 - *problem.minimizer()).squaredNorm() : problem.gap(x0);
  if (v.unit == "D0") return v.value * d0;
  if (v.unit == "sqrtD0") return v.value * std::sqrt(d0);
  throw ConfigError(0, "unknown unit '" + v.unit + "'");
}

RunOptions run_options(const ExperimentConfig& config, const MethodSpec& m,
                       const ProblemInstance& problem, const Vector& x0, std::uint64_t seed) {
  RunOptions o;
  o.method = m.method;
  o.mode = m.mode;
  o.eta = resolve(m.eta, problem, x0);
  o.b0 = resolve(m.b0, problem, x0);
  o.batch_size = m.batch_size;
  o.max_iters = config.max_iters;
  o.stop_tol = config.stop_tol;
  o.seed = seed;
  o.decay = m.decay;
  o.stride = config.stride;
  o.x0 = x0;
  o.track_gap = config.track_gap;
  return o;
}

std::uint64_t cell_seed(const ExperimentConfig& config, std::size_t index) {
  return derive_seed(config.seed, index);
}

SummaryRow summarize(const CellResult& cell) {
  SummaryRow row;
  row.method = cell.label;
  row.repeat = cell.repeat;
  row.seed = cell.seed;
  const auto& t = cell.trace;
  row.final_err_sq = t.final_err_sq;
  row.final_gap = t.final_gap;
  row.final_b = t.final_b;
  row.diverged = t.diverged;
  row.iterations = t.iterations;
  const bool has_err = !t.records.empty() && t.records.front().err_sq.has_value();
  if (has_err) {
    row.min_err_sq = best_or_empty(t);
  } else {
    row.min_gap = best_or_empty(t);
  }
  return row;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "method,repeat,seed,final_err_sq,min_err_sq,final_gap,min_gap,final_b,diverged,iterations\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.repeat << ',' << r.seed << ',' << opt_cell(r.final_err_sq) << ','
       << opt_cell(r.min_err_sq) << ',' << opt_cell(r.final_gap) << ',' << opt_cell(r.min_gap)
       << ',' << format_double(r.final_b) << ',' << (r.diverged ? 1 : 0) << ',' << r.iterations
       << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  const ProblemPtr problem = build_problem(config.problem);
  const Vector x0 = initial_point(config, *problem);
  const std::size_t R = config.repeats;
  const std::size_t count = config.methods.size() * R;

  ExperimentResult result;
  result.cells.resize(count);
  for_each_cell(count, [&](std::size_t k) {
    auto& cell = result.cells[k];
    const auto& m = config.methods[k / R];
    cell.label = m.label;
    cell.repeat = k % R;
    cell.seed = cell_seed(config, k);
    try {
      cell.trace = run(*problem, run_options(config, m, *problem, x0, cell.seed));
      if (!out_dir.empty()) {
        write_file_atomic(out_dir / (cell.label + "_r" + std::to_string(cell.repeat) + ".csv"),
                          trace_csv(cell.trace));
      }
    } catch (const IoError& e) {
      cell.error = e.what();
      cell.io_error = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  for (const auto& cell : result.cells) {
    if (!cell.error.empty()) {
      result.any_error = true;
      continue;
    }
    result.summary.push_back(summarize(cell));
  }
  for (const auto& cell : result.cells) {
    if (cell.io_error) throw IoError(cell.error);
  }
  if (!out_dir.empty()) write_file_atomic(out_dir / "summary.csv", summary_csv(result.summary));
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  if (!config.sweep) throw ConfigError(0, "sweep: config has no sweep.* keys");
  const auto& sweep = *config.sweep;
  const ProblemPtr problem = build_problem(config.problem);
  const Vector x0 = initial_point(config, *problem);
  const std::size_t M = config.methods.size();
  const std::size_t R = config.repeats;
  const std::size_t count = sweep.grid.size() * M * R;

  std::vector<SweepRow> rows(count);
  std::vector<std::string> errors(count);
  for_each_cell(count, [&](std::size_t k) {
    const std::size_t g = k / (M * R);
    const std::size_t within = k % (M * R);
    MethodSpec m = config.methods[within / R];
    const ScaledValue v{sweep.grid[g], sweep.unit};
    (sweep.param == "b0" ? m.b0 : m.eta) = v;
    auto& row = rows[k];
    row.value = sweep.grid[g];
    row.resolved = resolve(v, *problem, x0);
    row.method = m.label;
    row.repeat = within % R;
    try {
      const Trace t = run(*problem, run_options(config, m, *problem, x0, cell_seed(config, k)));
      row.final_metric = t.final_err_sq ? t.final_err_sq : t.final_gap;
      row.min_metric = best_or_empty(t);
      row.final_b = t.final_b;
      row.diverged = t.diverged;
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("sweep cell failed: " + e);
  }
  if (!out_dir.empty()) write_file_atomic(out_dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "value,resolved,method,repeat,final_metric,min_metric,final_b,diverged\n";
  for (const auto& r : rows) {
    os << format_double(r.value) << ',' << format_double(r.resolved) << ',' << r.method << ','
       << r.repeat << ',' << opt_cell(r.final_metric) << ',' << opt_cell(r.min_metric) << ','
       << format_double(r.final_b) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
  return os.str();
}

RuigReport run_ruig(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (!config.ruig) throw ConfigError(0, "ruig: config has no ruig.* keys");
  const auto& spec = *config.ruig;
  const ProblemPtr problem = build_problem(config.problem);

  RuigReport report;
  report.alpha_unit = spec.alpha_in_units ? problem->alpha_unit().value_or(1.0) : 1.0;
  RuigOptions o;
  o.epsilon = spec.epsilon;
  o.points = spec.points;
  o.samples = spec.samples;
  o.seed = config.seed;
  for (double a : spec.alpha_grid) o.alpha_grid.push_back(a * report.alpha_unit);
  report.estimates = estimate_ruig(*problem, o);
  if (!out_dir.empty()) {
    write_file_atomic(out_dir / "ruig.csv", ruig_csv(report.estimates, report.alpha_unit));
  }
  return report;
}

BoundsReport verify_bounds(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const BoundsSpec spec = config.bounds.value_or(BoundsSpec{});
  const ProblemPtr problem = build_problem(config.problem);
  const Vector x0 = initial_point(config, *problem);
  const double L = problem->smoothness();
  const double mu = problem->strong_convexity();
  const auto& x_star = problem->minimizer();

  BoundsReport report;
  std::size_t cell = 0;
  for (const auto& m : config.methods) {
    const std::size_t first_cell = cell;
    cell += config.repeats;
    if (m.method != Method::AdagradNorm) continue;
    RunOptions base = run_options(config, m, *problem, x0, 0);
    base.stride = 1;
    const double eta = base.eta;
    const double b0 = base.b0;

    if (x_star && mu > 0.0) {
      const double delta0 = (x0 - *x_star).squaredNorm();
      if (delta0 > 0.0) {
        report.budgets.push_back(budget_thm2(b0, eta, L, mu, delta0, spec.eps));
        if (m.mode == Mode::Stochastic) {
          RuigOptions ro;
          ro.epsilon = spec.eps;
          ro.alpha_grid = {0.45 * problem->alpha_unit().value_or(mu * mu)};
          ro.points = 10;
          ro.samples = 2000;
          ro.seed = config.seed;
          const auto est = estimate_ruig(*problem, ro).front();
          if (est.gamma > 0.0) {
            const double delta = default_stage_one_delta(b0, eta * L, est);
            report.budgets.push_back(budget_thm1(b0, eta, L, mu, delta0, spec.eps, spec.delta_h,
                                                 est.alpha, est.gamma, delta));
          }
        }
      }
    } else if (!x_star && mu > 0.0) {
      const double gap0 = problem->gap(x0);
      if (gap0 > 0.0) report.budgets.push_back(budget_thm3(b0, eta, L, mu, gap0, spec.eps));
    }

    if (!x_star || !problem->noiseless()) continue;
    const double delta0 = (x0 - *x_star).squaredNorm();
    const double C = spec.C ? resolve(*spec.C, *problem, x0) : eta * L;
    for (std::size_t r = 0; r < config.repeats; ++r) {
      RunOptions o = base;
      o.seed = cell_seed(config, first_cell + r);
      const Trace t = run(*problem, o);
      const std::string tag = "_" + m.label + "_r" + std::to_string(r);
      auto add = [&](BoundCheckReport rep) {
        rep.lemma += tag;
        if (rep.applicable && !rep.passed) report.all_passed = false;
        report.checks.push_back(std::move(rep));
      };
      if (C > b0) add(check_lemma3(t, C, eta, b0, delta0));
      if (C >= eta * L) add(check_lemma4(t, C, eta, L, b0, delta0));
      add(check_descent(t, eta, L));
      if (m.mode == Mode::Batch && mu > 0.0) {
        const auto N = lemma2_budget(b0, C, mu, spec.eps, problem->flavor());
        if (N > 0 && N <= 1000000) {
          RunOptions lo = o;
          lo.max_iters = N;
          lo.stop_tol = spec.eps;
          lo.track_gap = false;
          lo.stride = std::numeric_limits<std::int64_t>::max();
          add(check_lemma2_contract(run(*problem, lo), C, spec.eps));
        }
      }
    }
  }
  if (!out_dir.empty()) {
    write_file_atomic(out_dir / "bounds.csv", bounds_csv(report.checks));
    write_file_atomic(out_dir / "budget.csv", budget_csv(report.budgets));
  }
  return report;
}

void emit_plot_data(const std::vector<CellResult>& cells, const std::filesystem::path& out_dir) {
  std::ostringstream script;
  script << "# gnuplot -p plot.gp\n"
         << "set multiplot layout 1,2\n"
         << "set logscale y\nset xlabel 't'\nset ylabel 'error'\nplot \\\n";
  std::vector<std::string> names;
  for (const auto& cell : cells) {
    if (!cell.error.empty()) continue;
    const std::string name = cell.label + "_r" + std::to_string(cell.repeat);
    names.push_back(name);
    std::ostringstream err;
    std::ostringstream bt;
    for (const auto& r : cell.trace.records) {
      const auto& v = r.err_sq ? r.err_sq : r.gap;
      if (v) err << r.t << ' ' << format_double(std::max(*v, 1e-300)) << '\n';
      bt << r.t << ' ' << format_double(r.b) << '\n';
    }
    write_file_atomic(out_dir / (name + "_err.dat"), err.str());
    write_file_atomic(out_dir / (name + "_b.dat"), bt.str());
  }
  if (names.empty()) {
    write_file_atomic(out_dir / "plot.gp", "# no curves\n");
    return;
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    script << "  '" << names[i] << "_err.dat' using 1:2 with lines title '" << names[i] << "'"
           << (i + 1 < names.size() ? ", \\\n" : "\n");
  }
  script << "unset logscale y\nset ylabel 'b_t'\nplot \\\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    script << "  '" << names[i] << "_b.dat' using 1:2 with lines title '" << names[i] << "'"
           << (i + 1 < names.size() ? ", \\\n" : "\n");
  }
  script << "unset multiplot\n";
  write_file_atomic(out_dir / "plot.gp", script.str());
}

std::filesystem::path bundled_config_dir() {
  if (const char* env = std::getenv("ADANORM_CONFIG_DIR"); env && *env) return env;
  return ADANORM_BUNDLED_CONFIG_DIR;
}

std::vector<BundledConfig> list_bundled() {
  std::vector<BundledConfig> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(bundled_config_dir(), ec)) {
    if (entry.path().extension() != ".cfg") continue;
    out.push_back({entry.path().stem().string(), entry.path(), read_description(entry.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const BundledConfig& a, const BundledConfig& b) { return a.name < b.name; });
  return out;
}

std::filesystem::path resolve_config_path(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return p;
  const auto bundled = bundled_config_dir() / (name_or_path + ".cfg");
  if (std::filesystem::exists(bundled)) return bundled;
  throw IoError("no such config file or bundled config: " + name_or_path);
}

}  // namespace adanorm
