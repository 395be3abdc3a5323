// adanorm: run AdaGrad-Norm experiments from key-value config files.
//
//   adanorm run fig1 --out out/fig1
//   adanorm sweep fig4 --out out/fig4
//   adanorm ruig ruig_example1
//   adanorm verify-bounds bounds_ls
//   adanorm list-bundled
//
// Exit codes: 0 success, 1 config error, 2 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "adanorm/harness.hpp"
#include "adanorm/trace_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kIoError = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repeats;
};

adanorm::ExperimentConfig load(const Common& c) {
  auto cfg = adanorm::load_config(adanorm::resolve_config_path(c.config));
  if (c.seed) cfg.seed = *c.seed;
  if (c.repeats) {
    if (*c.repeats < 1) throw adanorm::ConfigError(0, "--repeats must be >= 1");
    cfg.repeats = *c.repeats;
  }
  return cfg;
}

std::filesystem::path out_dir(const Common& c, const adanorm::ExperimentConfig& cfg) {
  return c.out.empty() ? std::filesystem::path("out") / cfg.id : std::filesystem::path(c.out);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "config file or bundled config name")->required();
  sub->add_option("--out", c.out, "output directory (default out/<experiment>)");
  sub->add_option("--seed", c.seed, "override the experiment seed");
  sub->add_option("--repeats", c.repeats, "override the repeat count");
}

int cmd_run(const Common& c) {
  const auto cfg = load(c);
  const auto dir = out_dir(c, cfg);
  const auto result = adanorm::run_experiment(cfg, dir);
  adanorm::emit_plot_data(result.cells, dir);
  for (const auto& cell : result.cells) {
    if (!cell.error.empty()) {
      std::cerr << cell.label << " r" << cell.repeat << ": " << cell.error << '\n';
    }
  }
  std::cout << adanorm::summary_csv(result.summary);
  std::cerr << "wrote " << result.cells.size() << " traces to " << dir.string() << '\n';
  return result.any_error ? kConfigError : kOk;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto rows = adanorm::run_sweep(cfg, out_dir(c, cfg));
  std::cout << adanorm::sweep_csv(rows);
  return kOk;
}

int cmd_ruig(const Common& c) {
  const auto cfg = load(c);
  const auto report = adanorm::run_ruig(cfg, out_dir(c, cfg));
  std::cout << adanorm::ruig_csv(report.estimates, report.alpha_unit);
  return kOk;
}

int cmd_bounds(const Common& c) {
  const auto cfg = load(c);
  const auto report = adanorm::verify_bounds(cfg, out_dir(c, cfg));
  std::cout << adanorm::budget_csv(report.budgets) << '\n' << adanorm::bounds_csv(report.checks);
  if (!report.all_passed) std::cerr << "some bound checks failed\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaGrad-Norm experiment runner"};
  app.require_subcommand(1);

  Common run_args, sweep_args, ruig_args, bounds_args;
  auto* run = app.add_subcommand("run", "run every method/repeat cell, write traces and summary");
  add_common(run, run_args);
  auto* sweep = app.add_subcommand("sweep", "sweep b0 or eta over a grid");
  add_common(sweep, sweep_args);
  auto* ruig = app.add_subcommand("ruig", "Monte-Carlo RUIG table");
  add_common(ruig, ruig_args);
  auto* bounds = app.add_subcommand("verify-bounds", "theorem budgets and lemma checks");
  add_common(bounds, bounds_args);
  auto* list = app.add_subcommand("list-bundled", "list bundled configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*ruig) return cmd_ruig(ruig_args);
    if (*bounds) return cmd_bounds(bounds_args);
    if (*list) {
      for (const auto& b : adanorm::list_bundled()) {
        std::cout << b.name << '\t' << b.description << '\n';
      }
      return kOk;
    }
  } catch (const adanorm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
