// adacubic: benchmark runner for the AdaCubic optimizer.
//
//   adacubic run --config grid.ini [--out dir] [--seeds 1,2,3] [--optimizer a,b] [--problem p]
//   adacubic deviation --config grid.ini --trials 1000
//   adacubic verify
//
// Exit status: 0 on success, 1 when a verify check fails or on internal errors,
// 2 on usage errors.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "adacubic/errors.hpp"
#include "adacubic/harness.hpp"
#include "adacubic/verify.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string config_dir(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::vector<std::uint64_t>& seeds,
            const std::vector<std::string>& optimizers, const std::vector<std::string>& problems) {
  auto cfg = adacubic::load_experiment_config(config_path);
  if (!seeds.empty()) cfg.seeds = seeds;
  if (!optimizers.empty()) adacubic::select_optimizers(cfg, optimizers);
  if (!problems.empty()) adacubic::select_problems(cfg, problems);
  if (!out_dir.empty()) cfg.output = out_dir;
  cfg.validate();

  const auto result = adacubic::run_experiment(cfg, config_dir(config_path));
  adacubic::write_experiment_outputs(result, cfg.output);
  adacubic::write_summary_csv(std::cout, result.summary);

  // Aborted runs are results (recorded in runs.csv as unsuccessful), not CLI errors.
  for (const auto& r : result.runs) {
    if (!r.error.empty()) {
      std::cerr << "warning: run " << r.problem << "/" << r.optimizer << "/seed " << r.seed << " aborted: " << r.error
                << '\n';
    }
  }
  return 0;
}

int cmd_deviation(const std::string& config_path, std::size_t trials, const std::string& out_dir) {
  const auto cfg = adacubic::load_experiment_config(config_path);
  const std::size_t n_trials = trials ? trials : cfg.deviation.trials;
  const std::uint64_t seed = cfg.seeds.front();

  std::ostringstream csv;
  csv << "problem,batch_size,samples,trials,kind,q10,q25,q50,q75,q90\n";
  bool any = false;
  for (const auto& spec : cfg.problems) {
    const auto inst = adacubic::build_problem(spec, config_dir(config_path));
    if (inst.objective->num_samples() == 0) {
      std::cerr << "skipping deterministic problem '" << spec.label << "'\n";
      continue;
    }
    any = true;
    for (const auto batch : cfg.deviation.batch_sizes) {
      for (const int s : cfg.deviation.samples) {
        const auto dev =
            adacubic::measure_subsample_deviation(*inst.objective, inst.x0, batch, n_trials, s, seed);
        for (const auto& [kind, values] : {std::pair{"grad", &dev.grad}, std::pair{"diag", &dev.diag}}) {
          csv << spec.label << ',' << batch << ',' << s << ',' << n_trials << ',' << kind;
          for (const double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            csv << ',' << adacubic::format_double(adacubic::quantile(*values, q));
          }
          csv << '\n';
        }
      }
    }
  }
  if (!any) throw adacubic::ConfigError("config has no stochastic problem to measure");

  std::cout << csv.str();
  const std::string dir = out_dir.empty() ? cfg.output : out_dir;
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / "deviation.csv", std::ios::binary | std::ios::trunc);
  if (!f) throw adacubic::ConfigError("cannot write deviation.csv in '" + dir + "'");
  f << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaCubic optimizer benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> optimizers;
  std::vector<std::string> problems;
  std::size_t trials = 0;

  auto* run = app.add_subcommand("run", "Run a (problem x optimizer x seed) grid and write CSVs");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides [run] output)");
  run->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
  run->add_option("--optimizer", optimizers, "Only these optimizers")->delimiter(',');
  run->add_option("--problem", problems, "Only these problems")->delimiter(',');

  auto* deviation = app.add_subcommand("deviation", "Subsampling deviation quantiles for stochastic problems");
  deviation->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  deviation->add_option("--trials", trials, "Batch draws per setting (default: [deviation] trials)");
  deviation->add_option("--out", out_dir, "Output directory for deviation.csv");

  auto* verify = app.add_subcommand("verify", "Run the property suite and print the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seeds, optimizers, problems);
    if (*deviation) return cmd_deviation(config_path, trials, out_dir);
    if (*verify) return adacubic::run_verify_suite(std::cout) ? 0 : kExitFailure;
  } catch (const adacubic::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
