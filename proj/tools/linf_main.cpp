#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "linf/errors.hpp"
#include "linf/evt.hpp"
#include "linf/experiment.hpp"
#include "linf/svg_plot.hpp"

namespace {

int resolve_threads(int flag_value) {
  // LINF_THREADS takes precedence over --threads.
  if (const char* env = std::getenv("LINF_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw linf::ConfigError("LINF_THREADS is not an integer");
    }
  }
  return flag_value;
}

int run_command(const std::string& config_path, bool has_seed, std::uint64_t seed,
                const std::string& out_dir, int threads) {
  linf::ExperimentConfig cfg = linf::load_config_file(config_path);
  if (has_seed) cfg.master_seed = seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const linf::RunOutputs outputs = linf::run_experiment(cfg, resolve_threads(threads));

  std::cout << "wrote " << outputs.csv_path.string() << "\n";
  if (!outputs.sweep.per_n.empty()) {
    std::cout << "wrote " << outputs.summary_path.string() << "\n";
    for (const auto& entry : outputs.sweep.per_n) {
      std::cout << "N=" << entry.n << "\n";
      for (const auto& est : entry.estimators) {
        std::cout << "  " << est.label;
        if (est.p) std::cout << "(p=" << *est.p << ")";
        std::cout << ": mean linf " << est.mean_linf << " +- " << est.stderr_linf << " ("
                  << est.trials << " trials)\n";
      }
      if (entry.p_opt)
        std::cout << "  p_opt = " << *entry.p_opt << (entry.tie_flag ? "  [tie within 1 se]" : "")
                  << "\n";
    }
  }
  return 0;
}

int plot_command(const std::string& csv_path, const std::string& out_path) {
  const auto records = linf::parse_records_csv(csv_path);
  linf::PlotSpec spec;
  linf::write_linf_plot(records, spec, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int evt_command(long long n, int trials, std::uint64_t seed, double sparsity, double mu_x,
                double mu_z, const std::string& out_dir) {
  const linf::BermanResult berman = linf::berman_ratio(n, trials, seed);
  std::cout << "berman: n=" << berman.n << " trials=" << berman.trials
            << " mean ratio=" << berman.mean_ratio << " sd=" << berman.stddev_ratio << "\n";

  linf::SparseGaussianPrior prior{sparsity, mu_x};
  const linf::DominanceResult dom =
      linf::support_dominance(linf::PriorSpec(prior), mu_z, n, trials, seed + 1);
  std::cout << "dominance: fraction=" << dom.fraction << " evaluated=" << dom.evaluated
            << " skipped=" << dom.skipped << " norm max (support/zero)=" << dom.mean_norm_support
            << "/" << dom.mean_norm_zero << "\n";

  if (!out_dir.empty()) {
    linf::ExperimentConfig cfg;
    cfg.kind = linf::ExperimentKind::EvtCheck;
    cfg.prior = prior;
    cfg.channel = linf::GaussianChannel{mu_z};
    cfg.n_values = {n};
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.output_dir = out_dir;
    const auto outputs = linf::run_experiment(cfg, 1);
    std::cout << "wrote " << outputs.csv_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian signal estimation under the l-infinity error metric"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment from a JSON config");
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "master seed override");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* plot = app.add_subcommand("plot", "render a records.csv as an SVG chart");
  std::string csv_path, plot_out;
  plot->add_option("--csv", csv_path, "records.csv produced by run")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  auto* evt = app.add_subcommand("evt", "Gaussian-maxima and support-dominance checks");
  long long evt_n = 100000;
  int evt_trials = 200;
  std::uint64_t evt_seed = 1;
  double sparsity = 0.05, mu_x = 1.0, mu_z = 5e-4;
  std::string evt_out;
  evt->add_option("--n", evt_n, "signal length per trial");
  evt->add_option("--trials", evt_trials, "number of trials");
  evt->add_option("--seed", evt_seed, "rng seed");
  evt->add_option("--sparsity", sparsity, "sparse prior nonzero fraction");
  evt->add_option("--mu-x", mu_x, "slab variance");
  evt->add_option("--mu-z", mu_z, "channel noise variance");
  evt->add_option("--out", evt_out, "also write evt.csv into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return run_command(config_path, seed_opt->count() > 0, seed, out_dir, threads);
    if (plot->parsed()) return plot_command(csv_path, plot_out);
    return evt_command(evt_n, evt_trials, evt_seed, sparsity, mu_x, mu_z, evt_out);
  } catch (const linf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const linf::ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
