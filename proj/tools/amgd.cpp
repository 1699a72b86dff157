// Command-line front end: builds an experiment configuration from an optional
// config file plus flag overrides, runs the requested experiment, and emits
// CSV reports. Exits 0 on success; on failure prints a single machine-readable
// line `error: <Kind>: <message>` to stderr and exits nonzero.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amgd/config.hpp"
#include "amgd/error.hpp"
#include "amgd/rate_study.hpp"
#include "amgd/report.hpp"

namespace {

// Flags shared by every subcommand. Typed flags are kept as raw strings so
// the value written into the config is exactly what the user typed.
struct CommonArgs {
  std::string config_path;
  std::string out_dir = "amgd_out";
  std::vector<std::string> overrides;  // repeated --set key=value
};

void add_common(CLI::App& sub, CommonArgs& args, bool config_required) {
  auto* cfg_opt = sub.add_option("-c,--config", args.config_path,
                                 "Path to a key=value config file");
  if (config_required) cfg_opt->required();
  sub.add_option("-o,--out", args.out_dir,
                 "Output directory for curves.csv / slopes.csv / plot_data.csv");
  sub.add_option("--set", args.overrides,
                 "Override any config key (repeatable), e.g. --set lr=0.01");
}

amgd::ExperimentConfig base_config(const CommonArgs& args) {
  amgd::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = amgd::ExperimentConfig::load(args.config_path);
  return cfg;
}

void apply_overrides(amgd::ExperimentConfig& cfg, const CommonArgs& args) {
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw amgd::Error("BadConstants", "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void set_if(amgd::ExperimentConfig& cfg, const std::string& key,
            const std::optional<std::string>& value) {
  if (value) cfg.set(key, *value);
}

int execute(const amgd::ExperimentConfig& cfg, const CommonArgs& args) {
  const amgd::ExperimentReport report = amgd::run_experiment(cfg);
  amgd::emit_report(report, args.out_dir);
  std::cout << "metric=" << report.metric_name << " seeds=" << report.seeds.size()
            << " points=" << report.ks.size() << " config=" << report.config_hash
            << '\n';
  if (report.has_slope) {
    std::printf("slope=%.6f intercept=%.6f residual=%.6f\n", report.slope.slope,
                report.slope.intercept, report.slope.residual);
  }
  if (!report.mean.empty())
    std::printf("final_mean=%.10g\n", report.mean.back());
  std::cout << "wrote " << args.out_dir << "/curves.csv, slopes.csv, plot_data.csv"
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Markov-chain stochastic gradient experiments: accelerated optimization "
      "runs, rate studies, and GridWorld reinforcement-learning comparisons"};
  app.require_subcommand(1);

  // run: execute a config file as-is (the file names the experiment).
  CommonArgs run_args;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Run the experiment described by a config file");
  add_common(*run_cmd, run_args, /*config_required=*/true);

  // rates: convergence-rate study for one schedule regime.
  CommonArgs rates_args;
  struct {
    std::optional<std::string> regime, algorithm, builtin, problem, iterations,
        horizons, seeds, fit_k_min, fit_k_max, lr;
    bool gamma_upper = false;
  } rates;
  CLI::App* rates_cmd = app.add_subcommand(
      "rates", "Fit log-log convergence slopes for a schedule regime");
  add_common(*rates_cmd, rates_args, /*config_required=*/false);
  rates_cmd->add_option("--regime", rates.regime,
                        "nonconvex | convex | strongly_convex");
  rates_cmd->add_option("--algorithm", rates.algorithm,
                        "amgd_nonconvex | amgd_convex | markov_sgd");
  rates_cmd->add_option("--builtin", rates.builtin,
                        "Built-in problem family (least_squares_ball, "
                        "least_squares_rank_deficient, robust_nonconvex, "
                        "scalar_quadratic)");
  rates_cmd->add_option("--problem", rates.problem, "Path to a saved problem file");
  rates_cmd->add_option("--iterations", rates.iterations,
                        "Iteration count (convex regimes)");
  rates_cmd->add_option("--horizons", rates.horizons,
                        "Comma-separated horizon grid (nonconvex regime)");
  rates_cmd->add_option("--seeds", rates.seeds, "Comma-separated seed list");
  rates_cmd->add_option("--fit-k-min", rates.fit_k_min, "Slope-fit window lower end");
  rates_cmd->add_option("--fit-k-max", rates.fit_k_max, "Slope-fit window upper end");
  rates_cmd->add_option("--lr", rates.lr, "Constant step size (markov_sgd)");
  rates_cmd->add_flag("--gamma-upper", rates.gamma_upper,
                      "Use the upper admissible primal step in the nonconvex schedule");

  // rl-td: GridWorld policy evaluation, TD(0) vs accelerated TD(0).
  CommonArgs td_args;
  struct {
    std::optional<std::string> grid, episodes, method, seeds, lr, mu, delta_frac,
        measure_every, test_episodes;
    bool per_step = false;
  } td;
  CLI::App* td_cmd = app.add_subcommand(
      "rl-td", "GridWorld policy evaluation (method: td0 | td0_acc)");
  add_common(*td_cmd, td_args, /*config_required=*/false);
  td_cmd->add_option("--grid", td.grid, "GridWorld side length");
  td_cmd->add_option("--episodes", td.episodes, "Training episode count");
  td_cmd->add_option("--method", td.method, "td0 | td0_acc");
  td_cmd->add_option("--seeds", td.seeds, "Comma-separated seed list");
  td_cmd->add_option("--lr", td.lr, "TD(0) learning rate");
  td_cmd->add_option("--mu", td.mu, "Proximal strong-convexity constant");
  td_cmd->add_option("--delta-frac", td.delta_frac, "Step-size fraction delta");
  td_cmd->add_option("--measure-every", td.measure_every,
                     "Episodes between metric evaluations");
  td_cmd->add_option("--test-episodes", td.test_episodes,
                     "Episodes per metric evaluation");
  td_cmd->add_flag("--per-step-index", td.per_step,
                   "Advance the schedule index every step instead of per episode");

  // rl-pg: GridWorld policy optimization, REINFORCE vs accelerated REINFORCE.
  CommonArgs pg_args;
  struct {
    std::optional<std::string> method, iterations, batch, grid, seeds, lr,
        smoothness, eval_episodes, measure_every, baseline;
    bool gamma_upper = false;
  } pg;
  CLI::App* pg_cmd = app.add_subcommand(
      "rl-pg", "GridWorld policy gradient (method: reinforce | reinforce_acc)");
  add_common(*pg_cmd, pg_args, /*config_required=*/false);
  pg_cmd->add_option("--method", pg.method, "reinforce | reinforce_acc");
  pg_cmd->add_option("--iterations", pg.iterations, "Gradient iteration budget");
  pg_cmd->add_option("--batch", pg.batch, "Episodes per gradient estimate");
  pg_cmd->add_option("--grid", pg.grid, "GridWorld side length");
  pg_cmd->add_option("--seeds", pg.seeds, "Comma-separated seed list");
  pg_cmd->add_option("--lr", pg.lr, "Plain ascent step size");
  pg_cmd->add_option("--smoothness", pg.smoothness,
                     "Smoothness constant for the accelerated schedule");
  pg_cmd->add_option("--eval-episodes", pg.eval_episodes,
                     "Episodes per mean-return evaluation");
  pg_cmd->add_option("--measure-every", pg.measure_every,
                     "Iterations between metric evaluations");
  pg_cmd->add_option("--baseline", pg.baseline, "mean_return | none");
  pg_cmd->add_flag("--gamma-upper", pg.gamma_upper,
                   "Use the upper admissible primal step in the nonconvex schedule");

  CLI11_PARSE(app, argc, argv);

  try {
    amgd::ExperimentConfig cfg;
    const CommonArgs* common = nullptr;
    if (run_cmd->parsed()) {
      common = &run_args;
      cfg = base_config(run_args);
      if (!cfg.has("experiment"))
        throw amgd::Error("BadConstants", "config is missing key 'experiment'");
    } else if (rates_cmd->parsed()) {
      common = &rates_args;
      cfg = base_config(rates_args);
      cfg.set("experiment", "rates");
      set_if(cfg, "regime", rates.regime);
      set_if(cfg, "algorithm", rates.algorithm);
      set_if(cfg, "builtin", rates.builtin);
      set_if(cfg, "problem", rates.problem);
      set_if(cfg, "iterations", rates.iterations);
      set_if(cfg, "horizons", rates.horizons);
      set_if(cfg, "seeds", rates.seeds);
      set_if(cfg, "fit_k_min", rates.fit_k_min);
      set_if(cfg, "fit_k_max", rates.fit_k_max);
      set_if(cfg, "lr", rates.lr);
      if (rates.gamma_upper) cfg.set("gamma_upper", "true");
    } else if (td_cmd->parsed()) {
      common = &td_args;
      cfg = base_config(td_args);
      cfg.set("experiment", "rl_td");
      set_if(cfg, "grid", td.grid);
      set_if(cfg, "episodes", td.episodes);
      set_if(cfg, "method", td.method);
      set_if(cfg, "seeds", td.seeds);
      set_if(cfg, "lr", td.lr);
      set_if(cfg, "mu", td.mu);
      set_if(cfg, "delta_frac", td.delta_frac);
      set_if(cfg, "measure_every", td.measure_every);
      set_if(cfg, "test_episodes", td.test_episodes);
      if (td.per_step) cfg.set("per_step_index", "true");
    } else {
      common = &pg_args;
      cfg = base_config(pg_args);
      cfg.set("experiment", "rl_pg");
      set_if(cfg, "method", pg.method);
      set_if(cfg, "iterations", pg.iterations);
      set_if(cfg, "batch", pg.batch);
      set_if(cfg, "grid", pg.grid);
      set_if(cfg, "seeds", pg.seeds);
      set_if(cfg, "lr", pg.lr);
      set_if(cfg, "smoothness", pg.smoothness);
      set_if(cfg, "eval_episodes", pg.eval_episodes);
      set_if(cfg, "measure_every", pg.measure_every);
      set_if(cfg, "baseline", pg.baseline);
      if (pg.gamma_upper) cfg.set("gamma_upper", "true");
    }
    apply_overrides(cfg, *common);
    return execute(cfg, *common);
  } catch (const amgd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 2;
  }
}
