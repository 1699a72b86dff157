#include "amgd/rate_study.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "amgd/error.hpp"
#include "amgd/gridworld.hpp"
#include "amgd/optimizer.hpp"
#include "amgd/parallel.hpp"
#include "amgd/policy_gradient.hpp"
#include "amgd/rng.hpp"
#include "amgd/schedule.hpp"
#include "amgd/td.hpp"

namespace amgd {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
}

ScheduleRegime parse_regime(const std::string& name) {
  if (name == "nonconvex") return ScheduleRegime::nonconvex;
  if (name == "convex") return ScheduleRegime::convex;
  if (name == "strongly_convex") return ScheduleRegime::strongly_convex;
  throw Error("BadConstants", "unknown regime '" + name + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "amgd_nonconvex") return Algorithm::amgd_nonconvex;
  if (name == "amgd_convex") return Algorithm::amgd_convex;
  if (name == "markov_sgd") return Algorithm::markov_sgd;
  throw Error("BadConstants", "unknown algorithm '" + name + "'");
}

BuiltinProblem resolve_problem(const ExperimentConfig& cfg) {
  if (cfg.has("problem")) {
    const std::string path = cfg.get_string("problem");
    const ProblemSpec problem = load_problem(path);
    FiniteMarkovChain chain = load_problem_chain(problem, path);
    MarkovObjective objective = build_objective(problem, chain);
    return BuiltinProblem{std::move(chain), std::move(objective), problem.feasible};
  }
  return make_builtin_problem(cfg);
}

}  // namespace

FiniteMarkovChain make_random_ergodic_chain(int n_states, std::uint64_t seed) {
  if (n_states < 1) throw Error("BadConstants", "need at least one state");
  Rng rng(seed);
  Matrix p(n_states, n_states);
  const double floor = 0.1 / n_states;
  for (int i = 0; i < n_states; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n_states; ++j) {
      p(i, j) = floor + rng.uniform();
      row_sum += p(i, j);
    }
    p.row(i) /= row_sum;
  }
  return FiniteMarkovChain::from_matrix(p);
}

BuiltinProblem make_builtin_problem(const ExperimentConfig& cfg) {
  const std::string name = cfg.get_string("builtin");
  const long states = cfg.get_long("builtin_states", 20);
  const long dim = cfg.get_long("builtin_dim", 5);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_long("builtin_seed", 1));
  const double radius = cfg.get_double("builtin_radius", 2.0);
  const double noise = cfg.get_double("builtin_noise", 0.5);
  const double scale = cfg.get_double("builtin_scale", 1.0);
  if (states < 1) throw Error("BadConstants", "builtin_states must be positive");
  if (dim < 1) throw Error("BadConstants", "builtin_dim must be positive");
  if (!(radius > 0.0)) throw Error("BadConstants", "builtin_radius must be > 0");

  if (name == "scalar_quadratic") {
    Matrix p(1, 1);
    p(0, 0) = 1.0;
    FiniteMarkovChain chain = FiniteMarkovChain::from_matrix(p);
    const FeasibleSet feasible = FeasibleSet::ball(Vector::Zero(1), radius);
    std::vector<AffineSample> samples(1);
    samples[0].a = Vector::Ones(1);
    samples[0].b = 1.0;
    MarkovObjective objective = make_least_squares(chain, samples, feasible);
    return BuiltinProblem{std::move(chain), std::move(objective), feasible};
  }

  FiniteMarkovChain chain = make_random_ergodic_chain(static_cast<int>(states), seed);
  Rng rng(mix_seed(seed, 0x5eedULL));
  Vector x_true(dim);
  for (long i = 0; i < dim; ++i)
    x_true[i] = 0.5 * radius * (2.0 * rng.uniform() - 1.0);
  std::vector<AffineSample> samples(states);
  const bool deficient = name == "least_squares_rank_deficient";
  if (deficient && dim < 3)
    throw Error("BadConstants", "rank-deficient builtin needs builtin_dim >= 3");
  for (long s = 0; s < states; ++s) {
    Vector a(dim);
    for (long i = 0; i < dim; ++i) a[i] = rng.normal();
    if (deficient) {
      a[dim - 1] = 0.0;
      a[dim - 2] = 0.0;
    }
    samples[s].a = a;
    samples[s].b = a.dot(x_true) + noise * rng.normal();
  }

  if (name == "least_squares_ball" || deficient) {
    const FeasibleSet feasible = FeasibleSet::ball(Vector::Zero(dim), radius);
    MarkovObjective objective = make_least_squares(chain, samples, feasible);
    return BuiltinProblem{std::move(chain), std::move(objective), feasible};
  }
  if (name == "robust_nonconvex") {
    MarkovObjective objective = make_robust_nonconvex(chain, samples, scale);
    return BuiltinProblem{std::move(chain), std::move(objective),
                          FeasibleSet::all_space()};
  }
  throw Error("BadConstants", "unknown builtin problem '" + name + "'");
}

std::vector<long> log_checkpoints(long k_max, int per_decade) {
  if (k_max < 1) throw Error("BadConstants", "checkpoint range must reach 1");
  if (per_decade < 1) throw Error("BadConstants", "need at least one point per decade");
  std::set<long> points{1, k_max};
  const double decades = std::log10(static_cast<double>(k_max));
  const long steps = static_cast<long>(std::ceil(decades * per_decade));
  for (long i = 1; i <= steps; ++i) {
    const double e = static_cast<double>(i) / per_decade;
    const long k = std::llround(std::pow(10.0, e));
    if (k >= 1 && k <= k_max) points.insert(k);
  }
  return {points.begin(), points.end()};
}

ExperimentReport run_rate_study(const ExperimentConfig& cfg) {
  const ScheduleRegime regime = parse_regime(cfg.get_string("regime"));
  const bool nonconvex = regime == ScheduleRegime::nonconvex;
  const Algorithm algorithm = parse_algorithm(cfg.get_string(
      "algorithm", nonconvex ? "amgd_nonconvex" : "amgd_convex"));
  const BuiltinProblem problem = resolve_problem(cfg);
  const std::vector<std::uint64_t> seeds = cfg.get_seeds("seeds");
  const int start_state = static_cast<int>(cfg.get_long("start_state", 0));
  const bool gamma_upper = cfg.get_bool("gamma_upper", false);
  const double smoothness = problem.objective.smoothness();

  ExperimentReport report;
  if (nonconvex) {
    const std::vector<long> horizons = cfg.get_long_list("horizons");
    for (long h : horizons)
      if (h < 1) throw Error("BadConstants", "horizons must be positive");
    const std::size_t n_h = horizons.size();
    std::vector<std::vector<double>> curves(
        seeds.size(), std::vector<double>(n_h, 0.0));
    parallel_for(static_cast<long>(seeds.size() * n_h), [&](long cell) {
      const std::size_t si = static_cast<std::size_t>(cell) / n_h;
      const std::size_t hi = static_cast<std::size_t>(cell) % n_h;
      const StepSchedule schedule = build_schedule(
          ScheduleRegime::nonconvex, smoothness, 0.0, horizons[hi], gamma_upper);
      RunOptions opt;
      opt.iterations = horizons[hi];
      opt.seed = seeds[si];
      opt.start_state = start_state;
      opt.feasible = problem.feasible;
      const OptimizerTrace trace =
          run(algorithm, problem.objective, problem.chain, schedule, opt);
      Rng out_rng(mix_seed(seeds[si], static_cast<std::uint64_t>(horizons[hi])));
      const Vector y = select_output(trace, smoothness, out_rng);
      curves[si][hi] =
          exact_gradient(problem.objective, problem.chain, y).squaredNorm();
    });
    std::vector<double> ks(horizons.begin(), horizons.end());
    report = make_report(std::move(ks), std::move(curves),
                         std::vector<std::uint64_t>(seeds), "grad_norm_sq",
                         cfg.hash());
    FitWindow window;
    window.k_min = cfg.get_double("fit_k_min", 0.0);
    window.k_max = cfg.get_double("fit_k_max",
                                  std::numeric_limits<double>::infinity());
    fit_report_slope(report, window);
    return report;
  }

  const long iterations = cfg.get_long("iterations");
  if (iterations < 1) throw Error("BadConstants", "iterations must be positive");
  const int per_decade =
      static_cast<int>(cfg.get_long("checkpoints_per_decade", 50));
  const std::vector<long> checkpoints = log_checkpoints(iterations, per_decade);
  const double mu = problem.objective.strong_convexity();
  const Optimum star = f_star(problem.objective, problem.chain, problem.feasible);

  std::vector<std::vector<double>> curves(
      seeds.size(), std::vector<double>(checkpoints.size(), 0.0));
  parallel_for(static_cast<long>(seeds.size()), [&](long si) {
    const StepSchedule schedule = build_schedule(regime, smoothness, mu);
    RunOptions opt;
    opt.iterations = iterations;
    opt.seed = seeds[si];
    opt.start_state = start_state;
    opt.exact_metrics = true;
    opt.f_star_value = star.value;
    opt.feasible = problem.feasible;
    opt.lr = cfg.get_double("lr", 0.0);
    const OptimizerTrace trace =
        run(algorithm, problem.objective, problem.chain, schedule, opt);
    for (std::size_t j = 0; j < checkpoints.size(); ++j)
      curves[si][j] = trace.metrics[checkpoints[j] - 1];
  });
  std::vector<double> ks(checkpoints.begin(), checkpoints.end());
  report = make_report(std::move(ks), std::move(curves),
                       std::vector<std::uint64_t>(seeds), "objective_gap",
                       cfg.hash());
  FitWindow window;
  window.k_min = cfg.get_double("fit_k_min", 10.0 * report.ks.front());
  window.k_max =
      cfg.get_double("fit_k_max", std::numeric_limits<double>::infinity());
  fit_report_slope(report, window);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const std::string experiment = cfg.get_string("experiment");
  if (experiment == "rates") return run_rate_study(cfg);

  if (experiment == "rl_td") {
    const GridWorld grid(static_cast<int>(cfg.get_long("grid", 10)),
                         cfg.get_double("step_reward", -1.0),
                         cfg.get_double("discount", 0.9));
    const PolicyEvalProblem problem = policy_eval_problem(grid);
    PolicyEvalOptions opt;
    opt.episodes = cfg.get_long("episodes");
    opt.measure_every = cfg.get_long("measure_every", 10);
    opt.lr = cfg.get_double("lr", 0.001);
    opt.mu = cfg.get_double("mu", 1.0);
    opt.delta_frac = cfg.get_double("delta_frac", 0.1);
    opt.n_test_episodes = static_cast<int>(cfg.get_long("test_episodes", 10));
    opt.per_step_index = cfg.get_bool("per_step_index", false);
    opt.config_hash = cfg.hash();
    const std::string method = cfg.get_string("method");
    if (method != "td0" && method != "td0_acc")
      throw Error("BadConstants", "unknown evaluation method '" + method + "'");
    return run_policy_eval_experiment(
        problem,
        method == "td0" ? PolicyEvalMethod::td0 : PolicyEvalMethod::td0_acc,
        opt, cfg.get_seeds("seeds"));
  }

  if (experiment == "rl_pg") {
    const GridWorld grid(static_cast<int>(cfg.get_long("grid", 4)),
                         cfg.get_double("step_reward", -1.0),
                         cfg.get_double("discount", 0.9));
    PgOptions opt;
    opt.iterations = cfg.get_long("iterations");
    opt.batch_size = static_cast<int>(cfg.get_long("batch", 10));
    opt.eval_episodes = static_cast<int>(cfg.get_long("eval_episodes", 50));
    opt.measure_every = cfg.get_long("measure_every", 1);
    opt.lr = cfg.get_double("lr", 0.1);
    opt.smoothness = cfg.get_double("smoothness", 1.0);
    opt.gamma_upper = cfg.get_bool("gamma_upper", false);
    const std::string baseline = cfg.get_string("baseline", "mean_return");
    if (baseline == "mean_return") {
      opt.baseline = Baseline::mean_return;
    } else if (baseline == "none") {
      opt.baseline = Baseline::none;
    } else {
      throw Error("BadConstants", "unknown baseline '" + baseline + "'");
    }
    opt.config_hash = cfg.hash();
    const std::string method = cfg.get_string("method");
    if (method != "reinforce" && method != "reinforce_acc")
      throw Error("BadConstants", "unknown ascent method '" + method + "'");
    return run_policy_gradient_experiment(
        grid,
        method == "reinforce" ? PgMethod::reinforce : PgMethod::reinforce_acc,
        opt, cfg.get_seeds("seeds"));
  }

  throw Error("BadConstants", "unknown experiment '" + experiment + "'");
}

}  // namespace amgd
