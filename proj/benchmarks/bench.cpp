// Microbenchmarks for the hot paths: chain sampling, optimizer steps, exact
// oracles, gradient estimation, and the slope fitter.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "amgd/gridworld.hpp"
#include "amgd/markov.hpp"
#include "amgd/objective.hpp"
#include "amgd/optimizer.hpp"
#include "amgd/policy_gradient.hpp"
#include "amgd/rate_study.hpp"
#include "amgd/report.hpp"
#include "amgd/schedule.hpp"

using namespace amgd;

namespace {

BuiltinProblem ball_problem() {
  ExperimentConfig cfg;
  cfg.set("builtin", "least_squares_ball");
  return make_builtin_problem(cfg);
}

void bm_chain_sample_step(benchmark::State& state) {
  const FiniteMarkovChain chain =
      make_random_ergodic_chain(static_cast<int>(state.range(0)), 3);
  Rng rng(1);
  int s = 0;
  for (auto _ : state) {
    s = chain.sample_step(s, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_chain_sample_step)->Arg(20)->Arg(200);

void bm_mixing_time(benchmark::State& state) {
  const FiniteMarkovChain chain =
      make_random_ergodic_chain(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain.mixing_time(1e-3));
  }
}
BENCHMARK(bm_mixing_time)->Arg(10)->Arg(50);

void bm_nonconvex_step(benchmark::State& state) {
  BuiltinProblem problem = ball_problem();
  const StepSchedule schedule =
      build_schedule(ScheduleRegime::nonconvex, problem.objective.smoothness(),
                     0.0, 1 << 20);
  NonconvexState st = nonconvex_init(Vector::Zero(problem.objective.dim()), schedule);
  const Vector g = problem.objective.gradient(st.y, 0);
  for (auto _ : state) {
    st = amgd_nonconvex_step(st, g, schedule);
    if (st.k >= (1 << 20)) st = nonconvex_init(st.x, schedule);
    benchmark::DoNotOptimize(st.x_bar);
  }
}
BENCHMARK(bm_nonconvex_step);

void bm_convex_step_projected(benchmark::State& state) {
  BuiltinProblem problem = ball_problem();
  const StepSchedule schedule = build_schedule(
      ScheduleRegime::strongly_convex, problem.objective.smoothness(),
      problem.objective.strong_convexity());
  ConvexState st =
      convex_init(Vector::Zero(problem.objective.dim()), schedule, problem.feasible);
  const Vector g = problem.objective.gradient(st.y, 0);
  const double mu = problem.objective.strong_convexity();
  for (auto _ : state) {
    st = amgd_convex_step(st, g, schedule, mu, problem.feasible);
    benchmark::DoNotOptimize(st.x_bar);
  }
}
BENCHMARK(bm_convex_step_projected);

void bm_exact_gradient(benchmark::State& state) {
  BuiltinProblem problem = ball_problem();
  Rng rng(5);
  Vector x(problem.objective.dim());
  for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
  x = problem.feasible.project(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_gradient(problem.objective, problem.chain, x));
  }
}
BENCHMARK(bm_exact_gradient);

void bm_optimizer_run_1k(benchmark::State& state) {
  BuiltinProblem problem = ball_problem();
  const StepSchedule schedule = build_schedule(
      ScheduleRegime::strongly_convex, problem.objective.smoothness(),
      problem.objective.strong_convexity());
  RunOptions opts;
  opts.iterations = 1000;
  opts.feasible = problem.feasible;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run(Algorithm::amgd_convex, problem.objective, problem.chain, schedule, opts));
  }
}
BENCHMARK(bm_optimizer_run_1k);

void bm_reinforce_gradient(benchmark::State& state) {
  const GridWorld world(4);
  const SoftmaxPolicy policy(world.n_states(), world.n_actions());
  Rng rng(8);
  Vector theta = Vector::Zero(policy.param_dim());
  const EpisodeBatch batch = collect_batch(world, policy, theta, 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reinforce_gradient(policy, batch, world.discount(),
                                                Baseline::mean_return, theta));
  }
}
BENCHMARK(bm_reinforce_gradient);

void bm_fit_loglog_slope(benchmark::State& state) {
  std::vector<double> ks, vals;
  for (int i = 0; i < 200; ++i) {
    ks.push_back(std::pow(10.0, i * 0.025));
    vals.push_back(3.0 / ks.back());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_loglog_slope(ks, vals));
  }
}
BENCHMARK(bm_fit_loglog_slope);

}  // namespace

BENCHMARK_MAIN();
