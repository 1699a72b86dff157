#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amgd/config.hpp"
#include "amgd/markov.hpp"
#include "amgd/objective.hpp"
#include "amgd/report.hpp"

namespace amgd {

// Dense strictly positive random transition matrix over n states — always
// ergodic, with every entry at least a tenth of the uniform weight.
FiniteMarkovChain make_random_ergodic_chain(int n_states, std::uint64_t seed);

struct BuiltinProblem {
  FiniteMarkovChain chain;
  MarkovObjective objective;
  FeasibleSet feasible;
};

// Generated test problems, selected by the config's `builtin` key:
//   least_squares_ball            inconsistent least squares on a ball,
//                                 generically strongly convex
//   least_squares_rank_deficient  the same with two zeroed coordinates in
//                                 every regressor, so mu = 0
//   robust_nonconvex              bounded rational loss, unconstrained
//   scalar_quadratic              single-state 1-D quadratic on a ball with
//                                 zero optimum value (deterministic stream)
// Knobs: builtin_states, builtin_dim, builtin_seed, builtin_radius,
// builtin_noise, builtin_scale.
BuiltinProblem make_builtin_problem(const ExperimentConfig& cfg);

// Log-spaced unique integer checkpoints in [1, k_max], roughly per_decade
// points per decade, always including 1 and k_max.
std::vector<long> log_checkpoints(long k_max, int per_decade);

// Multi-seed rate study. Convex regimes run one trajectory per seed to
// `iterations` and record the exact objective gap f(x_bar_k) - f* at
// log-spaced checkpoints; the nonconvex regime runs a grid of `horizons`
// and records the exact squared gradient norm at the randomized output per
// (seed, horizon) cell. Cells run under parallel_for. The slope of the mean
// curve is fitted over [fit_k_min, fit_k_max]; the default window drops the
// first decade of a dense iteration curve and keeps a horizon grid whole.
ExperimentReport run_rate_study(const ExperimentConfig& cfg);

// Dispatches on the config's `experiment` key: rates, rl_td, or rl_pg.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace amgd
