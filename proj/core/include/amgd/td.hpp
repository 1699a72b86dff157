#pragma once

#include <cstdint>
#include <vector>

#include "amgd/gridworld.hpp"
#include "amgd/optimizer.hpp"
#include "amgd/report.hpp"
#include "amgd/rng.hpp"
#include "amgd/schedule.hpp"
#include "amgd/types.hpp"

namespace amgd {

// A fixed-policy episodic evaluation task: row-stochastic transitions, a
// state-dependent step reward paid on leaving a state, linear value features
// per state, and terminal states that end episodes and contribute no
// bootstrap value.
struct PolicyEvalProblem {
  Matrix transitions;           // n_states x n_states, rows sum to 1
  std::vector<char> terminal;   // per state
  Vector step_rewards;          // reward for any transition leaving state s
  Matrix features;              // n_states x feature_dim
  int start_state = 0;
  double discount = 0.9;
  long episode_cap = 0;

  int n_states() const { return static_cast<int>(transitions.rows()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  void validate() const;  // throws BadConstants / LengthMismatch
};

// The uniform-random-walk view of a grid with Fourier value features.
PolicyEvalProblem policy_eval_problem(const GridWorld& grid);

struct Transition {
  int s = 0;
  double r = 0.0;
  int next = 0;
  bool next_terminal = false;
};

// One episode from the start state until a terminal state or the cap.
std::vector<Transition> sample_episode(const PolicyEvalProblem& problem,
                                       Rng& rng);

// delta = r + discount * <theta, phi(next)> [next nonterminal] - <theta, phi(s)>
double td_error(const Vector& theta, const PolicyEvalProblem& problem,
                const Transition& t);

// theta' = theta + lr * delta * phi(s)
Vector td0_update(const Vector& theta, const PolicyEvalProblem& problem,
                  const Transition& t, double lr);

// Step sizes for the accelerated evaluator: alpha_k = 2/(k+1),
// gamma_k = 2 delta_frac / (mu (k+1)), and the strongly-convex momentum
// beta_k = alpha_k / (alpha_k + (1-alpha_k)(1+mu gamma_k)) built from that
// gamma. The smoothness constant only feeds the optional step-compatibility
// validation, which these step sizes satisfy for any L <= mu/delta_frac.
StepSchedule td_acc_schedule(double mu, double delta_frac);

// One accelerated semi-gradient update of theta at frozen step index k: the
// query point y is mixed from the stored pair with beta_k, the TD update
// direction -delta(y) phi(s) plays the gradient sample, and the proximal step
// is unconstrained.
ConvexState td0_acc_update(const ConvexState& state,
                           const PolicyEvalProblem& problem,
                           const Transition& t, const StepSchedule& schedule,
                           long k, double mu);

// Norm of the expected TD update: the Euclidean norm of the mean of
// delta * phi(s) pooled over all transitions of n_test_episodes fresh
// episodes.
double neu(const Vector& theta, const PolicyEvalProblem& problem,
           int n_test_episodes, Rng& rng);

enum class PolicyEvalMethod { td0, td0_acc };

struct PolicyEvalOptions {
  long episodes = 0;
  long measure_every = 10;
  double lr = 0.001;          // td0
  double mu = 1.0;            // td0_acc
  double delta_frac = 0.1;    // td0_acc
  int n_test_episodes = 10;
  // When set, the accelerated step index advances per transition instead of
  // per episode.
  bool per_step_index = false;
  std::string config_hash;
};

// Runs the chosen evaluator per seed from theta = 0, measuring the norm of
// the expected TD update every measure_every episodes (the accelerated
// method is measured at its averaged iterate), and aggregates across seeds.
ExperimentReport run_policy_eval_experiment(const PolicyEvalProblem& problem,
                                            PolicyEvalMethod method,
                                            const PolicyEvalOptions& options,
                                            const std::vector<std::uint64_t>& seeds);

}  // namespace amgd
