#pragma once

#include <cstdint>
#include <vector>

#include "amgd/gridworld.hpp"
#include "amgd/report.hpp"
#include "amgd/rng.hpp"
#include "amgd/types.hpp"

namespace amgd {

// Tabular softmax policy: one parameter per (state, action), temperature 1,
// so the score is grad log pi(a|s) = e_{(s,a)} - sum_a' pi(a'|s) e_{(s,a')}.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int param_dim() const { return n_states_ * n_actions_; }
  int param_index(int s, int a) const;

  Vector action_probs(const Vector& theta, int s) const;
  int sample_action(const Vector& theta, int s, Rng& rng) const;
  double log_prob(const Vector& theta, int s, int a) const;
  Vector grad_log_prob(const Vector& theta, int s, int a) const;

 private:
  int n_states_;
  int n_actions_;
};

struct PgTransition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int next = 0;
  bool next_terminal = false;
};

using Episode = std::vector<PgTransition>;

struct EpisodeBatch {
  std::vector<Episode> episodes;
};

// Rolls out batch_size episodes from the start state under the softmax
// policy at theta, each capped at the grid's episode cap.
EpisodeBatch collect_batch(const GridWorld& grid, const SoftmaxPolicy& policy,
                           const Vector& theta, int batch_size, Rng& rng);

enum class Baseline { none, mean_return };

// Discounted returns-to-go of one episode.
std::vector<double> returns_to_go(const Episode& episode, double gamma_disc);

// Ascent-direction estimate
//   (1/|batch|) sum_episodes sum_t grad log pi(a_t|s_t) (R_t - b)
// at the supplied parameter, with b = 0 or the pooled mean of all
// returns-to-go. Throws EmptyBatch.
Vector reinforce_gradient(const SoftmaxPolicy& policy,
                          const EpisodeBatch& batch, double gamma_disc,
                          Baseline baseline, const Vector& theta);

// Frozen-weight surrogate (1/|batch|) sum sum log pi(a_t|s_t) (R_t - b) whose
// gradient in theta is reinforce_gradient with the same batch; the weights
// are computed once from the batch and held fixed.
double reinforce_surrogate(const SoftmaxPolicy& policy,
                           const EpisodeBatch& batch, double gamma_disc,
                           Baseline baseline, const Vector& theta);

// Average undiscounted return of episodes rolled out under theta.
double mean_return(const GridWorld& grid, const SoftmaxPolicy& policy,
                   const Vector& theta, int episodes, Rng& rng);

enum class PgMethod { reinforce, reinforce_acc };

struct PgOptions {
  long iterations = 0;
  int batch_size = 10;
  int eval_episodes = 50;
  long measure_every = 1;
  double lr = 0.1;           // reinforce
  double smoothness = 1.0;   // reinforce_acc horizon schedule constant
  bool gamma_upper = false;
  Baseline baseline = Baseline::mean_return;
  std::string config_hash;
};

// Runs the chosen ascent method per seed from theta = 0 (uniform policy) and
// records the average undiscounted return, including the initial policy at
// iteration 0; the accelerated method collects each batch at its query point
// and is measured at the averaged iterate. Aggregates across seeds.
ExperimentReport run_policy_gradient_experiment(const GridWorld& grid,
                                                PgMethod method,
                                                const PgOptions& options,
                                                const std::vector<std::uint64_t>& seeds);

}  // namespace amgd
