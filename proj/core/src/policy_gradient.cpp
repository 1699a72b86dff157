#include "amgd/policy_gradient.hpp"

#include <cmath>
#include <utility>

#include "amgd/error.hpp"
#include "amgd/optimizer.hpp"
#include "amgd/parallel.hpp"
#include "amgd/schedule.hpp"

namespace amgd {

namespace {

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
}

// Pooled mean of all returns-to-go when the baseline asks for it.
double batch_baseline(const EpisodeBatch& batch, double gamma_disc,
                      Baseline baseline) {
  if (baseline == Baseline::none) return 0.0;
  double sum = 0.0;
  long count = 0;
  for (const Episode& episode : batch.episodes) {
    for (double r : returns_to_go(episode, gamma_disc)) {
      sum += r;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

SoftmaxPolicy::SoftmaxPolicy(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions) {
  if (n_states < 1 || n_actions < 2)
    throw Error("BadConstants", "softmax policy needs >= 1 state and >= 2 actions");
}

int SoftmaxPolicy::param_index(int s, int a) const {
  if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_)
    throw Error("BadConstants", "state or action out of range");
  return s * n_actions_ + a;
}

Vector SoftmaxPolicy::action_probs(const Vector& theta, int s) const {
  if (theta.size() != param_dim())
    throw Error("LengthMismatch", "policy parameter has the wrong dimension");
  Vector logits(n_actions_);
  for (int a = 0; a < n_actions_; ++a) logits[a] = theta[param_index(s, a)];
  const double m = logits.maxCoeff();
  Vector probs = (logits.array() - m).exp();
  probs /= probs.sum();
  return probs;
}

int SoftmaxPolicy::sample_action(const Vector& theta, int s, Rng& rng) const {
  const Vector probs = action_probs(theta, s);
  const double draw = rng.uniform_open();
  double cum = 0.0;
  for (int a = 0; a < n_actions_; ++a) {
    cum += probs[a];
    if (cum >= draw) return a;
  }
  return n_actions_ - 1;
}

double SoftmaxPolicy::log_prob(const Vector& theta, int s, int a) const {
  const Vector probs = action_probs(theta, s);
  return std::log(probs[a]);
}

Vector SoftmaxPolicy::grad_log_prob(const Vector& theta, int s, int a) const {
  const Vector probs = action_probs(theta, s);
  Vector grad = Vector::Zero(param_dim());
  grad[param_index(s, a)] = 1.0;
  for (int b = 0; b < n_actions_; ++b) grad[param_index(s, b)] -= probs[b];
  return grad;
}

EpisodeBatch collect_batch(const GridWorld& grid, const SoftmaxPolicy& policy,
                           const Vector& theta, int batch_size, Rng& rng) {
  if (batch_size < 1) throw Error("BadConstants", "batch size must be positive");
  if (policy.n_states() != grid.n_states() ||
      policy.n_actions() != grid.n_actions())
    throw Error("LengthMismatch", "policy shape does not match the grid");
  EpisodeBatch batch;
  batch.episodes.reserve(batch_size);
  for (int e = 0; e < batch_size; ++e) {
    Episode episode;
    int s = grid.start_state();
    for (long step = 0; step < grid.episode_cap(); ++step) {
      if (grid.is_terminal(s)) break;
      PgTransition t;
      t.s = s;
      t.a = policy.sample_action(theta, s, rng);
      t.next = grid.move(s, t.a);
      t.r = grid.step_reward();
      t.next_terminal = grid.is_terminal(t.next);
      episode.push_back(t);
      s = t.next;
    }
    batch.episodes.push_back(std::move(episode));
  }
  return batch;
}

std::vector<double> returns_to_go(const Episode& episode, double gamma_disc) {
  std::vector<double> out(episode.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = episode.size(); i-- > 0;) {
    acc = episode[i].r + gamma_disc * acc;
    out[i] = acc;
  }
  return out;
}

Vector reinforce_gradient(const SoftmaxPolicy& policy,
                          const EpisodeBatch& batch, double gamma_disc,
                          Baseline baseline, const Vector& theta) {
  if (batch.episodes.empty())
    throw Error("EmptyBatch", "policy-gradient estimate needs at least one episode");
  const double b = batch_baseline(batch, gamma_disc, baseline);
  Vector grad = Vector::Zero(policy.param_dim());
  for (const Episode& episode : batch.episodes) {
    const std::vector<double> rets = returns_to_go(episode, gamma_disc);
    for (std::size_t i = 0; i < episode.size(); ++i)
      grad += policy.grad_log_prob(theta, episode[i].s, episode[i].a) *
              (rets[i] - b);
  }
  return grad / static_cast<double>(batch.episodes.size());
}

double reinforce_surrogate(const SoftmaxPolicy& policy,
                           const EpisodeBatch& batch, double gamma_disc,
                           Baseline baseline, const Vector& theta) {
  if (batch.episodes.empty())
    throw Error("EmptyBatch", "surrogate needs at least one episode");
  const double b = batch_baseline(batch, gamma_disc, baseline);
  double total = 0.0;
  for (const Episode& episode : batch.episodes) {
    const std::vector<double> rets = returns_to_go(episode, gamma_disc);
    for (std::size_t i = 0; i < episode.size(); ++i)
      total += policy.log_prob(theta, episode[i].s, episode[i].a) * (rets[i] - b);
  }
  return total / static_cast<double>(batch.episodes.size());
}

double mean_return(const GridWorld& grid, const SoftmaxPolicy& policy,
                   const Vector& theta, int episodes, Rng& rng) {
  if (episodes < 1) throw Error("BadConstants", "need at least one episode");
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    int s = grid.start_state();
    for (long step = 0; step < grid.episode_cap(); ++step) {
      if (grid.is_terminal(s)) break;
      const int a = policy.sample_action(theta, s, rng);
      total += grid.step_reward();
      s = grid.move(s, a);
    }
  }
  return total / static_cast<double>(episodes);
}

ExperimentReport run_policy_gradient_experiment(const GridWorld& grid,
                                                PgMethod method,
                                                const PgOptions& options,
                                                const std::vector<std::uint64_t>& seeds) {
  if (options.iterations < 0)
    throw Error("BadConstants", "iteration count must be nonnegative");
  if (options.measure_every < 1)
    throw Error("BadConstants", "measurement interval must be positive");
  SoftmaxPolicy policy(grid.n_states(), grid.n_actions());

  std::vector<double> ks;
  ks.push_back(0.0);
  for (long k = options.measure_every; k <= options.iterations;
       k += options.measure_every)
    ks.push_back(static_cast<double>(k));

  std::vector<std::vector<double>> curves(seeds.size());
  parallel_for(static_cast<long>(seeds.size()), [&](long si) {
    const std::uint64_t seed = seeds[si];
    Rng rng(seed);
    std::vector<double> curve;
    curve.reserve(ks.size());
    const Vector theta0 = Vector::Zero(policy.param_dim());
    {
      Rng eval_rng(derive_stream(seed, 0));
      curve.push_back(
          mean_return(grid, policy, theta0, options.eval_episodes, eval_rng));
    }
    if (method == PgMethod::reinforce) {
      Vector theta = theta0;
      for (long k = 1; k <= options.iterations; ++k) {
        const EpisodeBatch batch =
            collect_batch(grid, policy, theta, options.batch_size, rng);
        const Vector g_hat = reinforce_gradient(policy, batch, grid.discount(),
                                                options.baseline, theta);
        theta += options.lr * g_hat;
        if (k % options.measure_every == 0) {
          Rng eval_rng(derive_stream(seed, static_cast<std::uint64_t>(k)));
          curve.push_back(
              mean_return(grid, policy, theta, options.eval_episodes, eval_rng));
        }
      }
    } else {
      const StepSchedule schedule =
          build_schedule(ScheduleRegime::nonconvex, options.smoothness, 0.0,
                         options.iterations, options.gamma_upper);
      NonconvexState state = nonconvex_init(theta0, schedule);
      for (long k = 1; k <= options.iterations; ++k) {
        const EpisodeBatch batch =
            collect_batch(grid, policy, state.y, options.batch_size, rng);
        const Vector g = -reinforce_gradient(policy, batch, grid.discount(),
                                             options.baseline, state.y);
        state = amgd_nonconvex_step(state, g, schedule);
        if (k % options.measure_every == 0) {
          Rng eval_rng(derive_stream(seed, static_cast<std::uint64_t>(k)));
          curve.push_back(mean_return(grid, policy, state.x_bar,
                                      options.eval_episodes, eval_rng));
        }
      }
    }
    curves[si] = std::move(curve);
  });
  return make_report(std::move(ks), std::move(curves),
                     std::vector<std::uint64_t>(seeds.begin(), seeds.end()),
                     "mean_return", options.config_hash);
}

}  // namespace amgd
