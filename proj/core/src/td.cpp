#include "amgd/td.hpp"

#include <cmath>
#include <string>

#include "amgd/error.hpp"
#include "amgd/parallel.hpp"

namespace amgd {

namespace {

constexpr double kRowSumTol = 1e-9;

int sample_row(const Matrix& p, int s, Rng& rng) {
  const double draw = rng.uniform_open();
  const int m = static_cast<int>(p.cols());
  double cum = 0.0;
  int last_positive = -1;
  for (int j = 0; j < m; ++j) {
    const double pj = p(s, j);
    if (pj > 0.0) {
      cum += pj;
      last_positive = j;
      if (cum >= draw) return j;
    }
  }
  if (last_positive < 0)
    throw Error("BadConstants", "transition row " + std::to_string(s) + " is all zero");
  return last_positive;
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
}

}  // namespace

void PolicyEvalProblem::validate() const {
  const int m = n_states();
  if (m < 1) throw Error("BadConstants", "evaluation task needs at least one state");
  if (transitions.cols() != m)
    throw Error("BadConstants", "transition matrix must be square");
  for (int i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      if (!(transitions(i, j) >= 0.0))
        throw Error("BadConstants", "transition probabilities must be nonnegative");
      row_sum += transitions(i, j);
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol)
      throw Error("BadConstants",
                  "transition row " + std::to_string(i) + " does not sum to 1");
  }
  if (static_cast<int>(terminal.size()) != m)
    throw Error("LengthMismatch", "terminal flags do not cover all states");
  if (static_cast<int>(step_rewards.size()) != m)
    throw Error("LengthMismatch", "step rewards do not cover all states");
  if (static_cast<int>(features.rows()) != m)
    throw Error("LengthMismatch", "feature rows do not cover all states");
  if (features.cols() < 1)
    throw Error("BadConstants", "features must have at least one column");
  if (start_state < 0 || start_state >= m)
    throw Error("BadConstants", "start state out of range");
  if (!(discount >= 0.0) || !(discount < 1.0))
    throw Error("BadConstants", "discount must lie in [0, 1)");
  if (episode_cap < 1)
    throw Error("BadConstants", "episode cap must be positive");
}

PolicyEvalProblem policy_eval_problem(const GridWorld& grid) {
  PolicyEvalProblem problem;
  const int m = grid.n_states();
  problem.transitions = grid.uniform_policy_matrix();
  problem.terminal.assign(m, 0);
  problem.terminal[grid.goal_state()] = 1;
  problem.step_rewards = Vector::Constant(m, grid.step_reward());
  problem.features.resize(m, kFourierDim);
  for (int s = 0; s < m; ++s) {
    auto [row, col] = grid.row_col(s);
    problem.features.row(s) = fourier_features(row, col, grid.n()).transpose();
  }
  problem.start_state = grid.start_state();
  problem.discount = grid.discount();
  problem.episode_cap = grid.episode_cap();
  return problem;
}

std::vector<Transition> sample_episode(const PolicyEvalProblem& problem,
                                       Rng& rng) {
  std::vector<Transition> episode;
  int s = problem.start_state;
  for (long step = 0; step < problem.episode_cap; ++step) {
    if (problem.terminal[s]) break;
    Transition t;
    t.s = s;
    t.r = problem.step_rewards[s];
    t.next = sample_row(problem.transitions, s, rng);
    t.next_terminal = problem.terminal[t.next] != 0;
    episode.push_back(t);
    s = t.next;
  }
  return episode;
}

double td_error(const Vector& theta, const PolicyEvalProblem& problem,
                const Transition& t) {
  double target = t.r;
  if (!t.next_terminal)
    target += problem.discount * problem.features.row(t.next).dot(theta);
  return target - problem.features.row(t.s).dot(theta);
}

Vector td0_update(const Vector& theta, const PolicyEvalProblem& problem,
                  const Transition& t, double lr) {
  if (!(lr > 0.0)) throw Error("BadConstants", "learning rate must be > 0");
  const double delta = td_error(theta, problem, t);
  return theta + lr * delta * problem.features.row(t.s).transpose();
}

StepSchedule td_acc_schedule(double mu, double delta_frac) {
  if (!(mu > 0.0)) throw Error("BadConstants", "mu must be > 0");
  if (!(delta_frac > 0.0)) throw Error("BadConstants", "delta fraction must be > 0");
  auto alpha = [](long k) { return 2.0 / (k + 1); };
  auto gamma = [mu, delta_frac](long k) { return 2.0 * delta_frac / (mu * (k + 1)); };
  auto beta = [mu, alpha, gamma](long k) {
    const double a = alpha(k);
    const double g = gamma(k);
    return a / (a + (1.0 - a) * (1.0 + mu * g));
  };
  return StepSchedule::custom(alpha, beta, gamma, 1.0, mu);
}

ConvexState td0_acc_update(const ConvexState& state,
                           const PolicyEvalProblem& problem,
                           const Transition& t, const StepSchedule& schedule,
                           long k, double mu) {
  if (k < 1) throw Error("BadConstants", "step index must be >= 1");
  const double a = schedule.alpha(k);
  const double b = schedule.beta(k);
  const double g_step = schedule.gamma(k);
  const Vector y = (1.0 - b) * state.x_bar + b * state.x;
  const double delta = td_error(y, problem, t);
  const Vector g = -delta * problem.features.row(t.s).transpose();
  ConvexState next;
  next.x = prox_step(state.x, y, g, g_step, mu, FeasibleSet::all_space());
  next.x_bar = (1.0 - a) * state.x_bar + a * next.x;
  next.y = y;
  next.k = k;
  return next;
}

double neu(const Vector& theta, const PolicyEvalProblem& problem,
           int n_test_episodes, Rng& rng) {
  if (n_test_episodes < 1)
    throw Error("BadConstants", "need at least one test episode");
  Vector sum = Vector::Zero(problem.feature_dim());
  long count = 0;
  for (int e = 0; e < n_test_episodes; ++e) {
    for (const Transition& t : sample_episode(problem, rng)) {
      sum += td_error(theta, problem, t) * problem.features.row(t.s).transpose();
      ++count;
    }
  }
  if (count == 0) return 0.0;
  return (sum / static_cast<double>(count)).norm();
}

ExperimentReport run_policy_eval_experiment(const PolicyEvalProblem& problem,
                                            PolicyEvalMethod method,
                                            const PolicyEvalOptions& options,
                                            const std::vector<std::uint64_t>& seeds) {
  problem.validate();
  if (options.episodes < 1)
    throw Error("BadConstants", "episode count must be positive");
  if (options.measure_every < 1)
    throw Error("BadConstants", "measurement interval must be positive");
  std::vector<double> ks;
  for (long e = options.measure_every; e <= options.episodes;
       e += options.measure_every)
    ks.push_back(static_cast<double>(e));

  const StepSchedule schedule =
      method == PolicyEvalMethod::td0_acc
          ? td_acc_schedule(options.mu, options.delta_frac)
          : StepSchedule::custom([](long) { return 1.0; }, [](long) { return 1.0; },
                                 [](long) { return 1.0; }, 1.0, 0.0);

  std::vector<std::vector<double>> curves(seeds.size());
  parallel_for(static_cast<long>(seeds.size()), [&](long si) {
    const std::uint64_t seed = seeds[si];
    Rng rng(seed);
    Vector theta = Vector::Zero(problem.feature_dim());
    ConvexState state;
    state.x = theta;
    state.x_bar = theta;
    state.y = theta;
    state.k = 0;
    long step_index = 0;
    std::vector<double> curve;
    curve.reserve(ks.size());
    for (long e = 1; e <= options.episodes; ++e) {
      const std::vector<Transition> episode = sample_episode(problem, rng);
      for (const Transition& t : episode) {
        if (method == PolicyEvalMethod::td0) {
          theta = td0_update(theta, problem, t, options.lr);
        } else {
          const long k = options.per_step_index ? ++step_index : e;
          state = td0_acc_update(state, problem, t, schedule, k, options.mu);
        }
      }
      if (e % options.measure_every == 0) {
        Rng eval_rng(derive_stream(seed, static_cast<std::uint64_t>(e)));
        const Vector& value_point =
            method == PolicyEvalMethod::td0 ? theta : state.x_bar;
        curve.push_back(
            neu(value_point, problem, options.n_test_episodes, eval_rng));
      }
    }
    curves[si] = std::move(curve);
  });
  return make_report(std::move(ks), std::move(curves),
                     std::vector<std::uint64_t>(seeds.begin(), seeds.end()),
                     "neu", options.config_hash);
}

}  // namespace amgd
