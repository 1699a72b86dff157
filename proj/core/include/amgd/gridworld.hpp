#pragma once

#include <utility>
#include <vector>

#include "amgd/rng.hpp"
#include "amgd/types.hpp"

namespace amgd {

// n-by-n episodic grid: start at (0,0), terminal goal at (n-1,n-1), four
// moves {up, down, left, right}, attempted off-grid moves leave the agent in
// place, every step from a nonterminal state pays step_reward (nothing
// accrues at the terminal). Immutable after construction.
class GridWorld {
 public:
  explicit GridWorld(int n, double step_reward = -1.0, double discount = 0.9);

  int n() const { return n_; }
  int n_states() const { return n_ * n_; }
  int n_actions() const { return 4; }
  double step_reward() const { return step_reward_; }
  double discount() const { return discount_; }
  long episode_cap() const { return 10L * n_; }

  int state_index(int row, int col) const;
  std::pair<int, int> row_col(int state) const;
  int start_state() const { return 0; }
  int goal_state() const { return n_ * n_ - 1; }
  bool is_terminal(int state) const { return state == goal_state(); }

  // Deterministic move with stay-at-wall; actions 0..3 = up, down, left,
  // right. Throws BadConstants when stepping from the terminal state.
  int move(int state, int action) const;

  // Transition matrix of the uniform random walk with stay-at-wall over all
  // n^2 states, terminal handling ignored; symmetric, hence doubly
  // stochastic.
  Matrix uniform_policy_matrix() const;

  // Same walk but the goal row teleports to the start, making the chain
  // ergodic for stationary analysis.
  Matrix restart_chain_matrix() const;

 private:
  int n_;
  double step_reward_;
  double discount_;
};

// First-order Fourier features of the normalized grid coordinate
// s~ = (row/(n-1), col/(n-1)):
//   phi(s) = (1, cos(pi row~), cos(pi col~)).
Vector fourier_features(int row, int col, int n);

constexpr int kFourierDim = 3;

}  // namespace amgd
