#include "amgd/gridworld.hpp"

#include <cmath>

#include "amgd/error.hpp"

namespace amgd {

GridWorld::GridWorld(int n, double step_reward, double discount)
    : n_(n), step_reward_(step_reward), discount_(discount) {
  if (n < 2) throw Error("BadConstants", "grid size must be at least 2");
  if (!(discount > 0.0) || !(discount < 1.0))
    throw Error("BadConstants", "discount must lie in (0, 1)");
}

int GridWorld::state_index(int row, int col) const {
  if (row < 0 || row >= n_ || col < 0 || col >= n_)
    throw Error("BadConstants", "grid coordinate out of range");
  return row * n_ + col;
}

std::pair<int, int> GridWorld::row_col(int state) const {
  if (state < 0 || state >= n_states())
    throw Error("BadConstants", "state index out of range");
  return {state / n_, state % n_};
}

int GridWorld::move(int state, int action) const {
  if (is_terminal(state))
    throw Error("BadConstants", "cannot step from the terminal state");
  auto [row, col] = row_col(state);
  switch (action) {
    case 0: row -= 1; break;
    case 1: row += 1; break;
    case 2: col -= 1; break;
    case 3: col += 1; break;
    default: throw Error("BadConstants", "action must be in 0..3");
  }
  if (row < 0 || row >= n_ || col < 0 || col >= n_) return state;
  return row * n_ + col;
}

Matrix GridWorld::uniform_policy_matrix() const {
  const int m = n_states();
  Matrix p = Matrix::Zero(m, m);
  for (int row = 0; row < n_; ++row) {
    for (int col = 0; col < n_; ++col) {
      const int s = row * n_ + col;
      const int targets[4] = {
          row > 0 ? s - n_ : s,      // up
          row < n_ - 1 ? s + n_ : s, // down
          col > 0 ? s - 1 : s,       // left
          col < n_ - 1 ? s + 1 : s,  // right
      };
      for (int t : targets) p(s, t) += 0.25;
    }
  }
  return p;
}

Matrix GridWorld::restart_chain_matrix() const {
  Matrix p = uniform_policy_matrix();
  p.row(goal_state()).setZero();
  p(goal_state(), start_state()) = 1.0;
  return p;
}

Vector fourier_features(int row, int col, int n) {
  if (n < 2) throw Error("BadConstants", "grid size must be at least 2");
  if (row < 0 || row >= n || col < 0 || col >= n)
    throw Error("BadConstants", "grid coordinate out of range");
  const double rn = static_cast<double>(row) / (n - 1);
  const double cn = static_cast<double>(col) / (n - 1);
  Vector phi(kFourierDim);
  phi << 1.0, std::cos(M_PI * rn), std::cos(M_PI * cn);
  return phi;
}

}  // namespace amgd
