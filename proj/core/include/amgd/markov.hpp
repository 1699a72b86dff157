#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "amgd/error.hpp"
#include "amgd/rng.hpp"
#include "amgd/types.hpp"

namespace amgd {

// Probability distribution over a finite sample space; entries nonnegative
// and summing to one within 1e-12.
class Distribution {
 public:
  explicit Distribution(Vector probs);

  // Point mass at state i.
  static Distribution delta(int n, int i);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_(i); }
  const Vector& probs() const { return probs_; }

 private:
  Vector probs_;
};

// Half the L1 distance between p and q. Throws LengthMismatch.
double tv_distance(const Distribution& p, const Distribution& q);

// Why a transition matrix is not an ergodic chain.
struct ChainDiagnosis {
  std::string kind;  // NotStochastic | Reducible | Periodic
  std::string detail;
};

// Finite ergodic Markov chain. Construction validates that the matrix is
// row-stochastic, irreducible and aperiodic; instances are immutable and safe
// to share across threads.
class FiniteMarkovChain {
 public:
  static std::variant<FiniteMarkovChain, ChainDiagnosis> validate_ergodic(
      Matrix transition, std::vector<std::string> labels = {});

  // Throwing variant of validate_ergodic.
  static FiniteMarkovChain from_matrix(Matrix transition,
                                       std::vector<std::string> labels = {});

  int n_states() const { return static_cast<int>(transition_.rows()); }
  const Matrix& transition() const { return transition_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Stationary distribution: solves (P^T - I) pi = 0 with a normalization
  // row. Throws NumericalFailure unless ||pi P - pi||_inf <= 1e-10. Computed
  // once and cached (shared across copies).
  const Distribution& stationary() const;

  // Row `start` of P^k via repeated vector-matrix products; the point mass at
  // `start` when k = 0.
  Distribution k_step_distribution(int start, long k) const;

  // Smallest k with max over start states of ||P^k(start,.) - pi||_TV <=
  // gamma. Doubling search then bisection on the nonincreasing worst-case TV
  // curve. Throws CapExceeded if no k <= cap qualifies.
  long mixing_time(double gamma, long cap = 1000000) const;

  // Next state from the row distribution by inverse CDF: the first index
  // whose cumulative mass reaches the draw. The rng path maps the uniform
  // word into (0, 1] so zero-probability entries can never be selected.
  int sample_step(int state, Rng& rng) const;
  int sample_step(int state, double draw) const;

 private:
  FiniteMarkovChain(Matrix transition, std::vector<std::string> labels);

  // Worst-case-over-start TV distance to stationarity at step k.
  double worst_case_tv(const Matrix& p_power) const;

  Matrix transition_;
  std::vector<std::string> labels_;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// Second-largest eigenvalue modulus plus the worst-case TV curve for
// k = 0..k_max (inclusive).
struct MixingProfile {
  double second_eigenvalue_modulus = 0.0;
  std::vector<double> tv_curve;
};

MixingProfile mixing_profile(const FiniteMarkovChain& chain, int k_max);

// Plain-text matrix format: first line n, then n rows of n probabilities.
// Load checks row sums within 1e-9 and renormalizes before the ergodicity
// check; save writes 17 significant digits so load(save(c)) is exact.
FiniteMarkovChain load_chain(const std::string& path);
void save_chain(const FiniteMarkovChain& chain, const std::string& path);

}  // namespace amgd
