#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "amgd/markov.hpp"
#include "amgd/types.hpp"

namespace amgd {

// Closed convex feasible region: all of R^d, a Euclidean ball, or an
// axis-aligned box. Immutable.
class FeasibleSet {
 public:
  enum class Kind { AllSpace, Ball, Box };

  FeasibleSet() : kind_(Kind::AllSpace) {}

  static FeasibleSet all_space() { return FeasibleSet(); }
  // radius > 0 (BadConstants otherwise).
  static FeasibleSet ball(Vector center, double radius);
  // lower < upper componentwise (BadConstants), equal lengths(LengthMismatch).
  static FeasibleSet box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  bool is_compact() const { return kind_ != Kind::AllSpace; }

  // Euclidean projection onto the set.
  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-12) const;

  // sup over the set of ||x||; +inf for all_space.
  double max_norm() const;
  // sup over the set of |a.x - b|; +inf for all_space unless a = 0.
  double max_abs_affine(const Vector& a, double b) const;

  // Ball accessors (meaningful only when kind() == Ball).
  const Vector& center() const { return v1_; }
  double radius() const { return radius_; }
  // Box accessors (meaningful only when kind() == Box).
  const Vector& lower() const { return v1_; }
  const Vector& upper() const { return v2_; }

 private:
  Kind kind_;
  Vector v1_, v2_;
  double radius_ = 0.0;
};

enum class ConvexityClass { nonconvex, convex, strongly_convex };

std::string to_string(ConvexityClass c);

// Stochastic objective whose sample index runs over the states of a finite
// Markov chain. Carries the constants the step-size schedules need: L bounds
// the per-sample gradient Lipschitz modulus, M bounds the per-sample gradient
// norm over the feasible region (may be +inf for custom objectives), mu is
// the strong-convexity modulus of the stationary average (0 when absent).
class MarkovObjective {
 public:
  using ValueFn = std::function<double(const Vector&, int)>;
  using GradFn = std::function<Vector(const Vector&, int)>;

  MarkovObjective(int dim, ValueFn value, GradFn grad, double smoothness,
                  double grad_bound, double strong_convexity,
                  ConvexityClass convexity);

  int dim() const { return dim_; }
  double smoothness() const { return smoothness_; }
  double grad_bound() const { return grad_bound_; }
  double strong_convexity() const { return strong_convexity_; }
  ConvexityClass convexity_class() const { return convexity_; }

  double value(const Vector& x, int xi) const;
  // Evaluates G(x;xi) and spot-checks ||G|| <= M (1 + 1e-9) when M is
  // finite; a violation means the declared constants are wrong and raises
  // NumericalFailure.
  Vector gradient(const Vector& x, int xi) const;

 private:
  int dim_;
  ValueFn value_;
  GradFn grad_;
  double smoothness_;
  double grad_bound_;
  double strong_convexity_;
  ConvexityClass convexity_;
};

// Stationary-weighted full objective / gradient: sums F(x;xi) or G(x;xi)
// against the chain's stationary distribution.
double exact_objective(const MarkovObjective& obj,
                       const FiniteMarkovChain& chain, const Vector& x);
Vector exact_gradient(const MarkovObjective& obj,
                      const FiniteMarkovChain& chain, const Vector& x);

struct Optimum {
  double value = 0.0;
  Vector point;
};

// High-precision reference optimum by deterministic projected gradient
// descent (step 1/L) on the exact gradient, run until the gradient-map norm
// falls below 1e-10. Throws NotConvex for nonconvex objectives and
// NumericalFailure if the tolerance is not reached within the iteration cap.
Optimum f_star(const MarkovObjective& obj, const FiniteMarkovChain& chain,
               const FeasibleSet& feasible);

// One least-squares / robust-regression datum attached to a chain state.
struct AffineSample {
  Vector a;
  double b = 0.0;
};

// F(x;xi) = (a.x - b)^2 / 2 with one sample per chain state. L = max ||a||^2,
// M = max ||a|| sup_X |a.x - b| (requires a compact feasible set:
// UnboundedGradient otherwise), mu = smallest eigenvalue of the
// stationary-weighted second-moment matrix (strongly convex iff positive).
MarkovObjective make_least_squares(const FiniteMarkovChain& chain,
                                   std::vector<AffineSample> samples,
                                   const FeasibleSet& feasible);

// Bounded rational loss F(x;xi) = r^2 / (scale + r^2), r = a.x - b. Values in
// [0,1), gradients bounded globally (M = 3 sqrt(3) / (8 sqrt(scale)) max
// ||a||), smooth (L = 2/scale max ||a||^2), nonconvex.
MarkovObjective make_robust_nonconvex(const FiniteMarkovChain& chain,
                                      std::vector<AffineSample> samples,
                                      double scale);

// Walks the chain and exposes the visited states as the sample sequence of a
// stochastic gradient oracle. Single-owner mutable state.
class GradientStream {
 public:
  GradientStream(FiniteMarkovChain chain, MarkovObjective objective,
                 int start_state, std::uint64_t seed);

  // Advances the chain one step and returns the new state.
  int next_sample();
  int current_state() const { return state_; }
  const FiniteMarkovChain& chain() const { return chain_; }
  const MarkovObjective& objective() const { return objective_; }

 private:
  FiniteMarkovChain chain_;
  MarkovObjective objective_;
  int state_;
  Rng rng_;
};

// Problem instance as stored on disk: which objective family, the per-state
// data, the feasible region, and a reference to a chain file (resolved
// relative to the problem file's directory on load).
struct ProblemSpec {
  std::string kind;  // "least_squares" or "robust_nonconvex"
  std::string chain_file;
  std::vector<AffineSample> samples;
  double scale = 1.0;  // robust_nonconvex only
  FeasibleSet feasible;
};

// Builds the described objective against an already-loaded chain.
MarkovObjective build_objective(const ProblemSpec& problem,
                                const FiniteMarkovChain& chain);

// Structured text round-trip; numbers written with 17 significant digits so
// load(save(p)) reproduces p exactly.
void save_problem(const ProblemSpec& problem, const std::string& path);
ProblemSpec load_problem(const std::string& path);

// Loads the chain a problem references, resolving relative paths against the
// problem file's directory.
FiniteMarkovChain load_problem_chain(const ProblemSpec& problem,
                                     const std::string& problem_path);

}  // namespace amgd
