#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "amgd/objective.hpp"
#include "amgd/schedule.hpp"

namespace amgd {

// Iterates of the momentum pair (x_k, x_bar_k). `y` is the query point for
// the NEXT gradient evaluation: callers read it, evaluate g there, and feed g
// back into the step function, which recomputes y internally from the stored
// pair before applying the update. `k` counts completed steps.
struct NonconvexState {
  Vector x;
  Vector x_bar;
  Vector y;
  long k = 0;
};

struct ConvexState {
  Vector x;
  Vector x_bar;
  Vector y;
  long k = 0;
};

// x_0 = x_bar_0 = x0, and the first query point y_1.
NonconvexState nonconvex_init(const Vector& x0, const StepSchedule& schedule);

// One unconstrained accelerated step:
//   y_k  = (1 - alpha_k) x_bar_{k-1} + alpha_k x_{k-1}
//   x_k  = x_{k-1} - gamma_k g
//   x_bar_k = y_k - beta_k g
// where g must be the sample gradient at the state's exposed y. Throws
// ScheduleMismatch past the schedule horizon.
NonconvexState amgd_nonconvex_step(const NonconvexState& state,
                                   const Vector& g,
                                   const StepSchedule& schedule);

// Projects x0 into the feasible set and primes the first query point.
ConvexState convex_init(const Vector& x0, const StepSchedule& schedule,
                        const FeasibleSet& feasible);

// One projected accelerated step:
//   y_k  = (1 - beta_k) x_bar_{k-1} + beta_k x_{k-1}
//   x_k  = prox_step(x_{k-1}, y_k, g, gamma_k, mu, X)
//   x_bar_k = (1 - alpha_k) x_bar_{k-1} + alpha_k x_k
// Custom schedules with mu > 0 are validated per step (momentum identity to
// 1e-9 plus the step-compatibility inequality): ScheduleViolation otherwise.
ConvexState amgd_convex_step(const ConvexState& state, const Vector& g,
                             const StepSchedule& schedule, double mu,
                             const FeasibleSet& feasible);

// Closed-form proximal update
//   Proj_X[(x_prev + mu gamma y - gamma g) / (1 + mu gamma)],
// the minimizer over X of gamma [<g, x - y> + (mu/2)||y - x||^2]
// + (1/2)||x - x_prev||^2.
Vector prox_step(const Vector& x_prev, const Vector& y, const Vector& g,
                 double gamma, double mu, const FeasibleSet& feasible);

// Projected gradient baseline: Proj_X(x - lr g).
Vector markov_sgd_step(const Vector& x, const Vector& g, double lr,
                       const FeasibleSet& feasible);

enum class TracePolicy { metrics_only, full };

enum class Algorithm { amgd_nonconvex, amgd_convex, markov_sgd };

// Per-iteration record of one optimizer run. Query points are kept for every
// iteration in both policies (the randomized output rule needs them); the
// full policy additionally keeps x_k and x_bar_k.
struct OptimizerTrace {
  TracePolicy policy = TracePolicy::metrics_only;
  std::string metric_name;
  std::uint64_t seed = 0;
  std::vector<long> ks;
  std::vector<int> samples;      // visited chain states
  std::vector<double> gammas;    // step size used at each iteration
  std::vector<double> metrics;   // empty unless exact metrics were enabled
  std::vector<Vector> ys;        // query points
  std::vector<Vector> xs;        // full policy only
  std::vector<Vector> x_bars;    // full policy only (accelerated runs)

  long iterations() const { return static_cast<long>(ks.size()); }
};

struct RunOptions {
  long iterations = 0;
  std::uint64_t seed = 1;
  int start_state = 0;
  Vector x0;  // empty means the origin (projected if constrained)
  TracePolicy policy = TracePolicy::metrics_only;
  // When set, record the exact stationary-averaged diagnostic each step:
  // ||grad f(y_k)||^2 for unconstrained accelerated runs, f(x_bar_k) (minus
  // f_star_value when finite) for projected runs, and the same at x_k for the
  // baseline.
  bool exact_metrics = false;
  double f_star_value = std::numeric_limits<double>::quiet_NaN();
  double lr = 0.0;  // markov_sgd only
  FeasibleSet feasible;
};

// Drives one algorithm against a chain-sampled gradient stream. Deterministic
// for a fixed seed. The projected algorithm refuses nonconvex objectives
// (NotConvex).
OptimizerTrace run(Algorithm algorithm, const MarkovObjective& objective,
                   const FiniteMarkovChain& chain,
                   const StepSchedule& schedule, const RunOptions& options);

// Output-rule weights p_k proportional to gamma_k (1 - L gamma_k); they sum
// to one. Throws NonpositiveWeight if any gamma_k >= 1/L and EmptyBatch on an
// empty trace.
std::vector<double> output_weights(const OptimizerTrace& trace,
                                   double smoothness);

// Draws a 0-based trace index with the output-rule probabilities.
long select_output_index(const OptimizerTrace& trace, double smoothness,
                         Rng& rng);

// The randomly selected query point y_R itself.
Vector select_output(const OptimizerTrace& trace, double smoothness, Rng& rng);

// CSV export with columns k,metric_name,value,seed; 17 significant digits.
void export_trace_csv(const OptimizerTrace& trace, const std::string& path);

}  // namespace amgd
