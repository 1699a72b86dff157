#include "amgd/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "amgd/error.hpp"

namespace amgd {

namespace {

void check_dims(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw Error("LengthMismatch", std::string("dimension mismatch in ") + what);
}

void check_horizon(long k, const StepSchedule& schedule) {
  if (schedule.horizon() > 0 && k > schedule.horizon())
    throw Error("ScheduleMismatch",
                "step " + std::to_string(k) + " exceeds the schedule horizon " +
                    std::to_string(schedule.horizon()));
}

// Momentum identity and step-compatibility condition for custom schedules
// driving the projected algorithm with mu > 0: beta_k must satisfy
// beta(1-alpha)(1+mu gamma) = alpha(1-beta) and 1 + mu gamma > L alpha gamma.
void check_custom_schedule(const StepSchedule& schedule, long k, double mu) {
  if (schedule.regime() != ScheduleRegime::custom || mu <= 0.0) return;
  double a = schedule.alpha(k);
  double b = schedule.beta(k);
  double g = schedule.gamma(k);
  double lhs = b * (1.0 - a) * (1.0 + mu * g);
  double rhs = a * (1.0 - b);
  if (std::abs(lhs - rhs) > 1e-9)
    throw Error("ScheduleViolation",
                "momentum identity fails at step " + std::to_string(k));
  if (!(1.0 + mu * g > schedule.smoothness() * a * g))
    throw Error("ScheduleViolation",
                "step-compatibility inequality fails at step " +
                    std::to_string(k));
}

}  // namespace

NonconvexState nonconvex_init(const Vector& x0, const StepSchedule& schedule) {
  NonconvexState s;
  s.x = x0;
  s.x_bar = x0;
  s.k = 0;
  double a = schedule.alpha(1);
  s.y = (1.0 - a) * s.x_bar + a * s.x;
  return s;
}

NonconvexState amgd_nonconvex_step(const NonconvexState& state,
                                   const Vector& g,
                                   const StepSchedule& schedule) {
  check_dims(state.x, g, "accelerated step");
  long k = state.k + 1;
  check_horizon(k, schedule);
  double a = schedule.alpha(k);
  Vector y = (1.0 - a) * state.x_bar + a * state.x;

  NonconvexState next;
  next.k = k;
  next.x = state.x - schedule.gamma(k) * g;
  next.x_bar = y - schedule.beta(k) * g;
  double a_next = schedule.alpha(k + 1);
  next.y = (1.0 - a_next) * next.x_bar + a_next * next.x;
  return next;
}

ConvexState convex_init(const Vector& x0, const StepSchedule& schedule,
                        const FeasibleSet& feasible) {
  ConvexState s;
  s.x = feasible.project(x0);
  s.x_bar = s.x;
  s.k = 0;
  double b = schedule.beta(1);
  s.y = (1.0 - b) * s.x_bar + b * s.x;
  return s;
}

ConvexState amgd_convex_step(const ConvexState& state, const Vector& g,
                             const StepSchedule& schedule, double mu,
                             const FeasibleSet& feasible) {
  check_dims(state.x, g, "projected accelerated step");
  long k = state.k + 1;
  check_horizon(k, schedule);
  check_custom_schedule(schedule, k, mu);

  double b = schedule.beta(k);
  Vector y = (1.0 - b) * state.x_bar + b * state.x;

  ConvexState next;
  next.k = k;
  next.x = prox_step(state.x, y, g, schedule.gamma(k), mu, feasible);
  double a = schedule.alpha(k);
  next.x_bar = (1.0 - a) * state.x_bar + a * next.x;
  double b_next = schedule.beta(k + 1);
  next.y = (1.0 - b_next) * next.x_bar + b_next * next.x;
  return next;
}

Vector prox_step(const Vector& x_prev, const Vector& y, const Vector& g,
                 double gamma, double mu, const FeasibleSet& feasible) {
  if (!(gamma > 0.0)) throw Error("BadConstants", "prox step size must be > 0");
  if (!(mu >= 0.0)) throw Error("BadConstants", "prox modulus must be >= 0");
  check_dims(x_prev, y, "prox step");
  check_dims(x_prev, g, "prox step");
  Vector z = (x_prev + (mu * gamma) * y - gamma * g) / (1.0 + mu * gamma);
  return feasible.project(z);
}

Vector markov_sgd_step(const Vector& x, const Vector& g, double lr,
                       const FeasibleSet& feasible) {
  if (!(lr > 0.0)) throw Error("BadConstants", "learning rate must be > 0");
  check_dims(x, g, "gradient step");
  return feasible.project(x - lr * g);
}

OptimizerTrace run(Algorithm algorithm, const MarkovObjective& objective,
                   const FiniteMarkovChain& chain,
                   const StepSchedule& schedule, const RunOptions& options) {
  if (algorithm == Algorithm::amgd_convex &&
      objective.convexity_class() == ConvexityClass::nonconvex)
    throw Error("NotConvex",
                "the projected algorithm needs a convex objective");

  Vector x0 = options.x0.size() ? options.x0 : Vector::Zero(objective.dim());
  if (x0.size() != objective.dim())
    throw Error("LengthMismatch", "start point dimension mismatch");

  OptimizerTrace trace;
  trace.policy = options.policy;
  trace.seed = options.seed;
  bool have_ref = std::isfinite(options.f_star_value);
  switch (algorithm) {
    case Algorithm::amgd_nonconvex:
      trace.metric_name = "grad_norm_sq";
      break;
    case Algorithm::amgd_convex:
      trace.metric_name = have_ref ? "objective_gap" : "objective";
      break;
    case Algorithm::markov_sgd:
      trace.metric_name =
          objective.convexity_class() == ConvexityClass::nonconvex
              ? "grad_norm_sq"
              : (have_ref ? "objective_gap" : "objective");
      break;
  }

  long n = options.iterations;
  trace.ks.reserve(n);
  trace.samples.reserve(n);
  trace.gammas.reserve(n);
  trace.ys.reserve(n);
  if (options.exact_metrics) trace.metrics.reserve(n);

  GradientStream stream(chain, objective, options.start_state, options.seed);
  double mu = schedule.strong_convexity();

  NonconvexState nc;
  ConvexState cv;
  Vector sgd_x;
  switch (algorithm) {
    case Algorithm::amgd_nonconvex:
      nc = nonconvex_init(x0, schedule);
      break;
    case Algorithm::amgd_convex:
      cv = convex_init(x0, schedule, options.feasible);
      break;
    case Algorithm::markov_sgd:
      sgd_x = options.feasible.project(x0);
      break;
  }

  for (long k = 1; k <= n; ++k) {
    const Vector& query = algorithm == Algorithm::amgd_nonconvex
                              ? nc.y
                              : (algorithm == Algorithm::amgd_convex ? cv.y
                                                                     : sgd_x);
    trace.ys.push_back(query);
    int xi = stream.next_sample();
    Vector g = objective.gradient(query, xi);

    double gamma = 0.0;
    switch (algorithm) {
      case Algorithm::amgd_nonconvex:
        gamma = schedule.gamma(k);
        nc = amgd_nonconvex_step(nc, g, schedule);
        break;
      case Algorithm::amgd_convex:
        gamma = schedule.gamma(k);
        cv = amgd_convex_step(cv, g, schedule, mu, options.feasible);
        break;
      case Algorithm::markov_sgd:
        gamma = options.lr;
        sgd_x = markov_sgd_step(sgd_x, g, options.lr, options.feasible);
        break;
    }

    trace.ks.push_back(k);
    trace.samples.push_back(xi);
    trace.gammas.push_back(gamma);
    if (options.policy == TracePolicy::full) {
      switch (algorithm) {
        case Algorithm::amgd_nonconvex:
          trace.xs.push_back(nc.x);
          trace.x_bars.push_back(nc.x_bar);
          break;
        case Algorithm::amgd_convex:
          trace.xs.push_back(cv.x);
          trace.x_bars.push_back(cv.x_bar);
          break;
        case Algorithm::markov_sgd:
          trace.xs.push_back(sgd_x);
          break;
      }
    }
    if (options.exact_metrics) {
      double m = 0.0;
      switch (algorithm) {
        case Algorithm::amgd_nonconvex:
          m = exact_gradient(objective, chain, query).squaredNorm();
          break;
        case Algorithm::amgd_convex:
          m = exact_objective(objective, chain, cv.x_bar);
          if (have_ref) m -= options.f_star_value;
          break;
        case Algorithm::markov_sgd:
          if (objective.convexity_class() == ConvexityClass::nonconvex) {
            m = exact_gradient(objective, chain, sgd_x).squaredNorm();
          } else {
            m = exact_objective(objective, chain, sgd_x);
            if (have_ref) m -= options.f_star_value;
          }
          break;
      }
      trace.metrics.push_back(m);
    }
  }
  return trace;
}

std::vector<double> output_weights(const OptimizerTrace& trace,
                                   double smoothness) {
  if (trace.iterations() == 0)
    throw Error("EmptyBatch", "trace has no iterations to select from");
  std::vector<double> w(trace.gammas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double g = trace.gammas[i];
    w[i] = g * (1.0 - smoothness * g);
    if (!(w[i] > 0.0))
      throw Error("NonpositiveWeight",
                  "output weight at step " + std::to_string(i + 1) +
                      " is not positive; needs gamma < 1/L");
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

long select_output_index(const OptimizerTrace& trace, double smoothness,
                         Rng& rng) {
  std::vector<double> w = output_weights(trace, smoothness);
  double draw = rng.uniform_open();
  double cum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (cum >= draw) return static_cast<long>(i);
  }
  return static_cast<long>(w.size()) - 1;
}

Vector select_output(const OptimizerTrace& trace, double smoothness,
                     Rng& rng) {
  return trace.ys[select_output_index(trace, smoothness, rng)];
}

void export_trace_csv(const OptimizerTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open " + path);
  out << "k,metric_name,value,seed\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.metrics.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", trace.metrics[i]);
    out << trace.ks[i] << "," << trace.metric_name << "," << buf << ","
        << trace.seed << "\n";
  }
  if (!out) throw Error("IoFailure", "write failed for " + path);
}

}  // namespace amgd
