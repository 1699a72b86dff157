#pragma once

#include <functional>
#include <vector>

#include "amgd/types.hpp"

namespace amgd {

enum class ScheduleRegime { nonconvex, convex, strongly_convex, custom };

// Step-size sequences {alpha_k, beta_k, gamma_k} for one optimizer run,
// together with the constants (L, mu) they were built from and the running
// products Gamma_k. Instances are value types; the Gamma memo is per-copy, so
// give each concurrent trial its own copy.
class StepSchedule {
 public:
  using Fn = std::function<double(long)>;

  static StepSchedule custom(Fn alpha, Fn beta, Fn gamma, double smoothness,
                             double strong_convexity, long horizon = 0);

  ScheduleRegime regime() const { return regime_; }
  double alpha(long k) const { return alpha_(check(k)); }
  double beta(long k) const { return beta_(check(k)); }
  double gamma(long k) const { return gamma_(check(k)); }
  long horizon() const { return horizon_; }  // 0 means unbounded
  double smoothness() const { return smoothness_; }
  double strong_convexity() const { return strong_convexity_; }

  // Gamma_1 = 1, Gamma_k = (1 - alpha_k) Gamma_{k-1}; memoized iteratively.
  double gamma_product(long k) const;

 private:
  friend StepSchedule build_schedule(ScheduleRegime, double, double, long,
                                     bool);
  StepSchedule() = default;
  static long check(long k);

  ScheduleRegime regime_ = ScheduleRegime::custom;
  Fn alpha_, beta_, gamma_;
  long horizon_ = 0;
  double smoothness_ = 0.0;
  double strong_convexity_ = 0.0;
  mutable std::vector<double> products_;  // products_[k-1] = Gamma_k
};

inline double gamma_product(const StepSchedule& s, long k) {
  return s.gamma_product(k);
}

// Builds the schedule for the requested regime.
//
//   nonconvex        alpha_k = 2/(k+1), beta_k = 1/sqrt(K) (needs a horizon
//                    K >= 16 L^2 so beta <= 1/(4L): HorizonTooSmall below),
//                    gamma_k = beta_k, or (1+alpha_k) beta_k — the top of the
//                    admissible range — when gamma_upper is set.
//   convex           alpha_k = beta_k = 2/(k+1), gamma_k = 1/(2L sqrt(k+1));
//                    pass mu = 0.
//   strongly_convex  alpha_k = 2/(k+1), gamma_k = 2/(mu k),
//                    beta_k = alpha_k / (alpha_k + (1-alpha_k)(1+mu gamma_k)).
//
// Throws BadConstants for nonpositive L (or mu when required).
StepSchedule build_schedule(ScheduleRegime regime, double smoothness,
                            double strong_convexity, long horizon = 0,
                            bool gamma_upper = false);

}  // namespace amgd
