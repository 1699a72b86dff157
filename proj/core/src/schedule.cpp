#include "amgd/schedule.hpp"

#include <cmath>
#include <string>

#include "amgd/error.hpp"

namespace amgd {

long StepSchedule::check(long k) {
  if (k < 1) throw Error("BadConstants", "step index must be >= 1");
  return k;
}

StepSchedule StepSchedule::custom(Fn alpha, Fn beta, Fn gamma,
                                  double smoothness, double strong_convexity,
                                  long horizon) {
  if (!(smoothness > 0.0))
    throw Error("BadConstants", "smoothness constant must be > 0");
  if (!(strong_convexity >= 0.0))
    throw Error("BadConstants", "strong-convexity modulus must be >= 0");
  StepSchedule s;
  s.regime_ = ScheduleRegime::custom;
  s.alpha_ = std::move(alpha);
  s.beta_ = std::move(beta);
  s.gamma_ = std::move(gamma);
  s.smoothness_ = smoothness;
  s.strong_convexity_ = strong_convexity;
  s.horizon_ = horizon;
  return s;
}

double StepSchedule::gamma_product(long k) const {
  check(k);
  if (products_.empty()) products_.push_back(1.0);  // Gamma_1
  while (static_cast<long>(products_.size()) < k) {
    long next = static_cast<long>(products_.size()) + 1;
    products_.push_back((1.0 - alpha_(next)) * products_.back());
  }
  return products_[k - 1];
}

StepSchedule build_schedule(ScheduleRegime regime, double smoothness,
                            double strong_convexity, long horizon,
                            bool gamma_upper) {
  if (!(smoothness > 0.0))
    throw Error("BadConstants", "smoothness constant must be > 0");

  StepSchedule s;
  s.regime_ = regime;
  s.smoothness_ = smoothness;
  s.strong_convexity_ = strong_convexity;
  s.horizon_ = horizon;
  const double L = smoothness;
  const double mu = strong_convexity;

  auto accel_alpha = [](long k) { return 2.0 / (k + 1); };

  switch (regime) {
    case ScheduleRegime::nonconvex: {
      if (horizon < 1)
        throw Error("BadConstants", "this regime needs a finite horizon");
      double beta = 1.0 / std::sqrt(static_cast<double>(horizon));
      if (beta > 1.0 / (4.0 * L) + 1e-15)
        throw Error("HorizonTooSmall",
                    "horizon " + std::to_string(horizon) +
                        " < 16 L^2 = " + std::to_string(16.0 * L * L));
      s.alpha_ = accel_alpha;
      s.beta_ = [beta](long) { return beta; };
      if (gamma_upper)
        s.gamma_ = [beta, accel_alpha](long k) {
          return (1.0 + accel_alpha(k)) * beta;
        };
      else
        s.gamma_ = [beta](long) { return beta; };
      break;
    }
    case ScheduleRegime::convex: {
      if (mu != 0.0)
        throw Error("BadConstants",
                    "plain convex schedule expects a zero modulus");
      s.alpha_ = accel_alpha;
      s.beta_ = accel_alpha;
      s.gamma_ = [L](long k) {
        return 1.0 / (2.0 * L * std::sqrt(static_cast<double>(k + 1)));
      };
      break;
    }
    case ScheduleRegime::strongly_convex: {
      if (!(mu > 0.0))
        throw Error("BadConstants",
                    "strongly convex schedule needs a positive modulus");
      s.alpha_ = accel_alpha;
      s.gamma_ = [mu](long k) { return 2.0 / (mu * k); };
      s.beta_ = [mu, accel_alpha](long k) {
        double a = accel_alpha(k);
        double g = 2.0 / (mu * k);
        return a / (a + (1.0 - a) * (1.0 + mu * g));
      };
      break;
    }
    case ScheduleRegime::custom:
      throw Error("BadConstants",
                  "custom schedules are built from explicit sequences");
  }
  return s;
}

}  // namespace amgd
