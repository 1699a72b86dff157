#pragma once

#include "amgd/objective.hpp"
#include "amgd/types.hpp"

// Independent reference minimizer for the proximal subproblem
//   min_{x in X} gamma [<g, x - y> + (mu/2)||y - x||^2] + (1/2)||x - x_prev||^2
// by iterative grid zoom over projected candidates (d = 2 only). Accuracy is
// set by the final window: ~1e-7 with the defaults.
inline amgd::Vector prox_brute_force(const amgd::Vector& x_prev,
                                     const amgd::Vector& y,
                                     const amgd::Vector& g, double gamma,
                                     double mu,
                                     const amgd::FeasibleSet& feasible) {
  using amgd::Vector;
  auto phi = [&](const Vector& x) {
    return gamma * (g.dot(x - y) + 0.5 * mu * (y - x).squaredNorm()) +
           0.5 * (x - x_prev).squaredNorm();
  };

  Vector center;
  double width = 0.0;
  switch (feasible.kind()) {
    case amgd::FeasibleSet::Kind::Ball:
      center = feasible.center();
      width = 2.2 * feasible.radius();
      break;
    case amgd::FeasibleSet::Kind::Box:
      center = 0.5 * (feasible.lower() + feasible.upper());
      width = 1.1 * (feasible.upper() - feasible.lower()).maxCoeff();
      break;
    case amgd::FeasibleSet::Kind::AllSpace:
      center = x_prev;
      width = 4.0 * ((x_prev - y).norm() + gamma * g.norm() + 1.0);
      break;
  }

  Vector best = feasible.project(center);
  double best_value = phi(best);
  const int cells = 40;
  for (int round = 0; round < 12; ++round) {
    double lo0 = center(0) - width / 2, lo1 = center(1) - width / 2;
    double step = width / cells;
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        Vector p(2);
        p << lo0 + i * step, lo1 + j * step;
        p = feasible.project(p);
        double v = phi(p);
        if (v < best_value) {
          best_value = v;
          best = p;
        }
      }
    }
    center = best;
    width *= 0.25;
  }
  return best;
}
