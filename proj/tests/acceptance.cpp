// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line;
// the process exit code is the number of failed checks. Numeric tolerances and
// committed seed sets are frozen here on purpose: reruns must be byte-stable.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "amgd/config.hpp"
#include "amgd/error.hpp"
#include "amgd/gridworld.hpp"
#include "amgd/markov.hpp"
#include "amgd/objective.hpp"
#include "amgd/optimizer.hpp"
#include "amgd/policy_gradient.hpp"
#include "amgd/rate_study.hpp"
#include "amgd/report.hpp"
#include "amgd/schedule.hpp"

using namespace amgd;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& detail) {
  if (!cond) throw CheckFailure(detail);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 01: the strongly convex momentum weights satisfy their defining identity
//     beta_k(1-alpha_k)/(alpha_k(1-beta_k)) = 1/(1+mu*gamma_k) for every step.
std::string check_momentum_identity() {
  double worst = 0.0;
  for (double mu : {0.1, 1.0, 10.0}) {
    const StepSchedule s =
        build_schedule(ScheduleRegime::strongly_convex, mu / 2.0, mu);
    for (long k = 1; k <= 100000; ++k) {
      const double a = s.alpha(k);
      const double b = s.beta(k);
      const double g = s.gamma(k);
      double err;
      if (k == 1) {
        // alpha_1 = 1 makes the quotient 0/0; use the cross-multiplied form.
        err = std::abs(b * (1.0 - a) * (1.0 + mu * g) - a * (1.0 - b));
      } else {
        err = std::abs(b * (1.0 - a) / (a * (1.0 - b)) - 1.0 / (1.0 + mu * g));
      }
      worst = std::max(worst, err);
      expect(err <= 1e-12, "identity error " + fmt(err) + " at mu=" + fmt(mu) +
                               " k=" + std::to_string(k));
    }
  }
  return "max error " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 02: the cumulative averaging weights match the closed form 2/(k(k+1)).
std::string check_averaging_closed_form() {
  const StepSchedule s = build_schedule(ScheduleRegime::strongly_convex, 0.5, 1.0);
  double worst = 0.0;
  for (long k = 1; k <= 100000; ++k) {
    const double exact = 2.0 / (static_cast<double>(k) * (k + 1));
    const double rel = std::abs(s.gamma_product(k) - exact) / exact;
    worst = std::max(worst, rel);
    expect(rel <= 1e-9,
           "relative error " + fmt(rel) + " at k=" + std::to_string(k));
  }
  return "max relative error " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 03: the randomized output rule is a proper distribution, degenerates to
//     uniform when the curvature term vanishes, and empirical draw
//     frequencies match the weights.
std::string check_output_rule() {
  const FiniteMarkovChain chain = make_random_ergodic_chain(3, 5);
  Rng setup(9);
  std::vector<AffineSample> samples;
  for (int s = 0; s < 3; ++s) {
    Vector a(2);
    a << setup.normal(), setup.normal();
    samples.push_back({a, setup.normal()});
  }
  // Bounded-gradient objective so the unconstrained accelerated method and
  // its output rule apply.
  const MarkovObjective obj = make_robust_nonconvex(chain, samples, 10.0);

  // Constant-step run: weights sum to one; with zero curvature they are
  // exactly uniform.
  const double smoothness = obj.smoothness();
  const StepSchedule constant_step =
      build_schedule(ScheduleRegime::nonconvex, smoothness, 0.0,
                     static_cast<long>(std::ceil(16 * smoothness * smoothness)) + 1000);
  RunOptions opts;
  opts.iterations = 1000;
  opts.seed = 3;
  const OptimizerTrace trace =
      run(Algorithm::amgd_nonconvex, obj, chain, constant_step, opts);
  const std::vector<double> w = output_weights(trace, smoothness);
  double total = 0.0;
  for (double x : w) total += x;
  expect(std::abs(total - 1.0) <= 1e-12, "weights sum to " + fmt(total));
  const std::vector<double> uniform = output_weights(trace, 0.0);
  for (double x : uniform)
    expect(std::abs(x - 1.0 / 1000.0) <= 1e-12,
           "zero-curvature weight " + fmt(x) + " is not uniform");

  // Varying-step run: draw frequencies within 3 standard errors.
  const StepSchedule varying = StepSchedule::custom(
      [](long k) { return 2.0 / (k + 1); }, [](long) { return 0.05; },
      [](long k) { return 0.1 / std::sqrt(static_cast<double>(k)); }, 1.0, 0.0);
  RunOptions vopts;
  vopts.iterations = 8;
  vopts.seed = 4;
  const OptimizerTrace vtrace =
      run(Algorithm::amgd_nonconvex, obj, chain, varying, vopts);
  const std::vector<double> p = output_weights(vtrace, 1.0);
  const long n = 100000;
  std::vector<long> counts(p.size(), 0);
  Rng draw(2718);
  for (long i = 0; i < n; ++i) ++counts[select_output_index(vtrace, 1.0, draw)];
  double worst_z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double freq = static_cast<double>(counts[i]) / n;
    const double se = std::sqrt(p[i] * (1.0 - p[i]) / n);
    const double z = std::abs(freq - p[i]) / se;
    worst_z = std::max(worst_z, z);
    expect(z <= 3.0, "draw frequency for step " + std::to_string(i + 1) +
                         " off by " + fmt(z) + " standard errors");
  }
  return "weight sum error " + fmt(std::abs(total - 1.0)) + ", max z " +
         fmt(worst_z);
}

// ---------------------------------------------------------------------------
// 04: the closed-form proximal step matches brute-force minimization of
//     gamma<g,x> + mu*gamma*0.5||x-y||^2 + 0.5||x-x_prev||^2 over the set.
std::string check_prox_equivalence() {
  Rng rng(2024);
  const double mus[3] = {0.0, 0.5, 2.0};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector y(2), xp(2), g(2);
    y << rng.normal(), rng.normal();
    xp << rng.normal(), rng.normal();
    g << rng.normal(), rng.normal();
    const double gamma = 0.01 + 0.99 * rng.uniform();
    const double mu = mus[trial % 3];
    FeasibleSet set;
    if (trial % 2 == 0) {
      Vector c(2);
      c << rng.normal(), rng.normal();
      set = FeasibleSet::ball(c, 0.3 + 1.7 * rng.uniform());
    } else {
      Vector lo(2), hi(2);
      for (int i = 0; i < 2; ++i) {
        const double mid = rng.normal();
        const double half = 0.2 + rng.uniform();
        lo[i] = mid - half;
        hi[i] = mid + half;
      }
      set = FeasibleSet::box(lo, hi);
    }

    const Vector closed = prox_step(xp, y, g, gamma, mu, set);
    const auto objective = [&](const Vector& x) {
      return gamma * g.dot(x) + mu * gamma * 0.5 * (x - y).squaredNorm() +
             0.5 * (x - xp).squaredNorm();
    };
    // Shrinking projected grid search, started at the set's midpoint with a
    // range covering the whole set.
    double range;
    Vector center(2);
    if (set.kind() == FeasibleSet::Kind::Ball) {
      center = set.center();
      range = set.radius();
    } else {
      center = 0.5 * (set.lower() + set.upper());
      range = 0.5 * (set.upper() - set.lower()).maxCoeff();
    }
    Vector best = center;
    double best_val = objective(best);
    for (int round = 0; round < 9; ++round) {
      for (int i = -16; i <= 16; ++i) {
        for (int j = -16; j <= 16; ++j) {
          Vector cand(2);
          cand << center[0] + range * i / 16.0, center[1] + range * j / 16.0;
          cand = set.project(cand);
          const double val = objective(cand);
          if (val < best_val) {
            best_val = val;
            best = cand;
          }
        }
      }
      center = best;
      range /= 8.0;
    }
    const double dist = (closed - best).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, dist);
    expect(dist <= 1e-6, "trial " + std::to_string(trial) + " closed form off by " +
                             fmt(dist));
  }
  return "max deviation " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 05: the k-step gradient bias is bounded by 2M times the total-variation
//     distance between the k-step and stationary state distributions.
std::string check_bias_bound() {
  const FiniteMarkovChain chain = make_random_ergodic_chain(5, 11);
  Rng rng(7);
  std::vector<AffineSample> samples;
  for (int s = 0; s < 5; ++s) {
    Vector a(3);
    a << rng.normal(), rng.normal(), rng.normal();
    samples.push_back({a, rng.normal()});
  }
  const FeasibleSet ball = FeasibleSet::ball(Vector::Zero(3), 2.0);
  const MarkovObjective obj = make_least_squares(chain, samples, ball);
  const double m_bound = obj.grad_bound();
  const Distribution& pi = chain.stationary();

  // State distributions do not depend on x: precompute them.
  std::vector<std::vector<Distribution>> dists(5);
  for (int xi0 = 0; xi0 < 5; ++xi0)
    for (long k = 1; k <= 200; ++k)
      dists[xi0].push_back(chain.k_step_distribution(xi0, k));

  double worst_slack = -1.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(3);
    x << rng.normal(), rng.normal(), rng.normal();
    x = ball.project(x * (0.5 + rng.uniform()));
    std::vector<Vector> grads;
    for (int s = 0; s < 5; ++s) grads.push_back(obj.gradient(x, s));
    for (int xi0 = 0; xi0 < 5; ++xi0) {
      for (long k = 1; k <= 200; ++k) {
        const Distribution& pk = dists[xi0][k - 1];
        Vector bias = Vector::Zero(3);
        for (int s = 0; s < 5; ++s) bias += (pk[s] - pi[s]) * grads[s];
        const double bound = 2.0 * m_bound * tv_distance(pk, pi);
        const double slack = bias.norm() - bound;
        worst_slack = std::max(worst_slack, slack);
        expect(slack <= 1e-10, "bias exceeds 2M*TV by " + fmt(slack) +
                                   " at xi0=" + std::to_string(xi0) +
                                   " k=" + std::to_string(k));
      }
    }
  }
  return "max slack " + fmt(worst_slack);
}

// ---------------------------------------------------------------------------
// 06: computed mixing times hit the analytic geometric crossing exactly.
std::string check_mixing_time() {
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  const FiniteMarkovChain chain = FiniteMarkovChain::from_matrix(p);
  std::string note;
  for (double gamma : {0.1, 0.01, 0.001}) {
    // Worst-start TV is (2/3)*0.7^k; find its first crossing directly.
    long analytic = 1;
    double tv = 2.0 / 3.0;
    while (true) {
      tv *= 0.7;
      if (tv <= gamma) break;
      ++analytic;
    }
    const long computed = chain.mixing_time(gamma);
    expect(computed == analytic,
           "mixing_time(" + fmt(gamma) + ") = " + std::to_string(computed) +
               ", analytic crossing at " + std::to_string(analytic));
    note += std::to_string(computed) + " ";
  }
  return "crossings " + note + "for 0.1/0.01/0.001";
}

// ---------------------------------------------------------------------------
// Committed rate-study configurations (criteria 07-09).
ExperimentConfig rate_config(const std::string& regime, const std::string& builtin,
                             const std::string& seeds) {
  ExperimentConfig cfg;
  cfg.set("experiment", "rates");
  cfg.set("regime", regime);
  cfg.set("builtin", builtin);
  cfg.set("seeds", seeds);
  return cfg;
}

std::string check_strongly_convex_slope() {
  ExperimentConfig cfg = rate_config("strongly_convex", "least_squares_ball",
                                     "1,2,3,4,5,6,7,8,9,10");
  cfg.set("iterations", "100000");
  cfg.set("fit_k_min", "1000");
  cfg.set("fit_k_max", "100000");
  const ExperimentReport report = run_rate_study(cfg);
  expect(report.has_slope, "no slope fitted");
  const double s = report.slope.slope;
  expect(s >= -1.4 && s <= -0.6, "slope " + fmt(s) + " outside [-1.4,-0.6]");
  return "slope " + fmt(s) + " in [-1.4,-0.6]";
}

std::string check_convex_slope() {
  ExperimentConfig cfg = rate_config("convex", "least_squares_rank_deficient",
                                     "1,2,3,4,5,6,7,8,9,10");
  cfg.set("iterations", "100000");
  cfg.set("fit_k_min", "1000");
  cfg.set("fit_k_max", "100000");
  const ExperimentReport report = run_rate_study(cfg);
  expect(report.has_slope, "no slope fitted");
  const double s = report.slope.slope;
  expect(s >= -0.8 && s <= -0.3, "slope " + fmt(s) + " outside [-0.8,-0.3]");
  return "slope " + fmt(s) + " in [-0.8,-0.3]";
}

std::string check_nonconvex_slope() {
  ExperimentConfig cfg = rate_config(
      "nonconvex", "robust_nonconvex",
      "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20");
  cfg.set("builtin_scale", "16");
  cfg.set("horizons", "100,316,1000,3162,10000");
  const ExperimentReport report = run_rate_study(cfg);
  expect(report.has_slope, "no slope fitted");
  const double s = report.slope.slope;
  expect(s >= -0.8 && s <= -0.25, "slope " + fmt(s) + " outside [-0.8,-0.25]");
  return "slope " + fmt(s) + " in [-0.8,-0.25]";
}

// ---------------------------------------------------------------------------
// 10: accelerated policy evaluation reaches a final mean NEU no worse than
//     the plain method on the committed seed set.
std::string check_td_comparison() {
  ExperimentConfig base;
  base.set("experiment", "rl_td");
  base.set("grid", "10");
  base.set("episodes", "500");
  base.set("seeds", "1,2,3,4,5,6,7,8,9,10");
  ExperimentConfig plain = base;
  plain.set("method", "td0");
  ExperimentConfig acc = base;
  acc.set("method", "td0_acc");
  const ExperimentReport rp = run_experiment(plain);
  const ExperimentReport ra = run_experiment(acc);
  const double fp = rp.mean.back();
  const double fa = ra.mean.back();
  expect(fa <= fp, "accelerated final NEU " + fmt(fa) + " > plain " + fmt(fp));
  return "final NEU " + fmt(fa) + " (accelerated) vs " + fmt(fp) + " (plain)";
}

// ---------------------------------------------------------------------------
// 11: accelerated policy ascent matches or beats the plain method at the
//     committed budget, and both improve on the initial policy.
std::string check_pg_comparison() {
  ExperimentConfig base;
  base.set("experiment", "rl_pg");
  base.set("grid", "4");
  base.set("iterations", "100");
  base.set("batch", "10");
  base.set("measure_every", "10");
  base.set("lr", "0.1");
  base.set("seeds", "1,2,3,4,5,6,7,8,9,10");
  ExperimentConfig plain = base;
  plain.set("method", "reinforce");
  ExperimentConfig acc = base;
  acc.set("method", "reinforce_acc");
  acc.set("gamma_upper", "true");
  const ExperimentReport rp = run_experiment(plain);
  const ExperimentReport ra = run_experiment(acc);
  const double init = rp.mean.front();
  const double fp = rp.mean.back();
  const double fa = ra.mean.back();
  expect(fa >= fp, "accelerated final return " + fmt(fa) + " < plain " + fmt(fp));
  expect(fp > init, "plain did not improve: " + fmt(fp) + " vs " + fmt(init));
  expect(fa > ra.mean.front(),
         "accelerated did not improve: " + fmt(fa) + " vs " + fmt(ra.mean.front()));
  return "final return " + fmt(fa) + " (accelerated) vs " + fmt(fp) +
         " (plain), initial " + fmt(init);
}

// ---------------------------------------------------------------------------
// 12: analytic gradients match central finite differences; the policy
//     gradient estimator differentiates its frozen-batch surrogate.
std::string check_finite_differences() {
  double worst = 0.0;
  const char* builtins[] = {"least_squares_ball", "least_squares_rank_deficient",
                            "robust_nonconvex", "scalar_quadratic"};
  for (const char* name : builtins) {
    ExperimentConfig cfg;
    cfg.set("builtin", name);
    if (std::string(name) == "robust_nonconvex") cfg.set("builtin_scale", "16");
    const BuiltinProblem problem = make_builtin_problem(cfg);
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      Vector x(problem.objective.dim());
      for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
      x = problem.feasible.project(x);
      const Vector grad = exact_gradient(problem.objective, problem.chain, x);
      Vector fd(x.size());
      const double h = 1e-5;
      for (int i = 0; i < x.size(); ++i) {
        Vector hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        fd[i] = (exact_objective(problem.objective, problem.chain, hi) -
                 exact_objective(problem.objective, problem.chain, lo)) /
                (2 * h);
      }
      const double rel = (grad - fd).norm() / std::max(1.0, grad.norm());
      worst = std::max(worst, rel);
      expect(rel <= 1e-6, std::string(name) + " gradient off by " + fmt(rel));
      // Spot-check one per-state gradient as well.
      const int s = trial % problem.chain.n_states();
      const Vector gs = problem.objective.gradient(x, s);
      Vector fds(x.size());
      for (int i = 0; i < x.size(); ++i) {
        Vector hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        fds[i] = (problem.objective.value(hi, s) - problem.objective.value(lo, s)) /
                 (2 * h);
      }
      const double rel_s = (gs - fds).norm() / std::max(1.0, gs.norm());
      worst = std::max(worst, rel_s);
      expect(rel_s <= 1e-6,
             std::string(name) + " per-state gradient off by " + fmt(rel_s));
    }
  }

  // Policy-gradient estimator vs finite differences of the batch surrogate.
  const GridWorld world(2);
  const SoftmaxPolicy policy(world.n_states(), world.n_actions());
  Rng rng(64);
  Vector theta(policy.param_dim());
  for (int i = 0; i < theta.size(); ++i) theta[i] = 0.3 * rng.normal();
  for (Baseline baseline : {Baseline::mean_return, Baseline::none}) {
    Rng collect(12);
    const EpisodeBatch batch = collect_batch(world, policy, theta, 5, collect);
    const Vector grad =
        reinforce_gradient(policy, batch, world.discount(), baseline, theta);
    Vector fd(theta.size());
    const double h = 1e-5;
    for (int i = 0; i < theta.size(); ++i) {
      Vector hi = theta, lo = theta;
      hi[i] += h;
      lo[i] -= h;
      fd[i] = (reinforce_surrogate(policy, batch, world.discount(), baseline, hi) -
               reinforce_surrogate(policy, batch, world.discount(), baseline, lo)) /
              (2 * h);
    }
    const double rel = (grad - fd).norm() / std::max(1.0, grad.norm());
    worst = std::max(worst, rel);
    expect(rel <= 1e-6, "policy gradient off by " + fmt(rel));
  }
  return "max relative error " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 13: two CLI invocations with the same configuration emit byte-identical
//     CSV files.
std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  expect(bool(in), "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string check_cli_determinism() {
  const std::filesystem::path root =
      std::filesystem::temp_directory_path() / "amgd_acceptance";
  std::filesystem::remove_all(root);
  const std::string cli = AMGD_CLI_PATH;
  const std::vector<std::string> invocations = {
      " rl-td --grid 3 --episodes 60 --method td0_acc --seeds 1,2,3 -o ",
      " rates --regime strongly_convex --builtin scalar_quadratic"
      " --iterations 3000 --seeds 1 --fit-k-min 30 -o ",
  };
  int compared = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    const std::filesystem::path dir_a = root / ("a" + std::to_string(i));
    const std::filesystem::path dir_b = root / ("b" + std::to_string(i));
    for (const auto& dir : {dir_a, dir_b}) {
      const std::string cmd =
          cli + invocations[i] + dir.string() + " > /dev/null 2>&1";
      expect(std::system(cmd.c_str()) == 0, "CLI exited nonzero: " + cmd);
    }
    for (const char* leaf : {"curves.csv", "slopes.csv", "plot_data.csv"}) {
      expect(slurp_file(dir_a / leaf) == slurp_file(dir_b / leaf),
             std::string(leaf) + " differs between invocations");
      ++compared;
    }
  }
  return std::to_string(compared) + " files byte-identical across reruns";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria = {
      {"momentum weight identity", check_momentum_identity},
      {"averaging weight closed form", check_averaging_closed_form},
      {"randomized output rule", check_output_rule},
      {"proximal step equivalence", check_prox_equivalence},
      {"gradient bias vs chain memory", check_bias_bound},
      {"mixing time crossings", check_mixing_time},
      {"strongly convex decay slope", check_strongly_convex_slope},
      {"convex decay slope", check_convex_slope},
      {"nonconvex stationarity slope", check_nonconvex_slope},
      {"accelerated policy evaluation", check_td_comparison},
      {"accelerated policy ascent", check_pg_comparison},
      {"gradient finite-difference checks", check_finite_differences},
      {"CLI output reproducibility", check_cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string line;
    try {
      const std::string note = criteria[i].body();
      std::printf("PASS %02zu %s (%s)\n", i + 1, criteria[i].name, note.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL %02zu %s: %s\n", i + 1, criteria[i].name, e.what());
    }
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance checks passed\n", criteria.size() - failures,
              criteria.size());
  return failures;
}
