#include "amgd/objective.hpp"

#include <Eigen/Eigenvalues>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "amgd/error.hpp"

namespace amgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& token, const std::string& context) {
  double out = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw Error("IoFailure", "malformed number '" + token + "' in " + context);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw Error("BadConstants", "ball radius must be > 0");
  FeasibleSet s;
  s.kind_ = Kind::Ball;
  s.v1_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw Error("LengthMismatch", "box bounds of unequal length");
  if (((upper - lower).array() <= 0.0).any())
    throw Error("BadConstants", "box requires lower < upper componentwise");
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.v1_ = std::move(lower);
  s.v2_ = std::move(upper);
  return s;
}

Vector FeasibleSet::project(const Vector& x) const {
  switch (kind_) {
    case Kind::AllSpace:
      return x;
    case Kind::Ball: {
      Vector d = x - v1_;
      double n = d.norm();
      if (n <= radius_) return x;
      return v1_ + d * (radius_ / n);
    }
    case Kind::Box:
      return x.cwiseMax(v1_).cwiseMin(v2_);
  }
  throw Error("UnsupportedSet", "unknown feasible-set kind");
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  switch (kind_) {
    case Kind::AllSpace:
      return true;
    case Kind::Ball:
      return (x - v1_).norm() <= radius_ + tol;
    case Kind::Box:
      return ((x - v1_).array() >= -tol).all() &&
             ((v2_ - x).array() >= -tol).all();
  }
  return false;
}

double FeasibleSet::max_norm() const {
  switch (kind_) {
    case Kind::AllSpace:
      return kInf;
    case Kind::Ball:
      return v1_.norm() + radius_;
    case Kind::Box:
      return v1_.cwiseAbs().cwiseMax(v2_.cwiseAbs()).norm();
  }
  return kInf;
}

double FeasibleSet::max_abs_affine(const Vector& a, double b) const {
  switch (kind_) {
    case Kind::AllSpace:
      return a.norm() == 0.0 ? std::abs(b) : kInf;
    case Kind::Ball:
      return std::abs(a.dot(v1_) - b) + radius_ * a.norm();
    case Kind::Box: {
      Vector mid = 0.5 * (v1_ + v2_);
      Vector half = 0.5 * (v2_ - v1_);
      return std::abs(a.dot(mid) - b) + a.cwiseAbs().dot(half);
    }
  }
  return kInf;
}

std::string to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::nonconvex:
      return "nonconvex";
    case ConvexityClass::convex:
      return "convex";
    case ConvexityClass::strongly_convex:
      return "strongly_convex";
  }
  return "unknown";
}

MarkovObjective::MarkovObjective(int dim, ValueFn value, GradFn grad,
                                 double smoothness, double grad_bound,
                                 double strong_convexity,
                                 ConvexityClass convexity)
    : dim_(dim),
      value_(std::move(value)),
      grad_(std::move(grad)),
      smoothness_(smoothness),
      grad_bound_(grad_bound),
      strong_convexity_(strong_convexity),
      convexity_(convexity) {
  if (dim_ < 1) throw Error("BadConstants", "objective dimension must be >= 1");
  if (!(smoothness_ >= 0.0) || !std::isfinite(smoothness_))
    throw Error("BadConstants", "smoothness constant must be finite and >= 0");
  if (!(grad_bound_ >= 0.0))
    throw Error("BadConstants", "gradient bound must be >= 0");
  if (!(strong_convexity_ >= 0.0) || !std::isfinite(strong_convexity_))
    throw Error("BadConstants", "strong-convexity modulus must be >= 0");
  bool strong = convexity_ == ConvexityClass::strongly_convex;
  if (strong != (strong_convexity_ > 0.0))
    throw Error("BadConstants",
                "strong-convexity modulus inconsistent with convexity class");
}

double MarkovObjective::value(const Vector& x, int xi) const {
  return value_(x, xi);
}

Vector MarkovObjective::gradient(const Vector& x, int xi) const {
  Vector g = grad_(x, xi);
  if (std::isfinite(grad_bound_) && g.norm() > grad_bound_ * (1.0 + 1e-9))
    throw Error("NumericalFailure",
                "sample gradient norm " + std::to_string(g.norm()) +
                    " exceeds declared bound " + std::to_string(grad_bound_));
  return g;
}

double exact_objective(const MarkovObjective& obj,
                       const FiniteMarkovChain& chain, const Vector& x) {
  const Distribution& pi = chain.stationary();
  double total = 0.0;
  for (int xi = 0; xi < chain.n_states(); ++xi)
    total += pi[xi] * obj.value(x, xi);
  return total;
}

Vector exact_gradient(const MarkovObjective& obj,
                      const FiniteMarkovChain& chain, const Vector& x) {
  const Distribution& pi = chain.stationary();
  Vector total = Vector::Zero(obj.dim());
  for (int xi = 0; xi < chain.n_states(); ++xi)
    total += pi[xi] * obj.gradient(x, xi);
  return total;
}

Optimum f_star(const MarkovObjective& obj, const FiniteMarkovChain& chain,
               const FeasibleSet& feasible) {
  if (obj.convexity_class() == ConvexityClass::nonconvex)
    throw Error("NotConvex", "no certified optimum for nonconvex objectives");
  if (!(obj.smoothness() > 0.0))
    throw Error("BadConstants", "projected descent needs smoothness > 0");

  const double step = 1.0 / obj.smoothness();
  const double tol = 1e-10;
  Vector x = feasible.project(Vector::Zero(obj.dim()));
  const long cap = 5000000;
  for (long it = 0; it < cap; ++it) {
    Vector next = feasible.project(x - step * exact_gradient(obj, chain, x));
    double gradient_map = obj.smoothness() * (x - next).norm();
    x = std::move(next);
    if (gradient_map <= tol) return {exact_objective(obj, chain, x), x};
  }
  throw Error("NumericalFailure",
              "projected descent did not reach the gradient-map tolerance");
}

namespace {

// Shared validation for the objective factories: one sample per chain state,
// uniform dimension.
int check_samples(const FiniteMarkovChain& chain,
                  const std::vector<AffineSample>& samples) {
  if (static_cast<int>(samples.size()) != chain.n_states())
    throw Error("LengthMismatch", "need exactly one sample per chain state");
  int d = static_cast<int>(samples.front().a.size());
  if (d < 1) throw Error("BadConstants", "samples must have dimension >= 1");
  for (const auto& s : samples)
    if (s.a.size() != d)
      throw Error("LengthMismatch", "samples of unequal dimension");
  return d;
}

}  // namespace

MarkovObjective make_least_squares(const FiniteMarkovChain& chain,
                                   std::vector<AffineSample> samples,
                                   const FeasibleSet& feasible) {
  int d = check_samples(chain, samples);
  if (!feasible.is_compact())
    throw Error("UnboundedGradient",
                "least-squares gradients are unbounded on all of R^d; "
                "use a ball or box feasible set");

  double smoothness = 0.0;
  double bound = 0.0;
  for (const auto& s : samples) {
    double norm_a = s.a.norm();
    smoothness = std::max(smoothness, norm_a * norm_a);
    bound = std::max(bound, norm_a * feasible.max_abs_affine(s.a, s.b));
  }

  const Distribution& pi = chain.stationary();
  Matrix second_moment = Matrix::Zero(d, d);
  for (int xi = 0; xi < chain.n_states(); ++xi)
    second_moment += pi[xi] * samples[xi].a * samples[xi].a.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(second_moment);
  double lambda_min = eigen.eigenvalues()(0);
  double lambda_max = eigen.eigenvalues()(d - 1);
  double mu =
      lambda_min > 1e-12 * std::max(1.0, lambda_max) ? lambda_min : 0.0;

  auto data = std::make_shared<const std::vector<AffineSample>>(
      std::move(samples));
  auto value = [data](const Vector& x, int xi) {
    double r = (*data)[xi].a.dot(x) - (*data)[xi].b;
    return 0.5 * r * r;
  };
  auto grad = [data](const Vector& x, int xi) -> Vector {
    double r = (*data)[xi].a.dot(x) - (*data)[xi].b;
    return r * (*data)[xi].a;
  };
  return MarkovObjective(d, value, grad, smoothness, bound, mu,
                         mu > 0.0 ? ConvexityClass::strongly_convex
                                  : ConvexityClass::convex);
}

MarkovObjective make_robust_nonconvex(const FiniteMarkovChain& chain,
                                      std::vector<AffineSample> samples,
                                      double scale) {
  int d = check_samples(chain, samples);
  if (!(scale > 0.0)) throw Error("BadConstants", "scale must be > 0");

  double max_norm_a = 0.0;
  for (const auto& s : samples) max_norm_a = std::max(max_norm_a, s.a.norm());
  // |d/dr r^2/(s+r^2)| = 2|r|s/(s+r^2)^2 peaks at r^2 = s/3 with value
  // 3 sqrt(3) / (8 sqrt(s)); |d^2/dr^2| peaks at r = 0 with value 2/s.
  double bound = 3.0 * std::sqrt(3.0) / (8.0 * std::sqrt(scale)) * max_norm_a;
  double smoothness = 2.0 / scale * max_norm_a * max_norm_a;

  auto data = std::make_shared<const std::vector<AffineSample>>(
      std::move(samples));
  auto value = [data, scale](const Vector& x, int xi) {
    double r = (*data)[xi].a.dot(x) - (*data)[xi].b;
    return r * r / (scale + r * r);
  };
  auto grad = [data, scale](const Vector& x, int xi) -> Vector {
    double r = (*data)[xi].a.dot(x) - (*data)[xi].b;
    double q = scale + r * r;
    return (2.0 * r * scale / (q * q)) * (*data)[xi].a;
  };
  return MarkovObjective(d, value, grad, smoothness, bound, 0.0,
                         ConvexityClass::nonconvex);
}

GradientStream::GradientStream(FiniteMarkovChain chain,
                               MarkovObjective objective, int start_state,
                               std::uint64_t seed)
    : chain_(std::move(chain)),
      objective_(std::move(objective)),
      state_(start_state),
      rng_(seed) {
  if (start_state < 0 || start_state >= chain_.n_states())
    throw Error("LengthMismatch", "start state out of range");
}

int GradientStream::next_sample() {
  state_ = chain_.sample_step(state_, rng_);
  return state_;
}

MarkovObjective build_objective(const ProblemSpec& problem,
                                const FiniteMarkovChain& chain) {
  if (problem.kind == "least_squares")
    return make_least_squares(chain, problem.samples, problem.feasible);
  if (problem.kind == "robust_nonconvex")
    return make_robust_nonconvex(chain, problem.samples, problem.scale);
  throw Error("IoFailure", "unknown problem kind '" + problem.kind + "'");
}

void save_problem(const ProblemSpec& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open " + path);
  int d = problem.samples.empty() ? 0
                               : static_cast<int>(problem.samples.front().a.size());
  out << "amgd-problem 1\n";
  out << "kind " << problem.kind << "\n";
  out << "dim " << d << "\n";
  out << "states " << problem.samples.size() << "\n";
  if (problem.kind == "robust_nonconvex")
    out << "scale " << format_double(problem.scale) << "\n";
  out << "chain " << problem.chain_file << "\n";
  switch (problem.feasible.kind()) {
    case FeasibleSet::Kind::AllSpace:
      out << "feasible all_space\n";
      break;
    case FeasibleSet::Kind::Ball: {
      out << "feasible ball " << format_double(problem.feasible.radius());
      for (int i = 0; i < problem.feasible.center().size(); ++i)
        out << " " << format_double(problem.feasible.center()(i));
      out << "\n";
      break;
    }
    case FeasibleSet::Kind::Box: {
      out << "feasible box";
      for (int i = 0; i < problem.feasible.lower().size(); ++i)
        out << " " << format_double(problem.feasible.lower()(i));
      for (int i = 0; i < problem.feasible.upper().size(); ++i)
        out << " " << format_double(problem.feasible.upper()(i));
      out << "\n";
      break;
    }
  }
  for (const auto& s : problem.samples) {
    out << "sample";
    for (int i = 0; i < s.a.size(); ++i)
      out << " " << format_double(s.a(i));
    out << " " << format_double(s.b) << "\n";
  }
  if (!out) throw Error("IoFailure", "write failed for " + path);
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open " + path);

  ProblemSpec problem;
  int dim = -1;
  long states = -1;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag)) continue;
    if (!saw_header) {
      std::string version;
      if (tag != "amgd-problem" || !(row >> version) || version != "1")
        throw Error("IoFailure", "unrecognized problem header in " + path);
      saw_header = true;
      continue;
    }
    if (tag == "kind") {
      row >> problem.kind;
    } else if (tag == "dim") {
      row >> dim;
    } else if (tag == "states") {
      row >> states;
    } else if (tag == "scale") {
      std::string tok;
      row >> tok;
      problem.scale = parse_double(tok, path);
    } else if (tag == "chain") {
      row >> problem.chain_file;
    } else if (tag == "feasible") {
      std::string shape;
      row >> shape;
      std::vector<double> nums;
      std::string tok;
      while (row >> tok) nums.push_back(parse_double(tok, path));
      if (shape == "all_space") {
        problem.feasible = FeasibleSet::all_space();
      } else if (shape == "ball") {
        if (static_cast<int>(nums.size()) != dim + 1)
          throw Error("IoFailure", "ball line wants radius + dim numbers");
        Vector c(dim);
        for (int i = 0; i < dim; ++i) c(i) = nums[i + 1];
        problem.feasible = FeasibleSet::ball(std::move(c), nums[0]);
      } else if (shape == "box") {
        if (static_cast<int>(nums.size()) != 2 * dim)
          throw Error("IoFailure", "box line wants 2*dim numbers");
        Vector lo(dim), hi(dim);
        for (int i = 0; i < dim; ++i) {
          lo(i) = nums[i];
          hi(i) = nums[dim + i];
        }
        problem.feasible = FeasibleSet::box(std::move(lo), std::move(hi));
      } else {
        throw Error("IoFailure", "unknown feasible-set shape '" + shape + "'");
      }
    } else if (tag == "sample") {
      if (dim < 1) throw Error("IoFailure", "sample row before dim in " + path);
      std::vector<double> nums;
      std::string tok;
      while (row >> tok) nums.push_back(parse_double(tok, path));
      if (static_cast<int>(nums.size()) != dim + 1)
        throw Error("IoFailure", "sample row wants dim + 1 numbers");
      AffineSample s;
      s.a.resize(dim);
      for (int i = 0; i < dim; ++i) s.a(i) = nums[i];
      s.b = nums[dim];
      problem.samples.push_back(std::move(s));
    } else {
      throw Error("IoFailure", "unknown problem field '" + tag + "'");
    }
  }
  if (!saw_header) throw Error("IoFailure", "empty problem file " + path);
  if (problem.kind != "least_squares" && problem.kind != "robust_nonconvex")
    throw Error("IoFailure", "unknown problem kind '" + problem.kind + "'");
  if (states != static_cast<long>(problem.samples.size()))
    throw Error("IoFailure", "sample-row count disagrees with states field");
  if (problem.chain_file.empty())
    throw Error("IoFailure", "problem file missing chain reference");
  return problem;
}

FiniteMarkovChain load_problem_chain(const ProblemSpec& problem,
                                     const std::string& problem_path) {
  std::filesystem::path chain_path(problem.chain_file);
  if (chain_path.is_relative())
    chain_path = std::filesystem::path(problem_path).parent_path() / chain_path;
  return load_chain(chain_path.string());
}

}  // namespace amgd
