#include "amgd/markov.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

namespace amgd {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kLoadRowSumTol = 1e-9;
constexpr double kStationaryResidualTol = 1e-10;

// Adjacency lists of the strictly positive entries.
std::vector<std::vector<int>> positive_graph(const Matrix& p, bool reversed) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p(i, j) > 0.0) adj[reversed ? j : i].push_back(reversed ? i : j);
  return adj;
}

std::vector<int> bfs_levels(const std::vector<std::vector<int>>& adj,
                            int root) {
  std::vector<int> level(adj.size(), -1);
  std::deque<int> queue{root};
  level[root] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u])
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  return level;
}

}  // namespace

Distribution::Distribution(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0)
    throw Error("InvalidDistribution", "empty probability vector");
  if (probs_.minCoeff() < 0.0)
    throw Error("InvalidDistribution", "negative probability entry");
  if (std::abs(probs_.sum() - 1.0) > kRowSumTol)
    throw Error("InvalidDistribution", "probabilities do not sum to 1");
}

Distribution Distribution::delta(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return Distribution(std::move(v));
}

double tv_distance(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size())
    throw Error("LengthMismatch", "distributions of unequal length");
  return 0.5 * (p.probs() - q.probs()).lpNorm<1>();
}

struct FiniteMarkovChain::Cache {
  std::once_flag once;
  std::optional<Distribution> stationary;
  std::exception_ptr error;
};

FiniteMarkovChain::FiniteMarkovChain(Matrix transition,
                                     std::vector<std::string> labels)
    : transition_(std::move(transition)),
      labels_(std::move(labels)),
      cache_(std::make_shared<Cache>()) {}

std::variant<FiniteMarkovChain, ChainDiagnosis>
FiniteMarkovChain::validate_ergodic(Matrix transition,
                                    std::vector<std::string> labels) {
  const int n = static_cast<int>(transition.rows());
  if (n == 0 || transition.cols() != n)
    return ChainDiagnosis{"NotStochastic", "transition matrix is not square"};
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double p = transition(i, j);
      if (!(p >= 0.0) || p > 1.0 + kRowSumTol)
        return ChainDiagnosis{"NotStochastic",
                              "entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") outside [0,1]"};
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      return ChainDiagnosis{"NotStochastic",
                            "row " + std::to_string(i) + " sums to " +
                                std::to_string(sum)};
  }

  auto forward = positive_graph(transition, false);
  auto levels = bfs_levels(forward, 0);
  if (std::any_of(levels.begin(), levels.end(),
                  [](int l) { return l < 0; }))
    return ChainDiagnosis{"Reducible",
                          "not all states reachable from state 0"};
  auto back_levels = bfs_levels(positive_graph(transition, true), 0);
  if (std::any_of(back_levels.begin(), back_levels.end(),
                  [](int l) { return l < 0; }))
    return ChainDiagnosis{"Reducible", "state 0 not reachable from all states"};

  // Period = gcd over edges (u,v) of level(u)+1-level(v); BFS guarantees the
  // differences are nonnegative and cycles contribute their lengths.
  long long period = 0;
  for (int u = 0; u < n; ++u)
    for (int v : forward[u])
      period = std::gcd(period, static_cast<long long>(levels[u]) + 1 -
                                    levels[v]);
  if (period != 1)
    return ChainDiagnosis{"Periodic",
                          "chain has period " + std::to_string(period)};

  return FiniteMarkovChain(std::move(transition), std::move(labels));
}

FiniteMarkovChain FiniteMarkovChain::from_matrix(
    Matrix transition, std::vector<std::string> labels) {
  auto result = validate_ergodic(std::move(transition), std::move(labels));
  if (auto* diag = std::get_if<ChainDiagnosis>(&result))
    throw Error(diag->kind, diag->detail);
  return std::get<FiniteMarkovChain>(std::move(result));
}

const Distribution& FiniteMarkovChain::stationary() const {
  std::call_once(cache_->once, [this] {
    try {
      const int n = n_states();
      Matrix a = transition_.transpose() - Matrix::Identity(n, n);
      a.row(0).setOnes();
      Vector rhs = Vector::Zero(n);
      rhs(0) = 1.0;
      Vector pi = a.partialPivLu().solve(rhs);
      pi = pi.cwiseMax(0.0);
      pi /= pi.sum();
      double residual =
          ((transition_.transpose() * pi) - pi).lpNorm<Eigen::Infinity>();
      if (!(residual <= kStationaryResidualTol))
        throw Error("NumericalFailure",
                    "stationary residual " + std::to_string(residual));
      cache_->stationary.emplace(std::move(pi));
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return *cache_->stationary;
}

Distribution FiniteMarkovChain::k_step_distribution(int start, long k) const {
  if (start < 0 || start >= n_states())
    throw Error("LengthMismatch", "state index out of range");
  if (k < 0) throw Error("BadConstants", "k must be nonnegative");
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_states());
  row(start) = 1.0;
  for (long i = 0; i < k; ++i) row = row * transition_;
  return Distribution(row.transpose());
}

double FiniteMarkovChain::worst_case_tv(const Matrix& p_power) const {
  const Vector& pi = stationary().probs();
  double worst = 0.0;
  for (int i = 0; i < p_power.rows(); ++i)
    worst = std::max(
        worst, 0.5 * (p_power.row(i).transpose() - pi).lpNorm<1>());
  return worst;
}

long FiniteMarkovChain::mixing_time(double gamma, long cap) const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error("BadConstants", "gamma must lie in (0,1)");
  const int n = n_states();
  stationary();  // force; may throw NumericalFailure

  if (worst_case_tv(Matrix::Identity(n, n)) <= gamma) return 0;

  // Powers of two of the transition matrix, built while doubling.
  std::vector<Matrix> squares{transition_};
  auto power = [&](long k) {
    Matrix r = Matrix::Identity(n, n);
    for (std::size_t bit = 0; (1L << bit) <= k; ++bit) {
      while (bit >= squares.size())
        squares.push_back(squares.back() * squares.back());
      if (k & (1L << bit)) r = r * squares[bit];
    }
    return r;
  };

  long lo = 0;  // worst TV > gamma
  long hi = -1;
  for (long k = 1; k <= cap; k *= 2) {
    if (worst_case_tv(power(k)) <= gamma) {
      hi = k;
      break;
    }
    lo = k;
    if (k > cap / 2) break;
  }
  if (hi < 0) {
    if (lo < cap && worst_case_tv(power(cap)) <= gamma)
      hi = cap;
    else
      throw Error("CapExceeded", "no k <= " + std::to_string(cap) +
                                     " reaches TV " + std::to_string(gamma));
  }
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    (worst_case_tv(power(mid)) <= gamma ? hi : lo) = mid;
  }
  return hi;
}

int FiniteMarkovChain::sample_step(int state, Rng& rng) const {
  return sample_step(state, rng.uniform_open());
}

int FiniteMarkovChain::sample_step(int state, double draw) const {
  if (state < 0 || state >= n_states())
    throw Error("LengthMismatch", "state index out of range");
  double cum = 0.0;
  int last_positive = 0;
  for (int j = 0; j < n_states(); ++j) {
    double p = transition_(state, j);
    if (p > 0.0) {
      cum += p;
      last_positive = j;
      if (cum >= draw) return j;
    }
  }
  return last_positive;  // draw beyond accumulated mass (fp undershoot)
}

MixingProfile mixing_profile(const FiniteMarkovChain& chain, int k_max) {
  const int n = chain.n_states();
  MixingProfile profile;
  profile.tv_curve.reserve(k_max + 1);

  const Vector& pi = chain.stationary().probs();
  Matrix power = Matrix::Identity(n, n);
  for (int k = 0; k <= k_max; ++k) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst =
          std::max(worst, 0.5 * (power.row(i).transpose() - pi).lpNorm<1>());
    profile.tv_curve.push_back(worst);
    if (k < k_max) power = power * chain.transition();
  }

  if (n == 1) {
    profile.second_eigenvalue_modulus = 0.0;
    return profile;
  }
  Eigen::EigenSolver<Matrix> solver(chain.transition(), false);
  std::vector<double> moduli(n);
  for (int i = 0; i < n; ++i) moduli[i] = std::abs(solver.eigenvalues()(i));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  profile.second_eigenvalue_modulus = moduli[1];
  return profile;
}

FiniteMarkovChain load_chain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  const char* ptr = text.data();
  const char* end = ptr + text.size();
  auto skip_space = [&] {
    while (ptr < end && std::isspace(static_cast<unsigned char>(*ptr))) ++ptr;
  };
  auto next_double = [&](double& out) {
    skip_space();
    auto [next, ec] = std::from_chars(ptr, end, out);
    if (ec != std::errc{})
      throw Error("IoFailure", "malformed number in " + path);
    ptr = next;
  };

  skip_space();
  int n = 0;
  auto [next, ec] = std::from_chars(ptr, end, n);
  if (ec != std::errc{} || n <= 0)
    throw Error("IoFailure", "malformed state count in " + path);
  ptr = next;

  Matrix p(n, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      next_double(p(i, j));
      sum += p(i, j);
    }
    if (std::abs(sum - 1.0) > kLoadRowSumTol)
      throw Error("NotStochastic", "row " + std::to_string(i) + " of " +
                                       path + " sums to " +
                                       std::to_string(sum));
    p.row(i) /= sum;
  }
  return FiniteMarkovChain::from_matrix(std::move(p));
}

void save_chain(const FiniteMarkovChain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open " + path);
  const int n = chain.n_states();
  out << n << "\n";
  char buf[64];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", chain.transition()(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw Error("IoFailure", "write failed for " + path);
}

}  // namespace amgd
