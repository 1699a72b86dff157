#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "amgd/types.hpp"

namespace amgd {

// Ordinary least squares on (log k, log val). residual is the root mean
// square of the log-domain fit residuals.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

// Half-open-ended window on the abscissa; points with k_min <= k <= k_max
// enter the fit.
struct FitWindow {
  double k_min = 0.0;
  double k_max = std::numeric_limits<double>::infinity();
};

// Fits log(val) = slope * log(k) + intercept over the windowed points.
// Throws NonpositiveValue if a windowed value is <= 0, InsufficientPoints for
// fewer than 4 windowed points, BadConstants if ks is not strictly
// increasing.
SlopeFit fit_loglog_slope(const std::vector<double>& ks,
                          const std::vector<double>& vals,
                          const FitWindow& window = {});

// Multi-seed aggregate of one experiment: per-seed metric curves over a
// common evaluation grid, their pointwise mean, and a 90% normal-approximation
// confidence band (z = 1.645, sample standard deviation across seeds).
struct ExperimentReport {
  std::string metric_name;
  std::string config_hash;
  std::string tool_version;
  std::vector<double> ks;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> seed_curves;  // [seed][point]
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  SlopeFit slope;
  bool has_slope = false;
};

// Assembles a report from per-seed curves: validates shapes (LengthMismatch)
// and requires a nonempty seed list (EmptyBatch); fills in mean and
// confidence band. A single seed degenerates the band to the mean.
ExperimentReport make_report(std::vector<double> ks,
                             std::vector<std::vector<double>> seed_curves,
                             std::vector<std::uint64_t> seeds,
                             std::string metric_name,
                             std::string config_hash = "");

// Fits the report's mean curve over the window and stores the result.
void fit_report_slope(ExperimentReport& report, const FitWindow& window = {});

// Writes curves.csv (k, mean, ci_low, ci_high, one column per seed),
// slopes.csv, and plot_data.csv (same schema as curves.csv) into dir with 17
// significant digits. Throws EmptyBatch before touching the filesystem if
// there are no curves, IoFailure on write problems.
void emit_report(const ExperimentReport& report, const std::string& dir);

}  // namespace amgd
