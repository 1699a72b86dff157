#include "amgd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "amgd/error.hpp"

namespace amgd {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoFailure", "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error("IoFailure", "write failed for " + path);
}

std::string render_curves_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "k,mean,ci_low,ci_high";
  for (std::uint64_t s : report.seeds) out << ",seed_" << s;
  out << "\n";
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    out << format_g17(report.ks[i]) << ',' << format_g17(report.mean[i]) << ','
        << format_g17(report.ci_low[i]) << ',' << format_g17(report.ci_high[i]);
    for (const auto& curve : report.seed_curves) out << ',' << format_g17(curve[i]);
    out << "\n";
  }
  return out.str();
}

std::string render_slopes_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "metric,slope,intercept,residual,config_hash,tool_version\n";
  if (report.has_slope) {
    out << report.metric_name << ',' << format_g17(report.slope.slope) << ','
        << format_g17(report.slope.intercept) << ','
        << format_g17(report.slope.residual) << ',' << report.config_hash << ','
        << report.tool_version << "\n";
  }
  return out.str();
}

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<double>& ks,
                          const std::vector<double>& vals,
                          const FitWindow& window) {
  if (ks.size() != vals.size())
    throw Error("LengthMismatch", "abscissa and value counts differ");
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (!(ks[i] > ks[i - 1]))
      throw Error("BadConstants", "abscissa must be strictly increasing");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < window.k_min || ks[i] > window.k_max) continue;
    if (!(ks[i] > 0.0))
      throw Error("NonpositiveValue", "abscissa must be positive inside the fit window");
    if (!(vals[i] > 0.0))
      throw Error("NonpositiveValue", "values must be positive inside the fit window");
    lx.push_back(std::log(ks[i]));
    ly.push_back(std::log(vals[i]));
  }
  const std::size_t n = lx.size();
  if (n < 4)
    throw Error("InsufficientPoints",
                "log-log fit needs at least 4 points inside the window, got " +
                    std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0)
    throw Error("BadConstants", "fit window collapses to a single abscissa");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

ExperimentReport make_report(std::vector<double> ks,
                             std::vector<std::vector<double>> seed_curves,
                             std::vector<std::uint64_t> seeds,
                             std::string metric_name,
                             std::string config_hash) {
  if (seeds.empty() || seed_curves.empty())
    throw Error("EmptyBatch", "a report needs at least one seed curve");
  if (seeds.size() != seed_curves.size())
    throw Error("LengthMismatch", "seed list and curve count differ");
  for (const auto& curve : seed_curves) {
    if (curve.size() != ks.size())
      throw Error("LengthMismatch", "curve length does not match evaluation grid");
  }
  ExperimentReport report;
  report.metric_name = std::move(metric_name);
  report.config_hash = std::move(config_hash);
  report.tool_version = kToolVersion;
  report.ks = std::move(ks);
  report.seeds = std::move(seeds);
  report.seed_curves = std::move(seed_curves);
  const std::size_t points = report.ks.size();
  const std::size_t n = report.seed_curves.size();
  report.mean.assign(points, 0.0);
  report.ci_low.assign(points, 0.0);
  report.ci_high.assign(points, 0.0);
  constexpr double kZ90 = 1.645;
  for (std::size_t i = 0; i < points; ++i) {
    double m = 0.0;
    for (const auto& curve : report.seed_curves) m += curve[i];
    m /= static_cast<double>(n);
    double half = 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& curve : report.seed_curves) {
        const double d = curve[i] - m;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      half = kZ90 * sd / std::sqrt(static_cast<double>(n));
    }
    report.mean[i] = m;
    report.ci_low[i] = m - half;
    report.ci_high[i] = m + half;
  }
  return report;
}

void fit_report_slope(ExperimentReport& report, const FitWindow& window) {
  report.slope = fit_loglog_slope(report.ks, report.mean, window);
  report.has_slope = true;
}

void emit_report(const ExperimentReport& report, const std::string& dir) {
  if (report.seed_curves.empty() || report.ks.empty())
    throw Error("EmptyBatch", "refusing to emit a report with no curve data");
  if (report.mean.size() != report.ks.size() ||
      report.ci_low.size() != report.ks.size() ||
      report.ci_high.size() != report.ks.size())
    throw Error("LengthMismatch", "report aggregate arrays are inconsistent");
  for (const auto& curve : report.seed_curves) {
    if (curve.size() != report.ks.size())
      throw Error("LengthMismatch", "curve length does not match evaluation grid");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("IoFailure", "cannot create directory " + dir);
  const std::string curves = render_curves_csv(report);
  write_text_file(dir + "/curves.csv", curves);
  write_text_file(dir + "/slopes.csv", render_slopes_csv(report));
  write_text_file(dir + "/plot_data.csv", curves);
}

}  // namespace amgd
