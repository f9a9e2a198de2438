#pragma once

/// @file
/// Least-squares fits of error curves: log-log slopes and plain linear fits.

#include "tlm/core.hpp"

namespace tlm {

struct RateFitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  long points = 0;
  long filtered = 0;  // non-positive or non-finite samples dropped
  bool degenerate = false;
  std::string note;
};

/// Ordinary least squares y = intercept + slope * x.
inline RateFitReport linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("linear_fit: size mismatch");
  RateFitReport r;
  r.points = static_cast<long>(x.size());
  if (x.size() < 2) {
    r.degenerate = true;
    r.note = "fewer than two points";
    return r;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  r.x_min = *std::min_element(x.begin(), x.end());
  r.x_max = *std::max_element(x.begin(), x.end());
  if (sxx == 0.0) {
    r.degenerate = true;
    r.note = "constant abscissa";
    return r;
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    sse += e * e;
  }
  r.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return r;
}

/// Fit of log y against log n. Non-positive samples are filtered and counted.
/// x_min / x_max report the n range actually used.
inline RateFitReport loglog_fit(const std::vector<double>& n, const std::vector<double>& y) {
  if (n.size() != y.size()) throw InvalidInput("loglog_fit: size mismatch");
  std::vector<double> lx, ly;
  double lo = 0.0, hi = 0.0;
  long dropped = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      if (lx.empty() || n[i] < lo) lo = n[i];
      if (lx.empty() || n[i] > hi) hi = n[i];
      lx.push_back(std::log(n[i]));
      ly.push_back(std::log(y[i]));
    } else {
      ++dropped;
    }
  }
  RateFitReport r = linear_fit(lx, ly);
  r.x_min = lo;
  r.x_max = hi;
  r.filtered = dropped;
  if (dropped > 0) r.note = std::to_string(dropped) + " non-positive samples filtered";
  if (lx.size() < 2) {
    r.degenerate = true;
    if (r.note.empty()) r.note = "fewer than two positive samples";
  }
  return r;
}

}  // namespace tlm
