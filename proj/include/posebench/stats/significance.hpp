#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "posebench/error.hpp"

namespace posebench::stats {

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double mean_diff = 0.0;
};

// Paired one-sided Student t-test of H1: mean(a - b) > 0. Zero-variance
// differences give p = 0 for a positive mean and p = 1 otherwise.
inline TTestResult paired_one_sided_ttest_detail(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("paired t-test: length mismatch");
  if (a.size() < 2) throw InvalidArgument("paired t-test: need at least two pairs");
  const std::size_t n = a.size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += a[i] - b[i];
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (a[i] - b[i] - m) * (a[i] - b[i] - m);
  TTestResult r;
  r.df = static_cast<int>(n) - 1;
  r.mean_diff = m;
  const double sd = std::sqrt(ss / r.df);
  if (!(sd > 1e-15 * std::max(1.0, std::abs(m)))) {
    r.t = m > 0 ? INFINITY : (m < 0 ? -INFINITY : 0.0);
    r.p = m > 0 ? 0.0 : 1.0;
    return r;
  }
  r.t = m / (sd / std::sqrt(static_cast<double>(n)));
  const double df = r.df;
  // Upper tail: P(T > t) = I_{df/(df+t^2)}(df/2, 1/2) / 2 for t >= 0.
  const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, df / (df + r.t * r.t));
  r.p = r.t >= 0 ? tail : 1.0 - tail;
  return r;
}

inline double paired_one_sided_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  return paired_one_sided_ttest_detail(a, b).p;
}

inline std::string significance_stars(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p-value outside [0, 1]");
  if (p <= 0.001) return "***";
  if (p <= 0.01) return "**";
  if (p <= 0.05) return "*";
  return "";
}

}  // namespace posebench::stats
