#include "catenc/stats.hpp"

#include "catenc/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>

namespace catenc {

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("student_t_two_sided: df must be positive");
  if (std::isnan(t)) throw InvalidArgument("student_t_two_sided: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired_ttest: length mismatch");
  if (a.size() < 2) throw InvalidArgument("paired_ttest: need at least 2 pairs");
  const auto n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) all_zero = false;
    ss += (d - mean) * (d - mean);
  }
  TTestResult r;
  r.df = static_cast<int>(n) - 1;
  if (all_zero) return r;
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0 || sd <= 1e-15 * std::abs(mean)) {
    r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.degenerate = true;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided(r.t, r.df);
  return r;
}

}  // namespace catenc
