#pragma once

#include <span>

namespace catenc {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  // Differences with zero variance but nonzero mean: t is infinite, p = 0.
  bool degenerate = false;
};

// Paired t-test on d = a - b with df = n - 1 and a two-sided p-value.
// All-zero differences give t = 0, p = 1.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

}  // namespace catenc
