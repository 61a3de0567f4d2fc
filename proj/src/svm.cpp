#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <cmath>

namespace catenc {

namespace {

struct Binary {
  double objective;
  Vector grad_w;
  double grad_b;
};

Binary evaluate(const Matrix& x, std::span<const int> g, int category, const Vector& w, double b,
                double c_reg, bool with_grad) {
  const auto n = x.rows();
  const Vector margin = x * w;
  double loss = 0.0;
  Vector coef = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = g[static_cast<std::size_t>(i)] == category ? 1.0 : -1.0;
    const double slack = 1.0 - yi * (margin(i) + b);
    if (slack > 0.0) {
      loss += slack * slack;
      coef(i) = -2.0 * yi * slack;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Binary out{0.5 * w.squaredNorm() + c_reg * loss * inv_n, {}, 0.0};
  if (with_grad) {
    out.grad_w = w + (c_reg * inv_n) * (x.transpose() * coef);
    out.grad_b = c_reg * inv_n * coef.sum();
  }
  return out;
}

}  // namespace

double svm_objective(const Matrix& x, std::span<const int> g, int category, const Vector& w,
                     double b, double c_reg) {
  return evaluate(x, g, category, w, b, c_reg, false).objective;
}

SvmModel fit_svm_ovr(const Matrix& x, std::span<const int> g, int m, double c_reg, int epochs,
                     std::uint64_t /*seed*/) {
  if (m < 2) throw InvalidArgument("fit_svm_ovr: need at least two categories");
  if (c_reg <= 0.0) throw InvalidArgument("fit_svm_ovr: c_reg must be positive");
  if (!x.allFinite()) throw NumericError("fit_svm_ovr: non-finite features");
  if (static_cast<std::size_t>(x.rows()) != g.size()) throw InvalidArgument("fit_svm_ovr: row count mismatch");

  const auto p = x.cols();
  double max_row = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) max_row = std::max(max_row, x.row(i).squaredNorm());
  const double lipschitz = 1.0 + 2.0 * c_reg * (max_row + 1.0);

  SvmModel model{Matrix::Zero(m, p), Vector::Zero(m), c_reg, {}};
  std::vector<std::vector<double>> traces(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < m; ++c) {
    Vector w = Vector::Zero(p);
    double b = 0.0;
    double step = 1.0 / lipschitz;
    auto cur = evaluate(x, g, c, w, b, c_reg, true);
    auto& trace = traces[static_cast<std::size_t>(c)];
    trace.push_back(cur.objective);
    for (int e = 0; e < epochs; ++e) {
      for (int tries = 0; tries < 40; ++tries) {
        const Vector w_new = w - step * cur.grad_w;
        const double b_new = b - step * cur.grad_b;
        auto next = evaluate(x, g, c, w_new, b_new, c_reg, true);
        // Rises at rounding level are not real; rejecting them stalls the step near the optimum.
        if (next.objective <= cur.objective + 1e-14 * std::abs(cur.objective)) {
          w = w_new;
          b = b_new;
          cur = std::move(next);
          break;
        }
        step *= 0.5;
      }
      trace.push_back(cur.objective);
    }
    model.w.row(c) = w.transpose();
    model.b(c) = b;
  }

  model.objective_trace.assign(static_cast<std::size_t>(epochs) + 1, 0.0);
  for (const auto& t : traces)
    for (std::size_t e = 0; e < t.size(); ++e) model.objective_trace[e] += t[e];
  return model;
}

}  // namespace catenc
