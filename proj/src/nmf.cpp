#include "catenc/error.hpp"
#include "catenc/numerics.hpp"
#include "catenc/rng.hpp"

#include <cmath>

namespace catenc {

NmfResult nmf(const Matrix& a, int k, double tol, int max_iter, std::uint64_t seed) {
  if (!a.allFinite()) throw NumericError("nmf: non-finite input");
  if ((a.array() < 0.0).any()) throw InvalidArgument("nmf: input has negative entries");
  const auto rows = a.rows();
  const auto cols = a.cols();
  if (k < 1 || k > std::min(rows, cols)) throw InvalidArgument("nmf: rank out of range");

  Rng rng(seed);
  NmfResult res{Matrix(rows, k), Matrix(k, cols), {}, 0};
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < k; ++j) res.w(i, j) = rng.uniform(0.1, 1.1);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) res.h(i, j) = rng.uniform(0.1, 1.1);

  auto loss = [&] { return (a - res.w * res.h).norm(); };
  double prev = loss();
  res.objective_trace.push_back(prev);

  // A zero denominator implies a zero numerator for the matching entry, so
  // such entries are left as they are.
  auto update = [](Matrix& target, const Matrix& num, const Matrix& den) {
    for (Eigen::Index j = 0; j < target.cols(); ++j)
      for (Eigen::Index i = 0; i < target.rows(); ++i)
        if (den(i, j) > 0.0) target(i, j) *= num(i, j) / den(i, j);
  };

  for (int it = 0; it < max_iter; ++it) {
    {
      const Matrix wt = res.w.transpose();
      const Matrix num = wt * a;
      const Matrix den = (wt * res.w) * res.h;
      update(res.h, num, den);
    }
    {
      const Matrix ht = res.h.transpose();
      const Matrix num = a * ht;
      const Matrix den = res.w * (res.h * ht);
      update(res.w, num, den);
    }
    res.iterations = it + 1;
    const double cur = loss();
    res.objective_trace.push_back(cur);
    const double rel = prev > 0.0 ? std::abs(prev - cur) / prev : 0.0;
    prev = cur;
    if (rel < tol) break;
  }
  return res;
}

}  // namespace catenc
