#include "catenc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace catenc::kernels::serial {

GroupSums group_sums(const Eigen::MatrixXd& x, std::span<const int> g, const Eigen::VectorXd& y,
                     std::size_t m) {
  const auto p = x.cols();
  GroupSums out{Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(m)),
                std::vector<std::size_t>(m, 0), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m))};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(g[i]);
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < p; ++j) out.sums(j, c) += x(row, j);
    out.y_sums(c) += y(row);
    ++out.counts[static_cast<std::size_t>(c)];
  }
  return out;
}

namespace {

template <bool WithGrad>
double loglik_impl(const Eigen::MatrixXd& xa, std::span<const int> g, const Eigen::MatrixXd& beta,
                   Eigen::MatrixXd* grad) {
  const auto n = xa.rows();
  const auto q = xa.cols();
  const auto m = beta.rows();
  std::vector<double> eta(static_cast<std::size_t>(m));
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = -INFINITY;
    for (Eigen::Index c = 0; c < m; ++c) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < q; ++j) s += beta(c, j) * xa(i, j);
      eta[static_cast<std::size_t>(c)] = s;
      mx = std::max(mx, s);
    }
    double z = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) z += std::exp(eta[static_cast<std::size_t>(c)] - mx);
    const double lse = mx + std::log(z);
    const auto gi = g[static_cast<std::size_t>(i)];
    ll += eta[static_cast<std::size_t>(gi)] - lse;
    if constexpr (WithGrad) {
      for (Eigen::Index c = 0; c < m; ++c) {
        const double r = (c == gi ? 1.0 : 0.0) - std::exp(eta[static_cast<std::size_t>(c)] - lse);
        for (Eigen::Index j = 0; j < q; ++j) (*grad)(c, j) += r * xa(i, j);
      }
    }
  }
  return ll;
}

}  // namespace

SoftmaxEval softmax_loglik_grad(const Eigen::MatrixXd& xa, std::span<const int> g,
                                const Eigen::MatrixXd& beta) {
  SoftmaxEval out;
  out.grad = Eigen::MatrixXd::Zero(beta.rows(), beta.cols());
  out.log_lik = loglik_impl<true>(xa, g, beta, &out.grad);
  return out;
}

double softmax_loglik(const Eigen::MatrixXd& xa, std::span<const int> g,
                      const Eigen::MatrixXd& beta) {
  return loglik_impl<false>(xa, g, beta, nullptr);
}

}  // namespace catenc::kernels::serial
