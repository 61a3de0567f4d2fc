#include "catenc/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace catenc::kernels {

GroupSums group_sums(const Eigen::MatrixXd& x, std::span<const int> g, const Eigen::VectorXd& y,
                     std::size_t m) {
  const auto p = x.cols();
  GroupSums out{Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(m)),
                std::vector<std::size_t>(m, 0), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m))};

  // Counting sort of row ids by category; stable, so rows stay ascending.
  std::vector<std::size_t> start(m + 1, 0);
  for (int c : g) ++start[static_cast<std::size_t>(c) + 1];
  for (std::size_t c = 0; c < m; ++c) start[c + 1] += start[c];
  std::vector<std::size_t> order(g.size());
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) order[cursor[static_cast<std::size_t>(g[i])]++] = i;
  }

  const auto mm = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t c = 0; c < mm; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    for (std::size_t k = start[uc]; k < start[uc + 1]; ++k) {
      const auto row = static_cast<Eigen::Index>(order[k]);
      for (Eigen::Index j = 0; j < p; ++j) out.sums(j, c) += x(row, j);
      out.y_sums(c) += y(row);
    }
    out.counts[uc] = start[uc + 1] - start[uc];
  }
  return out;
}

namespace {

struct BlockPartial {
  double ll = 0.0;
  Eigen::MatrixXd grad;
};

template <bool WithGrad>
void eval_block(const Eigen::MatrixXd& xa, std::span<const int> g, const Eigen::MatrixXd& beta,
                Eigen::Index begin, Eigen::Index len, BlockPartial& part) {
  const auto rows = xa.middleRows(begin, len);
  // M x len, one contiguous column per row.
  Eigen::MatrixXd eta = beta * rows.transpose();
  double ll = 0.0;
  for (Eigen::Index r = 0; r < len; ++r) {
    auto col = eta.col(r);
    const auto gi = g[static_cast<std::size_t>(begin + r)];
    const double mx = col.maxCoeff();
    const double own = col(gi) - mx;
    col = (col.array() - mx).exp();
    const double s = col.sum();
    ll += own - std::log(s);
    if constexpr (WithGrad) {
      col *= -1.0 / s;
      col(gi) += 1.0;
    }
  }
  part.ll = ll;
  if constexpr (WithGrad) part.grad.noalias() = eta * rows;
}

template <bool WithGrad>
SoftmaxEval run_blocks(const Eigen::MatrixXd& xa, std::span<const int> g,
                       const Eigen::MatrixXd& beta) {
  const auto n = xa.rows();
  const auto block = static_cast<Eigen::Index>(kRowBlock);
  const auto n_blocks = static_cast<std::int64_t>((n + block - 1) / block);
  std::vector<BlockPartial> parts(static_cast<std::size_t>(n_blocks));

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    const Eigen::Index begin = b * block;
    const Eigen::Index len = std::min(block, n - begin);
    eval_block<WithGrad>(xa, g, beta, begin, len, parts[static_cast<std::size_t>(b)]);
  }

  SoftmaxEval out;
  if constexpr (WithGrad) out.grad = Eigen::MatrixXd::Zero(beta.rows(), beta.cols());
  for (const auto& part : parts) {
    out.log_lik += part.ll;
    if constexpr (WithGrad) out.grad += part.grad;
  }
  return out;
}

}  // namespace

SoftmaxEval softmax_loglik_grad(const Eigen::MatrixXd& xa, std::span<const int> g,
                                const Eigen::MatrixXd& beta) {
  return run_blocks<true>(xa, g, beta);
}

double softmax_loglik(const Eigen::MatrixXd& xa, std::span<const int> g,
                      const Eigen::MatrixXd& beta) {
  return run_blocks<false>(xa, g, beta).log_lik;
}

Eigen::MatrixXd softmax_probs(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& beta) {
  Eigen::MatrixXd eta = xa * beta.transpose();
  const auto n = static_cast<std::int64_t>(eta.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    const double mx = eta.row(r).maxCoeff();
    eta.row(r) = (eta.row(r).array() - mx).exp();
    eta.row(r) /= eta.row(r).sum();
  }
  return eta;
}

}  // namespace catenc::kernels
