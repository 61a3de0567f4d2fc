#pragma once

// Data-parallel hot loops. Each kernel has an OpenMP implementation in
// catenc::kernels and a straightforward serial reference in
// catenc::kernels::serial used by the tests and the benchmark.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace catenc {

enum class Exec { serial, parallel };

namespace kernels {

struct GroupSums {
  Eigen::MatrixXd sums;  // p x M
  std::vector<std::size_t> counts;
  Eigen::VectorXd y_sums;  // M
};

// Per-category sums of x rows and y. Rows of a category are accumulated in
// ascending row order, so the result is bitwise identical to the serial
// reference regardless of thread count.
GroupSums group_sums(const Eigen::MatrixXd& x, std::span<const int> g, const Eigen::VectorXd& y,
                     std::size_t m);

struct SoftmaxEval {
  double log_lik = 0.0;
  Eigen::MatrixXd grad;  // M x q, d log_lik / d beta
};

// Multinomial-logit log likelihood sum_i log softmax(beta * xa_i)[g_i] and its
// gradient. beta is M x q, xa is n x q. Rows are processed in fixed-size
// blocks whose partials are reduced in block order, so the result does not
// depend on the number of threads.
SoftmaxEval softmax_loglik_grad(const Eigen::MatrixXd& xa, std::span<const int> g,
                                const Eigen::MatrixXd& beta);
double softmax_loglik(const Eigen::MatrixXd& xa, std::span<const int> g,
                      const Eigen::MatrixXd& beta);

// Row-wise class probabilities, n x M.
Eigen::MatrixXd softmax_probs(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& beta);

inline constexpr std::size_t kRowBlock = 512;

namespace serial {

GroupSums group_sums(const Eigen::MatrixXd& x, std::span<const int> g, const Eigen::VectorXd& y,
                     std::size_t m);
SoftmaxEval softmax_loglik_grad(const Eigen::MatrixXd& xa, std::span<const int> g,
                                const Eigen::MatrixXd& beta);
double softmax_loglik(const Eigen::MatrixXd& xa, std::span<const int> g,
                      const Eigen::MatrixXd& beta);

}  // namespace serial

}  // namespace kernels
}  // namespace catenc
