#include "support.hpp"

#include "catenc/kernels.hpp"

#include <omp.h>

#include <cmath>

using namespace catenc;

namespace {

std::vector<int> random_groups(std::size_t n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> g(n);
  for (auto& c : g) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
  for (int c = 0; c < m && static_cast<std::size_t>(c) < n; ++c) g[static_cast<std::size_t>(c)] = c;
  return g;
}

// Direct per-row formula with no blocking or stabilisation tricks beyond the max shift.
double naive_loglik(const Matrix& xa, const std::vector<int>& g, const Matrix& beta, Matrix& grad) {
  grad = Matrix::Zero(beta.rows(), beta.cols());
  double ll = 0.0;
  for (Eigen::Index i = 0; i < xa.rows(); ++i) {
    Vector eta = beta * xa.row(i).transpose();
    const double mx = eta.maxCoeff();
    Vector p = (eta.array() - mx).exp();
    const double s = p.sum();
    p /= s;
    const int gi = g[static_cast<std::size_t>(i)];
    ll += std::log(p(gi));
    for (Eigen::Index c = 0; c < beta.rows(); ++c)
      grad.row(c) += ((c == gi ? 1.0 : 0.0) - p(c)) * xa.row(i);
  }
  return ll;
}

}  // namespace

TEST_CASE("group sums: parallel equals serial bitwise for any thread count") {
  const Matrix x = testing::random_matrix(5000, 7, 1);
  const Vector y = testing::random_matrix(5000, 1, 2).col(0);
  const auto g = random_groups(5000, 37, 3);
  const auto ref = kernels::serial::group_sums(x, g, y, 37);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    const auto par = kernels::group_sums(x, g, y, 37);
    CHECK(par.sums == ref.sums);
    CHECK(par.y_sums == ref.y_sums);
    CHECK(par.counts == ref.counts);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("group sums by hand") {
  Matrix x(4, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  const Vector y = (Vector(4) << 1, 10, 100, 1000).finished();
  const std::vector<int> g = {1, 0, 1, 1};
  const auto s = kernels::group_sums(x, g, y, 2);
  CHECK(s.counts == std::vector<std::size_t>{1, 3});
  CHECK(s.sums(0, 0) == 3.0);
  CHECK(s.sums(1, 1) == 16.0);
  CHECK(s.y_sums(1) == 1101.0);
}

TEST_CASE("softmax log likelihood and gradient match the naive formula") {
  const Matrix xa = testing::random_matrix(1300, 4, 5, -2.0, 2.0);
  const auto g = random_groups(1300, 6, 6);
  const Matrix beta = testing::random_matrix(6, 4, 7);
  Matrix grad_ref;
  const double ll_ref = naive_loglik(xa, g, beta, grad_ref);

  const auto par = kernels::softmax_loglik_grad(xa, g, beta);
  const auto ser = kernels::serial::softmax_loglik_grad(xa, g, beta);
  CHECK(par.log_lik == doctest::Approx(ll_ref).epsilon(1e-12));
  CHECK(ser.log_lik == doctest::Approx(ll_ref).epsilon(1e-12));
  CHECK(testing::max_abs_diff(par.grad, grad_ref) < 1e-9);
  CHECK(testing::max_abs_diff(ser.grad, grad_ref) < 1e-9);
  CHECK(kernels::softmax_loglik(xa, g, beta) == doctest::Approx(ll_ref).epsilon(1e-12));
  CHECK(kernels::serial::softmax_loglik(xa, g, beta) == doctest::Approx(ll_ref).epsilon(1e-12));
}

TEST_CASE("softmax kernel is independent of the thread count") {
  const Matrix xa = testing::random_matrix(3000, 5, 8);
  const auto g = random_groups(3000, 9, 9);
  const Matrix beta = testing::random_matrix(9, 5, 10);
  omp_set_num_threads(1);
  const auto one = kernels::softmax_loglik_grad(xa, g, beta);
  for (int threads : {2, 4, 7}) {
    omp_set_num_threads(threads);
    const auto many = kernels::softmax_loglik_grad(xa, g, beta);
    CHECK(many.log_lik == one.log_lik);
    CHECK(many.grad == one.grad);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("softmax probabilities are rows of a simplex") {
  const Matrix xa = testing::random_matrix(50, 3, 11, -30.0, 30.0);
  const Matrix beta = testing::random_matrix(4, 3, 12, -5.0, 5.0);
  const Matrix p = kernels::softmax_probs(xa, beta);
  CHECK(p.minCoeff() >= 0.0);
  for (Eigen::Index i = 0; i < p.rows(); ++i) CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}
