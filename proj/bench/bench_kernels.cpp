#include "catenc/kernels.hpp"
#include "catenc/learners.hpp"
#include "catenc/rng.hpp"

#include <benchmark/benchmark.h>

using namespace catenc;

namespace {

struct Problem {
  Eigen::MatrixXd x;
  Eigen::MatrixXd xa;  // x with an intercept column
  Eigen::VectorXd y;
  std::vector<int> g;
  Eigen::MatrixXd beta;
  std::size_t m;
};

Problem make(std::size_t n, std::size_t m) {
  const Eigen::Index p = 6;
  Rng rng(1);
  Problem pr;
  pr.m = m;
  pr.x.resize(static_cast<Eigen::Index>(n), p);
  pr.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < pr.x.rows(); ++i) {
    pr.g.push_back(static_cast<int>(rng.below(m)));
    for (Eigen::Index j = 0; j < p; ++j) pr.x(i, j) = rng.normal();
    pr.y(i) = pr.x(i, 0) + rng.normal();
  }
  pr.xa.resize(pr.x.rows(), p + 1);
  pr.xa << pr.x, Eigen::VectorXd::Ones(pr.x.rows());
  pr.beta = 0.1 * Eigen::MatrixXd::Random(static_cast<Eigen::Index>(m), p + 1);
  pr.beta.row(0).setZero();
  return pr;
}

void BM_group_sums_serial(benchmark::State& st) {
  const auto pr = make(static_cast<std::size_t>(st.range(0)), 100);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::group_sums(pr.x, pr.g, pr.y, pr.m));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_group_sums_omp(benchmark::State& st) {
  const auto pr = make(static_cast<std::size_t>(st.range(0)), 100);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::group_sums(pr.x, pr.g, pr.y, pr.m));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_softmax_grad_serial(benchmark::State& st) {
  const auto pr = make(static_cast<std::size_t>(st.range(0)), 30);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::softmax_loglik_grad(pr.xa, pr.g, pr.beta));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_softmax_grad_omp(benchmark::State& st) {
  const auto pr = make(static_cast<std::size_t>(st.range(0)), 30);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::softmax_loglik_grad(pr.xa, pr.g, pr.beta));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void forest(benchmark::State& st, Exec exec) {
  const auto pr = make(static_cast<std::size_t>(st.range(0)), 10);
  LearnerSpec spec;
  spec.n_trees = 20;
  for (auto _ : st) benchmark::DoNotOptimize(fit(spec, pr.x, pr.y, exec));
}

void BM_forest_serial(benchmark::State& st) { forest(st, Exec::serial); }
void BM_forest_omp(benchmark::State& st) { forest(st, Exec::parallel); }

}  // namespace

BENCHMARK(BM_group_sums_serial)->Arg(10000)->Arg(100000);
BENCHMARK(BM_group_sums_omp)->Arg(10000)->Arg(100000);
BENCHMARK(BM_softmax_grad_serial)->Arg(10000)->Arg(100000);
BENCHMARK(BM_softmax_grad_omp)->Arg(10000)->Arg(100000);
BENCHMARK(BM_forest_serial)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_omp)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
