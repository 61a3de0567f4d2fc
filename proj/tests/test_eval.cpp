#include "support.hpp"

#include "catenc/error.hpp"
#include "catenc/eval.hpp"

#include <cmath>

using namespace catenc;

namespace {

BenchConfig ridge_config(std::vector<std::string> encoders) {
  BenchConfig cfg;
  for (const auto& e : encoders) cfg.encoders.push_back(parse_encoder_spec(e));
  cfg.learner.kind = LearnerKind::ridge;
  cfg.k_folds = 4;
  cfg.seed = 5;
  return cfg;
}

Dataset synth(std::uint64_t seed, std::size_t n = 600) {
  SynthConfig sc;
  sc.n = n;
  sc.m = 12;
  sc.k_latent = 3;
  sc.seed = seed;
  return gen_dataset(sc).data;
}

}  // namespace

TEST_CASE("onehot alone improves on itself by zero") {
  const auto rep = run_cv(synth(1), ridge_config({}));
  REQUIRE(rep.encoders.size() == 1);
  const auto& r = rep.encoders.front();
  CHECK(r.name == "onehot");
  CHECK(r.improvement_pct == 0.0);
  CHECK(r.ttest.t == 0.0);
  CHECK(r.ttest.p == 1.0);
  CHECK(r.fold_mse.size() == 4);
  CHECK(r.mean_mse > 0.0);
}

TEST_CASE("report fields are consistent") {
  const auto ds = synth(2);
  auto cfg = ridge_config({"means", "lowrank_svd", "onehot", "means"});
  const auto rep = run_cv(ds, cfg);
  REQUIRE(rep.encoders.size() == 3);
  CHECK(rep.encoders[0].name == "onehot");
  CHECK(rep.n == 600);
  CHECK(rep.m == 12);
  const double base = rep.encoders[0].mean_mse;
  for (const auto& r : rep.encoders) {
    REQUIRE_FALSE(r.skipped);
    CHECK(r.fold_mse.size() == 4);
    double s = 0;
    for (double v : r.fold_mse) s += v;
    CHECK(r.mean_mse == doctest::Approx(s / 4));
    CHECK(r.improvement_pct == doctest::Approx(100.0 * (base - r.mean_mse) / base));
  }
  const auto* low = rep.find("lowrank_svd");
  REQUIRE(low);
  CHECK(low->fold_rank.size() == 4);
  for (int k : low->fold_rank) CHECK((k == 1 || k == 2 || k == 4 || k == 8));
  CHECK(rep.find("means")->fold_rank.empty());
  CHECK(rep.find("pca") == nullptr);
}

TEST_CASE("run_cv is deterministic and thread independent") {
  const auto ds = synth(3, 400);
  auto cfg = ridge_config({"means", "lowrank_svd:2", "mnl"});
  cfg.learner.kind = LearnerKind::forest;
  cfg.learner.n_trees = 10;
  const auto a = run_cv(ds, cfg);
  const auto b = run_cv(ds, cfg);
  cfg.exec = Exec::serial;
  const auto c = run_cv(ds, cfg);
  REQUIRE(a.encoders.size() == c.encoders.size());
  for (std::size_t e = 0; e < a.encoders.size(); ++e) {
    CHECK(a.encoders[e].fold_mse == b.encoders[e].fold_mse);
    CHECK(a.encoders[e].fold_mse == c.encoders[e].fold_mse);
  }
  cfg.seed = 6;
  CHECK(run_cv(ds, cfg).encoders[1].fold_mse != a.encoders[1].fold_mse);
}

TEST_CASE("an encoder failing in a fold is skipped") {
  const auto ds = testing::random_dataset(200, 2, 10, 4);
  const auto rep = run_cv(ds, ridge_config({"nmf:5", "means"}));
  const auto* nmf = rep.find("nmf:5");
  REQUIRE(nmf);
  CHECK(nmf->skipped);
  CHECK_FALSE(nmf->skip_reason.empty());
  CHECK(nmf->fold_mse.empty());
  CHECK_FALSE(rep.find("means")->skipped);
}

TEST_CASE("test-fold categories never reach the encoder fit") {
  auto base = testing::random_dataset(200, 3, 8, 5);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < base.n(); ++i) labels.push_back(base.label_of_row(i));
  labels[17] = "lonely";
  const auto ds = Dataset::from_labels(base.x(), labels, base.y());
  const auto rep = run_cv(ds, ridge_config({"means", "mnl"}));
  for (const auto& r : rep.encoders) {
    REQUIRE_FALSE(r.skipped);
    CHECK(r.unseen_rows == 1);
  }
}

TEST_CASE("rank candidates are capped by p and the training categories") {
  const auto ds = testing::random_dataset(60, 3, 5, 6);
  CHECK(rank_candidates({1, 2, 4, 8}, ds) == std::vector<int>{1, 2});
  CHECK(rank_candidates({8, 3, 3, 0}, ds) == std::vector<int>{3});
  CHECK(rank_candidates({9}, ds).empty());
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("config validation") {
  auto cfg = ridge_config({});
  cfg.k_folds = 1;
  CHECK_THROWS_AS(run_cv(synth(1), cfg), InvalidArgument);
  cfg = ridge_config({});
  cfg.rank_grid = {0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ridge_config({});
  CHECK_THROWS_AS(run_cv(testing::random_dataset(3, 2, 2, 1), cfg), InvalidArgument);
}

TEST_CASE("sweep cells, seeds and summary") {
  SynthConfig a;
  a.n = 300;
  a.m = 10;
  a.k_latent = 2;
  a.seed = 100;
  SynthConfig b = a;
  b.k_latent = 1;
  b.seed = 200;
  auto bench = ridge_config({"means"});
  bench.n_seeds = 2;
  const auto res = run_sim_sweep({a, b}, bench);
  REQUIRE(res.cells.size() == 4);
  CHECK(res.cells[1].config.seed == 101);
  CHECK(res.cells[2].config.seed == 200);
  CHECK(res.cells[3].config_index == 1);
  for (const auto& c : res.cells) CHECK(c.report.has_value());
  CHECK(res.cells[1].report->seed == 6);
  REQUIRE(res.summary.size() == 4);
  CHECK(res.summary[0].encoder == "onehot");
  CHECK(res.summary[0].median_improvement == 0.0);
  const auto& row = res.summary[1];
  CHECK(row.completed == 2);
  const double i0 = res.cells[0].report->find("means")->improvement_pct;
  const double i1 = res.cells[1].report->find("means")->improvement_pct;
  CHECK(row.median_improvement == doctest::Approx(0.5 * (i0 + i1)));
  CHECK(row.mean_improvement == doctest::Approx(0.5 * (i0 + i1)));

  // Same cell standalone gives the same report.
  BenchConfig one = bench;
  one.seed = bench.seed + 1;
  const auto direct = run_cv(gen_dataset(res.cells[1].config).data, one);
  CHECK(direct.encoders[1].fold_mse == res.cells[1].report->encoders[1].fold_mse);
}
