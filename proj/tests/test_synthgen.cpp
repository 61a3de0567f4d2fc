#include "support.hpp"

#include "catenc/error.hpp"
#include "catenc/synthgen.hpp"

#include <cmath>

using namespace catenc;

TEST_CASE("posterior for two states over four categories") {
  SynthConfig cfg;
  cfg.m = 4;
  cfg.k_latent = 2;
  cfg.p_assign = 0.9;
  const Matrix phi = true_posterior(cfg);
  REQUIRE(phi.rows() == 2);
  REQUIRE(phi.cols() == 4);
  CHECK(phi(0, 0) == doctest::Approx(0.9));
  CHECK(phi(0, 1) == doctest::Approx(0.9));
  CHECK(phi(1, 2) == doctest::Approx(0.9));
  CHECK(phi(1, 0) == doctest::Approx(0.1));
  CHECK(phi(0, 3) == doctest::Approx(0.1));
}

TEST_CASE("posterior columns are distributions") {
  SynthConfig cfg;
  cfg.m = 30;
  cfg.k_latent = 3;
  cfg.p_assign = 0.6;
  const Matrix phi = true_posterior(cfg);
  for (Eigen::Index g = 0; g < 30; ++g) CHECK(phi.col(g).sum() == doctest::Approx(1.0));
  CHECK(phi.minCoeff() > 0.0);
}

TEST_CASE("empirical latent frequencies per category match the posterior") {
  SynthConfig cfg;
  cfg.n = 60000;
  cfg.m = 6;
  cfg.k_latent = 3;
  cfg.p = 2;
  cfg.p_assign = 0.7;
  cfg.seed = 5;
  const auto sd = gen_dataset(cfg);
  const Matrix phi = true_posterior(cfg);
  Matrix counts = Matrix::Zero(3, 6);
  for (std::size_t i = 0; i < cfg.n; ++i) counts(sd.truth.latent[i], sd.data.g()[i]) += 1.0;
  for (Eigen::Index g = 0; g < 6; ++g) {
    const double total = counts.col(g).sum();
    for (Eigen::Index l = 0; l < 3; ++l) {
      const double se = std::sqrt(phi(l, g) * (1 - phi(l, g)) / total);
      CHECK(std::abs(counts(l, g) / total - phi(l, g)) < 4.5 * se);
    }
  }
}

TEST_CASE("medians split the features in half") {
  SynthConfig cfg;
  cfg.n = 40000;
  cfg.m = 10;
  cfg.k_latent = 5;
  cfg.p = 3;
  cfg.outcome = OutcomeModel::piecewise;
  cfg.seed = 2;
  const auto sd = gen_dataset(cfg);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double below = (sd.data.x().col(j).array() <= sd.truth.medians(j)).cast<double>().mean();
    CHECK(std::abs(below - 0.5) < 0.01);
  }
}

TEST_CASE("generation is seeded") {
  SynthConfig cfg;
  cfg.n = 500;
  cfg.outcome = OutcomeModel::group_linear;
  cfg.seed = 9;
  const auto a = gen_dataset(cfg);
  const auto b = gen_dataset(cfg);
  CHECK(a.data.x() == b.data.x());
  CHECK(a.data.y() == b.data.y());
  CHECK(a.data.g() == b.data.g());
  cfg.seed = 10;
  CHECK(gen_dataset(cfg).data.y() != a.data.y());
}

TEST_CASE("latent means are well conditioned and shaped") {
  SynthConfig cfg;
  cfg.n = 200;
  cfg.m = 50;
  cfg.k_latent = 10;
  cfg.p = 6;
  const auto sd = gen_dataset(cfg);
  CHECK(sd.truth.b_means.rows() == 10);
  CHECK(sd.truth.b_means.cols() == 6);
  CHECK(sd.truth.beta_group.rows() == 10);
  CHECK(sd.truth.cov_scale.minCoeff() >= 0.5);
  CHECK(sd.truth.cov_scale.maxCoeff() <= 1.5);
}

TEST_CASE("noiseless outcomes follow the model formulas") {
  SynthConfig cfg;
  cfg.n = 50;
  cfg.p = 2;
  cfg.m = 4;
  cfg.k_latent = 2;
  cfg.noise_sd = 0.0;
  for (auto model : {OutcomeModel::linear, OutcomeModel::group_linear, OutcomeModel::piecewise}) {
    cfg.outcome = model;
    const auto sd = gen_dataset(cfg);
    const auto& t = sd.truth;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const int l = t.latent[i];
      const double x0 = sd.data.x()(ii, 0), x1 = sd.data.x()(ii, 1);
      double expect = 0.0;
      if (model == OutcomeModel::linear) {
        expect = t.alpha(l) + x0 * t.beta_shared(0) + x1 * t.beta_shared(1);
      } else if (model == OutcomeModel::group_linear) {
        expect = t.alpha(0) + x0 * t.beta_group(l, 0) + x1 * t.beta_group(l, 1);
      } else {
        expect = t.alpha(0) + x0 * (x0 > t.medians(0) ? t.beta_plus(0) : t.beta_minus(0)) +
                 x1 * (x1 > t.medians(1) ? t.beta_plus(1) : t.beta_minus(1));
      }
      CHECK(sd.data.y()(ii) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.m = 5;
  cfg.k_latent = 2;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.m = 6;
  cfg.p_assign = 0.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.p_assign = 0.8;
  CHECK_NOTHROW(cfg.validate());
  cfg.noise_sd = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.noise_sd = 1.0;
  cfg.k_latent = 1;
  cfg.p_assign = 0.1;
  CHECK_NOTHROW(cfg.validate());
  cfg.p = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("labels are zero padded and outcome names parse") {
  CHECK(category_label(3, 50) == "g03");
  CHECK(category_label(12, 10) == "g12");
  CHECK(category_label(7, 1000) == "g007");
  CHECK(parse_outcome_model("group") == OutcomeModel::group_linear);
  CHECK(parse_outcome_model("piecewise") == OutcomeModel::piecewise);
  CHECK_THROWS_AS(parse_outcome_model("quadratic"), InvalidArgument);
}
