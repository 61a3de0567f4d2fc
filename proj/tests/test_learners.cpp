#include "support.hpp"

#include "catenc/error.hpp"
#include "catenc/learners.hpp"

#include <algorithm>

using namespace catenc;

namespace {

LearnerSpec spec_of(LearnerKind kind) {
  LearnerSpec s;
  s.kind = kind;
  s.seed = 17;
  return s;
}

double training_mse(const LearnerSpec& s, const Matrix& x, const Vector& y) {
  return mse(fit(s, x, y).predict(x), y);
}

// Best single split over every feature and every gap between distinct values.
Vector exhaustive_stump(const Matrix& x, const Vector& y, int min_leaf) {
  const auto n = x.rows();
  double best = (y.array() - y.mean()).square().sum();
  Vector pred = Vector::Constant(n, y.mean());
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> vals(x.col(f).data(), x.col(f).data() + n);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t v = 0; v + 1 < vals.size(); ++v) {
      const double thr = 0.5 * (vals[v] + vals[v + 1]);
      double sl = 0, sr = 0;
      int nl = 0, nr = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (x(i, f) <= thr) {
          sl += y(i);
          ++nl;
        } else {
          sr += y(i);
          ++nr;
        }
      }
      if (nl < min_leaf || nr < min_leaf) continue;
      double sse = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = x(i, f) <= thr ? sl / nl : sr / nr;
        sse += (y(i) - m) * (y(i) - m);
      }
      if (sse < best - 1e-12) {
        best = sse;
        for (Eigen::Index i = 0; i < n; ++i) pred(i) = x(i, f) <= thr ? sl / nl : sr / nr;
      }
    }
  }
  return pred;
}

}  // namespace

TEST_CASE("ridge with the target as a feature is a perfect predictor") {
  const Vector y = testing::random_matrix(50, 1, 1).col(0);
  Matrix x(50, 2);
  x.col(0) = y;
  x.col(1) = testing::random_matrix(50, 1, 2).col(0);
  auto s = spec_of(LearnerKind::ridge);
  s.lambda2 = 1e-8;
  CHECK(training_mse(s, x, y) < 1e-10);
}

TEST_CASE("a tree fits a step function") {
  const Matrix x = testing::random_matrix(100, 1, 3);
  const Vector y = (x.col(0).array() > 0.0).cast<double>();
  CHECK(training_mse(spec_of(LearnerKind::tree), x, y) < 1e-6);
}

TEST_CASE("one boosting round of depth one equals the exhaustive best stump") {
  Matrix x(6, 2);
  x << 1.0, 5.0,  //
      2.0, 3.0,   //
      3.0, 4.0,   //
      4.0, 1.0,   //
      5.0, 2.0,   //
      6.0, 6.0;
  const Vector y = (Vector(6) << 1.0, 1.2, 0.9, 4.0, 4.2, 3.7).finished();
  auto s = spec_of(LearnerKind::boost);
  s.max_depth = 1;
  s.n_trees = 1;
  s.learning_rate = 1.0;
  s.min_leaf = 1;
  const Vector pred = fit(s, x, y).predict(x);
  const Vector oracle = exhaustive_stump(x, y, 1);
  CHECK(testing::max_abs_diff(pred, oracle) < 1e-12);
  CHECK(pred(0) == doctest::Approx(31.0 / 30.0));
}

TEST_CASE("constant targets give constant predictions for every learner") {
  const Matrix x = testing::random_matrix(40, 3, 4);
  const Vector y = Vector::Constant(40, 2.5);
  const Matrix probe = testing::random_matrix(10, 3, 5, -3.0, 3.0);
  for (auto kind : {LearnerKind::ridge, LearnerKind::tree, LearnerKind::forest, LearnerKind::boost}) {
    auto s = spec_of(kind);
    s.n_trees = 5;
    const Vector p = fit(s, x, y).predict(probe);
    CHECK(p.isApproxToConstant(2.5, 1e-12));
  }
}

TEST_CASE("a forest of one unbagged full-feature tree equals the tree") {
  const Matrix x = testing::random_matrix(200, 4, 6);
  const Vector y = (x.col(0).array().square() + x.col(1).array()).matrix();
  auto f = spec_of(LearnerKind::forest);
  f.n_trees = 1;
  f.feature_subsample = 1.0;
  f.bootstrap = false;
  const Matrix probe = testing::random_matrix(30, 4, 7);
  CHECK(fit(f, x, y).predict(probe) == fit(spec_of(LearnerKind::tree), x, y).predict(probe));
}

TEST_CASE("hand-built tree traced by hand") {
  std::vector<TreeNode> nodes(5);
  nodes[0] = {0, 0.5, 1, 2, 0.0};
  nodes[1] = {-1, 0.0, -1, -1, -1.0};
  nodes[2] = {1, 2.0, 3, 4, 0.0};
  nodes[3] = {-1, 0.0, -1, -1, 10.0};
  nodes[4] = {-1, 0.0, -1, -1, 20.0};
  const RegressionTree tree(nodes);
  Matrix x(5, 2);
  x << 0.0, 9.0,  //
      0.5, 0.0,   //
      0.6, 2.0,   //
      1.0, 2.1,   //
      7.0, -4.0;
  const Vector p = tree.predict(x);
  CHECK(p == (Vector(5) << -1.0, -1.0, 10.0, 20.0, 10.0).finished());
  CHECK(tree.depth() == 2);
  std::vector<TreeNode> bad = nodes;
  bad[2].right = 9;
  CHECK_THROWS_AS(RegressionTree{bad}, InvalidArgument);
  bad = nodes;
  bad[0].threshold = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(RegressionTree{bad}, InvalidArgument);
}

TEST_CASE("tree training error does not increase with depth") {
  const Matrix x = testing::random_matrix(500, 3, 8);
  const Vector y = (x.col(0).array() * 3.0).sin().matrix() + x.col(1) + 0.1 * testing::random_matrix(500, 1, 9).col(0);
  double prev = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= 9; ++d) {
    auto s = spec_of(LearnerKind::tree);
    s.max_depth = d;
    const double e = training_mse(s, x, y);
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  auto s = spec_of(LearnerKind::forest);
  s.feature_subsample = 0.5;
  s.n_trees = 1;
  s.bootstrap = false;
  prev = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= 8; ++d) {
    s.max_depth = d;
    const double e = training_mse(s, x, y);
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
}

TEST_CASE("boost training error does not increase with rounds") {
  const Matrix x = testing::random_matrix(300, 3, 10);
  const Vector y = x.col(0).array().square().matrix() - x.col(2) + 0.2 * testing::random_matrix(300, 1, 11).col(0);
  double prev = std::numeric_limits<double>::infinity();
  for (int r : {1, 2, 3, 5, 10, 20, 40, 80}) {
    auto s = spec_of(LearnerKind::boost);
    s.n_trees = r;
    const double e = training_mse(s, x, y);
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
}

TEST_CASE("forest is deterministic, thread independent and order invariant") {
  const Matrix x = testing::random_matrix(400, 6, 12);
  const Vector y = x.col(0) - 2.0 * x.col(3) + 0.3 * testing::random_matrix(400, 1, 13).col(0);
  auto s = spec_of(LearnerKind::forest);
  s.n_trees = 30;
  const auto a = fit(s, x, y, Exec::parallel);
  const auto b = fit(s, x, y, Exec::serial);
  const auto c = fit(s, x, y, Exec::parallel);
  const Matrix probe = testing::random_matrix(50, 6, 14);
  CHECK(a.predict(probe) == b.predict(probe));
  CHECK(a.predict(probe) == c.predict(probe));
  auto rev = a;
  std::reverse(rev.trees.begin(), rev.trees.end());
  CHECK(testing::max_abs_diff(rev.predict(probe), a.predict(probe)) < 1e-12);
  s.seed = 18;
  CHECK(fit(s, x, y).predict(probe) != a.predict(probe));
}

TEST_CASE("tree splits reference valid features with finite thresholds") {
  const Matrix x = testing::random_matrix(300, 5, 15);
  const Vector y = x.rowwise().sum();
  auto s = spec_of(LearnerKind::forest);
  s.n_trees = 10;
  for (const auto& t : fit(s, x, y).trees)
    for (const auto& nd : t.nodes()) {
      if (nd.feature < 0) continue;
      CHECK(nd.feature < 5);
      CHECK(std::isfinite(nd.threshold));
    }
}

TEST_CASE("bins are exact for few distinct values and capped otherwise") {
  Matrix x(8, 2);
  x.col(0) << 3, 1, 2, 3, 1, 2, 5, 5;
  x.col(1) = testing::random_matrix(8, 1, 16).col(0);
  const FeatureBins exact(x, 256);
  CHECK(exact.bin_count(0) == 4);
  CHECK(exact.threshold(0, 0) == 1.5);
  CHECK(exact.threshold(0, 2) == 4.0);
  CHECK(exact.code(0, 6) == 3);
  CHECK(exact.code(0, 1) == 0);
  const Matrix wide = testing::random_matrix(5000, 1, 17);
  const FeatureBins capped(wide, 16);
  CHECK(capped.bin_count(0) <= 16);
  CHECK(capped.bin_count(0) >= 8);
}

TEST_CASE("learner errors") {
  const Matrix x = testing::random_matrix(20, 2, 18);
  const Vector y = x.col(0);
  const auto model = fit(spec_of(LearnerKind::tree), x, y);
  CHECK_THROWS_AS(model.predict(Matrix::Zero(3, 3)), InvalidArgument);
  CHECK_THROWS_AS(fit(spec_of(LearnerKind::ridge), x.topRows(1), y.head(1)), InvalidArgument);
  Matrix bad = x;
  bad(3, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fit(spec_of(LearnerKind::forest), bad, y), InvalidArgument);
  auto s = spec_of(LearnerKind::boost);
  s.learning_rate = 0.0;
  CHECK_THROWS_AS(fit(s, x, y), InvalidArgument);
  s = spec_of(LearnerKind::forest);
  s.feature_subsample = 1.5;
  CHECK_THROWS_AS(fit(s, x, y), InvalidArgument);
  s.feature_subsample = 0.5;
  s.n_trees = 0;
  CHECK_THROWS_AS(fit(s, x, y), InvalidArgument);
  CHECK_THROWS_AS(parse_learner_kind("xgboost"), InvalidArgument);
}
