#include "support.hpp"

#include "catenc/encoders.hpp"
#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <set>

using namespace catenc;

namespace {

// Three categories with hand-checkable means.
Dataset tiny() {
  Matrix x(6, 2);
  x << 1, 10,  //
      3, 30,   //
      0, 5,    //
      2, 5,    //
      4, 0,    //
      8, 4;
  const std::vector<std::string> labels = {"a", "a", "b", "b", "c", "c"};
  const Vector y = (Vector(6) << 1, 3, 10, 12, -1, -3).finished();
  return Dataset::from_labels(x, labels, y);
}

Matrix table(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index j = 0;
    for (double v : r) t(i, j++) = v;
    ++i;
  }
  return t;
}

}  // namespace

TEST_CASE("contrast matrices for five levels") {
  CHECK(contrast_matrix(ContrastKind::onehot, 5) ==
        table({{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
  CHECK(contrast_matrix(ContrastKind::deviation, 5) ==
        table({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {-1, -1, -1, -1}}));
  const Matrix diff = table({{-0.5, -0.333, -0.25, -0.2},
                             {0.5, -0.333, -0.25, -0.2},
                             {0.0, 0.667, -0.25, -0.2},
                             {0.0, 0.0, 0.75, -0.2},
                             {0.0, 0.0, 0.0, 0.8}});
  CHECK(testing::max_abs_diff(contrast_matrix(ContrastKind::difference, 5), diff) < 0.005);
  const Matrix helm = table({{0.80, 0.00, 0.00, 0.00},
                             {-0.20, 0.75, 0.00, 0.00},
                             {-0.20, -0.25, 0.67, 0.00},
                             {-0.20, -0.25, -0.33, 0.50},
                             {-0.20, -0.25, -0.33, -0.50}});
  CHECK(testing::max_abs_diff(contrast_matrix(ContrastKind::helmert, 5), helm) < 0.005);
  const Matrix cum = table({{0.8, 0.6, 0.4, 0.2},
                            {-0.2, 0.6, 0.4, 0.2},
                            {-0.2, -0.4, 0.4, 0.2},
                            {-0.2, -0.4, -0.6, 0.2},
                            {-0.2, -0.4, -0.6, -0.8}});
  CHECK(testing::max_abs_diff(contrast_matrix(ContrastKind::cumulative, 5), cum) < 0.005);
}

TEST_CASE("contrast columns other than one-hot sum to zero") {
  for (int m : {2, 3, 7, 12}) {
    for (auto kind : {ContrastKind::deviation, ContrastKind::difference, ContrastKind::helmert,
                      ContrastKind::cumulative}) {
      const Matrix c = contrast_matrix(kind, m);
      CHECK(c.rows() == m);
      CHECK(c.cols() == m - 1);
      CHECK(c.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK_THROWS_AS(contrast_matrix(ContrastKind::helmert, 1), EncoderError);
}

TEST_CASE("means encoding by hand") {
  const auto enc = fit_means(tiny());
  CHECK(enc.psi == table({{2, 20}, {1, 5}, {6, 2}}));
  CHECK(enc.fallback(0) == doctest::Approx(3.0));
  CHECK(enc.fallback(1) == doctest::Approx(9.0));
  CHECK(encoding_column_names(enc) == std::vector<std::string>{"means_1", "means_2"});
}

TEST_CASE("low-rank encoding equals the scaled left factor of centered means") {
  const auto ds = testing::random_dataset(300, 4, 9, 1);
  const auto enc = fit_lowrank_svd(ds, 2);
  Matrix z = group_stats(ds).means.transpose();
  z.rowwise() -= z.colwise().mean();
  Eigen::JacobiSVD<Matrix> ref(z, Eigen::ComputeThinU);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const Vector expect = ref.matrixU().col(j) * ref.singularValues()(j);
    const double sign = expect.dot(enc.psi.col(j)) < 0 ? -1.0 : 1.0;
    CHECK(testing::max_abs_diff(enc.psi.col(j), sign * expect) < 1e-9);
  }
  CHECK(enc.fallback.isZero());
  const auto raw = fit_lowrank_svd(ds, 2, false, true);
  CHECK(testing::max_abs_diff(raw.psi.transpose() * raw.psi, Matrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("pca encoding eigenvectors of the category covariance") {
  const auto ds = testing::random_dataset(300, 5, 7, 2);
  const auto enc = fit_pca(ds, 3);
  Matrix z = group_stats(ds).means.transpose();
  z.rowwise() -= z.colwise().mean();
  const Matrix cov = z * z.transpose() / 5.0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Vector v = enc.psi.col(j);
    const double lam = v.squaredNorm();
    CHECK(testing::max_abs_diff(cov * v, lam * v) < 1e-9);
  }
  CHECK_THROWS_AS(fit_pca(ds, 8), EncoderError);
}

TEST_CASE("sparse low-rank with zero threshold matches low-rank scores") {
  const auto ds = testing::random_dataset(300, 4, 8, 3);
  const auto sp = fit_sparse_lowrank(ds, 2, 0.0);
  const auto lr = fit_lowrank_svd(ds, 2);
  CHECK(testing::max_abs_diff(sp.psi, lr.psi) < 1e-6);
  const auto def = fit_sparse_lowrank(ds, 2);
  REQUIRE(def.spec.lambda.has_value());
  CHECK(*def.spec.lambda > 0.0);
}

TEST_CASE("nmf encoding shifts only negative features and stays nonnegative") {
  auto ds = testing::random_dataset(200, 3, 6, 4);
  Matrix x = ds.x();
  x.col(1) = x.col(1).cwiseAbs();
  ds = Dataset(x, ds.g(), ds.y(), ds.labels());
  const auto enc = fit_nmf(ds, 2, 5);
  CHECK(enc.shift(0) > 0.0);
  CHECK(enc.shift(1) == 0.0);
  CHECK(enc.psi.minCoeff() >= 0.0);
  CHECK(enc.psi.rows() == 6);
}

TEST_CASE("mnl encoding rows are category coefficients with a zero reference") {
  const auto ds = testing::random_dataset(300, 2, 4, 5);
  const auto enc = fit_mnl_encoding(ds);
  CHECK(enc.psi.rows() == 4);
  CHECK(enc.psi.cols() == 3);
  CHECK(enc.psi.row(0).isZero());
  CHECK_THROWS_AS(fit_mnl_encoding(testing::random_dataset(10, 2, 1, 1)), EncoderError);
}

TEST_CASE("svm encoding holds weights and bias") {
  const auto ds = testing::random_dataset(120, 2, 3, 6);
  const auto enc = fit_svm_encoding(ds);
  CHECK(enc.psi.cols() == 3);
  CHECK(enc.psi.rows() == 3);
}

TEST_CASE("fisher ranks categories by mean outcome") {
  const auto enc = fit_fisher(tiny());
  // y means: a = 2, b = 11, c = -2
  CHECK(enc.psi == table({{2}, {3}, {1}}));
  CHECK(enc.fallback(0) == 2.0);
}

TEST_CASE("permutation columns are seeded permutations") {
  const auto ds = testing::random_dataset(50, 2, 10, 7);
  const auto one = fit_permutation(ds, 1, 3);
  const auto many = fit_permutation(ds, 4, 3);
  CHECK(many.psi.col(0) == one.psi.col(0));
  for (Eigen::Index c = 0; c < 4; ++c) {
    std::vector<double> v(many.psi.col(c).data(), many.psi.col(c).data() + 10);
    std::sort(v.begin(), v.end());
    for (int i = 0; i < 10; ++i) CHECK(v[static_cast<std::size_t>(i)] == i + 1);
  }
  CHECK(many.psi.col(1) != many.psi.col(2));
  CHECK(fit_permutation(ds, 4, 3).psi == many.psi);
  CHECK(many.fallback(0) == 5.5);
}

TEST_CASE("transform uses the fallback for unseen categories") {
  const auto train = tiny();
  const auto enc = fit_means(train);
  Matrix x(2, 2);
  x << 9, 9, 7, 7;
  const auto test = Dataset::from_labels(x, std::vector<std::string>{"b", "zzz"}, Vector::Zero(2));
  const auto tr = transform(test, enc);
  CHECK(tr.unseen_rows == 1);
  CHECK(tr.features.row(0) == (Eigen::RowVectorXd(4) << 9, 9, 1, 5).finished());
  CHECK(tr.features(1, 2) == doctest::Approx(3.0));
  CHECK(tr.features(1, 3) == doctest::Approx(9.0));
  const auto wrong = Dataset::from_labels(Matrix::Ones(1, 3), std::vector<std::string>{"a"}, Vector::Zero(1));
  CHECK_THROWS_AS(transform(wrong, enc), EncoderError);
}

TEST_CASE("every kind fits through the dispatcher") {
  const auto ds = testing::random_dataset(240, 3, 6, 8);
  for (auto kind : all_encoder_kinds()) {
    EncoderSpec spec;
    spec.kind = kind;
    const auto enc = fit_encoder(ds, spec);
    CHECK(enc.psi.rows() == 6);
    CHECK(enc.fallback.size() == enc.psi.cols());
    CHECK(enc.psi.allFinite());
    if (is_rank_dependent(kind)) CHECK(enc.spec.k == default_rank(ds));
    const auto tr = transform(ds, enc);
    CHECK(tr.features.cols() == 3 + enc.psi.cols());
  }
}

TEST_CASE("default rank rule") {
  CHECK(default_rank(testing::random_dataset(100, 3, 20, 1)) == 3);
  CHECK(default_rank(testing::random_dataset(100, 12, 5, 1)) == 5);
  CHECK(default_rank(testing::random_dataset(100, 12, 20, 1)) == 8);
}

TEST_CASE("rank outside range is an encoder error") {
  const auto ds = testing::random_dataset(100, 3, 5, 9);
  CHECK_THROWS_AS(fit_lowrank_svd(ds, 4), EncoderError);
  CHECK_THROWS_AS(fit_nmf(ds, 0), EncoderError);
  CHECK_THROWS_AS(fit_sparse_lowrank(ds, 9), EncoderError);
}

TEST_CASE("encoder names parse and print") {
  CHECK(parse_encoder_kind("helmert") == EncoderKind::helmert);
  try {
    parse_encoder_kind("bogus");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("lowrank_svd") != std::string::npos);
  }
  const auto spec = parse_encoder_spec("nmf:3");
  CHECK(spec.kind == EncoderKind::nmf);
  CHECK(spec.k == 3);
  CHECK(to_string(spec) == "nmf:3");
  CHECK_THROWS_AS(parse_encoder_spec("means:2"), InvalidArgument);
  CHECK_THROWS_AS(parse_encoder_spec("pca:0"), InvalidArgument);
  CHECK_THROWS_AS(parse_encoder_spec("pca:x"), InvalidArgument);
  std::set<std::string> names;
  for (auto k : all_encoder_kinds()) names.insert(std::string(to_string(k)));
  CHECK(names.size() == 15);
}
