#include "catenc/error.hpp"
#include "catenc/learners.hpp"
#include "catenc/numerics.hpp"
#include "catenc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace catenc {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::ridge: return "ridge";
    case LearnerKind::tree: return "tree";
    case LearnerKind::forest: return "forest";
    case LearnerKind::boost: return "boost";
  }
  return "?";
}

LearnerKind parse_learner_kind(std::string_view name) {
  for (auto k : {LearnerKind::ridge, LearnerKind::tree, LearnerKind::forest, LearnerKind::boost})
    if (name == to_string(k)) return k;
  throw InvalidArgument("unknown learner '" + std::string(name) + "' (valid: ridge, tree, forest, boost)");
}

int LearnerSpec::depth() const {
  if (max_depth) return *max_depth;
  return kind == LearnerKind::boost ? 3 : 6;
}

int LearnerSpec::trees() const {
  if (n_trees) return *n_trees;
  switch (kind) {
    case LearnerKind::forest: return 100;
    case LearnerKind::boost: return 200;
    default: return 1;
  }
}

void LearnerSpec::validate() const {
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw InvalidArgument("learner lambda2 must be >= 0");
  if (depth() < 0 || depth() > 60) throw InvalidArgument("max_depth must lie in [0, 60]");
  if (trees() < 1) throw InvalidArgument("n_trees must be >= 1");
  if (!(learning_rate > 0.0) || learning_rate > 1.0) throw InvalidArgument("learning_rate must lie in (0, 1]");
  if (!(feature_subsample > 0.0) || feature_subsample > 1.0)
    throw InvalidArgument("feature_subsample must lie in (0, 1]");
  if (min_leaf < 1) throw InvalidArgument("min_leaf must be >= 1");
  if (max_bins < 2 || max_bins > 256) throw InvalidArgument("max_bins must lie in [2, 256]");
}

namespace {

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  return rows;
}

FittedModel fit_ridge(const LearnerSpec& spec, const Matrix& x, const Vector& y) {
  FittedModel model;
  model.kind = LearnerKind::ridge;
  model.width = static_cast<std::size_t>(x.cols());
  const Eigen::RowVectorXd xm = x.colwise().mean();
  const double ym = y.mean();
  const Matrix xc = x.rowwise() - xm;
  if (x.cols() == 0) {
    model.coef = Vector(0);
  } else {
    model.coef = ridge_solve(xc, y.array() - ym, spec.lambda2);
  }
  model.intercept = ym - (x.cols() ? xm.dot(model.coef) : 0.0);
  return model;
}

std::vector<RegressionTree> fit_forest(const LearnerSpec& spec, const FeatureBins& bins, const Vector& y,
                                       Exec exec) {
  const int n_trees = spec.trees();
  const std::size_t n = bins.rows();
  const std::size_t q = bins.features();
  const auto per_split = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(spec.feature_subsample * static_cast<double>(q))));
  std::vector<RegressionTree> trees(static_cast<std::size_t>(n_trees));

  auto one = [&](int t) {
    const std::uint64_t tree_seed = spec.seed + static_cast<std::uint64_t>(t);
    std::vector<std::uint32_t> rows;
    if (spec.bootstrap) {
      Rng rng(tree_seed);
      rows.resize(n);
      for (auto& r : rows) r = static_cast<std::uint32_t>(rng.below(n));
    } else {
      rows = all_rows(n);
    }
    TreeParams params{spec.depth(), spec.min_leaf, per_split, tree_seed};
    trees[static_cast<std::size_t>(t)] = grow_tree(bins, y, std::move(rows), params);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < n_trees; ++t) one(t);
  } else {
    for (int t = 0; t < n_trees; ++t) one(t);
  }
  return trees;
}

}  // namespace

FittedModel fit(const LearnerSpec& spec, const Matrix& features, const Vector& y, Exec exec) {
  spec.validate();
  if (features.rows() != y.size()) throw InvalidArgument("learner: features and y row counts differ");
  if (features.rows() < 2) throw InvalidArgument("learner: need at least 2 rows");
  if (!features.allFinite() || !y.allFinite()) throw InvalidArgument("learner: non-finite input");

  if (spec.kind == LearnerKind::ridge) return fit_ridge(spec, features, y);

  FittedModel model;
  model.kind = spec.kind;
  model.width = static_cast<std::size_t>(features.cols());
  const FeatureBins bins(features, spec.max_bins);
  const auto n = static_cast<std::size_t>(features.rows());

  switch (spec.kind) {
    case LearnerKind::tree: {
      TreeParams params{spec.depth(), spec.min_leaf, 0, spec.seed};
      model.trees.push_back(grow_tree(bins, y, all_rows(n), params));
      break;
    }
    case LearnerKind::forest:
      model.trees = fit_forest(spec, bins, y, exec);
      break;
    case LearnerKind::boost: {
      model.base = y.mean();
      model.learning_rate = spec.learning_rate;
      Vector pred = Vector::Constant(y.size(), model.base);
      for (int r = 0; r < spec.trees(); ++r) {
        const Vector resid = y - pred;
        TreeParams params{spec.depth(), spec.min_leaf, 0, derive_seed(spec.seed, static_cast<std::uint64_t>(r))};
        auto tree = grow_tree(bins, resid, all_rows(n), params);
        pred += spec.learning_rate * tree.predict(features);
        model.trees.push_back(std::move(tree));
      }
      break;
    }
    case LearnerKind::ridge: break;
  }
  return model;
}

Vector FittedModel::predict(const Matrix& features) const {
  if (static_cast<std::size_t>(features.cols()) != width)
    throw InvalidArgument("predict: expected " + std::to_string(width) + " features, got " +
                          std::to_string(features.cols()));
  switch (kind) {
    case LearnerKind::ridge: {
      Vector out = Vector::Constant(features.rows(), intercept);
      if (width) out += features * coef;
      return out;
    }
    case LearnerKind::tree:
      return trees.front().predict(features);
    case LearnerKind::forest: {
      Vector out = Vector::Zero(features.rows());
      for (const auto& t : trees) out += t.predict(features);
      return out / static_cast<double>(trees.size());
    }
    case LearnerKind::boost: {
      Vector out = Vector::Constant(features.rows(), base);
      for (const auto& t : trees) out += learning_rate * t.predict(features);
      return out;
    }
  }
  return {};
}

Vector predict(const FittedModel& model, const Matrix& features) { return model.predict(features); }

double mse(const Vector& pred, const Vector& y) {
  if (pred.size() != y.size() || y.size() == 0) throw InvalidArgument("mse: size mismatch");
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace catenc
