#pragma once

// Downstream regressors used to score encodings: ridge, CART tree, bagged
// forest and gradient-boosted trees on squared loss.

#include "catenc/dataset.hpp"
#include "catenc/kernels.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace catenc {

enum class LearnerKind { ridge, tree, forest, boost };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::forest;
  double lambda2 = 1.0;
  std::optional<int> max_depth;  // tree/forest 6, boost 3
  std::optional<int> n_trees;    // forest 100, boost 200
  double learning_rate = 0.1;
  double feature_subsample = 1.0 / 3.0;  // forest only
  bool bootstrap = true;                 // forest only
  int min_leaf = 5;
  int max_bins = 256;
  std::uint64_t seed = 0;

  int depth() const;
  int trees() const;
  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

// Rows with x[feature] <= threshold go left.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Vector predict(const Matrix& x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

// Per-feature histogram bins. Features with at most max_bins distinct values
// get one bin per value, so split search over bins is exact CART; wider
// features are binned at quantiles. Split thresholds are midpoints between
// the largest value of a bin and the smallest value of the next.
class FeatureBins {
 public:
  FeatureBins(const Matrix& x, int max_bins);

  std::size_t rows() const { return n_; }
  std::size_t features() const { return thresholds_.size(); }
  std::size_t bin_count(std::size_t f) const { return thresholds_[f].size() + 1; }
  std::uint8_t code(std::size_t f, std::size_t row) const { return codes_[f * n_ + row]; }
  double threshold(std::size_t f, std::size_t bin) const { return thresholds_[f][bin]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> codes_;  // feature-major
  std::vector<std::vector<double>> thresholds_;
};

struct TreeParams {
  int max_depth = 6;
  int min_leaf = 5;
  std::size_t features_per_split = 0;  // 0 = all
  std::uint64_t seed = 0;
};

// Greedy variance-reduction tree over `rows` (repeats allowed, e.g. a
// bootstrap sample) fitting `target`.
RegressionTree grow_tree(const FeatureBins& bins, const Vector& target, std::vector<std::uint32_t> rows,
                         const TreeParams& params);

class FittedModel {
 public:
  LearnerKind kind = LearnerKind::ridge;
  std::size_t width = 0;
  Vector coef;
  double intercept = 0.0;
  std::vector<RegressionTree> trees;
  double base = 0.0;
  double learning_rate = 1.0;

  // Throws InvalidArgument on width mismatch.
  Vector predict(const Matrix& features) const;
};

FittedModel fit(const LearnerSpec& spec, const Matrix& features, const Vector& y,
                Exec exec = Exec::parallel);
Vector predict(const FittedModel& model, const Matrix& features);

double mse(const Vector& pred, const Vector& y);

}  // namespace catenc
