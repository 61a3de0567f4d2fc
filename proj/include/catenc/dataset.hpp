#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace catenc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bijection between raw category labels and dense ids 0..M-1. Ids follow
// lexicographic label order.
class CategoryIndex {
 public:
  CategoryIndex() = default;

  // Builds the index over the distinct values of `labels`.
  static CategoryIndex from_labels(std::span<const std::string> labels);

  std::size_t size() const { return id_to_label_.size(); }
  const std::string& label(int id) const { return id_to_label_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& labels() const { return id_to_label_; }

  // Returns -1 when the label is unknown.
  int find(const std::string& label) const;
  int at(const std::string& label) const;

  bool operator==(const CategoryIndex&) const = default;

 private:
  std::map<std::string, int> label_to_id_;
  std::vector<std::string> id_to_label_;
};

// n rows of continuous covariates x (n x p), a category id per row and an
// outcome per row. Every category id in 0..M-1 occurs at least once.
class Dataset {
 public:
  Dataset() = default;

  // Validates the invariants; throws InvalidArgument on violation.
  Dataset(Matrix x, std::vector<int> g, Vector y, CategoryIndex labels,
          std::vector<std::string> feature_names = {});

  static Dataset from_labels(Matrix x, std::span<const std::string> labels, Vector y,
                             std::vector<std::string> feature_names = {});

  std::size_t n() const { return g_.size(); }
  std::size_t p() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t m() const { return labels_.size(); }

  const Matrix& x() const { return x_; }
  const std::vector<int>& g() const { return g_; }
  const Vector& y() const { return y_; }
  const CategoryIndex& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  const std::string& label_of_row(std::size_t i) const { return labels_.label(g_[i]); }

  // Rows `rows` (in the given order) as a new Dataset. Categories absent from
  // the subset are dropped and the remainder re-indexed.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  Matrix x_;
  std::vector<int> g_;
  Vector y_;
  CategoryIndex labels_;
  std::vector<std::string> feature_names_;
};

struct FoldPlan {
  std::vector<int> assignments;
  int k_folds = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;
};

// Per category: shuffle rows with the seed, then deal them round-robin to
// folds. The dealing position carries over between categories so the global
// fold sizes stay balanced as well.
FoldPlan stratified_kfold(const Dataset& ds, int k_folds, std::uint64_t seed);

struct GroupStats {
  Matrix means;  // p x M
  Matrix sums;   // p x M
  std::vector<std::size_t> counts;
  Vector y_means;  // M
};

GroupStats group_stats(const Dataset& ds);

}  // namespace catenc
