#include "catenc/dataset.hpp"

#include "catenc/error.hpp"
#include "catenc/kernels.hpp"
#include "catenc/rng.hpp"

#include <set>

namespace catenc {

CategoryIndex CategoryIndex::from_labels(std::span<const std::string> labels) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  CategoryIndex idx;
  idx.id_to_label_.assign(distinct.begin(), distinct.end());
  for (std::size_t i = 0; i < idx.id_to_label_.size(); ++i)
    idx.label_to_id_.emplace(idx.id_to_label_[i], static_cast<int>(i));
  return idx;
}

int CategoryIndex::find(const std::string& label) const {
  const auto it = label_to_id_.find(label);
  return it == label_to_id_.end() ? -1 : it->second;
}

int CategoryIndex::at(const std::string& label) const {
  const int id = find(label);
  if (id < 0) throw InvalidArgument("unknown category label '" + label + "'");
  return id;
}

Dataset::Dataset(Matrix x, std::vector<int> g, Vector y, CategoryIndex labels,
                 std::vector<std::string> feature_names)
    : x_(std::move(x)),
      g_(std::move(g)),
      y_(std::move(y)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  const auto n = g_.size();
  if (n == 0) fail_invalid("dataset has no rows");
  if (x_.cols() == 0) fail_invalid("dataset has no continuous features");
  if (static_cast<std::size_t>(x_.rows()) != n || static_cast<std::size_t>(y_.size()) != n)
    fail_invalid("dataset row counts disagree between x, g and y");
  if (!x_.allFinite()) fail_invalid("dataset features contain non-finite values");
  if (!y_.allFinite()) fail_invalid("dataset outcome contains non-finite values");
  std::vector<bool> seen(labels_.size(), false);
  for (int c : g_) {
    if (c < 0 || static_cast<std::size_t>(c) >= labels_.size())
      fail_invalid("category id out of range");
    seen[static_cast<std::size_t>(c)] = true;
  }
  for (bool s : seen)
    if (!s) fail_invalid("category index contains a label with no rows");
  if (feature_names_.empty()) {
    for (Eigen::Index j = 0; j < x_.cols(); ++j) feature_names_.push_back("x" + std::to_string(j + 1));
  } else if (feature_names_.size() != p()) {
    fail_invalid("feature name count does not match feature count");
  }
}

Dataset Dataset::from_labels(Matrix x, std::span<const std::string> labels, Vector y,
                             std::vector<std::string> feature_names) {
  auto idx = CategoryIndex::from_labels(labels);
  std::vector<int> g(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) g[i] = idx.at(labels[i]);
  return Dataset(std::move(x), std::move(g), std::move(y), std::move(idx), std::move(feature_names));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  std::vector<std::string> labels(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    x.row(static_cast<Eigen::Index>(k)) = x_.row(r);
    y(static_cast<Eigen::Index>(k)) = y_(r);
    labels[k] = labels_.label(g_[rows[k]]);
  }
  return from_labels(std::move(x), labels, std::move(y), feature_names_);
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

FoldPlan stratified_kfold(const Dataset& ds, int k_folds, std::uint64_t seed) {
  if (k_folds < 2) fail_invalid("k_folds must be at least 2");
  if (static_cast<std::size_t>(k_folds) > ds.n()) fail_invalid("k_folds exceeds the number of rows");

  std::vector<std::vector<std::size_t>> by_cat(ds.m());
  for (std::size_t i = 0; i < ds.n(); ++i) by_cat[static_cast<std::size_t>(ds.g()[i])].push_back(i);

  FoldPlan plan{std::vector<int>(ds.n(), 0), k_folds, seed};
  Rng rng(seed);
  std::size_t deal = 0;
  for (auto& rows : by_cat) {
    rng.shuffle(rows.begin(), rows.end());
    for (std::size_t r : rows) plan.assignments[r] = static_cast<int>(deal++ % static_cast<std::size_t>(k_folds));
  }
  return plan;
}

GroupStats group_stats(const Dataset& ds) {
  auto sums = kernels::group_sums(ds.x(), ds.g(), ds.y(), ds.m());
  GroupStats st;
  st.means = sums.sums;
  st.y_means = sums.y_sums;
  for (std::size_t c = 0; c < ds.m(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    const double cnt = static_cast<double>(sums.counts[c]);
    st.means.col(col) /= cnt;
    st.y_means(col) /= cnt;
  }
  st.sums = std::move(sums.sums);
  st.counts = std::move(sums.counts);
  return st;
}

}  // namespace catenc
