#include "catenc/error.hpp"
#include "catenc/learners.hpp"
#include "catenc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

namespace catenc {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidArgument("tree needs at least one node");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& nd : nodes_) {
    if (nd.feature < 0) continue;
    if (nd.left <= 0 || nd.left >= n || nd.right <= 0 || nd.right >= n || !std::isfinite(nd.threshold))
      throw InvalidArgument("tree node has invalid children or threshold");
  }
}

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int id = 0;
  while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& nd = nodes_[static_cast<std::size_t>(id)];
    id = row(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes_[static_cast<std::size_t>(id)].value;
}

Vector RegressionTree::predict(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& nd = nodes_[i];
    if (nd.feature < 0) continue;
    d[static_cast<std::size_t>(nd.left)] = d[i] + 1;
    d[static_cast<std::size_t>(nd.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

FeatureBins::FeatureBins(const Matrix& x, int max_bins) : n_(static_cast<std::size_t>(x.rows())) {
  if (max_bins < 2 || max_bins > 256) throw InvalidArgument("max_bins must lie in [2, 256]");
  const auto q = static_cast<std::size_t>(x.cols());
  codes_.resize(q * n_);
  thresholds_.resize(q);
  std::vector<double> sorted(n_);
  for (std::size_t f = 0; f < q; ++f) {
    const auto col = x.col(static_cast<Eigen::Index>(f));
    for (std::size_t i = 0; i < n_; ++i) sorted[i] = col(static_cast<Eigen::Index>(i));
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uniq;
    std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(uniq));

    // edges[b] is the largest value in bin b, for every bin but the last.
    std::vector<double> edges;
    if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
      edges.assign(uniq.begin(), uniq.end() - 1);
    } else {
      for (int b = 0; b + 1 < max_bins; ++b) {
        const auto pos = static_cast<std::size_t>((static_cast<double>(b + 1) * static_cast<double>(n_)) / max_bins);
        const double e = sorted[std::min(pos, n_ - 1)];
        if (e < uniq.back() && (edges.empty() || e > edges.back())) edges.push_back(e);
      }
    }
    auto& thr = thresholds_[f];
    thr.resize(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
      const double next = *std::upper_bound(uniq.begin(), uniq.end(), edges[b]);
      double mid = 0.5 * (edges[b] + next);
      if (!(mid < next)) mid = edges[b];
      thr[b] = mid;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = col(static_cast<Eigen::Index>(i));
      codes_[f * n_ + i] = static_cast<std::uint8_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
    }
  }
}

namespace {

struct Split {
  int feature = -1;
  std::size_t bin = 0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureBins& bins, const Vector& target, const TreeParams& params)
      : bins_(bins), target_(target), params_(params), sum_(256), cnt_(256) {
    all_features_.resize(bins.features());
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> build(std::vector<std::uint32_t>& rows) {
    nodes_.clear();
    nodes_.emplace_back();
    grow(0, rows.data(), rows.data() + rows.size(), 0, 0);
    return std::move(nodes_);
  }

 private:
  void grow(int node, std::uint32_t* begin, std::uint32_t* end, int depth, std::uint64_t heap_id) {
    const auto n = static_cast<std::size_t>(end - begin);
    double total = 0.0;
    for (auto* r = begin; r != end; ++r) total += target_(*r);
    nodes_[static_cast<std::size_t>(node)].value = n ? total / static_cast<double>(n) : 0.0;
    if (depth >= params_.max_depth || n < 2 * static_cast<std::size_t>(params_.min_leaf)) return;

    const Split best = find_split(begin, end, total, heap_id);
    if (best.feature < 0) return;

    const auto f = static_cast<std::size_t>(best.feature);
    auto* mid = std::stable_partition(begin, end, [&](std::uint32_t r) { return bins_.code(f, r) <= best.bin; });
    const int left = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    auto& nd = nodes_[static_cast<std::size_t>(node)];
    nd.feature = best.feature;
    nd.threshold = bins_.threshold(f, best.bin);
    nd.left = left;
    nd.right = left + 1;
    grow(left, begin, mid, depth + 1, 2 * heap_id + 1);
    grow(left + 1, mid, end, depth + 1, 2 * heap_id + 2);
  }

  Split find_split(const std::uint32_t* begin, const std::uint32_t* end, double total, std::uint64_t heap_id) {
    const auto n = static_cast<std::size_t>(end - begin);
    const double parent = total * total / static_cast<double>(n);
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);

    std::span<const std::size_t> candidates = all_features_;
    const std::size_t want = params_.features_per_split;
    if (want > 0 && want < all_features_.size()) {
      // Partial Fisher-Yates draw, seeded by the node's heap position so a
      // node's draw does not depend on the rest of the tree.
      sampled_ = all_features_;
      Rng rng(derive_seed(params_.seed, heap_id));
      for (std::size_t i = 0; i < want; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(sampled_.size() - i));
        std::swap(sampled_[i], sampled_[j]);
      }
      candidates = std::span<const std::size_t>(sampled_.data(), want);
    }

    Split best;
    best.score = parent + 1e-12 * std::max(1.0, std::abs(parent));
    for (std::size_t f : candidates) {
      const std::size_t nb = bins_.bin_count(f);
      if (nb < 2) continue;
      std::fill_n(sum_.begin(), nb, 0.0);
      std::fill_n(cnt_.begin(), nb, std::size_t{0});
      for (auto* r = begin; r != end; ++r) {
        const auto b = bins_.code(f, *r);
        sum_[b] += target_(*r);
        ++cnt_[b];
      }
      double sl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        sl += sum_[b];
        nl += cnt_[b];
        if (nl < min_leaf) continue;
        const std::size_t nr = n - nl;
        if (nr < min_leaf) break;
        const double sr = total - sl;
        const double score = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr);
        if (score > best.score) {
          best.score = score;
          best.feature = static_cast<int>(f);
          best.bin = b;
        }
      }
    }
    return best;
  }

  const FeatureBins& bins_;
  const Vector& target_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> all_features_;
  std::vector<std::size_t> sampled_;
  std::vector<double> sum_;
  std::vector<std::size_t> cnt_;
};

}  // namespace

RegressionTree grow_tree(const FeatureBins& bins, const Vector& target, std::vector<std::uint32_t> rows,
                         const TreeParams& params) {
  if (rows.empty()) throw InvalidArgument("grow_tree: no rows");
  if (params.max_depth < 0 || params.max_depth > 60) throw InvalidArgument("grow_tree: bad max_depth");
  TreeBuilder builder(bins, target, params);
  return RegressionTree(builder.build(rows));
}

}  // namespace catenc
