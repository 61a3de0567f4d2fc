#pragma once

#include "catenc/dataset.hpp"
#include "catenc/rng.hpp"

#include <doctest.h>

#include <string>
#include <vector>

namespace testing {

inline catenc::Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double lo = -1.0,
                                    double hi = 1.0) {
  catenc::Rng rng(seed);
  catenc::Matrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = rng.uniform(lo, hi);
  return a;
}

// n rows, p uniform features, categories "c0".."c{m-1}" assigned round-robin, y normal.
inline catenc::Dataset random_dataset(std::size_t n, std::size_t p, std::size_t m, std::uint64_t seed) {
  catenc::Rng rng(seed);
  catenc::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  catenc::Vector y(static_cast<Eigen::Index>(n));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(ii, j) = rng.normal();
    y(ii) = rng.normal();
    labels.push_back("c" + std::to_string(i % m));
  }
  return catenc::Dataset::from_labels(std::move(x), labels, std::move(y));
}

inline double max_abs_diff(const catenc::Matrix& a, const catenc::Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace testing
