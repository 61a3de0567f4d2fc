#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <cmath>

namespace catenc {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

Vector elastic_net_gram(const Matrix& gram, const Vector& rhs, double ridge, double lambda1,
                        int max_sweeps, double tol) {
  const auto n = gram.rows();
  if (lambda1 == 0.0) {
    Matrix sys = gram;
    sys.diagonal().array() += ridge;
    return sys.ldlt().solve(rhs);
  }
  Vector b = Vector::Zero(n);
  // grad = rhs - (gram + ridge I) b, maintained incrementally.
  Vector resid = rhs;
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double diag = gram(i, i) + ridge;
      if (diag <= 0.0) continue;
      const double z = resid(i) + diag * b(i);
      const double bi = soft_threshold(z, lambda1) / diag;
      const double delta = bi - b(i);
      if (delta != 0.0) {
        resid -= delta * gram.col(i);
        resid(i) -= delta * ridge;
        b(i) = bi;
        max_step = std::max(max_step, std::abs(delta) * diag);
      }
    }
    if (max_step <= tol * scale) break;
  }
  return b;
}

SparsePcaResult sparse_pca(const Matrix& a, int k, double lambda1, int max_iter) {
  if (k < 1 || k > std::min(a.rows(), a.cols())) throw InvalidArgument("sparse_pca: k out of range");
  if (lambda1 < 0.0) throw InvalidArgument("sparse_pca: lambda1 must be nonnegative");
  const auto c = a.cols();
  const Matrix gram = a.transpose() * a;
  const auto base = svd(a);
  Matrix dirs = base.v.leftCols(k);
  Matrix loadings = Matrix::Zero(c, k);

  SparsePcaResult res;
  for (int it = 0; it < max_iter; ++it) {
    Matrix next(c, k);
    for (Eigen::Index j = 0; j < k; ++j)
      next.col(j) = elastic_net_gram(gram, gram * dirs.col(j), kSparsePcaRidge, lambda1);
    const double change = (next - loadings).norm();
    loadings = std::move(next);
    res.iterations = it + 1;
    if (change <= 1e-12 * std::max(1.0, loadings.norm())) break;

    // Procrustes refresh of the directions: dirs = U V^T for gram * loadings = U D V^T.
    const Matrix gb = gram * loadings;
    if (gb.norm() == 0.0) break;
    const auto s = svd(gb);
    dirs = s.u * s.v.transpose();
  }

  res.zero_column.assign(static_cast<std::size_t>(k), false);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double nrm = loadings.col(j).norm();
    if (nrm > 0.0) {
      loadings.col(j) /= nrm;
    } else {
      res.zero_column[static_cast<std::size_t>(j)] = true;
      res.degenerate = true;
    }
  }
  res.loadings = std::move(loadings);
  return res;
}

}  // namespace catenc
