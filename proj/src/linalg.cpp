#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace catenc {

namespace {

constexpr double kJacobiEps = 1e-15;
constexpr int kMaxSweeps = 80;

// Largest-magnitude entry positive; the first of (near-)tied entries wins.
bool needs_flip(const Eigen::Ref<const Vector>& col) {
  const double mx = col.cwiseAbs().maxCoeff();
  if (mx == 0.0) return false;
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (std::abs(col(i)) >= mx * (1.0 - 1e-12)) return col(i) < 0.0;
  return false;
}

// Column permutation sorting `values` descending (stable).
std::vector<Eigen::Index> descending_order(const Vector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return order;
}

// Fill the columns of u listed in `missing` with unit vectors orthogonal to
// every other column, taken from the canonical basis by Gram-Schmidt.
void complete_basis(Matrix& u, const std::vector<Eigen::Index>& missing) {
  std::vector<bool> is_missing(static_cast<std::size_t>(u.cols()), false);
  for (auto j : missing) is_missing[static_cast<std::size_t>(j)] = true;
  std::vector<Eigen::Index> basis;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    if (!is_missing[static_cast<std::size_t>(j)]) basis.push_back(j);
  for (auto target : missing) {
    Vector best;
    double best_norm = -1.0;
    for (Eigen::Index e = 0; e < u.rows(); ++e) {
      Vector cand = Vector::Unit(u.rows(), e);
      for (int pass = 0; pass < 2; ++pass)
        for (auto j : basis) cand -= u.col(j).dot(cand) * u.col(j);
      const double nrm = cand.norm();
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = cand;
      }
    }
    u.col(target) = best / best_norm;
    basis.push_back(target);
  }
}

SvdResult jacobi_svd_tall(const Matrix& a) {
  const auto r = a.rows();
  const auto c = a.cols();
  Matrix w = a;
  Matrix v = Matrix::Identity(c, c);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < c; ++p) {
      for (Eigen::Index q = p + 1; q < c; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kJacobiEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (Eigen::Index i = 0; i < r; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = cs * wp - sn * wq;
          w(i, q) = sn * wp + cs * wq;
        }
        for (Eigen::Index i = 0; i < c; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(c);
  for (Eigen::Index j = 0; j < c; ++j) sigma(j) = w.col(j).norm();
  const auto order = descending_order(sigma);

  SvdResult out{Matrix(r, c), Vector(c), Matrix(c, c)};
  std::vector<Eigen::Index> missing;
  for (Eigen::Index k = 0; k < c; ++k) {
    const auto j = order[static_cast<std::size_t>(k)];
    out.d(k) = sigma(j);
    out.v.col(k) = v.col(j);
    if (sigma(j) > 1e-300) {
      out.u.col(k) = w.col(j) / sigma(j);
    } else {
      out.d(k) = 0.0;
      out.u.col(k).setZero();
      missing.push_back(k);
    }
  }
  if (!missing.empty()) complete_basis(out.u, missing);
  return out;
}

}  // namespace

SvdResult svd(const Matrix& a) {
  if (!a.allFinite()) throw NumericError("svd: non-finite input");
  if (a.size() == 0) throw InvalidArgument("svd: empty matrix");
  SvdResult res;
  if (a.rows() >= a.cols()) {
    res = jacobi_svd_tall(a);
  } else {
    auto t = jacobi_svd_tall(a.transpose());
    res = SvdResult{std::move(t.v), std::move(t.d), std::move(t.u)};
  }
  for (Eigen::Index k = 0; k < res.u.cols(); ++k) {
    if (needs_flip(res.u.col(k))) {
      res.u.col(k) *= -1.0;
      res.v.col(k) *= -1.0;
    }
  }
  return res;
}

EigResult eig_sym(const Matrix& c) {
  if (c.rows() != c.cols()) throw InvalidArgument("eig_sym: matrix is not square");
  if (!c.allFinite()) throw NumericError("eig_sym: non-finite input");
  const auto n = c.rows();
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidArgument("eig_sym: matrix is not symmetric");

  Matrix a = 0.5 * (c + c.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double fro = a.norm();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= kJacobiEps * fro || off == 0.0) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }

  const Vector diag = a.diagonal();
  const auto order = descending_order(diag);
  EigResult out{Matrix(n, n), Vector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto j = order[static_cast<std::size_t>(k)];
    out.values(k) = diag(j);
    out.vectors.col(k) = v.col(j);
    if (needs_flip(out.vectors.col(k))) out.vectors.col(k) *= -1.0;
  }
  return out;
}

Vector ridge_solve(const Matrix& a, const Vector& y, double lambda2) {
  if (a.rows() != y.size()) throw InvalidArgument("ridge_solve: row count mismatch");
  if (lambda2 < 0.0) throw InvalidArgument("ridge_solve: lambda2 must be nonnegative");
  if (!a.allFinite() || !y.allFinite()) throw NumericError("ridge_solve: non-finite input");
  Matrix normal = a.transpose() * a;
  normal.diagonal().array() += lambda2;
  const Vector rhs = a.transpose() * y;
  Eigen::LLT<Matrix> llt(normal);
  const double dmax = std::max(normal.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  bool singular = llt.info() != Eigen::Success;
  if (!singular) {
    const Matrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      if (l(i, i) * l(i, i) <= 1e-14 * dmax) {
        singular = true;
        break;
      }
    }
  }
  if (singular) throw NumericError("ridge_solve: normal equations are singular");
  return llt.solve(rhs);
}

}  // namespace catenc
