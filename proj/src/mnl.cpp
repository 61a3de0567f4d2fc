#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <cmath>
#include <deque>
#include <utility>
#include <vector>

namespace catenc {

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale = Vector::Ones(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    if (var > 1e-24) s.scale(j) = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::apply_with_intercept(const Matrix& x) const {
  Matrix out(x.rows(), x.cols() + 1);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
  out.col(x.cols()).setOnes();
  return out;
}

namespace {

// Slopes are penalised, intercepts (last column) are not.
double penalty(const Matrix& beta, double lambda2) {
  return 0.5 * lambda2 * beta.leftCols(beta.cols() - 1).squaredNorm();
}

void pin_reference(Matrix& grad) { grad.row(0).setZero(); }

}  // namespace

double mnl_objective(const Matrix& xa, std::span<const int> g, const Matrix& beta, double lambda2) {
  return kernels::softmax_loglik(xa, g, beta) - penalty(beta, lambda2);
}

Matrix mnl_gradient(const Matrix& xa, std::span<const int> g, const Matrix& beta, double lambda2) {
  auto ev = kernels::softmax_loglik_grad(xa, g, beta);
  const auto q = beta.cols();
  ev.grad.leftCols(q - 1) -= lambda2 * beta.leftCols(q - 1);
  pin_reference(ev.grad);
  return ev.grad;
}

Matrix MnlModel::predict_proba(const Matrix& x) const {
  Matrix xa(x.rows(), x.cols() + 1);
  xa.leftCols(x.cols()) = x;
  xa.col(x.cols()).setOnes();
  return kernels::softmax_probs(xa, beta);
}

MnlModel fit_mnl(const Matrix& x, std::span<const int> g, int m, double lambda2, double tol,
                 int max_iter, Exec exec) {
  if (m < 2) throw InvalidArgument("fit_mnl: need at least two categories");
  if (lambda2 < 0.0) throw InvalidArgument("fit_mnl: lambda2 must be nonnegative");
  if (!x.allFinite()) throw NumericError("fit_mnl: non-finite features");
  if (static_cast<std::size_t>(x.rows()) != g.size()) throw InvalidArgument("fit_mnl: row count mismatch");
  for (int c : g)
    if (c < 0 || c >= m) throw InvalidArgument("fit_mnl: category id out of range");

  const auto st = Standardizer::fit(x);
  const Matrix xa = st.apply_with_intercept(x);
  const auto q = xa.cols();
  const double n = static_cast<double>(x.rows());

  auto eval = [&](const Matrix& beta) {
    auto ev = exec == Exec::parallel ? kernels::softmax_loglik_grad(xa, g, beta)
                                     : kernels::serial::softmax_loglik_grad(xa, g, beta);
    ev.log_lik -= penalty(beta, lambda2);
    ev.grad.leftCols(q - 1) -= lambda2 * beta.leftCols(q - 1);
    pin_reference(ev.grad);
    return ev;
  };
  auto objective = [&](const Matrix& beta) {
    const double ll = exec == Exec::parallel ? kernels::softmax_loglik(xa, g, beta)
                                             : kernels::serial::softmax_loglik(xa, g, beta);
    return ll - penalty(beta, lambda2);
  };

  MnlModel model;
  model.lambda2 = lambda2;
  Matrix beta = Matrix::Zero(m, q);
  auto cur = eval(beta);
  model.objective_trace.push_back(cur.log_lik);

  // L-BFGS on -objective; (s, y) pairs hold steps and gradient changes of
  // the minimised function.
  constexpr int kHistory = 10;
  std::deque<std::pair<Matrix, Matrix>> hist;
  std::vector<double> alpha(kHistory);

  int it = 0;
  for (; it < max_iter; ++it) {
    const double gnorm = cur.grad.cwiseAbs().maxCoeff() / n;
    if (gnorm < tol) {
      model.converged = true;
      break;
    }
    Matrix dir = cur.grad;
    for (int i = static_cast<int>(hist.size()) - 1; i >= 0; --i) {
      const auto& [sv, yv] = hist[static_cast<std::size_t>(i)];
      alpha[static_cast<std::size_t>(i)] = (sv.array() * dir.array()).sum() / (yv.array() * sv.array()).sum();
      dir -= alpha[static_cast<std::size_t>(i)] * yv;
    }
    if (hist.empty()) {
      dir *= 1.0 / n;
    } else {
      const auto& [sv, yv] = hist.back();
      dir *= (sv.array() * yv.array()).sum() / yv.squaredNorm();
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const auto& [sv, yv] = hist[i];
      const double b2 = (yv.array() * dir.array()).sum() / (yv.array() * sv.array()).sum();
      dir += (alpha[i] - b2) * sv;
    }
    double slope = (dir.array() * cur.grad.array()).sum();
    if (!(slope > 0.0)) {
      hist.clear();
      dir = cur.grad / n;
      slope = (dir.array() * cur.grad.array()).sum();
    }

    // The full step is usually accepted, so it is evaluated with its
    // gradient; shorter steps check the objective alone first.
    double step = 1.0;
    Matrix trial = beta + dir;
    auto next = eval(trial);
    bool accepted = std::isfinite(next.log_lik) && next.log_lik >= cur.log_lik + 1e-4 * slope;
    for (int bt = 0; !accepted && bt < 60; ++bt) {
      step *= 0.5;
      trial = beta + step * dir;
      const double f_trial = objective(trial);
      accepted = std::isfinite(f_trial) && f_trial >= cur.log_lik + 1e-4 * step * slope;
    }
    if (!accepted) break;
    if (step != 1.0) next = eval(trial);
    Matrix sv = trial - beta;
    Matrix yv = cur.grad - next.grad;
    if ((sv.array() * yv.array()).sum() > 1e-12 * sv.norm() * yv.norm()) {
      if (hist.size() == kHistory) hist.pop_front();
      hist.emplace_back(std::move(sv), std::move(yv));
    }
    beta = std::move(trial);
    cur = std::move(next);
    model.objective_trace.push_back(cur.log_lik);
  }
  model.iterations = it;
  model.final_grad_norm = cur.grad.cwiseAbs().maxCoeff() / n;
  if (model.final_grad_norm < tol) model.converged = true;

  // Back to the original feature scale: eta = b0 + sum_j b_j (x_j - mu_j) / s_j.
  model.beta = Matrix::Zero(m, q);
  const auto p = q - 1;
  for (Eigen::Index c = 1; c < m; ++c) {
    double intercept = beta(c, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      model.beta(c, j) = beta(c, j) / st.scale(j);
      intercept -= beta(c, j) * st.mean(j) / st.scale(j);
    }
    model.beta(c, p) = intercept;
  }
  return model;
}

}  // namespace catenc
