#pragma once

// Dense linear-algebra and optimisation kernels behind the encoders.

#include "catenc/dataset.hpp"
#include "catenc/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace catenc {

// Thin SVD a = u * diag(d) * v^T with q = min(rows, cols) components.
// d is nonnegative and descending. Each column of u has its largest-magnitude
// entry positive (first such entry on ties); v follows u.
struct SvdResult {
  Matrix u;  // rows x q
  Vector d;  // q
  Matrix v;  // cols x q
};

// One-sided Jacobi. Throws NumericError on non-finite input.
SvdResult svd(const Matrix& a);

struct EigResult {
  Matrix vectors;  // column j pairs with values(j)
  Vector values;   // descending
};

// Cyclic Jacobi eigen-decomposition of a symmetric matrix, with the same
// sign convention as svd.
EigResult eig_sym(const Matrix& c);

// Solves (a^T a + lambda2 I) w = a^T y by Cholesky.
Vector ridge_solve(const Matrix& a, const Vector& y, double lambda2);

struct NmfResult {
  Matrix w;  // rows x k
  Matrix h;  // k x cols
  std::vector<double> objective_trace;  // ||a - w h||_F, initial value first
  int iterations = 0;
};

// Lee-Seung multiplicative updates for the Frobenius loss, started from a
// seeded uniform(0.1, 1.1) initialisation. Stops when the relative change of
// the loss drops below tol or after max_iter updates.
NmfResult nmf(const Matrix& a, int k, double tol = 1e-8, int max_iter = 2000,
              std::uint64_t seed = 0);

struct SparsePcaResult {
  Matrix loadings;  // cols x k, unit-norm columns (or zero)
  std::vector<bool> zero_column;
  bool degenerate = false;  // any column shrunk to zero
  int iterations = 0;
};

inline constexpr double kSparsePcaRidge = 1e-4;

// Alternating sparse PCA. Starting from the leading right singular vectors,
// each loading column solves the elastic-net regression
//   min_b 1/2 ||a x_j - a b||^2 + ridge/2 ||b||^2 + lambda1 ||b||_1
// by coordinate descent (soft-thresholding at lambda1), then the direction
// matrix is refreshed from the SVD of (a^T a) B. With lambda1 = 0 this
// reproduces the right singular vectors.
SparsePcaResult sparse_pca(const Matrix& a, int k, double lambda1, int max_iter = 200);

// Lasso step on a Gram matrix: min_b 1/2 b^T (gram + ridge I) b - b^T rhs + lambda1 ||b||_1.
Vector elastic_net_gram(const Matrix& gram, const Vector& rhs, double ridge, double lambda1,
                        int max_sweeps = 1000, double tol = 1e-13);

struct Standardizer {
  Vector mean;
  Vector scale;  // sd, or 1 for constant columns

  static Standardizer fit(const Matrix& x);
  // Standardised features with a trailing column of ones.
  Matrix apply_with_intercept(const Matrix& x) const;
};

// Multinomial logit over categories g (0..M-1) with category 0 as reference.
// beta is M x (p+1) on the original feature scale, last column intercept.
struct MnlModel {
  Matrix beta;
  double lambda2 = 0.0;
  bool converged = false;
  double final_grad_norm = 0.0;  // max-abs of the penalised gradient / n
  int iterations = 0;
  std::vector<double> objective_trace;

  // n x M probabilities.
  Matrix predict_proba(const Matrix& x) const;
};

// Maximises sum_i log softmax(beta x_i)[g_i] - lambda2/2 ||slopes||^2 by
// L-BFGS with Armijo backtracking. Fitting happens on standardised features; coefficients are
// mapped back to the original scale.
MnlModel fit_mnl(const Matrix& x, std::span<const int> g, int m, double lambda2, double tol = 1e-7,
                 int max_iter = 5000, Exec exec = Exec::parallel);

// Penalised objective and gradient on the standardised design (with the
// intercept column) used by fit_mnl. Exposed for gradient checks.
double mnl_objective(const Matrix& xa, std::span<const int> g, const Matrix& beta, double lambda2);
Matrix mnl_gradient(const Matrix& xa, std::span<const int> g, const Matrix& beta, double lambda2);

struct SvmModel {
  Matrix w;  // M x p
  Vector b;  // M
  double c_reg = 1.0;
  std::vector<double> objective_trace;  // summed over categories, per epoch
};

// One-vs-rest linear SVMs. Per category minimises
//   1/2 ||w||^2 + c_reg * mean_i max(0, 1 - y_i (w.x_i + b))^2
// by full-batch gradient descent with step 1/L (L the Lipschitz bound of the
// gradient), halving the step whenever an epoch would raise the objective.
// The loss is a mean, so duplicating every row leaves the model unchanged.
SvmModel fit_svm_ovr(const Matrix& x, std::span<const int> g, int m, double c_reg, int epochs = 500,
                     std::uint64_t seed = 0);

double svm_objective(const Matrix& x, std::span<const int> g, int category, const Vector& w,
                     double b, double c_reg);

}  // namespace catenc
