#include "catenc/synthgen.hpp"

#include "catenc/error.hpp"
#include "catenc/numerics.hpp"

#include <cmath>
#include <string>

namespace catenc {

std::string_view to_string(OutcomeModel model) {
  switch (model) {
    case OutcomeModel::linear: return "linear";
    case OutcomeModel::group_linear: return "group_linear";
    case OutcomeModel::piecewise: return "piecewise";
  }
  return "unknown";
}

OutcomeModel parse_outcome_model(std::string_view name) {
  if (name == "linear") return OutcomeModel::linear;
  if (name == "group_linear" || name == "group") return OutcomeModel::group_linear;
  if (name == "piecewise") return OutcomeModel::piecewise;
  throw InvalidArgument("unknown outcome model '" + std::string(name) +
                        "'; valid: linear, group_linear (group), piecewise");
}

void SynthConfig::validate() const {
  if (n < 1) fail_invalid("n must be at least 1");
  if (p < 1) fail_invalid("p must be at least 1");
  if (k_latent < 1) fail_invalid("k_latent must be at least 1");
  if (m < 1) fail_invalid("m must be at least 1");
  if (m % k_latent != 0)
    fail_invalid("m (" + std::to_string(m) + ") must be divisible by k_latent (" + std::to_string(k_latent) + ")");
  if (!(p_assign > 0.0 && p_assign <= 1.0)) fail_invalid("p_assign must lie in (0, 1]");
  // With one latent state the block is every category and p_assign is moot.
  if (k_latent > 1) {
    const double uniform_rate = static_cast<double>(block_size()) / static_cast<double>(m);
    if (!(p_assign > uniform_rate))
      fail_invalid("p_assign must exceed the uniform in-block rate " + std::to_string(uniform_rate));
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) fail_invalid("noise_sd must be finite and nonnegative");
  if (!(mean_scale > 0.0)) fail_invalid("mean_scale must be positive");
}

std::string category_label(std::size_t g, std::size_t m) {
  const std::size_t width = std::to_string(m > 0 ? m - 1 : 0).size();
  std::string digits = std::to_string(g);
  return "g" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

namespace {

// P(G = g | L = l) under the block assignment mechanism.
double assign_prob(const SynthConfig& cfg, std::size_t l, std::size_t g) {
  if (cfg.k_latent == 1) return 1.0 / static_cast<double>(cfg.m);
  const std::size_t bs = cfg.block_size();
  const bool in_block = g / bs == l;
  return in_block ? cfg.p_assign / static_cast<double>(bs)
                  : (1.0 - cfg.p_assign) / static_cast<double>(cfg.m - bs);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Median of the equal-weight mixture of Normal(mu_l, var_l), by bisection.
double mixture_median(const Matrix& means, const Vector& var, Eigen::Index j) {
  const auto k = means.rows();
  double lo = means.col(j).minCoeff() - 10.0 * std::sqrt(var.maxCoeff());
  double hi = means.col(j).maxCoeff() + 10.0 * std::sqrt(var.maxCoeff());
  auto cdf = [&](double t) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) s += normal_cdf((t - means(l, j)) / std::sqrt(var(l)));
    return s / static_cast<double>(k);
  };
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vector normal_vector(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

Matrix true_posterior(const SynthConfig& cfg) {
  cfg.validate();
  const auto k = static_cast<Eigen::Index>(cfg.k_latent);
  const auto m = static_cast<Eigen::Index>(cfg.m);
  Matrix phi(k, m);
  for (Eigen::Index g = 0; g < m; ++g) {
    double total = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      phi(l, g) = assign_prob(cfg, static_cast<std::size_t>(l), static_cast<std::size_t>(g));
      total += phi(l, g);
    }
    phi.col(g) /= total;
  }
  return phi;
}

double outcome_mean(std::span<const double> x_row, int latent, const SynthTruth& truth,
                    const SynthConfig& cfg) {
  const auto p = static_cast<Eigen::Index>(x_row.size());
  double y = 0.0;
  switch (cfg.outcome) {
    case OutcomeModel::linear:
      y = truth.alpha(latent);
      for (Eigen::Index j = 0; j < p; ++j) y += x_row[static_cast<std::size_t>(j)] * truth.beta_shared(j);
      break;
    case OutcomeModel::group_linear:
      y = truth.alpha(0);
      for (Eigen::Index j = 0; j < p; ++j) y += x_row[static_cast<std::size_t>(j)] * truth.beta_group(latent, j);
      break;
    case OutcomeModel::piecewise:
      y = truth.alpha(0);
      for (Eigen::Index j = 0; j < p; ++j) {
        const double xj = x_row[static_cast<std::size_t>(j)];
        y += xj * (xj > truth.medians(j) ? truth.beta_plus(j) : truth.beta_minus(j));
      }
      break;
  }
  return y;
}

double gen_outcome(std::span<const double> x_row, int latent, const SynthTruth& truth,
                   const SynthConfig& cfg, Rng& rng) {
  return outcome_mean(x_row, latent, truth, cfg) + cfg.noise_sd * rng.normal();
}

SynthData gen_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const auto k = static_cast<Eigen::Index>(cfg.k_latent);
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Rng rng(cfg.seed);

  SynthTruth truth;
  truth.seed = cfg.seed;
  truth.phi = true_posterior(cfg);

  // Latent means are redrawn until their singular values give a condition
  // number below 1e3 (full row rank when k <= p).
  for (int attempt = 0;; ++attempt) {
    truth.b_means.resize(k, p);
    for (Eigen::Index l = 0; l < k; ++l)
      for (Eigen::Index j = 0; j < p; ++j) truth.b_means(l, j) = cfg.mean_scale * rng.normal();
    const auto s = svd(truth.b_means);
    const double smin = s.d(s.d.size() - 1);
    if (smin > 0.0 && s.d(0) / smin < 1e3) break;
    if (attempt > 1000) throw NumericError("could not draw well-conditioned latent means");
  }
  truth.cov_scale.resize(k);
  for (Eigen::Index l = 0; l < k; ++l) truth.cov_scale(l) = rng.uniform(0.5, 1.5);

  truth.alpha = normal_vector(rng, cfg.outcome == OutcomeModel::linear ? k : 1);
  truth.beta_shared = normal_vector(rng, p);
  truth.beta_group.resize(k, p);
  for (Eigen::Index l = 0; l < k; ++l) truth.beta_group.row(l) = normal_vector(rng, p).transpose();
  truth.beta_plus = normal_vector(rng, p);
  truth.beta_minus = normal_vector(rng, p);
  truth.medians.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) truth.medians(j) = mixture_median(truth.b_means, truth.cov_scale, j);

  const std::size_t n = cfg.n;
  const std::size_t bs = cfg.block_size();
  Matrix x(static_cast<Eigen::Index>(n), p);
  Vector y(static_cast<Eigen::Index>(n));
  std::vector<std::string> labels(n);
  truth.latent.resize(n);
  std::vector<double> row(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = static_cast<std::size_t>(rng.below(cfg.k_latent));
    std::size_t g = 0;
    if (cfg.k_latent == 1) {
      g = static_cast<std::size_t>(rng.below(cfg.m));
    } else if (rng.uniform() < cfg.p_assign) {
      g = l * bs + static_cast<std::size_t>(rng.below(bs));
    } else {
      // Uniform over the categories outside block l.
      g = static_cast<std::size_t>(rng.below(cfg.m - bs));
      if (g >= l * bs) g += bs;
    }
    const double sd = std::sqrt(truth.cov_scale(static_cast<Eigen::Index>(l)));
    for (Eigen::Index j = 0; j < p; ++j) {
      row[static_cast<std::size_t>(j)] = truth.b_means(static_cast<Eigen::Index>(l), j) + sd * rng.normal();
      x(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
    y(static_cast<Eigen::Index>(i)) = gen_outcome(row, static_cast<int>(l), truth, cfg, rng);
    labels[i] = category_label(g, cfg.m);
    truth.latent[i] = static_cast<int>(l);
  }
  return SynthData{Dataset::from_labels(std::move(x), labels, std::move(y)), std::move(truth)};
}

}  // namespace catenc
