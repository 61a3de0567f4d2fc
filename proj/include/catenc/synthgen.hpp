#pragma once

// Synthetic data from a discrete latent-state model: a latent state L drives
// the observed category G, the covariates X and the outcome Y; G carries no
// information about (X, Y) beyond L.

#include "catenc/dataset.hpp"
#include "catenc/rng.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace catenc {

enum class OutcomeModel { linear, group_linear, piecewise };

std::string_view to_string(OutcomeModel model);
// Accepts "linear", "group_linear" (or "group"), "piecewise".
OutcomeModel parse_outcome_model(std::string_view name);

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t p = 6;
  std::size_t m = 30;
  std::size_t k_latent = 3;
  // Probability that G falls in the block of categories owned by L.
  double p_assign = 0.8;
  double noise_sd = 1.0;
  OutcomeModel outcome = OutcomeModel::linear;
  std::uint64_t seed = 0;
  // Standard deviation of the entries of the latent means.
  double mean_scale = 2.0;

  // Throws InvalidArgument.
  void validate() const;
  std::size_t block_size() const { return m / k_latent; }
};

struct SynthTruth {
  Matrix phi;          // k_latent x m, P(L = l | G = g)
  Matrix b_means;      // k_latent x p, E[X | L = l]
  Vector cov_scale;    // k_latent, Var(X_j | L = l)
  Vector alpha;        // linear: k_latent intercepts; otherwise a single intercept
  Vector beta_shared;  // p
  Matrix beta_group;   // k_latent x p
  Vector beta_plus;    // p
  Vector beta_minus;   // p
  Vector medians;      // p, population median of each feature
  std::vector<int> latent;  // per generated row
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset data;
  SynthTruth truth;
};

// Category labels "g00", "g01", ... zero-padded so lexicographic order equals
// the numeric order.
std::string category_label(std::size_t g, std::size_t m);

// Closed-form P(L | G) for uniform L and the block assignment mechanism.
Matrix true_posterior(const SynthConfig& cfg);

// Noise-free part of the outcome for one row.
double outcome_mean(std::span<const double> x_row, int latent, const SynthTruth& truth,
                    const SynthConfig& cfg);
// outcome_mean plus Normal(0, noise_sd^2) noise drawn from rng.
double gen_outcome(std::span<const double> x_row, int latent, const SynthTruth& truth,
                   const SynthConfig& cfg, Rng& rng);

SynthData gen_dataset(const SynthConfig& cfg);

}  // namespace catenc
