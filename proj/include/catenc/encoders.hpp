#pragma once

#include "catenc/dataset.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catenc {

enum class EncoderKind {
  means,
  lowrank_svd,
  sparse_lowrank,
  pca,
  nmf,
  mnl,
  svm,
  onehot,
  deviation,
  difference,
  helmert,
  cumulative,
  permutation,
  multiperm,
  fisher,
};

std::span<const EncoderKind> all_encoder_kinds();
std::string_view to_string(EncoderKind kind);
// Throws InvalidArgument naming the valid kinds.
EncoderKind parse_encoder_kind(std::string_view name);
std::string valid_encoder_names();

// Kinds whose output width is a chosen rank k.
bool is_rank_dependent(EncoderKind kind);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::means;
  std::optional<int> k;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  // lowrank_svd / pca: scale components by singular value (sqrt eigenvalue).
  bool scaled = true;
  // lowrank_svd / sparse_lowrank / pca: center the group-mean rows first.
  bool centered = true;
};

// "kind" or "kind:k", e.g. "lowrank_svd:3".
EncoderSpec parse_encoder_spec(std::string_view text);
std::string to_string(const EncoderSpec& spec);

// psi maps training category id g to row psi.row(g); unseen categories get
// `fallback`.
struct FittedEncoding {
  Matrix psi;
  Vector fallback;
  EncoderSpec spec;
  CategoryIndex labels;
  std::size_t p_train = 0;
  Vector shift;  // nmf: per-feature shift added before group sums
  bool degenerate = false;

  std::size_t k_out() const { return static_cast<std::size_t>(psi.cols()); }
};

// k = min(p, M, 8).
int default_rank(const Dataset& ds);

FittedEncoding fit_means(const Dataset& ds);
FittedEncoding fit_lowrank_svd(const Dataset& ds, int k, bool scaled = true, bool centered = true);
FittedEncoding fit_sparse_lowrank(const Dataset& ds, int k, std::optional<double> lambda1 = {},
                                  bool centered = true);
FittedEncoding fit_pca(const Dataset& ds, int k, bool scaled = true);
FittedEncoding fit_nmf(const Dataset& ds, int k, std::uint64_t seed = 0);
FittedEncoding fit_mnl_encoding(const Dataset& ds, double lambda2 = 1.0);
FittedEncoding fit_svm_encoding(const Dataset& ds, double c_reg = 1.0, std::uint64_t seed = 0);

enum class ContrastKind { onehot, deviation, difference, helmert, cumulative };

// M x (M-1) coding matrix, rows in category order.
Matrix contrast_matrix(ContrastKind kind, int m);
FittedEncoding fit_contrast(const Dataset& ds, ContrastKind kind);

// Each column an independent seeded permutation of 1..M.
FittedEncoding fit_permutation(const Dataset& ds, int n_columns, std::uint64_t seed);

// M x 1: rank (1..M) of the category's mean outcome, ties broken by id.
FittedEncoding fit_fisher(const Dataset& ds);

// Dispatch on spec.kind. Rank kinds without spec.k use default_rank.
FittedEncoding fit_encoder(const Dataset& ds, const EncoderSpec& spec);

struct TransformResult {
  Matrix features;  // n x (p + k_out)
  std::size_t unseen_rows = 0;
};

// Row i = [x_i, psi(label_i)], with the fallback row for labels the encoding
// has not seen.
TransformResult transform(const Dataset& ds, const FittedEncoding& enc);

// "<encoder>_1" ... "<encoder>_k".
std::vector<std::string> encoding_column_names(const FittedEncoding& enc);

}  // namespace catenc
