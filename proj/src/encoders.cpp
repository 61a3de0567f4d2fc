#include "catenc/encoders.hpp"

#include "catenc/error.hpp"
#include "catenc/numerics.hpp"
#include "catenc/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>

namespace catenc {

namespace {

constexpr std::array kAllKinds{
    EncoderKind::means,      EncoderKind::lowrank_svd, EncoderKind::sparse_lowrank,
    EncoderKind::pca,        EncoderKind::nmf,         EncoderKind::mnl,
    EncoderKind::svm,        EncoderKind::onehot,      EncoderKind::deviation,
    EncoderKind::difference, EncoderKind::helmert,     EncoderKind::cumulative,
    EncoderKind::permutation, EncoderKind::multiperm,  EncoderKind::fisher,
};

FittedEncoding make_encoding(const Dataset& ds, EncoderKind kind, Matrix psi, Vector fallback) {
  FittedEncoding enc;
  enc.psi = std::move(psi);
  enc.fallback = std::move(fallback);
  enc.spec.kind = kind;
  enc.labels = ds.labels();
  enc.p_train = ds.p();
  return enc;
}

void check_rank(const Dataset& ds, int k, int upper, std::string_view what) {
  if (k < 1 || k > upper)
    throw EncoderError(std::string(what) + ": rank " + std::to_string(k) + " outside [1, " +
                       std::to_string(upper) + "]");
  (void)ds;
}

int min_pm(const Dataset& ds) { return static_cast<int>(std::min(ds.p(), ds.m())); }

// Group-mean rows (M x p), optionally centered across categories.
Matrix group_mean_rows(const Dataset& ds, bool centered) {
  Matrix z = group_stats(ds).means.transpose();
  if (centered) z.rowwise() -= z.colwise().mean();
  return z;
}

void fix_column_signs(Matrix& scores, Matrix* loadings) {
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    const double mx = scores.col(j).cwiseAbs().maxCoeff();
    if (mx == 0.0) continue;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      if (std::abs(scores(i, j)) >= mx * (1.0 - 1e-12)) {
        if (scores(i, j) < 0.0) {
          scores.col(j) *= -1.0;
          if (loadings) loadings->col(j) *= -1.0;
        }
        break;
      }
    }
  }
}

}  // namespace

std::span<const EncoderKind> all_encoder_kinds() { return kAllKinds; }

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::means: return "means";
    case EncoderKind::lowrank_svd: return "lowrank_svd";
    case EncoderKind::sparse_lowrank: return "sparse_lowrank";
    case EncoderKind::pca: return "pca";
    case EncoderKind::nmf: return "nmf";
    case EncoderKind::mnl: return "mnl";
    case EncoderKind::svm: return "svm";
    case EncoderKind::onehot: return "onehot";
    case EncoderKind::deviation: return "deviation";
    case EncoderKind::difference: return "difference";
    case EncoderKind::helmert: return "helmert";
    case EncoderKind::cumulative: return "cumulative";
    case EncoderKind::permutation: return "permutation";
    case EncoderKind::multiperm: return "multiperm";
    case EncoderKind::fisher: return "fisher";
  }
  return "unknown";
}

std::string valid_encoder_names() {
  std::string out;
  for (auto k : kAllKinds) {
    if (!out.empty()) out += ", ";
    out += to_string(k);
  }
  return out;
}

EncoderKind parse_encoder_kind(std::string_view name) {
  for (auto k : kAllKinds)
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown encoder '" + std::string(name) + "'; valid kinds: " +
                        valid_encoder_names());
}

bool is_rank_dependent(EncoderKind kind) {
  return kind == EncoderKind::lowrank_svd || kind == EncoderKind::sparse_lowrank ||
         kind == EncoderKind::pca || kind == EncoderKind::nmf;
}

EncoderSpec parse_encoder_spec(std::string_view text) {
  EncoderSpec spec;
  const auto colon = text.find(':');
  spec.kind = parse_encoder_kind(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    const auto rest = text.substr(colon + 1);
    int k = 0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (res.ec != std::errc() || res.ptr != rest.data() + rest.size() || k < 1)
      throw InvalidArgument("bad rank in encoder spec '" + std::string(text) + "'");
    if (!is_rank_dependent(spec.kind))
      throw InvalidArgument("encoder '" + std::string(to_string(spec.kind)) + "' takes no rank");
    spec.k = k;
  }
  return spec;
}

std::string to_string(const EncoderSpec& spec) {
  std::string out(to_string(spec.kind));
  if (spec.k) out += ":" + std::to_string(*spec.k);
  return out;
}

int default_rank(const Dataset& ds) { return std::min({static_cast<int>(ds.p()), static_cast<int>(ds.m()), 8}); }

FittedEncoding fit_means(const Dataset& ds) {
  const auto st = group_stats(ds);
  return make_encoding(ds, EncoderKind::means, st.means.transpose(), ds.x().colwise().mean().transpose());
}

FittedEncoding fit_lowrank_svd(const Dataset& ds, int k, bool scaled, bool centered) {
  check_rank(ds, k, min_pm(ds), "lowrank_svd");
  const Matrix z = group_mean_rows(ds, centered);
  const auto s = svd(z);
  Matrix psi = s.u.leftCols(k);
  if (scaled) psi = psi * s.d.head(k).asDiagonal();

  Vector fallback = Vector::Zero(k);
  if (!centered) {
    // Global feature mean projected like a category row.
    const Vector mean = ds.x().colwise().mean().transpose();
    fallback = s.v.leftCols(k).transpose() * mean;
    if (!scaled)
      for (int j = 0; j < k; ++j) fallback(j) = s.d(j) > 0.0 ? fallback(j) / s.d(j) : 0.0;
  }
  auto enc = make_encoding(ds, EncoderKind::lowrank_svd, std::move(psi), std::move(fallback));
  enc.spec.k = k;
  enc.spec.scaled = scaled;
  enc.spec.centered = centered;
  return enc;
}

FittedEncoding fit_sparse_lowrank(const Dataset& ds, int k, std::optional<double> lambda1,
                                  bool centered) {
  check_rank(ds, k, min_pm(ds), "sparse_lowrank");
  const Matrix z = group_mean_rows(ds, centered);
  // Default threshold: a tenth of the largest Gram diagonal.
  const double lam = lambda1.value_or(0.1 * (z.transpose() * z).diagonal().maxCoeff());
  if (lam < 0.0) throw EncoderError("sparse_lowrank: lambda must be nonnegative");
  auto sp = sparse_pca(z, k, lam);
  Matrix psi = z * sp.loadings;
  fix_column_signs(psi, &sp.loadings);

  Vector fallback = Vector::Zero(k);
  if (!centered) fallback = sp.loadings.transpose() * ds.x().colwise().mean().transpose();
  auto enc = make_encoding(ds, EncoderKind::sparse_lowrank, std::move(psi), std::move(fallback));
  enc.spec.k = k;
  enc.spec.lambda = lam;
  enc.spec.centered = centered;
  enc.degenerate = sp.degenerate;
  return enc;
}

FittedEncoding fit_pca(const Dataset& ds, int k, bool scaled) {
  check_rank(ds, k, static_cast<int>(ds.m()), "pca");
  const Matrix z = group_mean_rows(ds, true);
  const Matrix cov = (z * z.transpose()) / static_cast<double>(ds.p());
  const auto eg = eig_sym(cov);
  Matrix psi = eg.vectors.leftCols(k);
  if (scaled)
    for (int j = 0; j < k; ++j) psi.col(j) *= std::sqrt(std::max(eg.values(j), 0.0));
  auto enc = make_encoding(ds, EncoderKind::pca, std::move(psi), Vector::Zero(k));
  enc.spec.k = k;
  enc.spec.scaled = scaled;
  return enc;
}

FittedEncoding fit_nmf(const Dataset& ds, int k, std::uint64_t seed) {
  check_rank(ds, k, min_pm(ds), "nmf");
  const auto st = group_stats(ds);
  // Features with negative values are shifted so their minimum is zero.
  Vector shift = (-ds.x().colwise().minCoeff().transpose()).cwiseMax(0.0);
  Matrix sums = st.sums.transpose();  // M x p
  for (std::size_t c = 0; c < ds.m(); ++c)
    sums.row(static_cast<Eigen::Index>(c)) += static_cast<double>(st.counts[c]) * shift.transpose();
  sums = sums.cwiseMax(0.0);
  auto res = nmf(sums, k, 1e-10, 5000, seed);
  Vector fallback = res.w.colwise().mean().transpose();
  auto enc = make_encoding(ds, EncoderKind::nmf, std::move(res.w), std::move(fallback));
  enc.spec.k = k;
  enc.spec.seed = seed;
  enc.shift = std::move(shift);
  return enc;
}

FittedEncoding fit_mnl_encoding(const Dataset& ds, double lambda2) {
  if (ds.m() < 2) throw EncoderError("mnl: need at least two categories");
  if (lambda2 < 0.0) throw EncoderError("mnl: lambda must be nonnegative");
  auto model = fit_mnl(ds.x(), ds.g(), static_cast<int>(ds.m()), lambda2);
  auto enc = make_encoding(ds, EncoderKind::mnl, std::move(model.beta), Vector::Zero(static_cast<Eigen::Index>(ds.p()) + 1));
  enc.spec.lambda = lambda2;
  return enc;
}

FittedEncoding fit_svm_encoding(const Dataset& ds, double c_reg, std::uint64_t seed) {
  if (ds.m() < 2) throw EncoderError("svm: need at least two categories");
  if (c_reg <= 0.0) throw EncoderError("svm: c_reg must be positive");
  auto model = fit_svm_ovr(ds.x(), ds.g(), static_cast<int>(ds.m()), c_reg, 500, seed);
  const auto p = static_cast<Eigen::Index>(ds.p());
  Matrix psi(model.w.rows(), p + 1);
  psi.leftCols(p) = model.w;
  psi.col(p) = model.b;
  auto enc = make_encoding(ds, EncoderKind::svm, std::move(psi), Vector::Zero(p + 1));
  enc.spec.lambda = c_reg;
  enc.spec.seed = seed;
  return enc;
}

FittedEncoding fit_contrast(const Dataset& ds, ContrastKind kind) {
  if (ds.m() < 2) throw EncoderError("contrast codings need at least two categories");
  static constexpr std::array kinds{EncoderKind::onehot, EncoderKind::deviation, EncoderKind::difference,
                                    EncoderKind::helmert, EncoderKind::cumulative};
  const int m = static_cast<int>(ds.m());
  return make_encoding(ds, kinds[static_cast<std::size_t>(kind)], contrast_matrix(kind, m),
                       Vector::Zero(m - 1));
}

FittedEncoding fit_permutation(const Dataset& ds, int n_columns, std::uint64_t seed) {
  if (n_columns < 1) throw EncoderError("permutation: need at least one column");
  const auto m = static_cast<Eigen::Index>(ds.m());
  Matrix psi(m, n_columns);
  std::vector<int> perm(static_cast<std::size_t>(m));
  for (int c = 0; c < n_columns; ++c) {
    std::iota(perm.begin(), perm.end(), 1);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(perm.begin(), perm.end());
    for (Eigen::Index g = 0; g < m; ++g) psi(g, c) = perm[static_cast<std::size_t>(g)];
  }
  auto enc = make_encoding(ds, n_columns == 1 ? EncoderKind::permutation : EncoderKind::multiperm,
                           std::move(psi), Vector::Constant(n_columns, 0.5 * static_cast<double>(m + 1)));
  enc.spec.seed = seed;
  return enc;
}

FittedEncoding fit_fisher(const Dataset& ds) {
  const auto st = group_stats(ds);
  const auto m = static_cast<Eigen::Index>(ds.m());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return st.y_means(a) < st.y_means(b); });
  Matrix psi(m, 1);
  for (Eigen::Index r = 0; r < m; ++r) psi(order[static_cast<std::size_t>(r)], 0) = static_cast<double>(r + 1);
  return make_encoding(ds, EncoderKind::fisher, std::move(psi),
                       Vector::Constant(1, 0.5 * static_cast<double>(m + 1)));
}

FittedEncoding fit_encoder(const Dataset& ds, const EncoderSpec& spec) {
  const int k = spec.k.value_or(default_rank(ds));
  FittedEncoding enc;
  switch (spec.kind) {
    case EncoderKind::means: enc = fit_means(ds); break;
    case EncoderKind::lowrank_svd: enc = fit_lowrank_svd(ds, k, spec.scaled, spec.centered); break;
    case EncoderKind::sparse_lowrank: enc = fit_sparse_lowrank(ds, k, spec.lambda, spec.centered); break;
    case EncoderKind::pca: enc = fit_pca(ds, k, spec.scaled); break;
    case EncoderKind::nmf: enc = fit_nmf(ds, k, spec.seed); break;
    case EncoderKind::mnl: enc = fit_mnl_encoding(ds, spec.lambda.value_or(1.0)); break;
    case EncoderKind::svm: enc = fit_svm_encoding(ds, spec.lambda.value_or(1.0), spec.seed); break;
    case EncoderKind::onehot: enc = fit_contrast(ds, ContrastKind::onehot); break;
    case EncoderKind::deviation: enc = fit_contrast(ds, ContrastKind::deviation); break;
    case EncoderKind::difference: enc = fit_contrast(ds, ContrastKind::difference); break;
    case EncoderKind::helmert: enc = fit_contrast(ds, ContrastKind::helmert); break;
    case EncoderKind::cumulative: enc = fit_contrast(ds, ContrastKind::cumulative); break;
    case EncoderKind::permutation: enc = fit_permutation(ds, 1, spec.seed); break;
    case EncoderKind::multiperm: enc = fit_permutation(ds, 4, spec.seed); break;
    case EncoderKind::fisher: enc = fit_fisher(ds); break;
  }
  // Keep the caller's flags, with the resolved rank and regularisation.
  EncoderSpec resolved = spec;
  resolved.k = enc.spec.k;
  if (enc.spec.lambda) resolved.lambda = enc.spec.lambda;
  enc.spec = resolved;
  return enc;
}

TransformResult transform(const Dataset& ds, const FittedEncoding& enc) {
  if (ds.p() != enc.p_train)
    throw EncoderError("transform: dataset has " + std::to_string(ds.p()) + " features, encoding expects " +
                       std::to_string(enc.p_train));
  const auto p = static_cast<Eigen::Index>(ds.p());
  const auto k = static_cast<Eigen::Index>(enc.k_out());
  TransformResult out{Matrix(static_cast<Eigen::Index>(ds.n()), p + k), 0};
  out.features.leftCols(p) = ds.x();
  // Map this dataset's category ids onto the training ids once.
  std::vector<int> mapped(ds.m());
  for (std::size_t c = 0; c < ds.m(); ++c) mapped[c] = enc.labels.find(ds.labels().label(static_cast<int>(c)));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const int id = mapped[static_cast<std::size_t>(ds.g()[i])];
    if (id >= 0) {
      out.features.row(row).tail(k) = enc.psi.row(id);
    } else {
      out.features.row(row).tail(k) = enc.fallback.transpose();
      ++out.unseen_rows;
    }
  }
  return out;
}

std::vector<std::string> encoding_column_names(const FittedEncoding& enc) {
  std::vector<std::string> names;
  const std::string base(to_string(enc.spec.kind));
  for (std::size_t j = 0; j < enc.k_out(); ++j) names.push_back(base + "_" + std::to_string(j + 1));
  return names;
}

}  // namespace catenc
