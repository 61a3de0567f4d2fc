#include "catenc/eval.hpp"

#include "catenc/error.hpp"
#include "catenc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catenc {

void BenchConfig::validate() const {
  if (k_folds < 2) throw InvalidArgument("k_folds must be >= 2");
  if (n_seeds < 1) throw InvalidArgument("n_seeds must be >= 1");
  if (inner_folds < 2) throw InvalidArgument("inner_folds must be >= 2");
  for (int k : rank_grid)
    if (k < 1) throw InvalidArgument("rank grid entries must be >= 1");
  learner.validate();
}

std::vector<EncoderSpec> BenchConfig::resolved_encoders() const {
  std::vector<EncoderSpec> out;
  out.push_back(EncoderSpec{EncoderKind::onehot});
  for (const auto& e : encoders) {
    const auto name = to_string(e);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const EncoderSpec& o) { return to_string(o) == name; });
    if (!dup) out.push_back(e);
  }
  return out;
}

const EncoderResult* BenchReport::find(const std::string& name) const {
  for (const auto& e : encoders)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<int> rank_candidates(const std::vector<int>& grid, const Dataset& train) {
  const int cap = static_cast<int>(std::min(train.p(), train.m()));
  std::vector<int> out;
  for (int k : grid)
    if (k >= 1 && k <= cap) out.push_back(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

namespace {

struct Fit {
  double mse = 0.0;
  std::size_t unseen = 0;
};

Fit fit_and_score(const Dataset& train, const Dataset& test, const EncoderSpec& spec, const LearnerSpec& learner,
                  Exec exec) {
  const auto enc = fit_encoder(train, spec);
  const auto tr = transform(train, enc);
  const auto te = transform(test, enc);
  const auto model = fit(learner, tr.features, train.y(), exec);
  return {mse(model.predict(te.features), test.y()), te.unseen_rows};
}

int choose_rank(const Dataset& train, EncoderSpec spec, const LearnerSpec& learner, const BenchConfig& cfg,
                std::uint64_t seed, Exec exec) {
  const auto cand = rank_candidates(cfg.rank_grid, train);
  if (cand.empty()) return default_rank(train);
  if (cand.size() == 1) return cand.front();
  const int folds = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.inner_folds), train.n()));
  const auto plan = stratified_kfold(train, folds, seed);
  std::vector<Dataset> in_train, in_test;
  for (int f = 0; f < folds; ++f) {
    in_train.push_back(train.subset(plan.train_rows(f)));
    in_test.push_back(train.subset(plan.test_rows(f)));
  }
  int best = cand.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (int k : cand) {
    spec.k = k;
    double total = 0.0;
    try {
      for (int f = 0; f < folds; ++f)
        total += fit_and_score(in_train[static_cast<std::size_t>(f)], in_test[static_cast<std::size_t>(f)], spec,
                               learner, exec).mse;
    } catch (const Error&) {
      continue;
    }
    if (total < best_score) {
      best_score = total;
      best = k;
    }
  }
  return best;
}

struct Cell {
  double mse = 0.0;
  int rank = -1;
  std::size_t unseen = 0;
  std::string error;
};

}  // namespace

BenchReport run_cv(const Dataset& ds, const BenchConfig& cfg) {
  cfg.validate();
  if (ds.n() < static_cast<std::size_t>(cfg.k_folds)) throw InvalidArgument("run_cv: fewer rows than folds");
  const auto specs = cfg.resolved_encoders();
  const int folds = cfg.k_folds;
  const auto plan = stratified_kfold(ds, folds, cfg.seed);

  std::vector<Dataset> trains, tests;
  for (int f = 0; f < folds; ++f) {
    trains.push_back(ds.subset(plan.train_rows(f)));
    tests.push_back(ds.subset(plan.test_rows(f)));
  }

  const auto n_enc = specs.size();
  std::vector<Cell> cells(n_enc * static_cast<std::size_t>(folds));
  const bool par = cfg.exec == Exec::parallel;
  const Exec inner = cfg.exec;

  auto run_cell = [&](std::size_t idx) {
    const auto e = idx / static_cast<std::size_t>(folds);
    const int f = static_cast<int>(idx % static_cast<std::size_t>(folds));
    const auto fu = static_cast<std::uint64_t>(f);
    Cell& out = cells[idx];
    try {
      EncoderSpec spec = specs[e];
      spec.seed = derive_seed(cfg.seed + spec.seed, fu);
      LearnerSpec learner = cfg.learner;
      learner.seed = derive_seed(cfg.seed + cfg.learner.seed, 0x1000 + fu);
      const auto& train = trains[static_cast<std::size_t>(f)];
      if (is_rank_dependent(spec.kind) && !spec.k) {
        spec.k = choose_rank(train, spec, learner, cfg, derive_seed(cfg.seed, 0x2000 + fu), inner);
      }
      if (is_rank_dependent(spec.kind)) out.rank = *spec.k;
      const auto r = fit_and_score(train, tests[static_cast<std::size_t>(f)], spec, learner, inner);
      out.mse = r.mse;
      out.unseen = r.unseen;
    } catch (const std::exception& ex) {
      out.error = ex.what();
    }
  };

  const auto n_cells = static_cast<long>(cells.size());
  if (par) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n_cells; ++i) run_cell(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < n_cells; ++i) run_cell(static_cast<std::size_t>(i));
  }

  BenchReport rep;
  rep.n = ds.n();
  rep.p = ds.p();
  rep.m = ds.m();
  rep.k_folds = folds;
  rep.seed = cfg.seed;
  rep.learner = cfg.learner;
  for (std::size_t e = 0; e < n_enc; ++e) {
    EncoderResult res;
    res.spec = specs[e];
    res.name = to_string(specs[e]);
    for (int f = 0; f < folds; ++f) {
      const Cell& c = cells[e * static_cast<std::size_t>(folds) + static_cast<std::size_t>(f)];
      if (!c.error.empty()) {
        res.skipped = true;
        res.skip_reason = "fold " + std::to_string(f) + ": " + c.error;
        break;
      }
      res.fold_mse.push_back(c.mse);
      if (c.rank >= 0) res.fold_rank.push_back(c.rank);
      res.unseen_rows += c.unseen;
    }
    if (res.skipped) {
      res.fold_mse.clear();
      res.fold_rank.clear();
      res.unseen_rows = 0;
    } else {
      res.mean_mse = std::accumulate(res.fold_mse.begin(), res.fold_mse.end(), 0.0) / folds;
    }
    rep.encoders.push_back(std::move(res));
  }

  const auto& base = rep.encoders.front();
  if (base.skipped) throw EncoderError("one-hot baseline failed: " + base.skip_reason);
  for (auto& res : rep.encoders) {
    if (res.skipped) continue;
    res.improvement_pct = base.mean_mse > 0 ? 100.0 * (base.mean_mse - res.mean_mse) / base.mean_mse : 0.0;
    res.ttest = paired_ttest(base.fold_mse, res.fold_mse);
  }
  return rep;
}

SweepResult run_sim_sweep(const std::vector<SynthConfig>& grid, const BenchConfig& bench) {
  bench.validate();
  for (const auto& c : grid) c.validate();
  SweepResult out;
  const auto n_seeds = static_cast<std::size_t>(bench.n_seeds);
  out.cells.resize(grid.size() * n_seeds);
  for (std::size_t c = 0; c < grid.size(); ++c)
    for (std::size_t s = 0; s < n_seeds; ++s) {
      auto& cell = out.cells[c * n_seeds + s];
      cell.config_index = c;
      cell.seed_index = s;
      cell.config = grid[c];
      cell.config.seed = grid[c].seed + s;
    }

  auto run = [&](std::size_t i) {
    auto& cell = out.cells[i];
    try {
      BenchConfig b = bench;
      b.seed = bench.seed + cell.seed_index;
      b.exec = Exec::serial;
      const auto data = gen_dataset(cell.config);
      cell.report = run_cv(data.data, b);
    } catch (const std::exception& ex) {
      cell.error = ex.what();
    }
  };
  const auto n_cells = static_cast<long>(out.cells.size());
  if (bench.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n_cells; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < n_cells; ++i) run(static_cast<std::size_t>(i));
  }

  const auto specs = bench.resolved_encoders();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (const auto& spec : specs) {
      SweepSummaryRow row;
      row.config_index = c;
      row.encoder = to_string(spec);
      std::vector<double> imps;
      for (std::size_t s = 0; s < n_seeds; ++s) {
        const auto& cell = out.cells[c * n_seeds + s];
        if (!cell.report) continue;
        const auto* r = cell.report->find(row.encoder);
        if (r && !r->skipped) imps.push_back(r->improvement_pct);
      }
      row.completed = imps.size();
      row.mean_improvement = imps.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : std::accumulate(imps.begin(), imps.end(), 0.0) / imps.size();
      row.median_improvement = median(imps);
      out.summary.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace catenc
