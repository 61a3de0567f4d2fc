#pragma once

// Cross-validated comparison of encoders against the one-hot baseline.

#include "catenc/dataset.hpp"
#include "catenc/encoders.hpp"
#include "catenc/learners.hpp"
#include "catenc/stats.hpp"
#include "catenc/synthgen.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace catenc {

struct BenchConfig {
  std::vector<EncoderSpec> encoders;  // onehot is prepended when missing
  LearnerSpec learner;
  int k_folds = 4;
  int n_seeds = 20;
  std::vector<int> rank_grid = {1, 2, 4, 8};
  int inner_folds = 3;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;

  void validate() const;
  // Encoder list with onehot first and duplicates removed.
  std::vector<EncoderSpec> resolved_encoders() const;
};

struct EncoderResult {
  std::string name;
  EncoderSpec spec;
  bool skipped = false;
  std::string skip_reason;
  std::vector<double> fold_mse;
  std::vector<int> fold_rank;  // chosen k per fold; empty for fixed-width kinds
  std::size_t unseen_rows = 0;
  double mean_mse = 0.0;
  double improvement_pct = 0.0;
  TTestResult ttest;
};

struct BenchReport {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t m = 0;
  int k_folds = 0;
  std::uint64_t seed = 0;
  LearnerSpec learner;
  std::vector<EncoderResult> encoders;  // onehot first

  const EncoderResult* find(const std::string& name) const;
};

// Ranks tried for a rank-dependent encoder on a training split.
std::vector<int> rank_candidates(const std::vector<int>& grid, const Dataset& train);

BenchReport run_cv(const Dataset& ds, const BenchConfig& cfg);

struct SweepCell {
  std::size_t config_index = 0;
  std::size_t seed_index = 0;
  SynthConfig config;  // with the per-cell seed filled in
  std::optional<BenchReport> report;
  std::string error;
};

struct SweepSummaryRow {
  std::size_t config_index = 0;
  std::string encoder;
  std::size_t completed = 0;
  double median_improvement = 0.0;
  double mean_improvement = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // config-major, then seed
  std::vector<SweepSummaryRow> summary;
};

// Cell (c, s) uses synth seed grid[c].seed + s and bench seed bench.seed + s.
SweepResult run_sim_sweep(const std::vector<SynthConfig>& grid, const BenchConfig& bench);

double median(std::vector<double> v);

}  // namespace catenc
