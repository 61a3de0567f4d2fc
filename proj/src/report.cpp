#include "catenc/report.hpp"

#include "catenc/csv.hpp"
#include "catenc/error.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace catenc {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string cell(double v) { return std::isfinite(v) ? format_number(v) : std::string("NA"); }

std::vector<std::string> report_columns() { return {"encoder", "mean_mse", "improvement_pct", "t", "p"}; }

CsvRow report_row(const EncoderResult& e) {
  if (e.skipped) return {e.name, "NA", "NA", "NA", "NA"};
  return {e.name, cell(e.mean_mse), cell(e.improvement_pct), e.ttest.degenerate ? (e.ttest.t > 0 ? "inf" : "-inf") : cell(e.ttest.t),
          cell(e.ttest.p)};
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string lpad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace

Json to_json(const EncoderSpec& spec) {
  Json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["k"] = spec.k ? Json(*spec.k) : Json(nullptr);
  j["lambda"] = spec.lambda ? Json(*spec.lambda) : Json(nullptr);
  j["seed"] = spec.seed;
  j["scaled"] = spec.scaled;
  j["centered"] = spec.centered;
  return j;
}

Json to_json(const LearnerSpec& spec) {
  Json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["lambda2"] = spec.lambda2;
  j["max_depth"] = spec.depth();
  j["n_trees"] = spec.trees();
  j["learning_rate"] = spec.learning_rate;
  j["feature_subsample"] = spec.feature_subsample;
  j["bootstrap"] = spec.bootstrap;
  j["min_leaf"] = spec.min_leaf;
  j["max_bins"] = spec.max_bins;
  j["seed"] = spec.seed;
  return j;
}

Json to_json(const SynthConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["m"] = cfg.m;
  j["k_latent"] = cfg.k_latent;
  j["p_assign"] = cfg.p_assign;
  j["noise_sd"] = cfg.noise_sd;
  j["outcome"] = std::string(to_string(cfg.outcome));
  j["seed"] = cfg.seed;
  j["mean_scale"] = cfg.mean_scale;
  return j;
}

Json to_json(const BenchReport& report) {
  Json j;
  j["n"] = report.n;
  j["p"] = report.p;
  j["m"] = report.m;
  j["k_folds"] = report.k_folds;
  j["seed"] = report.seed;
  j["learner"] = to_json(report.learner);
  Json encs = Json::array();
  for (const auto& e : report.encoders) {
    Json r;
    r["encoder"] = e.name;
    r["spec"] = to_json(e.spec);
    r["skipped"] = e.skipped;
    if (e.skipped) {
      r["skip_reason"] = e.skip_reason;
    } else {
      r["mean_mse"] = e.mean_mse;
      r["improvement_pct"] = e.improvement_pct;
      r["fold_mse"] = e.fold_mse;
      if (!e.fold_rank.empty()) r["fold_rank"] = e.fold_rank;
      r["unseen_rows"] = e.unseen_rows;
      r["t"] = number_or_null(e.ttest.t);
      r["p"] = e.ttest.p;
      r["df"] = e.ttest.df;
      r["degenerate"] = e.ttest.degenerate;
    }
    encs.push_back(std::move(r));
  }
  j["encoders"] = std::move(encs);
  return j;
}

Json to_json(const SweepResult& sweep) {
  Json j;
  Json cells = Json::array();
  for (const auto& c : sweep.cells) {
    Json r;
    r["setup"] = c.config_index;
    r["seed_index"] = c.seed_index;
    r["config"] = to_json(c.config);
    if (c.report) {
      r["report"] = to_json(*c.report);
    } else {
      r["error"] = c.error;
    }
    cells.push_back(std::move(r));
  }
  j["cells"] = std::move(cells);
  Json summary = Json::array();
  for (const auto& s : sweep.summary) {
    Json r;
    r["setup"] = s.config_index;
    r["encoder"] = s.encoder;
    r["completed"] = s.completed;
    r["median_improvement_pct"] = number_or_null(s.median_improvement);
    r["mean_improvement_pct"] = number_or_null(s.mean_improvement);
    summary.push_back(std::move(r));
  }
  j["summary"] = std::move(summary);
  return j;
}

SynthConfig synth_config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("synth config must be a JSON object");
  SynthConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "p") c.p = v.get<std::size_t>();
      else if (key == "m") c.m = v.get<std::size_t>();
      else if (key == "k_latent") c.k_latent = v.get<std::size_t>();
      else if (key == "p_assign") c.p_assign = v.get<double>();
      else if (key == "noise_sd" || key == "noise") c.noise_sd = v.get<double>();
      else if (key == "outcome") c.outcome = parse_outcome_model(v.get<std::string>());
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "mean_scale") c.mean_scale = v.get<double>();
      else throw InvalidArgument("unknown synth config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad synth config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<SynthConfig> synth_grid_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("sim grid must be a non-empty JSON list");
  std::vector<SynthConfig> out;
  for (const auto& item : j) out.push_back(synth_config_from_json(item));
  return out;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
  write_csv_row(out, report_columns());
  for (const auto& e : report.encoders) write_csv_row(out, report_row(e));
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  CsvRow header = {"setup", "seed"};
  for (auto& c : report_columns()) header.push_back(c);
  write_csv_row(out, header);
  for (const auto& c : sweep.cells) {
    if (!c.report) continue;
    for (const auto& e : c.report->encoders) {
      CsvRow row = {std::to_string(c.config_index), std::to_string(c.config.seed)};
      for (auto& f : report_row(e)) row.push_back(f);
      write_csv_row(out, row);
    }
  }
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep) {
  std::vector<std::string> encoders;
  std::map<std::pair<std::size_t, std::string>, double> med;
  std::set<std::size_t> setups;
  for (const auto& s : sweep.summary) {
    if (std::find(encoders.begin(), encoders.end(), s.encoder) == encoders.end()) encoders.push_back(s.encoder);
    med[{s.config_index, s.encoder}] = s.median_improvement;
    setups.insert(s.config_index);
  }
  CsvRow header = {"setup"};
  for (auto& e : encoders) header.push_back(e);
  write_csv_row(out, header);
  for (auto c : setups) {
    CsvRow row = {std::to_string(c)};
    for (auto& e : encoders) row.push_back(cell(med[{c, e}]));
    write_csv_row(out, row);
  }
}

std::string format_table(const BenchReport& report) {
  std::ostringstream os;
  os << pad("encoder", 18) << lpad("mean_mse", 12) << lpad("improve%", 10) << lpad("t", 9) << lpad("p", 9) << '\n';
  for (const auto& e : report.encoders) {
    if (e.skipped) {
      os << pad(e.name, 18) << "  skipped: " << e.skip_reason << '\n';
      continue;
    }
    os << pad(e.name, 18) << lpad(fixed(e.mean_mse, 5), 12) << lpad(fixed(e.improvement_pct, 2), 10)
       << lpad(fixed(e.ttest.t, 3), 9) << lpad(fixed(e.ttest.p, 4), 9) << '\n';
  }
  return os.str();
}

std::string format_sweep_table(const SweepResult& sweep) {
  std::vector<std::string> encoders;
  std::set<std::size_t> setups;
  std::map<std::pair<std::size_t, std::string>, double> med;
  for (const auto& s : sweep.summary) {
    if (std::find(encoders.begin(), encoders.end(), s.encoder) == encoders.end()) encoders.push_back(s.encoder);
    med[{s.config_index, s.encoder}] = s.median_improvement;
    setups.insert(s.config_index);
  }
  std::ostringstream os;
  os << "median improvement over onehot (%)\n" << pad("setup", 8);
  for (auto& e : encoders) os << lpad(e, std::max<std::size_t>(10, e.size() + 2));
  os << '\n';
  for (auto c : setups) {
    os << pad(std::to_string(c), 8);
    for (auto& e : encoders) os << lpad(fixed(med[{c, e}], 2), std::max<std::size_t>(10, e.size() + 2));
    os << '\n';
  }
  std::size_t failed = 0;
  for (const auto& c : sweep.cells) failed += c.report ? 0 : 1;
  if (failed) os << failed << " cell(s) failed\n";
  return os.str();
}

}  // namespace catenc
