#include "catenc/cli.hpp"

#include "catenc/csv.hpp"
#include "catenc/encoders.hpp"
#include "catenc/error.hpp"
#include "catenc/eval.hpp"
#include "catenc/synthgen.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef CATENC_VERSION
#define CATENC_VERSION "0.0.0"
#endif

namespace catenc::cli {

namespace {

struct EncodeOpts {
  std::string input, cat, target, encoder, output;
  std::optional<int> rank;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
};

struct SimulateOpts {
  SynthConfig cfg;
  std::string outcome = "linear";
  std::string prefix;
};

struct BenchOpts {
  std::string input, cat, target, sim_grid, prefix;
  std::string encoders = "means,lowrank_svd,mnl";
  std::string learner = "forest";
  std::string rank_grid = "1,2,4,8";
  int folds = 4;
  int seeds = 20;
  int inner_folds = 3;
  std::uint64_t seed = 0;
  std::optional<int> trees;
  std::optional<int> depth;
  double lambda2 = 1.0;
  double learning_rate = 0.1;
  double feature_subsample = 1.0 / 3.0;
  int min_leaf = 5;
  bool no_bootstrap = false;
  int jobs = 0;
};

// CATENC_SEED wins over --seed when set.
std::uint64_t resolve_seed(std::uint64_t flag, Json& seeds) {
  const char* env = std::getenv("CATENC_SEED");
  if (env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw InvalidArgument("CATENC_SEED is not an unsigned integer: '" + std::string(s) + "'");
    seeds["seed"] = v;
    seeds["source"] = "CATENC_SEED";
    return v;
  }
  seeds["seed"] = flag;
  seeds["source"] = "flag";
  return flag;
}

RunManifest start_manifest(std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.version = CATENC_VERSION;
  m.started = utc_timestamp();
  return m;
}

void add_output(RunManifest& m, const std::filesystem::path& p) {
  Json o;
  o["path"] = p.string();
  o["digest"] = file_digest(p);
  m.outputs.push_back(std::move(o));
}

void finish_manifest(RunManifest& m, const std::filesystem::path& path) {
  m.finished = utc_timestamp();
  write_manifest(path, m);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

Json matrix_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json r = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) r.push_back(v(i));
  return r;
}

void report_load(const LoadReport& lr, std::ostream& err) {
  for (const auto& w : lr.warnings) err << "warning: " << w << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int cmd_encode(const EncodeOpts& o, std::ostream& out, std::ostream& err) {
  RunManifest man = start_manifest("encode");
  const auto seed = resolve_seed(o.seed, man.seeds);
  EncoderSpec spec;
  spec.kind = parse_encoder_kind(o.encoder);
  if (o.rank) {
    if (!is_rank_dependent(spec.kind)) throw InvalidArgument("--rank is not used by encoder '" + o.encoder + "'");
    if (*o.rank < 1) throw InvalidArgument("--rank must be >= 1");
    spec.k = o.rank;
  }
  spec.lambda = o.lambda;
  spec.seed = seed;

  LoadReport lr;
  const Dataset ds = load_csv(o.input, o.cat, o.target, &lr);
  report_load(lr, err);

  std::string rank_source = "flag";
  if (is_rank_dependent(spec.kind) && !spec.k) {
    spec.k = default_rank(ds);
    rank_source = "default";
  }

  FittedEncoding enc;
  TransformResult tr;
  try {
    enc = fit_encoder(ds, spec);
    tr = transform(ds, enc);
  } catch (const InvalidArgument& e) {
    throw EncoderError(e.what());
  }

  {
    auto f = open_out(o.output);
    CsvRow header = {o.target};
    for (const auto& n : ds.feature_names()) header.push_back(n);
    for (const auto& n : encoding_column_names(enc)) header.push_back(n);
    write_csv_row(f, header);
    CsvRow row(header.size());
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      row[0] = format_number(ds.y()(ii));
      for (Eigen::Index j = 0; j < tr.features.cols(); ++j)
        row[static_cast<std::size_t>(j) + 1] = format_number(tr.features(ii, j));
      write_csv_row(f, row);
    }
    if (!f) throw Error("write failed: " + o.output);
  }

  man.flags["input"] = o.input;
  man.flags["cat"] = o.cat;
  man.flags["target"] = o.target;
  man.flags["encoder"] = o.encoder;
  man.flags["rank"] = spec.k ? Json(*spec.k) : Json(nullptr);
  man.flags["lambda"] = o.lambda ? Json(*o.lambda) : Json(nullptr);
  man.flags["seed"] = seed;
  man.flags["output"] = o.output;
  man.inputs[o.input] = file_digest(o.input);
  man.notes["rank_source"] = spec.k ? Json(rank_source) : Json(nullptr);
  man.notes["rows_read"] = lr.rows_read;
  man.notes["dropped_rows"] = lr.dropped_rows;
  man.notes["encoding_width"] = enc.k_out();
  man.notes["degenerate"] = enc.degenerate;
  add_output(man, o.output);
  finish_manifest(man, o.output + ".manifest.json");
  out << "wrote " << o.output << " (" << ds.n() << " rows, " << enc.k_out() << " encoding columns)\n";
  return kExitOk;
}

int cmd_simulate(SimulateOpts o, std::ostream& out, std::ostream&) {
  RunManifest man = start_manifest("simulate");
  o.cfg.seed = resolve_seed(o.cfg.seed, man.seeds);
  o.cfg.outcome = parse_outcome_model(o.outcome);
  o.cfg.validate();
  const auto sd = gen_dataset(o.cfg);

  const std::string csv_path = o.prefix + ".csv";
  const std::string truth_path = o.prefix + ".truth.json";
  write_dataset_csv(csv_path, sd.data, "cat", "y");

  const auto& t = sd.truth;
  Json truth;
  truth["config"] = to_json(o.cfg);
  truth["labels"] = sd.data.labels().labels();
  truth["phi"] = matrix_json(t.phi);
  truth["b_means"] = matrix_json(t.b_means);
  truth["cov_scale"] = vector_json(t.cov_scale);
  truth["alpha"] = vector_json(t.alpha);
  truth["beta_shared"] = vector_json(t.beta_shared);
  truth["beta_group"] = matrix_json(t.beta_group);
  truth["beta_plus"] = vector_json(t.beta_plus);
  truth["beta_minus"] = vector_json(t.beta_minus);
  truth["medians"] = vector_json(t.medians);
  truth["seed"] = t.seed;
  {
    auto f = open_out(truth_path);
    f << truth.dump(2) << '\n';
  }

  man.flags = to_json(o.cfg);
  man.flags["out_prefix"] = o.prefix;
  add_output(man, csv_path);
  add_output(man, truth_path);
  finish_manifest(man, o.prefix + ".manifest.json");
  out << "wrote " << csv_path << " and " << truth_path << '\n';
  return kExitOk;
}

int cmd_bench(const BenchOpts& o, std::ostream& out, std::ostream& err) {
  RunManifest man = start_manifest("bench");
  const bool from_input = !o.input.empty();
  if (from_input == !o.sim_grid.empty()) throw InvalidArgument("give exactly one of --input or --sim-grid");
  if (from_input && (o.cat.empty() || o.target.empty()))
    throw InvalidArgument("--input needs --cat and --target");

  BenchConfig cfg;
  cfg.seed = resolve_seed(o.seed, man.seeds);
  for (const auto& e : split_list(o.encoders)) cfg.encoders.push_back(parse_encoder_spec(e));
  if (cfg.encoders.empty()) throw InvalidArgument("--encoders is empty");
  cfg.learner.kind = parse_learner_kind(o.learner);
  cfg.learner.n_trees = o.trees;
  cfg.learner.max_depth = o.depth;
  cfg.learner.lambda2 = o.lambda2;
  cfg.learner.learning_rate = o.learning_rate;
  cfg.learner.feature_subsample = o.feature_subsample;
  cfg.learner.min_leaf = o.min_leaf;
  cfg.learner.bootstrap = !o.no_bootstrap;
  cfg.k_folds = o.folds;
  cfg.n_seeds = o.seeds;
  cfg.inner_folds = o.inner_folds;
  cfg.rank_grid.clear();
  for (const auto& s : split_list(o.rank_grid)) {
    int k = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), k);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw InvalidArgument("bad --rank-grid entry '" + s + "'");
    cfg.rank_grid.push_back(k);
  }
  cfg.validate();

  const int jobs = o.jobs > 0 ? o.jobs : omp_get_num_procs();
  omp_set_num_threads(jobs);

  man.flags["input"] = o.input.empty() ? Json(nullptr) : Json(o.input);
  man.flags["cat"] = o.cat.empty() ? Json(nullptr) : Json(o.cat);
  man.flags["target"] = o.target.empty() ? Json(nullptr) : Json(o.target);
  man.flags["sim_grid"] = o.sim_grid.empty() ? Json(nullptr) : Json(o.sim_grid);
  Json encs = Json::array();
  for (const auto& e : cfg.resolved_encoders()) encs.push_back(to_string(e));
  man.flags["encoders"] = encs;
  man.flags["learner"] = to_json(cfg.learner);
  man.flags["folds"] = cfg.k_folds;
  man.flags["seeds"] = cfg.n_seeds;
  man.flags["inner_folds"] = cfg.inner_folds;
  man.flags["rank_grid"] = cfg.rank_grid;
  man.flags["seed"] = cfg.seed;
  man.flags["jobs"] = jobs;
  man.flags["report_prefix"] = o.prefix;

  const std::string json_path = o.prefix + ".json";
  const std::string csv_path = o.prefix + ".csv";
  int code = kExitOk;

  if (from_input) {
    LoadReport lr;
    const Dataset ds = load_csv(o.input, o.cat, o.target, &lr);
    report_load(lr, err);
    man.inputs[o.input] = file_digest(o.input);
    man.notes["dropped_rows"] = lr.dropped_rows;
    const auto rep = run_cv(ds, cfg);
    {
      auto f = open_out(json_path);
      f << to_json(rep).dump(2) << '\n';
    }
    {
      auto f = open_out(csv_path);
      write_report_csv(f, rep);
    }
    add_output(man, json_path);
    add_output(man, csv_path);
    out << format_table(rep);
    for (const auto& e : rep.encoders)
      if (e.skipped) err << "warning: encoder " << e.name << " skipped: " << e.skip_reason << '\n';
  } else {
    Json grid_json;
    const std::string text = read_file(o.sim_grid);
    man.inputs[o.sim_grid] = hex64(fnv1a64(text));
    try {
      grid_json = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("--sim-grid is not valid JSON: ") + e.what());
    }
    const auto grid = synth_grid_from_json(grid_json);
    const auto sweep = run_sim_sweep(grid, cfg);
    const std::string summary_path = o.prefix + ".summary.csv";
    {
      auto f = open_out(json_path);
      f << to_json(sweep).dump(2) << '\n';
    }
    {
      auto f = open_out(csv_path);
      write_sweep_csv(f, sweep);
    }
    {
      auto f = open_out(summary_path);
      write_sweep_summary_csv(f, sweep);
    }
    add_output(man, json_path);
    add_output(man, csv_path);
    add_output(man, summary_path);
    std::size_t ok = 0;
    for (const auto& c : sweep.cells) {
      if (c.report) ++ok;
      else err << "warning: setup " << c.config_index << " seed " << c.config.seed << " failed: " << c.error << '\n';
    }
    man.notes["reports"] = ok;
    out << format_sweep_table(sweep);
    if (ok == 0) code = kExitEncoder;
  }
  finish_manifest(man, o.prefix + ".manifest.json");
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"catenc: numeric encodings for high-cardinality categorical columns"};
  app.require_subcommand(1);

  EncodeOpts eo;
  auto* enc = app.add_subcommand("encode", "encode a categorical column of a CSV file");
  enc->add_option("--input", eo.input, "input CSV")->required();
  enc->add_option("--cat", eo.cat, "categorical column")->required();
  enc->add_option("--target", eo.target, "target column")->required();
  enc->add_option("--encoder", eo.encoder, "encoder kind")->required();
  enc->add_option("--rank", eo.rank, "rank for lowrank_svd, sparse_lowrank, pca, nmf");
  enc->add_option("--lambda", eo.lambda, "regularisation strength");
  enc->add_option("--seed", eo.seed, "random seed");
  enc->add_option("--output", eo.output, "output CSV")->required();

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic latent-state dataset");
  sim->add_option("--n", so.cfg.n, "rows")->capture_default_str();
  sim->add_option("--p", so.cfg.p, "continuous features")->capture_default_str();
  sim->add_option("--m", so.cfg.m, "categories")->capture_default_str();
  sim->add_option("--k-latent", so.cfg.k_latent, "latent states")->capture_default_str();
  sim->add_option("--p-assign", so.cfg.p_assign, "in-block assignment probability")->capture_default_str();
  sim->add_option("--outcome", so.outcome, "linear | group | piecewise")->capture_default_str();
  sim->add_option("--noise", so.cfg.noise_sd, "outcome noise sd")->capture_default_str();
  sim->add_option("--seed", so.cfg.seed, "random seed")->capture_default_str();
  sim->add_option("--out-prefix", so.prefix, "output path prefix")->required();

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "cross-validated comparison of encoders against one-hot");
  bench->add_option("--input", bo.input, "input CSV");
  bench->add_option("--cat", bo.cat, "categorical column");
  bench->add_option("--target", bo.target, "target column");
  bench->add_option("--sim-grid", bo.sim_grid, "JSON list of synthetic configs");
  bench->add_option("--encoders", bo.encoders, "comma list; kind or kind:k")->capture_default_str();
  bench->add_option("--learner", bo.learner, "ridge | tree | forest | boost")->capture_default_str();
  bench->add_option("--folds", bo.folds, "CV folds")->capture_default_str();
  bench->add_option("--seeds", bo.seeds, "seeds per synthetic config")->capture_default_str();
  bench->add_option("--seed", bo.seed, "base seed")->capture_default_str();
  bench->add_option("--rank-grid", bo.rank_grid, "rank candidates for inner CV")->capture_default_str();
  bench->add_option("--inner-folds", bo.inner_folds, "inner CV folds for rank choice")->capture_default_str();
  bench->add_option("--trees", bo.trees, "trees (forest) or rounds (boost)");
  bench->add_option("--depth", bo.depth, "max tree depth");
  bench->add_option("--lambda2", bo.lambda2, "ridge penalty")->capture_default_str();
  bench->add_option("--learning-rate", bo.learning_rate, "boost learning rate")->capture_default_str();
  bench->add_option("--feature-subsample", bo.feature_subsample, "forest features per split")->capture_default_str();
  bench->add_option("--min-leaf", bo.min_leaf, "minimum rows per leaf")->capture_default_str();
  bench->add_flag("--no-bootstrap", bo.no_bootstrap, "forest without row resampling");
  bench->add_option("--jobs", bo.jobs, "worker threads (default: logical cores)");
  bench->add_option("--report-prefix", bo.prefix, "output path prefix")->required();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("catenc");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const CLI::App* which = &app;
    for (auto* s : {enc, sim, bench})
      if (s->parsed()) which = s;
    out << which->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* which = &app;
    for (auto* s : {enc, sim, bench})
      if (s->parsed()) which = s;
    err << "error: " << e.what() << '\n' << which->help();
    return kExitUsage;
  }

  try {
    if (enc->parsed()) return cmd_encode(eo, out, err);
    if (sim->parsed()) return cmd_simulate(so, out, err);
    return cmd_bench(bo, out, err);
  } catch (const IngestError& e) {
    err << "ingest error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const EncoderError& e) {
    err << "encoder error: " << e.what() << '\n';
    return kExitEncoder;
  } catch (const NumericError& e) {
    err << "encoder error: " << e.what() << '\n';
    return kExitEncoder;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace catenc::cli
