#pragma once

// JSON and CSV serialisation of benchmark results and configs.

#include "catenc/eval.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace catenc {

using Json = nlohmann::ordered_json;

Json to_json(const EncoderSpec& spec);
Json to_json(const LearnerSpec& spec);
Json to_json(const SynthConfig& cfg);
Json to_json(const BenchReport& report);
Json to_json(const SweepResult& sweep);

// Missing keys keep their defaults; unknown keys throw InvalidArgument.
SynthConfig synth_config_from_json(const Json& j);
std::vector<SynthConfig> synth_grid_from_json(const Json& j);

// encoder, mean_mse, improvement_pct, t, p. Skipped encoders get NA cells.
void write_report_csv(std::ostream& out, const BenchReport& report);
// setup, seed, then the report columns; one row per cell and encoder.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
// One row per setup, one median-improvement column per encoder.
void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep);

std::string format_table(const BenchReport& report);
std::string format_sweep_table(const SweepResult& sweep);

}  // namespace catenc
