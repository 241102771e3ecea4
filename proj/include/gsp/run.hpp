#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsp/montecarlo.hpp"

namespace gsp {

inline constexpr const char* kGspLabVersion = "0.1.0";

struct RunConfig {
    std::string command;  // sweep | frontier | dominance | replay | verify | condcheck
    std::string config_path;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed_override;
    std::optional<long> trials_override;
};

// Execute one command end to end: parse the config, run the experiment,
// write result files plus manifest.json into the output directory. Returns
// the process exit code: 0 success, 2 bad configuration, 3 runtime failure.
int run(const RunConfig& config);
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct PlotRow {
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
};

// Whitespace-separated x / y / y_err rows for generic plotting tools.
void emit_plotdata(const std::vector<PlotRow>& rows, const std::string& path);

// CSV scalar formatting: %.17g so every double survives a write/read round
// trip; NaN becomes an empty field and an empty field parses back to NaN.
std::string format_csv_value(double v);
double parse_csv_value(const std::string& field);

std::uint64_t fnv1a64(const std::string& bytes);

void write_sweep_csv(std::ostream& out, const std::vector<OperatingPoint>& points);
std::vector<OperatingPoint> read_sweep_csv(std::istream& in);

// Parse the JSON experiment description shared by the sweep and frontier
// commands. Throws ConfigError on any schema or value problem.
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace gsp
