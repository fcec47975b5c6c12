#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "herdsim/market_series.hpp"
#include "herdsim/model_params.hpp"
#include "herdsim/reduced_sde.hpp"

namespace herdsim {

enum class Command { simulate, reduced, microsim, intervals, psd, pdf, ablate, ingest };

Command command_from_name(const std::string& name);
std::string command_name(Command c);

enum class OutputFormat { csv, json };

/// Fully resolved run description: every CLI invocation and every figure
/// recipe reduces to one of these.
struct RunConfig {
    Command command = Command::simulate;
    ModelParams params;
    NoiseConfig mode = NoiseConfig::from_mode('D');
    double delta_days = 1.0 / 390.0; ///< aggregation window Delta
    std::vector<double> thresholds = {2.0};
    std::vector<std::uint64_t> seeds = {1};
    std::size_t n_ticks = 2'000'000;
    std::size_t burn_in = 100'000;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::csv;

    // reduced-SDE runs
    ReducedParams reduced;
    std::size_t reduced_samples = 1'000'000;
    double reduced_sample_dt = 1e-3;

    // microsim runs
    std::int64_t micro_agents = 1000;
    std::uint64_t micro_events = 1'000'000;
    double micro_sample_dt = 0.01;

    // ingest runs
    std::string input_csv;

    void validate() const;
};

/// Parse a flat `key = value` file ('#' comments allowed) and apply flag
/// overrides on top. Unknown keys, type mismatches and constraint
/// violations raise ConfigError naming the key. The HERDSIM_OUT environment
/// variable, when set, overrides the output directory.
RunConfig parse_config(std::istream& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Apply one key/value assignment (shared by file lines and flags).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace herdsim
