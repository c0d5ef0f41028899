#pragma once

// Experiment drivers behind the command-line subcommands. Each driver streams
// its data rows (CSV, or JSON Lines for `exact --format json`) to an ostream
// and returns a report holding the summary and the manifest.
//
// Randomness: instance i uses the percolation seed derive_seed(seed, i, 0);
// its t-th Monte Carlo trial uses an xoshiro256** stream seeded with
// derive_seed(seed, i, t + 1). Rows are emitted in (instance, trial) order, so
// the output does not depend on the worker count.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubeperc/samplers.hpp"
#include "cubeperc/weights.hpp"

namespace cubeperc {

enum class Command { Exact, Clt, Critical, Birthday, Sample, Census };

const char* to_string(Command c) noexcept;

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    Command command = Command::Exact;
    int d = 4;
    std::optional<double> p;  ///< defaults to p_c(λ) for the critical command
    double lambda = 1.0;
    std::optional<Regime> regime;
    std::uint64_t seed = 1;
    std::uint64_t instances = 1;
    /// Monte Carlo trials (birthday draws, samples) per instance.
    std::uint64_t trials = 1000;
    std::optional<std::uint64_t> n;  ///< birthday sample size; default round(μ)
    OutputFormat format = OutputFormat::Csv;
    unsigned workers = 0;  ///< 0 = hardware concurrency
    bool oracle = false;
    bool with_exact = false;
    SamplerVariant variant = SamplerVariant::Tilted;
    std::string sampler = "approx";  ///< approx | uniform
    std::vector<int> d_grid;
    bool accept = false;
};

struct Report {
    nlohmann::ordered_json summary;
    nlohmann::ordered_json manifest;
    bool passed = true;
    std::vector<std::string> failures;
};

Report run_experiment(const ExperimentConfig& cfg, std::ostream& data);

Report cmd_exact(const ExperimentConfig& cfg, std::ostream& data);
Report cmd_clt(const ExperimentConfig& cfg, std::ostream& data);
Report cmd_critical(const ExperimentConfig& cfg, std::ostream& data);
Report cmd_birthday(const ExperimentConfig& cfg, std::ostream& data);
Report cmd_sample(const ExperimentConfig& cfg, std::ostream& data);
Report cmd_census(const ExperimentConfig& cfg, std::ostream& data);

/// Calls fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). fn must write only to its own slot.
void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& fn);

/// Shortest round-trip decimal form of a double ("nan", "inf" for non-finite values).
std::string format_number(double x);

/// Theory constants without the regime validation of make_params; ζ is the
/// critical value when p equals p_c(λ) to 1e-12 and 1 otherwise.
TheoryConstants constants_for(int d, double p, double lambda);

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

}  // namespace cubeperc
