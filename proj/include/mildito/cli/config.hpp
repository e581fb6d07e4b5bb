#pragma once

// Experiment configuration for the `mildito` runner. The file format is JSON;
// every key is optional and falls back to the defaults below.

#include "mildito/mild_calculus.hpp"
#include "mildito/mild_process.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mildito::cli {

inline const std::vector<std::string> kSuites = {"gamma", "nemytskii", "simulate", "ito", "dynkin", "weak", "all"};

/// Invalid configuration; the message names the violated hypothesis.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string suite = "all";

    // Truncation and time grid.
    int modes = 32;         // N
    int noise_modes = 32;   // K
    int resolution = 256;   // J
    int steps = 400;        // M_t
    double t0 = 0.0;
    double terminal = 0.1;  // T

    // Monte Carlo.
    int paths = 2000;
    int mc_samples = 10000;
    std::uint64_t seed = 1;
    int workers = 1;

    // Process: evolution family, drift, diffusion, X_0 = initial_amplitude * e_1.
    std::string family = "heat";        // heat | identity
    std::string drift = "zero";         // zero | nemytskii | linear
    double drift_rate = 1.0;            // c for drift = linear (Y = -c x)
    std::string diffusion = "identity"; // identity | zero | coefficient
    double initial_amplitude = 0.0;

    // Fields, test function and stopping.
    std::string field = "tanh";
    std::string phi = "squared_norm";
    std::string stopping = "terminal";  // terminal | hitting
    double hitting_level = 0.5;

    // Exponents.
    int order = 1;     // n
    double p = 8.0;
    double q = 32.0;
    double r = 0.3;
    double beta = -0.5;
    double eps = 0.05;
    std::optional<double> delta;  // n/(n+1) if absent

    std::string out = "out";

    double delta_or_default() const { return delta.value_or(static_cast<double>(order) / (order + 1.0)); }
    /// Suites expanded from `all`.
    std::vector<std::string> suites() const;
};

/// Applies the keys of `j` on top of `base`; unknown keys and wrong types throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
nlohmann::json to_json(const ExperimentConfig& c);

/// Checks every hypothesis the selected suites rely on; throws ConfigError naming the first violation.
void validate(const ExperimentConfig& c);

/// The process described by the config.
MildItoProcessSpec build_process(const ExperimentConfig& c);
DiffusionCoefficient build_diffusion(const ExperimentConfig& c);
StoppingRule build_stopping(const ExperimentConfig& c);

}  // namespace mildito::cli
