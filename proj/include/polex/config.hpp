#ifndef POLEX_CONFIG_HPP
#define POLEX_CONFIG_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "polex/agents.hpp"
#include "polex/sim.hpp"

namespace polex {

/// GP regression settings shared by the confidence-bound agent and the
/// final surface fit, so surfaces from different agents stay comparable.
struct GpSettings {
    KernelParams kernel;
    double noise_variance = 1e-3;
};

/// Experiment configuration document. The scenario is either the built-in
/// surrogate's parameters or an external-adapter block; all randomness flows
/// from master_seed (no implicit time-based seeding).
struct ExperimentConfig {
    std::optional<ScenarioParams> surrogate;
    std::optional<ExternalAdapterConfig> external;
    GridSpec grid;
    AgentConfig agent;
    GpSettings gp;
    int iterations = 0;
    int batch_size = 0;
    std::uint64_t master_seed = 0;
    std::string output_dir;
    CostParams costs;
    PenaltyConfig penalty;
    int workers = 0;

    ExperimentParams experiment_params() const;
    std::unique_ptr<Simulator> make_simulator() const;
};

/// Strict parse: unknown keys are rejected, required fields are named in
/// errors. Throws ConfigError.
ExperimentConfig experiment_config_from_json(const Json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fully resolved snapshot (all defaults filled in).
Json experiment_config_to_json(const ExperimentConfig& config);

ScenarioParams load_scenario(const std::filesystem::path& path);

}  // namespace polex

#endif  // POLEX_CONFIG_HPP
