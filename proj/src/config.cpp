#include "polex/config.hpp"

#include <fstream>

#include "json_util.hpp"
#include "polex/errors.hpp"

namespace polex {

namespace {

Json parse_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ExternalAdapterConfig external_from_json(const Json& j) {
    require_object(j, {"command", "scenario_path", "timeout_seconds"}, "scenario.external");
    ExternalAdapterConfig config;
    const Json& command = require_field(j, "command", "scenario.external");
    if (!command.is_array() || command.empty()) {
        throw ConfigError("field 'command' in scenario.external must be a non-empty array");
    }
    for (const auto& arg : command) {
        if (!arg.is_string()) {
            throw ConfigError("field 'command' in scenario.external must contain strings");
        }
        config.command.push_back(arg.get<std::string>());
    }
    config.scenario_path = get_string(j, "scenario_path", "scenario.external");
    config.timeout_seconds =
        get_number_or(j, "timeout_seconds", "scenario.external", config.timeout_seconds);
    config.validate();
    return config;
}

Json external_to_json(const ExternalAdapterConfig& config) {
    return Json{{"command", config.command},
                {"scenario_path", config.scenario_path},
                {"timeout_seconds", config.timeout_seconds}};
}

GridSpec grid_from_json(const Json& j) {
    require_object(j, {"resolution_itn", "resolution_irs", "lower", "upper"}, "grid");
    GridSpec grid;
    grid.resolution_itn = get_number_or(j, "resolution_itn", "grid", grid.resolution_itn);
    grid.resolution_irs = get_number_or(j, "resolution_irs", "grid", grid.resolution_irs);
    grid.lower = get_number_or(j, "lower", "grid", grid.lower);
    grid.upper = get_number_or(j, "upper", "grid", grid.upper);
    grid.validate();
    return grid;
}

AgentConfig agent_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("agent must be a JSON object");
    AgentConfig agent;
    agent.kind = agent_kind_from_name(get_string(j, "kind", "agent"));
    switch (agent.kind) {
        case AgentKind::Ulcb:
            require_object(j, {"kind", "mixing_factor", "masking_factor", "beta"}, "agent");
            agent.ulcb.mixing_factor =
                get_number_or(j, "mixing_factor", "agent", agent.ulcb.mixing_factor);
            agent.ulcb.masking_factor =
                get_number_or(j, "masking_factor", "agent", agent.ulcb.masking_factor);
            agent.ulcb.beta = get_number_or(j, "beta", "agent", agent.ulcb.beta);
            break;
        case AgentKind::Ga:
            require_object(j, {"kind", "mutation_probability", "mutation_sd", "component_floor"},
                           "agent");
            agent.ga.mutation_probability =
                get_number_or(j, "mutation_probability", "agent", agent.ga.mutation_probability);
            agent.ga.mutation_sd = get_number_or(j, "mutation_sd", "agent", agent.ga.mutation_sd);
            agent.ga.component_floor =
                get_number_or(j, "component_floor", "agent", agent.ga.component_floor);
            break;
        case AgentKind::Pg:
            require_object(j, {"kind", "epsilon", "learning_rate", "epochs_per_batch"}, "agent");
            agent.pg.epsilon = get_number_or(j, "epsilon", "agent", agent.pg.epsilon);
            agent.pg.learning_rate =
                get_number_or(j, "learning_rate", "agent", agent.pg.learning_rate);
            agent.pg.epochs_per_batch =
                get_number_or(j, "epochs_per_batch", "agent", agent.pg.epochs_per_batch);
            break;
    }
    return agent;
}

Json agent_to_json(const AgentConfig& agent) {
    switch (agent.kind) {
        case AgentKind::Ulcb:
            return Json{{"kind", "ulcb"},
                        {"mixing_factor", agent.ulcb.mixing_factor},
                        {"masking_factor", agent.ulcb.masking_factor},
                        {"beta", agent.ulcb.beta}};
        case AgentKind::Ga:
            return Json{{"kind", "ga"},
                        {"mutation_probability", agent.ga.mutation_probability},
                        {"mutation_sd", agent.ga.mutation_sd},
                        {"component_floor", agent.ga.component_floor}};
        case AgentKind::Pg:
            return Json{{"kind", "pg"},
                        {"epsilon", agent.pg.epsilon},
                        {"learning_rate", agent.pg.learning_rate},
                        {"epochs_per_batch", agent.pg.epochs_per_batch}};
    }
    throw ConfigError("unknown agent kind");
}

GpSettings gp_from_json(const Json& j) {
    require_object(j, {"lengthscale", "signal_variance", "noise_variance"}, "gp");
    GpSettings gp;
    gp.kernel.lengthscale = get_number_or(j, "lengthscale", "gp", gp.kernel.lengthscale);
    gp.kernel.signal_variance =
        get_number_or(j, "signal_variance", "gp", gp.kernel.signal_variance);
    gp.noise_variance = get_number_or(j, "noise_variance", "gp", gp.noise_variance);
    gp.kernel.validate();
    if (!(gp.noise_variance > 0.0)) throw ConfigError("gp.noise_variance must be positive");
    return gp;
}

CostParams costs_from_json(const Json& j) {
    require_object(j,
                   {"net_cost_usd_per_person", "irs_cost_usd_per_person", "hospital_seek_cost_usd",
                    "discount_factor", "life_expectancy_years"},
                   "costs");
    CostParams costs;
    costs.net_cost_usd_per_person =
        get_number_or(j, "net_cost_usd_per_person", "costs", costs.net_cost_usd_per_person);
    costs.irs_cost_usd_per_person =
        get_number_or(j, "irs_cost_usd_per_person", "costs", costs.irs_cost_usd_per_person);
    costs.hospital_seek_cost_usd =
        get_number_or(j, "hospital_seek_cost_usd", "costs", costs.hospital_seek_cost_usd);
    costs.discount_factor = get_number_or(j, "discount_factor", "costs", costs.discount_factor);
    costs.life_expectancy_years =
        get_number_or(j, "life_expectancy_years", "costs", costs.life_expectancy_years);
    costs.validate();
    return costs;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const Json& j) {
    require_object(j,
                   {"scenario", "grid", "agent", "gp", "iterations", "batch_size", "master_seed",
                    "output_dir", "costs", "penalty", "workers"},
                   "config");
    ExperimentConfig config;

    const Json& scenario = require_field(j, "scenario", "config");
    if (!scenario.is_object()) throw ConfigError("field 'scenario' in config must be an object");
    if (scenario.contains("external")) {
        require_object(scenario, {"external"}, "scenario");
        config.external = external_from_json(scenario["external"]);
    } else {
        config.surrogate = scenario_from_json(scenario);
    }

    if (auto it = j.find("grid"); it != j.end()) config.grid = grid_from_json(*it);
    config.agent = agent_from_json(require_field(j, "agent", "config"));
    if (auto it = j.find("gp"); it != j.end()) config.gp = gp_from_json(*it);
    config.iterations = get_number<int>(j, "iterations", "config");
    config.batch_size = get_number<int>(j, "batch_size", "config");
    config.master_seed = get_number<std::uint64_t>(j, "master_seed", "config");
    if (auto it = j.find("output_dir"); it != j.end()) {
        if (!it->is_string()) throw ConfigError("field 'output_dir' in config must be a string");
        config.output_dir = it->get<std::string>();
    }
    if (auto it = j.find("costs"); it != j.end()) config.costs = costs_from_json(*it);
    if (auto it = j.find("penalty"); it != j.end()) {
        require_object(*it, {"scale", "floor"}, "penalty");
        config.penalty.scale = get_number_or(*it, "scale", "penalty", config.penalty.scale);
        config.penalty.floor = get_number_or(*it, "floor", "penalty", config.penalty.floor);
    }
    config.workers = get_number_or(j, "workers", "config", config.workers);

    if (config.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");

    // The confidence-bound agent regresses with the shared GP settings.
    config.agent.ulcb.kernel = config.gp.kernel;
    config.agent.ulcb.noise_variance = config.gp.noise_variance;
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_config_from_json(parse_json_file(path, "config"));
}

Json experiment_config_to_json(const ExperimentConfig& config) {
    Json scenario;
    if (config.external) {
        scenario = Json{{"external", external_to_json(*config.external)}};
    } else {
        scenario = scenario_to_json(*config.surrogate);
    }
    return Json{{"scenario", std::move(scenario)},
                {"grid", Json{{"resolution_itn", config.grid.resolution_itn},
                              {"resolution_irs", config.grid.resolution_irs},
                              {"lower", config.grid.lower},
                              {"upper", config.grid.upper}}},
                {"agent", agent_to_json(config.agent)},
                {"gp", Json{{"lengthscale", config.gp.kernel.lengthscale},
                            {"signal_variance", config.gp.kernel.signal_variance},
                            {"noise_variance", config.gp.noise_variance}}},
                {"iterations", config.iterations},
                {"batch_size", config.batch_size},
                {"master_seed", config.master_seed},
                {"output_dir", config.output_dir},
                {"costs", Json{{"net_cost_usd_per_person", config.costs.net_cost_usd_per_person},
                               {"irs_cost_usd_per_person", config.costs.irs_cost_usd_per_person},
                               {"hospital_seek_cost_usd", config.costs.hospital_seek_cost_usd},
                               {"discount_factor", config.costs.discount_factor},
                               {"life_expectancy_years", config.costs.life_expectancy_years}}},
                {"penalty", Json{{"scale", config.penalty.scale}, {"floor", config.penalty.floor}}},
                {"workers", config.workers}};
}

ExperimentParams ExperimentConfig::experiment_params() const {
    ExperimentParams params;
    params.agent = agent;
    params.grid = grid;
    params.iterations = iterations;
    params.batch_size = batch_size;
    params.master_seed = master_seed;
    params.costs = costs;
    params.penalty = penalty;
    params.worker_cap = workers;
    return params;
}

std::unique_ptr<Simulator> ExperimentConfig::make_simulator() const {
    if (external) return std::make_unique<ExternalSimulator>(*external);
    return std::make_unique<SurrogateSimulator>(*surrogate);
}

ScenarioParams load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(parse_json_file(path, "scenario"));
}

}  // namespace polex
