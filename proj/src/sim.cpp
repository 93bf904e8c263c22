#include "polex/sim.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "polex/errors.hpp"
#include "subprocess.hpp"

namespace polex {

namespace {

constexpr double kDaysPerYear = 365.0;

// Stream tags keep policy, baseline and agent streams disjoint.
constexpr std::uint64_t kPolicyStreamTag = 0x706f6c6963795354ULL;
constexpr std::uint64_t kBaselineStreamTag = 0x626173656c696e65ULL;

std::uint64_t stream_seed_for(std::uint64_t scenario_seed, std::uint64_t policy_tag,
                              std::int64_t replicate) {
    std::uint64_t h = mix64(scenario_seed);
    h = hash_combine(h, policy_tag);
    h = hash_combine(h, static_cast<std::uint64_t>(replicate));
    return h;
}

}  // namespace

std::vector<AgeBand> default_age_bands() {
    // Young age pyramid typical of high-burden settings.
    return {
        {0.0, 5.0, 0.16}, {5.0, 15.0, 0.26},  {15.0, 30.0, 0.28},
        {30.0, 50.0, 0.18}, {50.0, 70.0, 0.09}, {70.0, 100.0, 0.03},
    };
}

std::vector<DisabilityBand> default_disability_weights() {
    return {{5.0, 0.21}, {15.0, 0.17}, {100.0, 0.13}};
}

ScenarioParams::ScenarioParams()
    : age_bands(default_age_bands()), disability_weights(default_disability_weights()) {}

void ScenarioParams::validate() const {
    if (population_size <= 0) throw ConfigError("population_size must be positive");
    if (!(horizon_years > 0.0)) throw ConfigError("horizon_years must be positive");
    if (!(baseline_episodes_per_person_year > 0.0)) {
        throw ConfigError("baseline_episodes_per_person_year must be positive");
    }
    auto check_prob = [](double v, const char* name) {
        if (v < 0.0 || v > 1.0) throw ConfigError(std::string(name) + " must lie in [0,1]");
    };
    check_prob(itn_efficacy, "itn_efficacy");
    check_prob(irs_efficacy, "irs_efficacy");
    check_prob(case_fatality_per_episode, "case_fatality_per_episode");
    check_prob(hospital_seek_probability, "hospital_seek_probability");
    if (!(mean_episode_duration_days > 0.0)) {
        throw ConfigError("mean_episode_duration_days must be positive");
    }
    if (treatment_cost_usd < 0.0 || recovery_cost_usd < 0.0 || hospital_death_cost_usd < 0.0) {
        throw ConfigError("cost table entries must be >= 0");
    }

    if (age_bands.empty()) throw ConfigError("age_bands must not be empty");
    double weight_sum = 0.0;
    double covered_to = 0.0;
    for (const auto& band : age_bands) {
        if (!(band.max_age > band.min_age) || band.min_age < 0.0) {
            throw ConfigError("age_bands entries must satisfy 0 <= min_age < max_age");
        }
        if (band.weight < 0.0) throw ConfigError("age_bands weights must be >= 0");
        if (band.min_age > covered_to) throw ConfigError("age_bands must cover ages 0-100 without gaps");
        covered_to = std::max(covered_to, band.max_age);
        weight_sum += band.weight;
    }
    if (covered_to < 100.0) throw ConfigError("age_bands must cover ages up to 100");
    if (!(weight_sum > 0.0)) throw ConfigError("age_bands weights must have positive sum");

    if (disability_weights.empty()) throw ConfigError("disability_weights must not be empty");
    double prev = 0.0;
    for (const auto& band : disability_weights) {
        if (band.max_age <= prev) {
            throw ConfigError("disability_weights must be sorted ascending by max_age");
        }
        if (band.weight < 0.0 || band.weight > 1.0) {
            throw ConfigError("disability weights must lie in [0,1]");
        }
        prev = band.max_age;
    }
    if (disability_weights.back().max_age < 100.0) {
        throw ConfigError("disability_weights must cover ages up to 100");
    }
}

std::uint64_t ScenarioParams::stable_hash() const {
    std::uint64_t h = mix64(0x7363656e6172696fULL);
    h = hash_combine(h, static_cast<std::uint64_t>(population_size));
    for (double v : {horizon_years, baseline_episodes_per_person_year, itn_efficacy, irs_efficacy,
                     case_fatality_per_episode, hospital_seek_probability,
                     mean_episode_duration_days, treatment_cost_usd, recovery_cost_usd,
                     hospital_death_cost_usd}) {
        h = hash_combine(h, hash_double(v));
    }
    for (const auto& band : age_bands) {
        h = hash_combine(h, hash_double(band.min_age));
        h = hash_combine(h, hash_double(band.max_age));
        h = hash_combine(h, hash_double(band.weight));
    }
    for (const auto& band : disability_weights) {
        h = hash_combine(h, hash_double(band.max_age));
        h = hash_combine(h, hash_double(band.weight));
    }
    return h;
}

double ScenarioParams::disability_weight_for(double age_years) const {
    for (const auto& band : disability_weights) {
        if (age_years < band.max_age) return band.weight;
    }
    return disability_weights.back().weight;
}

double transmission_multiplier(const ScenarioParams& params, const Policy& policy) {
    return (1.0 - params.itn_efficacy * policy.a_itn) * (1.0 - params.irs_efficacy * policy.a_irs);
}

SurrogateSimulator::SurrogateSimulator(ScenarioParams params) : params_(std::move(params)) {
    params_.validate();
    hash_ = params_.stable_hash();
}

SimOutcome SurrogateSimulator::simulate(const Policy& policy, const SimSeed& seed) {
    policy.validate();
    const double m = transmission_multiplier(params_, policy);
    return run(m, stream_seed_for(seed.scenario_seed,
                                  hash_combine(kPolicyStreamTag, hash_policy(policy)),
                                  seed.replicate));
}

SimOutcome SurrogateSimulator::baseline(const SimSeed& seed) {
    // Multiplier 1 and a stream independent of policy and efficacy fields.
    return run(1.0, stream_seed_for(seed.scenario_seed, kBaselineStreamTag, seed.replicate));
}

SimOutcome SurrogateSimulator::run(double multiplier, std::uint64_t stream_seed) const {
    RngStream rng(stream_seed);
    SimOutcome outcome;
    outcome.population_size = params_.population_size;

    std::vector<double> band_weights;
    band_weights.reserve(params_.age_bands.size());
    for (const auto& band : params_.age_bands) band_weights.push_back(band.weight);

    const double lambda =
        params_.baseline_episodes_per_person_year * params_.horizon_years * multiplier;
    const double mean_duration_years = params_.mean_episode_duration_days / kDaysPerYear;

    for (std::int64_t person = 0; person < params_.population_size; ++person) {
        const std::uint64_t episodes = lambda > 0.0 ? rng.poisson(lambda) : 0;
        bool died = false;
        for (std::uint64_t k = 0; k < episodes; ++k) {
            const auto& band = params_.age_bands[rng.discrete(band_weights)];
            const double age =
                band.min_age + rng.next_unit() * (band.max_age - band.min_age);

            EpisodeRecord episode;
            episode.age_years = age;
            episode.duration_years = rng.exponential(mean_duration_years);
            episode.disability_weight = params_.disability_weight_for(age);
            episode.in_hospital = rng.bernoulli(params_.hospital_seek_probability);
            if (episode.in_hospital) {
                episode.treatment_cost_usd = params_.treatment_cost_usd;
                episode.recovery_cost_usd = params_.recovery_cost_usd;
            }
            outcome.episodes.push_back(episode);

            // First fatal episode wins; later episodes still contribute YLD.
            if (rng.bernoulli(params_.case_fatality_per_episode) && !died) {
                died = true;
                DeathRecord death;
                death.age_years = age;
                death.in_hospital = episode.in_hospital;
                death.hospital_death_cost_usd =
                    episode.in_hospital ? params_.hospital_death_cost_usd : 0.0;
                outcome.deaths.push_back(death);
            }
        }
    }
    return outcome;
}

void ExternalAdapterConfig::validate() const {
    if (command.empty()) throw ConfigError("external adapter command must not be empty");
    if (scenario_path.empty()) throw ConfigError("external adapter scenario_path must not be empty");
    if (!(timeout_seconds > 0.0)) throw ConfigError("external adapter timeout must be positive");
}

std::uint64_t ExternalAdapterConfig::stable_hash() const {
    std::uint64_t h = mix64(0x65787465726e616cULL);
    for (const auto& arg : command) {
        for (char c : arg) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        h = hash_combine(h, 0x1f);
    }
    for (char c : scenario_path) {
        h = hash_combine(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    }
    return h;
}

namespace {

std::string format_policy_arg(double a_itn, double a_irs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", a_itn, a_irs);
    return buf;
}

std::vector<std::string> build_argv(const ExternalAdapterConfig& adapter, double a_itn,
                                    double a_irs, std::uint64_t stream_seed) {
    const std::string policy_arg = format_policy_arg(a_itn, a_irs);
    const std::string seed_arg = std::to_string(stream_seed);
    bool saw_scenario = false;
    bool saw_policy = false;
    bool saw_seed = false;
    std::vector<std::string> argv;
    argv.reserve(adapter.command.size() + 5);
    for (const auto& arg : adapter.command) {
        if (arg == "{scenario}") {
            argv.push_back(adapter.scenario_path);
            saw_scenario = true;
        } else if (arg == "{policy}") {
            argv.push_back(policy_arg);
            saw_policy = true;
        } else if (arg == "{seed}") {
            argv.push_back(seed_arg);
            saw_seed = true;
        } else {
            argv.push_back(arg);
        }
    }
    if (!saw_scenario) argv.push_back(adapter.scenario_path);
    if (!saw_policy) {
        argv.push_back("--policy");
        argv.push_back(policy_arg);
    }
    if (!saw_seed) {
        argv.push_back("--seed");
        argv.push_back(seed_arg);
    }
    return argv;
}

SimOutcome run_external_raw(const ExternalAdapterConfig& adapter, double a_itn, double a_irs,
                            std::uint64_t stream_seed) {
    adapter.validate();
    const auto argv = build_argv(adapter, a_itn, a_irs, stream_seed);
    const ProcessResult proc = run_process(argv, adapter.timeout_seconds);
    if (proc.timed_out) {
        throw ExternalSimError("external simulator timed out after " +
                                   std::to_string(adapter.timeout_seconds) + "s",
                               proc.err);
    }
    if (proc.exit_code != 0) {
        throw ExternalSimError("external simulator exited with status " +
                                   std::to_string(proc.exit_code),
                               proc.err);
    }
    Json parsed;
    try {
        parsed = Json::parse(proc.out);
    } catch (const Json::parse_error& e) {
        throw ExternalSimError(std::string("malformed external simulator output: ") + e.what(),
                               proc.out.substr(0, 512));
    }
    return outcome_from_json(parsed);
}

}  // namespace

SimOutcome run_external(const ExternalAdapterConfig& adapter, const Policy& policy,
                        const SimSeed& seed) {
    policy.validate();
    const std::uint64_t stream_seed = stream_seed_for(
        seed.scenario_seed, hash_combine(kPolicyStreamTag, hash_policy(policy)), seed.replicate);
    return run_external_raw(adapter, policy.a_itn, policy.a_irs, stream_seed);
}

ExternalSimulator::ExternalSimulator(ExternalAdapterConfig config) : config_(std::move(config)) {
    config_.validate();
    hash_ = config_.stable_hash();
}

SimOutcome ExternalSimulator::simulate(const Policy& policy, const SimSeed& seed) {
    return run_external(config_, policy, seed);
}

SimOutcome ExternalSimulator::baseline(const SimSeed& seed) {
    const std::uint64_t stream_seed =
        stream_seed_for(seed.scenario_seed, kBaselineStreamTag, seed.replicate);
    return run_external_raw(config_, 0.0, 0.0, stream_seed);
}

}  // namespace polex
