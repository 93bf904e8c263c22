#ifndef POLEX_SIM_HPP
#define POLEX_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "polex/policy.hpp"
#include "polex/reward.hpp"
#include "polex/rng.hpp"

namespace polex {

using Json = nlohmann::ordered_json;

/// Population age band: ages are uniform within [min_age, max_age); weight
/// is the band's share of the population (weights are normalized on use).
struct AgeBand {
    double min_age = 0.0;
    double max_age = 0.0;
    double weight = 0.0;
};

/// Disability weight applied to episodes of anyone younger than max_age
/// (first matching band wins; bands must be sorted ascending by max_age).
struct DisabilityBand {
    double max_age = 0.0;
    double weight = 0.0;
};

/// Parameterisation of the built-in stochastic epidemic surrogate. Defaults
/// are illustrative, not calibrated to any real site; every field is exposed
/// in the scenario config so the surrogate can be re-parameterised.
struct ScenarioParams {
    std::int64_t population_size = 100000;
    double horizon_years = 5.0;
    double baseline_episodes_per_person_year = 0.35;
    double itn_efficacy = 0.55;   // exposure reduction at full net coverage
    double irs_efficacy = 0.30;   // exposure reduction at full spray coverage
    double case_fatality_per_episode = 0.0035;
    double hospital_seek_probability = 0.40;
    double mean_episode_duration_days = 12.0;
    std::vector<AgeBand> age_bands;
    std::vector<DisabilityBand> disability_weights;
    double treatment_cost_usd = 4.20;      // per in-hospital episode
    double recovery_cost_usd = 2.10;       // per in-hospital episode
    double hospital_death_cost_usd = 25.0; // per in-hospital death

    ScenarioParams();

    void validate() const;  // throws ConfigError

    /// Stable content hash (used as the baseline cache key component).
    std::uint64_t stable_hash() const;

    double disability_weight_for(double age_years) const;
};

std::vector<AgeBand> default_age_bands();
std::vector<DisabilityBand> default_disability_weights();

/// Identifies one stochastic replicate. The simulator's draw stream is a
/// SplitMix64 stream seeded by hashing (scenario_seed, policy, replicate),
/// so identical inputs always reproduce the same outcome bit for bit.
struct SimSeed {
    std::uint64_t scenario_seed = 0;
    std::int64_t replicate = 0;

    friend bool operator==(const SimSeed&, const SimSeed&) = default;
};

/// Exposure multiplier m = (1 - e_itn * a_itn) * (1 - e_irs * a_irs).
/// m = 1 corresponds to no intervention.
double transmission_multiplier(const ScenarioParams& params, const Policy& policy);

/// Source of stochastic outcomes for policies and for the no-intervention
/// baseline. Implementations must be pure functions of (params, policy,
/// seed) and safe for concurrent calls.
class Simulator {
public:
    virtual ~Simulator() = default;

    virtual SimOutcome simulate(const Policy& policy, const SimSeed& seed) = 0;

    /// No-intervention arm required by the cost-per-DALY-averted comparison.
    virtual SimOutcome baseline(const SimSeed& seed) = 0;

    /// Stable identity of the underlying scenario, for baseline caching.
    virtual std::uint64_t scenario_hash() const = 0;
};

/// Built-in seedable epidemic surrogate. Per person, the episode count is
/// Poisson(lambda0 * horizon * m(policy)); each episode draws an age from
/// the demography, an exponential duration, a hospital flag, and kills with
/// the case-fatality probability (at most one death per person; the first
/// fatal episode wins).
class SurrogateSimulator final : public Simulator {
public:
    explicit SurrogateSimulator(ScenarioParams params);

    SimOutcome simulate(const Policy& policy, const SimSeed& seed) override;
    SimOutcome baseline(const SimSeed& seed) override;
    std::uint64_t scenario_hash() const override { return hash_; }

    const ScenarioParams& params() const { return params_; }

private:
    SimOutcome run(double multiplier, std::uint64_t stream_seed) const;

    ScenarioParams params_;
    std::uint64_t hash_;
};

/// Configuration for delegating simulation to an external process. The
/// command is an argv template; occurrences of {scenario}, {policy} and
/// {seed} are substituted, and any of the three that are absent from the
/// template are appended as "<scenario> --policy itn,irs --seed N".
struct ExternalAdapterConfig {
    std::vector<std::string> command;
    std::string scenario_path;
    double timeout_seconds = 60.0;

    void validate() const;  // throws ConfigError
    std::uint64_t stable_hash() const;
};

/// Spawns the configured command and parses exactly one outcome record from
/// its standard output. Throws ExternalSimError with captured diagnostics on
/// process failure, timeout, or malformed output.
SimOutcome run_external(const ExternalAdapterConfig& adapter, const Policy& policy,
                        const SimSeed& seed);

/// Simulator backed by an external process. The baseline arm is requested as
/// policy "0,0" (zero coverage = no intervention).
class ExternalSimulator final : public Simulator {
public:
    explicit ExternalSimulator(ExternalAdapterConfig config);

    SimOutcome simulate(const Policy& policy, const SimSeed& seed) override;
    SimOutcome baseline(const SimSeed& seed) override;
    std::uint64_t scenario_hash() const override { return hash_; }

private:
    ExternalAdapterConfig config_;
    std::uint64_t hash_;
};

/// Wire format for outcome records exchanged with external simulators
/// (durations cross the wire in days):
///   {"population_size": N,
///    "episodes": [{"age","duration_days","weight","in_hospital",
///                  "treat_cost","recover_cost"}, ...],
///    "deaths":   [{"age","in_hospital","death_cost"}, ...]}
Json outcome_to_json(const SimOutcome& outcome);
SimOutcome outcome_from_json(const Json& j);  // strict; throws ExternalSimError

/// Scenario config document (JSON, every ScenarioParams field, unknown
/// fields rejected).
Json scenario_to_json(const ScenarioParams& params);
ScenarioParams scenario_from_json(const Json& j);  // throws ConfigError

}  // namespace polex

#endif  // POLEX_SIM_HPP
