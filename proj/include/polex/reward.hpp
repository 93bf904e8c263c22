#ifndef POLEX_REWARD_HPP
#define POLEX_REWARD_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "polex/policy.hpp"

namespace polex {

/// One malaria episode as reported by the simulation. Durations are stored
/// in years (the simulator converts from days at generation time).
/// Treatment/recovery costs are zero unless the episode was treated in
/// hospital.
struct EpisodeRecord {
    double age_years = 0.0;
    double duration_years = 0.0;
    double disability_weight = 0.0;  // in [0,1]
    bool in_hospital = false;
    double treatment_cost_usd = 0.0;
    double recovery_cost_usd = 0.0;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// One malaria-attributable death. hospital_death_cost_usd is zero unless
/// the death occurred in hospital.
struct DeathRecord {
    double age_years = 0.0;
    bool in_hospital = false;
    double hospital_death_cost_usd = 0.0;

    friend bool operator==(const DeathRecord&, const DeathRecord&) = default;
};

/// Everything the reward model consumes from one simulation run.
struct SimOutcome {
    std::vector<EpisodeRecord> episodes;
    std::vector<DeathRecord> deaths;
    std::int64_t population_size = 0;

    friend bool operator==(const SimOutcome&, const SimOutcome&) = default;
};

/// Unit costs and discounting constants for the economics.
struct CostParams {
    double net_cost_usd_per_person = 8.52;
    double irs_cost_usd_per_person = 0.73;
    double hospital_seek_cost_usd = 0.60;
    double discount_factor = 0.97;       // gamma, applied to years of life lost
    double life_expectancy_years = 46.6;

    void validate() const;  // throws ConfigError
};

/// Derived economics for one (policy, baseline) comparison. c_da is NaN when
/// the policy averted no DALYs (see PenaltyConfig).
struct EconReport {
    double yld = 0.0;
    double yll = 0.0;
    double daly = 0.0;
    double ttc_usd = 0.0;
    double trc_usd = 0.0;
    double hsc_usd = 0.0;
    double c_int_usd = 0.0;
    double dalys_averted = 0.0;
    double c_da_usd_per_daly = 0.0;
    double reward = 0.0;
};

/// Years lived with disability: sum of duration x disability weight.
double yld(std::span<const EpisodeRecord> episodes);

/// Years of life lost: per death, max(0, L - age) discounted by
/// gamma^(years lost).
double yll(std::span<const DeathRecord> deaths, const CostParams& params);

double daly(const SimOutcome& outcome, const CostParams& params);

/// Sum of in-hospital treatment costs (TTC).
double total_treatment_cost(std::span<const EpisodeRecord> episodes);
/// Sum of in-hospital recovery costs (TRC).
double total_recovery_cost(std::span<const EpisodeRecord> episodes);

/// TTC + TRC + in-hospital death costs + one seek cost per in-hospital
/// episode.
double health_system_cost(const SimOutcome& outcome, const CostParams& params);

/// population x (a_itn x net cost + a_irs x spray cost). Population must be
/// positive.
double intervention_cost(const Policy& policy, std::int64_t population_size,
                         const CostParams& params);

struct CdaResult {
    double dalys_averted = 0.0;
    double c_da = 0.0;
};

/// Cost per DALY averted: (HSC_int - HSC_baseline + C_int) / DA with
/// DA = DALY_baseline - DALY_int. Throws NonPositiveAverted when DA <= 0.
CdaResult cost_per_daly_averted(double daly_intervention, double daly_baseline,
                                double hsc_intervention, double hsc_baseline, double c_int);

/// Scalar reward: lower cost per DALY averted is better.
inline double reward_from_cda(double c_da) { return -c_da; }

/// Reward assigned to policies that avert nothing. Scales with the worst
/// cost-effectiveness seen so far so the value stays on the problem's scale,
/// with a hard floor.
struct PenaltyConfig {
    double scale = 10.0;
    double floor = -1e6;

    /// largest_positive_cda <= 0 means no positive C_DA observed yet.
    double value(double largest_positive_cda) const;
};

/// Running state needed to price penalty rewards deterministically.
struct PenaltyState {
    double largest_positive_cda = 0.0;

    void observe(double c_da);
};

/// Builds the full report for one policy run against a shared baseline run.
EconReport make_econ_report(const SimOutcome& intervention, const SimOutcome& baseline,
                            const Policy& policy, const CostParams& costs,
                            const PenaltyConfig& penalty, const PenaltyState& state);

}  // namespace polex

#endif  // POLEX_REWARD_HPP
