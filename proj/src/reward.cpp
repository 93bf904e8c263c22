#include "polex/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polex/errors.hpp"

namespace polex {

void CostParams::validate() const {
    if (!(discount_factor > 0.0) || !(discount_factor < 1.0)) {
        throw ConfigError("discount_factor must lie in (0,1)");
    }
    if (net_cost_usd_per_person < 0.0 || irs_cost_usd_per_person < 0.0 ||
        hospital_seek_cost_usd < 0.0) {
        throw ConfigError("costs must be >= 0");
    }
    if (!(life_expectancy_years > 0.0)) {
        throw ConfigError("life_expectancy_years must be > 0");
    }
}

double yld(std::span<const EpisodeRecord> episodes) {
    double total = 0.0;
    for (const auto& e : episodes) total += e.duration_years * e.disability_weight;
    return total;
}

double yll(std::span<const DeathRecord> deaths, const CostParams& params) {
    double total = 0.0;
    for (const auto& d : deaths) {
        const double lost = std::max(0.0, params.life_expectancy_years - d.age_years);
        total += lost * std::pow(params.discount_factor, lost);
    }
    return total;
}

double daly(const SimOutcome& outcome, const CostParams& params) {
    return yld(outcome.episodes) + yll(outcome.deaths, params);
}

double total_treatment_cost(std::span<const EpisodeRecord> episodes) {
    double total = 0.0;
    for (const auto& e : episodes) {
        if (e.in_hospital) total += e.treatment_cost_usd;
    }
    return total;
}

double total_recovery_cost(std::span<const EpisodeRecord> episodes) {
    double total = 0.0;
    for (const auto& e : episodes) {
        if (e.in_hospital) total += e.recovery_cost_usd;
    }
    return total;
}

double health_system_cost(const SimOutcome& outcome, const CostParams& params) {
    double total = total_treatment_cost(outcome.episodes) + total_recovery_cost(outcome.episodes);
    std::size_t hospital_episodes = 0;
    for (const auto& e : outcome.episodes) {
        if (e.in_hospital) ++hospital_episodes;
    }
    for (const auto& d : outcome.deaths) {
        if (d.in_hospital) total += d.hospital_death_cost_usd;
    }
    return total + params.hospital_seek_cost_usd * static_cast<double>(hospital_episodes);
}

double intervention_cost(const Policy& policy, std::int64_t population_size,
                         const CostParams& params) {
    if (population_size <= 0) throw DomainError("intervention_cost: population must be positive");
    return static_cast<double>(population_size) *
           (policy.a_itn * params.net_cost_usd_per_person +
            policy.a_irs * params.irs_cost_usd_per_person);
}

CdaResult cost_per_daly_averted(double daly_intervention, double daly_baseline,
                                double hsc_intervention, double hsc_baseline, double c_int) {
    const double averted = daly_baseline - daly_intervention;
    if (!(averted > 0.0)) throw NonPositiveAverted(averted);
    return CdaResult{averted, (hsc_intervention - hsc_baseline + c_int) / averted};
}

double PenaltyConfig::value(double largest_positive_cda) const {
    if (!(largest_positive_cda > 0.0)) return floor;
    return std::max(-scale * largest_positive_cda, floor);
}

void PenaltyState::observe(double c_da) {
    if (std::isfinite(c_da) && c_da > largest_positive_cda) largest_positive_cda = c_da;
}

EconReport make_econ_report(const SimOutcome& intervention, const SimOutcome& baseline,
                            const Policy& policy, const CostParams& costs,
                            const PenaltyConfig& penalty, const PenaltyState& state) {
    EconReport r;
    r.yld = yld(intervention.episodes);
    r.yll = yll(intervention.deaths, costs);
    r.daly = r.yld + r.yll;
    r.ttc_usd = total_treatment_cost(intervention.episodes);
    r.trc_usd = total_recovery_cost(intervention.episodes);
    r.hsc_usd = health_system_cost(intervention, costs);
    r.c_int_usd = intervention_cost(policy, intervention.population_size, costs);

    const double daly_base = daly(baseline, costs);
    const double hsc_base = health_system_cost(baseline, costs);
    try {
        const CdaResult cda =
            cost_per_daly_averted(r.daly, daly_base, r.hsc_usd, hsc_base, r.c_int_usd);
        r.dalys_averted = cda.dalys_averted;
        r.c_da_usd_per_daly = cda.c_da;
        r.reward = reward_from_cda(cda.c_da);
    } catch (const NonPositiveAverted& e) {
        r.dalys_averted = e.dalys_averted();
        r.c_da_usd_per_daly = std::numeric_limits<double>::quiet_NaN();
        r.reward = penalty.value(state.largest_positive_cda);
    }
    return r;
}

}  // namespace polex
