#include <cmath>

#include "json_util.hpp"
#include "polex/errors.hpp"
#include "polex/sim.hpp"

namespace polex {

namespace {

constexpr double kDaysPerYear = 365.0;

[[noreturn]] void malformed(const std::string& why) {
    throw ExternalSimError("malformed outcome record: " + why, "");
}

double outcome_number(const Json& j, const char* name, const char* where) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_number()) {
        malformed(std::string("missing or non-numeric '") + name + "' in " + where);
    }
    return it->get<double>();
}

bool outcome_bool(const Json& j, const char* name, const char* where) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_boolean()) {
        malformed(std::string("missing or non-boolean '") + name + "' in " + where);
    }
    return it->get<bool>();
}

}  // namespace

Json outcome_to_json(const SimOutcome& outcome) {
    Json episodes = Json::array();
    for (const auto& e : outcome.episodes) {
        episodes.push_back(Json{{"age", e.age_years},
                                {"duration_days", e.duration_years * kDaysPerYear},
                                {"weight", e.disability_weight},
                                {"in_hospital", e.in_hospital},
                                {"treat_cost", e.treatment_cost_usd},
                                {"recover_cost", e.recovery_cost_usd}});
    }
    Json deaths = Json::array();
    for (const auto& d : outcome.deaths) {
        deaths.push_back(Json{{"age", d.age_years},
                              {"in_hospital", d.in_hospital},
                              {"death_cost", d.hospital_death_cost_usd}});
    }
    return Json{{"population_size", outcome.population_size},
                {"episodes", std::move(episodes)},
                {"deaths", std::move(deaths)}};
}

SimOutcome outcome_from_json(const Json& j) {
    if (!j.is_object()) malformed("top-level value is not an object");
    for (const auto& item : j.items()) {
        if (item.key() != "population_size" && item.key() != "episodes" && item.key() != "deaths") {
            malformed("unknown field '" + item.key() + "'");
        }
    }
    SimOutcome outcome;
    auto pop = j.find("population_size");
    if (pop == j.end() || !pop->is_number_integer()) malformed("missing integer 'population_size'");
    outcome.population_size = pop->get<std::int64_t>();
    if (outcome.population_size <= 0) malformed("population_size must be positive");

    auto episodes = j.find("episodes");
    if (episodes == j.end() || !episodes->is_array()) malformed("missing array 'episodes'");
    for (const auto& e : *episodes) {
        EpisodeRecord record;
        record.age_years = outcome_number(e, "age", "episode");
        record.duration_years = outcome_number(e, "duration_days", "episode") / kDaysPerYear;
        record.disability_weight = outcome_number(e, "weight", "episode");
        record.in_hospital = outcome_bool(e, "in_hospital", "episode");
        record.treatment_cost_usd = outcome_number(e, "treat_cost", "episode");
        record.recovery_cost_usd = outcome_number(e, "recover_cost", "episode");
        if (record.age_years < 0.0 || !(record.duration_years > 0.0)) {
            malformed("episode age/duration out of range");
        }
        if (record.disability_weight < 0.0 || record.disability_weight > 1.0) {
            malformed("episode weight outside [0,1]");
        }
        if (!record.in_hospital &&
            (record.treatment_cost_usd != 0.0 || record.recovery_cost_usd != 0.0)) {
            malformed("episode carries hospital costs but in_hospital is false");
        }
        if (record.treatment_cost_usd < 0.0 || record.recovery_cost_usd < 0.0) {
            malformed("episode costs must be >= 0");
        }
        outcome.episodes.push_back(record);
    }

    auto deaths = j.find("deaths");
    if (deaths == j.end() || !deaths->is_array()) malformed("missing array 'deaths'");
    for (const auto& d : *deaths) {
        DeathRecord record;
        record.age_years = outcome_number(d, "age", "death");
        record.in_hospital = outcome_bool(d, "in_hospital", "death");
        record.hospital_death_cost_usd = outcome_number(d, "death_cost", "death");
        if (record.age_years < 0.0 || record.hospital_death_cost_usd < 0.0) {
            malformed("death age/cost out of range");
        }
        if (!record.in_hospital && record.hospital_death_cost_usd != 0.0) {
            malformed("death carries hospital cost but in_hospital is false");
        }
        outcome.deaths.push_back(record);
    }
    if (outcome.deaths.size() > static_cast<std::size_t>(outcome.population_size)) {
        malformed("more deaths than population");
    }
    return outcome;
}

Json scenario_to_json(const ScenarioParams& params) {
    Json age_bands = Json::array();
    for (const auto& band : params.age_bands) {
        age_bands.push_back(
            Json{{"min_age", band.min_age}, {"max_age", band.max_age}, {"weight", band.weight}});
    }
    Json weights = Json::array();
    for (const auto& band : params.disability_weights) {
        weights.push_back(Json{{"max_age", band.max_age}, {"weight", band.weight}});
    }
    return Json{{"population_size", params.population_size},
                {"horizon_years", params.horizon_years},
                {"baseline_episodes_per_person_year", params.baseline_episodes_per_person_year},
                {"itn_efficacy", params.itn_efficacy},
                {"irs_efficacy", params.irs_efficacy},
                {"case_fatality_per_episode", params.case_fatality_per_episode},
                {"hospital_seek_probability", params.hospital_seek_probability},
                {"mean_episode_duration_days", params.mean_episode_duration_days},
                {"age_bands", std::move(age_bands)},
                {"disability_weights", std::move(weights)},
                {"treatment_cost_usd", params.treatment_cost_usd},
                {"recovery_cost_usd", params.recovery_cost_usd},
                {"hospital_death_cost_usd", params.hospital_death_cost_usd}};
}

ScenarioParams scenario_from_json(const Json& j) {
    require_object(j,
                   {"population_size", "horizon_years", "baseline_episodes_per_person_year",
                    "itn_efficacy", "irs_efficacy", "case_fatality_per_episode",
                    "hospital_seek_probability", "mean_episode_duration_days", "age_bands",
                    "disability_weights", "treatment_cost_usd", "recovery_cost_usd",
                    "hospital_death_cost_usd"},
                   "scenario");
    ScenarioParams params;
    params.population_size =
        get_number_or<std::int64_t>(j, "population_size", "scenario", params.population_size);
    params.horizon_years = get_number_or(j, "horizon_years", "scenario", params.horizon_years);
    params.baseline_episodes_per_person_year =
        get_number_or(j, "baseline_episodes_per_person_year", "scenario",
                      params.baseline_episodes_per_person_year);
    params.itn_efficacy = get_number_or(j, "itn_efficacy", "scenario", params.itn_efficacy);
    params.irs_efficacy = get_number_or(j, "irs_efficacy", "scenario", params.irs_efficacy);
    params.case_fatality_per_episode = get_number_or(j, "case_fatality_per_episode", "scenario",
                                                     params.case_fatality_per_episode);
    params.hospital_seek_probability = get_number_or(j, "hospital_seek_probability", "scenario",
                                                     params.hospital_seek_probability);
    params.mean_episode_duration_days = get_number_or(j, "mean_episode_duration_days", "scenario",
                                                      params.mean_episode_duration_days);
    params.treatment_cost_usd =
        get_number_or(j, "treatment_cost_usd", "scenario", params.treatment_cost_usd);
    params.recovery_cost_usd =
        get_number_or(j, "recovery_cost_usd", "scenario", params.recovery_cost_usd);
    params.hospital_death_cost_usd =
        get_number_or(j, "hospital_death_cost_usd", "scenario", params.hospital_death_cost_usd);

    if (auto it = j.find("age_bands"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("field 'age_bands' in scenario must be an array");
        params.age_bands.clear();
        for (const auto& b : *it) {
            require_object(b, {"min_age", "max_age", "weight"}, "age_bands entry");
            params.age_bands.push_back(AgeBand{get_number<double>(b, "min_age", "age_bands entry"),
                                               get_number<double>(b, "max_age", "age_bands entry"),
                                               get_number<double>(b, "weight", "age_bands entry")});
        }
    }
    if (auto it = j.find("disability_weights"); it != j.end()) {
        if (!it->is_array()) {
            throw ConfigError("field 'disability_weights' in scenario must be an array");
        }
        params.disability_weights.clear();
        for (const auto& b : *it) {
            require_object(b, {"max_age", "weight"}, "disability_weights entry");
            params.disability_weights.push_back(
                DisabilityBand{get_number<double>(b, "max_age", "disability_weights entry"),
                               get_number<double>(b, "weight", "disability_weights entry")});
        }
    }
    params.validate();
    return params;
}

}  // namespace polex
