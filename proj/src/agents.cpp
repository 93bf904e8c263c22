#include "polex/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "polex/errors.hpp"

namespace polex {

namespace {

constexpr std::uint64_t kAgentStreamTag = 0x6167656e74726e67ULL;

void emit(const DebugSink& debug, Json event) {
    if (debug) debug(std::move(event));
}

}  // namespace

void History::append(RunRecord record) {
    for (const auto& existing : records_) {
        if (existing.batch == record.batch && existing.proposal == record.proposal) {
            throw DomainError("history already contains record (" + std::to_string(record.batch) +
                              ", " + std::to_string(record.proposal) + ")");
        }
    }
    records_.push_back(std::move(record));
}

std::vector<RunRecord> History::batch_records(int batch) const {
    std::vector<RunRecord> out;
    for (const auto& r : records_) {
        if (r.batch == batch) out.push_back(r);
    }
    return out;
}

std::vector<std::pair<Policy, double>> History::batch_policy_rewards(int batch) const {
    std::vector<std::pair<Policy, double>> out;
    for (const auto& r : records_) {
        if (r.batch == batch) out.emplace_back(r.policy, r.reward);
    }
    return out;
}

int History::last_batch() const {
    int last = -1;
    for (const auto& r : records_) last = std::max(last, r.batch);
    return last;
}

void UlcbConfig::validate() const {
    if (batch_size < 1) throw ConfigError("ulcb batch_size must be >= 1");
    if (mixing_factor < 0.0 || mixing_factor > 1.0) {
        throw ConfigError("mixing_factor must lie in [0,1]");
    }
    if (masking_factor < 0.0) throw ConfigError("masking_factor must be >= 0");
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
    kernel.validate();
    if (!(noise_variance > 0.0)) throw ConfigError("noise_variance must be positive");
}

void GaConfig::validate() const {
    if (batch_size < 2) throw ConfigError("ga batch_size must be >= 2");
    if (mutation_probability < 0.0 || mutation_probability > 1.0) {
        throw ConfigError("mutation_probability must lie in [0,1]");
    }
    if (!(mutation_sd >= 0.0)) throw ConfigError("mutation_sd must be >= 0");
    if (!(component_floor > 0.0) || component_floor > 1.0) {
        throw ConfigError("component_floor must lie in (0,1]");
    }
}

void PgConfig::validate() const {
    if (batch_size < 1) throw ConfigError("pg batch_size must be >= 1");
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must lie in [0,1]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (epochs_per_batch < 1) throw ConfigError("epochs_per_batch must be >= 1");
}

std::vector<double> fitness_normalize(std::span<const double> rewards) {
    if (rewards.empty()) throw DomainError("fitness_normalize: empty input");
    const auto [lo_it, hi_it] = std::minmax_element(rewards.begin(), rewards.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> fitness(rewards.size());
    if (hi - lo <= 0.0) {
        std::fill(fitness.begin(), fitness.end(), 0.5);
        return fitness;
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        fitness[i] = (rewards[i] - lo) / (hi - lo);
    }
    return fitness;
}

std::vector<double> selection_probabilities(std::span<const double> fitness) {
    double total = 0.0;
    for (double f : fitness) {
        if (f < 0.0) throw DomainError("selection_probabilities: fitness must be >= 0");
        total += f;
    }
    std::vector<double> probs(fitness.size());
    if (total <= 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(fitness.size()));
        return probs;
    }
    for (std::size_t i = 0; i < fitness.size(); ++i) probs[i] = fitness[i] / total;
    return probs;
}

std::size_t roulette_select(std::span<const double> fitness, RngStream& rng) {
    double total = 0.0;
    for (double f : fitness) total += f;
    if (total <= 0.0) {
        // Degenerate wheel: all-equal (all-zero) fitness selects uniformly.
        return rng.next_below(fitness.size());
    }
    return rng.discrete(fitness);
}

namespace {

/// Index of the best available candidate under `score`, ties to the lowest
/// index. Returns size() when nothing is available.
template <typename Score>
std::size_t argbest_available(const CandidateSet& set, Score&& score, bool maximize) {
    std::size_t best = set.size();
    double best_score = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (!set.is_available(i)) continue;
        const double s = score(i);
        if (best == set.size() || (maximize ? s > best_score : s < best_score)) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

}  // namespace

std::vector<Policy> ulcb_propose(const History& history, CandidateSet& candidates,
                                 const UlcbConfig& cfg, const DebugSink& debug) {
    cfg.validate();
    if (candidates.size() == 0) throw DomainError("ulcb_propose: empty candidate set");

    GpModel model = [&] {
        if (history.empty()) return GpModel::prior(cfg.kernel, cfg.noise_variance);
        std::vector<Policy> inputs;
        std::vector<double> rewards;
        inputs.reserve(history.size());
        rewards.reserve(history.size());
        for (const auto& r : history.records()) {
            inputs.push_back(r.policy);
            rewards.push_back(r.reward);
        }
        return GpModel::fit(std::move(inputs), rewards, cfg.noise_variance, cfg.kernel);
    }();

    std::vector<double> means;
    std::vector<double> variances;
    model.posterior_many(candidates.points(), means, variances);
    std::vector<double> sds(variances.size());
    for (std::size_t i = 0; i < variances.size(); ++i) {
        sds[i] = std::sqrt(std::max(variances[i], 0.0));
    }

    const double mask_radius = cfg.kernel.lengthscale * cfg.masking_factor;
    std::vector<Policy> batch;
    std::vector<std::size_t> chosen;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));

    for (int slot = 0; slot < cfg.batch_size; ++slot) {
        const bool upper = static_cast<double>(slot) <
                           static_cast<double>(cfg.batch_size) * cfg.mixing_factor;
        auto score = [&](std::size_t i) {
            return upper ? means[i] + cfg.beta * sds[i] : means[i] - cfg.beta * sds[i];
        };
        std::size_t pick = argbest_available(candidates, score, upper);
        bool refilled = false;
        if (pick == candidates.size()) {
            // Masking exhausted the grid: un-mask everything except what
            // this batch already selected, and keep going.
            refilled = true;
            candidates.reset();
            for (std::size_t idx : chosen) candidates.remove(idx);
            pick = argbest_available(candidates, score, upper);
            if (pick == candidates.size()) {
                throw DomainError("ulcb_propose: batch size exceeds candidate count");
            }
            emit(debug, Json{{"event", "ulcb_refill"}, {"slot", slot}});
        }
        chosen.push_back(pick);
        batch.push_back(candidates.point(pick));
        candidates.remove(pick);
        const std::size_t masked = candidates.mask_near(candidates.point(pick), mask_radius);
        emit(debug, Json{{"event", "ulcb_pick"},
                         {"slot", slot},
                         {"branch", upper ? "ucb" : "lcb"},
                         {"index", pick},
                         {"masked", masked},
                         {"refilled", refilled}});
    }
    return batch;
}

std::vector<Policy> ga_next(std::span<const std::pair<Policy, double>> prev_batch,
                            const GaConfig& cfg, RngStream& rng) {
    cfg.validate();
    if (prev_batch.size() < 2) throw DomainError("ga_next: need at least two evaluated parents");

    std::vector<double> rewards;
    rewards.reserve(prev_batch.size());
    for (const auto& [policy, reward] : prev_batch) rewards.push_back(reward);
    const std::vector<double> fitness = fitness_normalize(rewards);

    auto clamp_component = [&](double v) {
        return std::min(1.0, std::max(cfg.component_floor, v));
    };

    std::vector<Policy> children;
    children.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (int c = 0; c < cfg.batch_size; ++c) {
        const Policy& pa = prev_batch[roulette_select(fitness, rng)].first;
        const Policy& pb = prev_batch[roulette_select(fitness, rng)].first;
        // Uniform crossover, then independent per-component mutation.
        double comps[2] = {rng.bernoulli(0.5) ? pa.a_itn : pb.a_itn,
                           rng.bernoulli(0.5) ? pa.a_irs : pb.a_irs};
        for (double& comp : comps) {
            if (rng.bernoulli(cfg.mutation_probability)) {
                comp = clamp_component(comp + rng.normal(0.0, cfg.mutation_sd));
            }
        }
        children.push_back(Policy{comps[0], comps[1]});
    }
    return children;
}

double pg_loss(std::span<const double> logits,
               std::span<const std::pair<std::size_t, double>> weighted_samples) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double norm = 0.0;
    for (double w : logits) norm += std::exp(w - max_logit);
    const double log_norm = std::log(norm) + max_logit;
    double loss = 0.0;
    for (const auto& [idx, g] : weighted_samples) {
        loss -= g * (logits[idx] - log_norm);
    }
    return loss;
}

void pg_apply_gradients(std::vector<double>& logits,
                        std::span<const std::pair<std::size_t, double>> weighted_samples,
                        double learning_rate, int epochs) {
    if (logits.empty()) throw DomainError("pg_apply_gradients: no logits");
    for (const auto& [idx, g] : weighted_samples) {
        if (idx >= logits.size()) throw DomainError("pg_apply_gradients: sample index out of range");
        if (!std::isfinite(g)) throw NumericalError("pg gradient weight is not finite");
    }
    double weight_total = 0.0;
    std::vector<double> per_logit_weight(logits.size(), 0.0);
    for (const auto& [idx, g] : weighted_samples) {
        weight_total += g;
        per_logit_weight[idx] += g;
    }
    std::vector<double> probs(logits.size());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double max_logit = *std::max_element(logits.begin(), logits.end());
        double norm = 0.0;
        for (double w : logits) norm += std::exp(w - max_logit);
        for (std::size_t i = 0; i < logits.size(); ++i) {
            probs[i] = std::exp(logits[i] - max_logit) / norm;
        }
        for (std::size_t i = 0; i < logits.size(); ++i) {
            const double grad = weight_total * probs[i] - per_logit_weight[i];
            if (!std::isfinite(grad)) throw NumericalError("pg gradient is not finite");
            logits[i] -= learning_rate * grad;
        }
    }
}

void pg_train(PgState& state, const PgConfig& cfg,
              std::span<const std::pair<std::size_t, double>> batch_index_rewards) {
    cfg.validate();
    if (batch_index_rewards.empty()) return;
    std::vector<double> rewards;
    rewards.reserve(batch_index_rewards.size());
    for (const auto& [idx, reward] : batch_index_rewards) rewards.push_back(reward);
    const std::vector<double> fitness = fitness_normalize(rewards);
    std::vector<std::pair<std::size_t, double>> weighted(batch_index_rewards.size());
    for (std::size_t j = 0; j < batch_index_rewards.size(); ++j) {
        weighted[j] = {batch_index_rewards[j].first, fitness[j]};
    }
    pg_apply_gradients(state.logits, weighted, cfg.learning_rate, cfg.epochs_per_batch);
}

std::vector<Policy> pg_propose(const PgState& state, const PgConfig& cfg,
                               const CandidateSet& candidates, RngStream& rng,
                               const DebugSink& debug) {
    cfg.validate();
    if (state.logits.size() != candidates.size()) {
        throw DomainError("pg_propose: logits and candidate set sizes differ");
    }
    std::vector<std::size_t> remaining = candidates.available_indices();
    if (remaining.size() < static_cast<std::size_t>(cfg.batch_size)) {
        throw DomainError("pg_propose: fewer available candidates than batch size");
    }
    std::vector<Policy> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (int slot = 0; slot < cfg.batch_size; ++slot) {
        const bool greedy = rng.bernoulli(cfg.epsilon);
        std::size_t pos = 0;
        if (greedy) {
            for (std::size_t p = 1; p < remaining.size(); ++p) {
                if (state.logits[remaining[p]] > state.logits[remaining[pos]]) pos = p;
            }
        } else {
            pos = rng.next_below(remaining.size());
        }
        const std::size_t idx = remaining[pos];
        emit(debug, Json{{"event", "pg_pick"},
                         {"slot", slot},
                         {"branch", greedy ? "greedy" : "random"},
                         {"index", idx}});
        batch.push_back(candidates.point(idx));
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return batch;
}

std::string agent_kind_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::Ulcb: return "ulcb";
        case AgentKind::Ga: return "ga";
        case AgentKind::Pg: return "pg";
    }
    return "unknown";
}

AgentKind agent_kind_from_name(const std::string& name) {
    if (name == "ulcb") return AgentKind::Ulcb;
    if (name == "ga") return AgentKind::Ga;
    if (name == "pg") return AgentKind::Pg;
    throw ConfigError("unknown agent kind '" + name + "' (expected ulcb, ga, or pg)");
}

void ExperimentParams::validate() const {
    grid.validate();
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    costs.validate();
    switch (agent.kind) {
        case AgentKind::Ulcb: agent.ulcb.validate(); break;
        case AgentKind::Ga: agent.ga.validate(); break;
        case AgentKind::Pg: agent.pg.validate(); break;
    }
}

namespace {

struct PolicyIndexMap {
    std::unordered_map<std::uint64_t, std::size_t> by_hash;

    explicit PolicyIndexMap(const CandidateSet& set) {
        by_hash.reserve(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            by_hash.emplace(hash_policy(set.point(i)), i);
        }
    }

    std::size_t index_of(const Policy& p) const {
        auto it = by_hash.find(hash_policy(p));
        if (it == by_hash.end()) throw DomainError("policy is not a grid candidate");
        return it->second;
    }
};

}  // namespace

History run_experiment(Simulator& sim, const ExperimentParams& params, RunLog* log,
                       const DebugSink& debug) {
    params.validate();

    // Propagate the experiment batch size into the per-agent configs.
    AgentConfig agent = params.agent;
    agent.ulcb.batch_size = params.batch_size;
    agent.ga.batch_size = params.batch_size;
    agent.pg.batch_size = params.batch_size;

    CandidateSet grid = discretize(params.grid);
    PolicyIndexMap index_map(grid);
    PgState pg_state(grid.size());

    BatchContext ctx;
    ctx.costs = params.costs;
    ctx.penalty = params.penalty;
    ctx.worker_cap = params.worker_cap;

    History history;
    for (int batch = 0; batch < params.iterations; ++batch) {
        RngStream agent_rng(hash_combine(hash_combine(mix64(params.master_seed), kAgentStreamTag),
                                         static_cast<std::uint64_t>(batch)));
        std::vector<Policy> proposals;
        if (batch == 0) {
            proposals = sample_random(grid, static_cast<std::size_t>(params.batch_size), agent_rng);
            emit(debug, Json{{"event", "init_batch"},
                             {"agent", agent_kind_name(agent.kind)},
                             {"size", proposals.size()}});
        } else {
            switch (agent.kind) {
                case AgentKind::Ulcb:
                    grid.reset();
                    proposals = ulcb_propose(history, grid, agent.ulcb, debug);
                    break;
                case AgentKind::Ga: {
                    const auto prev = history.batch_policy_rewards(batch - 1);
                    proposals = ga_next(prev, agent.ga, agent_rng);
                    break;
                }
                case AgentKind::Pg: {
                    std::vector<std::pair<std::size_t, double>> prev;
                    for (const auto& r : history.batch_records(batch - 1)) {
                        prev.emplace_back(index_map.index_of(r.policy), r.reward);
                    }
                    pg_train(pg_state, agent.pg, prev);
                    proposals = pg_propose(pg_state, agent.pg, grid, agent_rng, debug);
                    break;
                }
            }
        }

        BatchResult result = evaluate_batch(sim, proposals, params.master_seed, batch, ctx);
        for (const auto& failure : result.failures) {
            emit(debug, Json{{"event", "run_failed"},
                             {"batch", batch},
                             {"proposal", failure.proposal},
                             {"error", failure.message}});
        }
        for (auto& record : result.records) history.append(std::move(record));
        if (log) log->append(history.batch_records(batch));
    }
    return history;
}

std::vector<TopPolicyRow> top_policies(const History& history, std::span<const SurfaceRow> rows,
                                       double lengthscale, std::size_t k,
                                       const DebugSink& debug) {
    if (!(lengthscale > 0.0)) throw ConfigError("top_policies: lengthscale must be positive");

    std::vector<char> excluded(rows.size(), 0);
    std::vector<TopPolicyRow> out;
    while (out.size() < k) {
        std::size_t best = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (excluded[i]) continue;
            if (best == rows.size() || rows[i].post_mean > rows[best].post_mean) best = i;
        }
        if (best == rows.size()) {
            emit(debug, Json{{"event", "top_policies_exhausted"},
                             {"requested", k},
                             {"returned", out.size()}});
            break;
        }

        TopPolicyRow row;
        row.policy = rows[best].policy;
        row.post_mean = rows[best].post_mean;

        // Annotate with the nearest evaluated record that has a defined
        // cost per DALY averted.
        double best_dist = std::numeric_limits<double>::infinity();
        const RunRecord* nearest = nullptr;
        for (const auto& record : history.records()) {
            if (std::isnan(record.report.c_da_usd_per_daly)) continue;
            const double d = distance(record.policy, row.policy);
            if (d < best_dist) {
                best_dist = d;
                nearest = &record;
            }
        }
        if (nearest != nullptr) {
            row.c_da = nearest->report.c_da_usd_per_daly;
            row.dalys_averted = nearest->report.dalys_averted;
            row.c_int = nearest->report.c_int_usd;
        } else {
            row.c_da = std::numeric_limits<double>::quiet_NaN();
            row.dalys_averted = std::numeric_limits<double>::quiet_NaN();
            row.c_int = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(row);

        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!excluded[i] && distance(rows[i].policy, row.policy) < lengthscale) {
                excluded[i] = 1;
            }
        }
        excluded[best] = 1;
    }
    return out;
}

}  // namespace polex
