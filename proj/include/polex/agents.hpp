#ifndef POLEX_AGENTS_HPP
#define POLEX_AGENTS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polex/batch.hpp"
#include "polex/gp.hpp"
#include "polex/policy.hpp"
#include "polex/rng.hpp"

namespace polex {

/// Structured sink for per-decision debug events (one JSON object per
/// event). Wired up when verbosity is raised; null disables logging.
using DebugSink = std::function<void(const Json&)>;

/// Append-only record of evaluated runs. (batch, proposal) pairs are unique.
class History {
public:
    void append(RunRecord record);

    const std::vector<RunRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::vector<RunRecord> batch_records(int batch) const;
    std::vector<std::pair<Policy, double>> batch_policy_rewards(int batch) const;
    int last_batch() const;  // -1 when empty

private:
    std::vector<RunRecord> records_;
};

/// Confidence-bound batch agent configuration. A fraction mixing_factor of
/// each batch is drawn from the upper confidence bound (optimistic) and the
/// remainder from the lower bound; after each pick, candidates within
/// lengthscale * masking_factor are masked to enforce batch diversity.
struct UlcbConfig {
    int batch_size = 64;
    double mixing_factor = 0.75;   // fraction of the batch from the UCB branch
    double masking_factor = 1.0;   // exclusion radius in lengthscales
    double beta = 2.0;             // confidence weight
    KernelParams kernel;
    double noise_variance = 1e-3;

    void validate() const;
};

struct GaConfig {
    int batch_size = 64;
    double mutation_probability = 0.3;  // per component
    double mutation_sd = 0.05;          // coverage units
    double component_floor = 0.01;      // children are clamped into [floor, 1]

    void validate() const;
};

struct PgConfig {
    int batch_size = 64;
    double epsilon = 0.7;        // probability of the greedy (argmax) pick
    double learning_rate = 0.05;
    int epochs_per_batch = 50;

    void validate() const;
};

/// Min-max normalization to [0,1]; higher reward maps to higher fitness so
/// selection is biased toward good policies. Constant input maps to 0.5.
std::vector<double> fitness_normalize(std::span<const double> rewards);

/// Fitness-proportional selection probabilities (normalized weights).
std::vector<double> selection_probabilities(std::span<const double> fitness);

/// One roulette-wheel draw over the fitness vector.
std::size_t roulette_select(std::span<const double> fitness, RngStream& rng);

/// Proposes a batch by alternating confidence-bound argmax/argmin picks over
/// the candidate set, masking around each pick. The caller resets the set at
/// batch start; the GP is fitted here on the full history (prior if empty).
/// If masking exhausts the candidates mid-batch, the set is refilled
/// (un-masked, already-picked points excluded) and a warning event logged.
std::vector<Policy> ulcb_propose(const History& history, CandidateSet& candidates,
                                 const UlcbConfig& cfg, const DebugSink& debug = {});

/// Derives the next generation from the previous batch: roulette-wheel
/// parent selection, uniform per-component crossover, and per-component
/// Gaussian mutation clamped into (0,1].
std::vector<Policy> ga_next(std::span<const std::pair<Policy, double>> prev_batch,
                            const GaConfig& cfg, RngStream& rng);

/// Tabular policy-gradient state: one logit per candidate point.
struct PgState {
    std::vector<double> logits;

    explicit PgState(std::size_t candidate_count) : logits(candidate_count, 0.0) {}
};

/// Gradient-descent core on the negative log-loss: for each epoch,
/// w -= lr * grad of -sum_j g_j * log softmax(w)[idx_j]. Unsampled logits
/// receive gradient only through the softmax normalizer. Throws
/// NumericalError on non-finite gradients.
void pg_apply_gradients(std::vector<double>& logits,
                        std::span<const std::pair<std::size_t, double>> weighted_samples,
                        double learning_rate, int epochs);

/// Loss the gradients descend; exposed so checks can difference it.
double pg_loss(std::span<const double> logits,
               std::span<const std::pair<std::size_t, double>> weighted_samples);

/// Normalizes the batch rewards to fitness and applies the gradient epochs.
void pg_train(PgState& state, const PgConfig& cfg,
              std::span<const std::pair<std::size_t, double>> batch_index_rewards);

/// Sequential epsilon-greedy proposal without replacement: with probability
/// epsilon the argmax-logit candidate (ties to the lowest index), otherwise
/// a uniform pick; chosen candidates leave the working set.
std::vector<Policy> pg_propose(const PgState& state, const PgConfig& cfg,
                               const CandidateSet& candidates, RngStream& rng,
                               const DebugSink& debug = {});

enum class AgentKind { Ulcb, Ga, Pg };

std::string agent_kind_name(AgentKind kind);
AgentKind agent_kind_from_name(const std::string& name);  // throws ConfigError

struct AgentConfig {
    AgentKind kind = AgentKind::Ulcb;
    UlcbConfig ulcb;
    GaConfig ga;
    PgConfig pg;
};

struct ExperimentParams {
    AgentConfig agent;
    GridSpec grid;
    int iterations = 8;
    int batch_size = 64;
    std::uint64_t master_seed = 0;
    CostParams costs;
    PenaltyConfig penalty;
    int worker_cap = 0;

    void validate() const;
};

/// Runs the full propose/evaluate loop: the first batch (and GA/PG always
/// for their first generation) is a uniform random sample of the grid;
/// subsequent batches come from the configured agent. Records are appended
/// to the log (when given) after each batch, so a partial history survives
/// failures.
History run_experiment(Simulator& sim, const ExperimentParams& params, RunLog* log = nullptr,
                       const DebugSink& debug = {});

struct TopPolicyRow {
    Policy policy;              // grid point at a posterior-mean maximum
    double post_mean = 0.0;
    double c_da = 0.0;          // from the nearest evaluated record
    double dalys_averted = 0.0;
    double c_int = 0.0;
};

/// Greedy selection of k posterior-mean maxima separated by at least one
/// lengthscale, each annotated with the nearest evaluated record's
/// economics. Returns fewer than k rows (and logs a warning event) when the
/// exclusion radius exhausts the grid.
std::vector<TopPolicyRow> top_policies(const History& history, std::span<const SurfaceRow> rows,
                                       double lengthscale, std::size_t k,
                                       const DebugSink& debug = {});

}  // namespace polex

#endif  // POLEX_AGENTS_HPP
