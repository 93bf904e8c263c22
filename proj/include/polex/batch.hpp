#ifndef POLEX_BATCH_HPP
#define POLEX_BATCH_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polex/policy.hpp"
#include "polex/reward.hpp"
#include "polex/sim.hpp"

namespace polex {

/// One evaluated (policy, seed, outcome) tuple: the unit of the append-only
/// experiment log. wall_time_ms is measured for diagnostics but excluded
/// from serialization so logs are reproducible from (config, seed) alone.
struct RunRecord {
    int batch = 0;
    int proposal = 0;
    Policy policy;
    SimSeed seed;
    double reward = 0.0;
    EconReport report;
    double wall_time_ms = 0.0;
};

Json run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& j);  // throws ConfigError

/// Append-only JSONL results log, flushed after each batch.
class RunLog {
public:
    explicit RunLog(const std::filesystem::path& path);

    void append(std::span<const RunRecord> records);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::vector<RunRecord> read_run_log(const std::filesystem::path& path);

struct BatchFailure {
    int proposal = 0;
    std::string message;
};

struct BatchResult {
    std::vector<RunRecord> records;   // successes, ordered by proposal index
    std::vector<BatchFailure> failures;
};

/// Baseline outcomes keyed by (scenario hash, scenario seed). Single-fill,
/// many-read.
class BaselineCache {
public:
    const SimOutcome& get_or_compute(Simulator& sim, std::uint64_t scenario_seed);

private:
    std::mutex mutex_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, SimOutcome> cache_;
};

/// Shared evaluation context: economics parameters, penalty pricing state,
/// worker cap (0 = hardware concurrency) and the baseline cache.
struct BatchContext {
    CostParams costs;
    PenaltyConfig penalty;
    int worker_cap = 0;
    PenaltyState penalty_state;
    BaselineCache baselines;
};

/// Evaluates a batch of distinct policies in parallel. Replicate seeds are
/// derived as batch_index * B + proposal index, so (batch, proposal) pairs
/// map to pairwise-distinct seeds. Results are ordered by proposal index
/// regardless of worker scheduling. Single failures are reported in the
/// result; more than 50% failures aborts with BatchAborted.
BatchResult evaluate_batch(Simulator& sim, std::span<const Policy> policies,
                           std::uint64_t base_seed, int batch_index, BatchContext& ctx);

}  // namespace polex

#endif  // POLEX_BATCH_HPP
