#include "polex/batch.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <thread>

#include "json_util.hpp"
#include "polex/errors.hpp"

namespace polex {

namespace {

Json econ_report_to_json(const EconReport& r) {
    Json j{{"yld", r.yld},
           {"yll", r.yll},
           {"daly", r.daly},
           {"ttc_usd", r.ttc_usd},
           {"trc_usd", r.trc_usd},
           {"hsc_usd", r.hsc_usd},
           {"c_int_usd", r.c_int_usd},
           {"dalys_averted", r.dalys_averted},
           {"c_da_usd_per_daly", r.c_da_usd_per_daly},
           {"reward", r.reward}};
    if (std::isnan(r.c_da_usd_per_daly)) j["c_da_usd_per_daly"] = nullptr;
    return j;
}

EconReport econ_report_from_json(const Json& j) {
    require_object(j,
                   {"yld", "yll", "daly", "ttc_usd", "trc_usd", "hsc_usd", "c_int_usd",
                    "dalys_averted", "c_da_usd_per_daly", "reward"},
                   "report");
    EconReport r;
    r.yld = get_number<double>(j, "yld", "report");
    r.yll = get_number<double>(j, "yll", "report");
    r.daly = get_number<double>(j, "daly", "report");
    r.ttc_usd = get_number<double>(j, "ttc_usd", "report");
    r.trc_usd = get_number<double>(j, "trc_usd", "report");
    r.hsc_usd = get_number<double>(j, "hsc_usd", "report");
    r.c_int_usd = get_number<double>(j, "c_int_usd", "report");
    r.dalys_averted = get_number<double>(j, "dalys_averted", "report");
    const Json& cda = require_field(j, "c_da_usd_per_daly", "report");
    r.c_da_usd_per_daly =
        cda.is_null() ? std::numeric_limits<double>::quiet_NaN() : cda.get<double>();
    r.reward = get_number<double>(j, "reward", "report");
    return r;
}

}  // namespace

Json run_record_to_json(const RunRecord& record) {
    return Json{{"batch", record.batch},
                {"proposal", record.proposal},
                {"policy", Json{{"a_itn", record.policy.a_itn}, {"a_irs", record.policy.a_irs}}},
                {"seed", Json{{"scenario_seed", record.seed.scenario_seed},
                              {"replicate", record.seed.replicate}}},
                {"reward", record.reward},
                {"report", econ_report_to_json(record.report)}};
}

RunRecord run_record_from_json(const Json& j) {
    require_object(j, {"batch", "proposal", "policy", "seed", "reward", "report"}, "run record");
    RunRecord record;
    record.batch = get_number<int>(j, "batch", "run record");
    record.proposal = get_number<int>(j, "proposal", "run record");
    const Json& policy = require_field(j, "policy", "run record");
    require_object(policy, {"a_itn", "a_irs"}, "run record policy");
    record.policy.a_itn = get_number<double>(policy, "a_itn", "run record policy");
    record.policy.a_irs = get_number<double>(policy, "a_irs", "run record policy");
    const Json& seed = require_field(j, "seed", "run record");
    require_object(seed, {"scenario_seed", "replicate"}, "run record seed");
    record.seed.scenario_seed = get_number<std::uint64_t>(seed, "scenario_seed", "run record seed");
    record.seed.replicate = get_number<std::int64_t>(seed, "replicate", "run record seed");
    record.reward = get_number<double>(j, "reward", "run record");
    record.report = econ_report_from_json(require_field(j, "report", "run record"));
    return record;
}

RunLog::RunLog(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::out | std::ios::trunc);
    if (!out_) throw ConfigError("cannot open run log for writing: " + path.string());
}

void RunLog::append(std::span<const RunRecord> records) {
    for (const auto& record : records) {
        out_ << run_record_to_json(record).dump() << '\n';
    }
    out_.flush();
}

std::vector<RunRecord> read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run log: " + path.string());
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(run_record_from_json(j));
    }
    return records;
}

const SimOutcome& BaselineCache::get_or_compute(Simulator& sim, std::uint64_t scenario_seed) {
    const auto key = std::make_pair(sim.scenario_hash(), scenario_seed);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, sim.baseline(SimSeed{scenario_seed, 0})).first;
    }
    return it->second;
}

BatchResult evaluate_batch(Simulator& sim, std::span<const Policy> policies,
                           std::uint64_t base_seed, int batch_index, BatchContext& ctx) {
    const std::size_t b = policies.size();
    if (b == 0) return {};
    {
        std::set<std::pair<double, double>> unique;
        for (const auto& p : policies) unique.insert({p.a_itn, p.a_irs});
        if (unique.size() != b) throw DomainError("evaluate_batch: policies must be distinct");
    }

    // The baseline is shared by every comparison in the experiment; compute
    // it before spawning workers so they only read.
    const SimOutcome& baseline = ctx.baselines.get_or_compute(sim, base_seed);

    std::vector<std::optional<SimOutcome>> outcomes(b);
    std::vector<std::string> errors(b);
    std::vector<double> wall_ms(b, 0.0);
    std::vector<SimSeed> seeds(b);
    for (std::size_t j = 0; j < b; ++j) {
        seeds[j] = SimSeed{base_seed, static_cast<std::int64_t>(batch_index) *
                                              static_cast<std::int64_t>(b) +
                                          static_cast<std::int64_t>(j)};
    }

    unsigned workers = ctx.worker_cap > 0 ? static_cast<unsigned>(ctx.worker_cap)
                                          : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(b));

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= b) return;
            const auto start = std::chrono::steady_clock::now();
            try {
                outcomes[j] = sim.simulate(policies[j], seeds[j]);
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
            wall_ms[j] = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::size_t failure_count = 0;
    for (std::size_t j = 0; j < b; ++j) {
        if (!outcomes[j]) ++failure_count;
    }
    if (failure_count * 2 > b) {
        throw BatchAborted("batch " + std::to_string(batch_index) + ": " +
                           std::to_string(failure_count) + " of " + std::to_string(b) +
                           " simulations failed");
    }

    // Record assembly is serialized in proposal order so the penalty pricing
    // (which depends on the largest cost-effectiveness seen so far) is
    // deterministic regardless of worker scheduling.
    BatchResult result;
    result.records.reserve(b - failure_count);
    for (std::size_t j = 0; j < b; ++j) {
        if (!outcomes[j]) {
            result.failures.push_back(BatchFailure{static_cast<int>(j), errors[j]});
            continue;
        }
        RunRecord record;
        record.batch = batch_index;
        record.proposal = static_cast<int>(j);
        record.policy = policies[j];
        record.seed = seeds[j];
        record.report = make_econ_report(*outcomes[j], baseline, policies[j], ctx.costs,
                                         ctx.penalty, ctx.penalty_state);
        record.reward = record.report.reward;
        record.wall_time_ms = wall_ms[j];
        ctx.penalty_state.observe(record.report.c_da_usd_per_daly);
        result.records.push_back(std::move(record));
    }
    return result;
}

}  // namespace polex
