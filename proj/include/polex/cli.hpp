#ifndef POLEX_CLI_HPP
#define POLEX_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "polex/config.hpp"
#include "polex/gp.hpp"

namespace polex {

/// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEmptyRuns = 3;

struct SurfaceOptions {
    std::filesystem::path runs_path;
    std::filesystem::path output_path;
    GpSettings gp;
    GridSpec grid;
};

/// Runs the configured experiment and writes runs.jsonl, surface.csv,
/// top_policies.txt and a resolved-config snapshot to the output directory.
int cmd_explore(const std::filesystem::path& config_path, const std::string& output_dir_override,
                bool verbose, std::ostream& out, std::ostream& err);

/// Fits a GP to a results log and writes the posterior surface CSV
/// (columns a_itn,a_irs,post_mean,post_sd,log10_cda_mean).
int cmd_surface(const SurfaceOptions& options, std::ostream& out, std::ostream& err);

/// Prints the top-k evaluated policies by ascending cost per DALY averted.
int cmd_top(const std::filesystem::path& runs_path, std::size_t k, std::ostream& out,
            std::ostream& err);

/// Evaluates one (policy, seed) against the no-intervention baseline and
/// prints the full economic report.
int cmd_simulate(const std::filesystem::path& scenario_path, const std::string& policy_arg,
                 std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Full argv entry point (CLI11 parsing); used by the binary and by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Value rounded to `sig` significant figures and printed without exponent
/// notation (e.g. 514120 -> "514000", 28.94 -> "28.9").
std::string format_sig(double value, int sig = 3);

/// "{60,4}"-style coverage-percent rendering of a policy.
std::string format_policy_percent(const Policy& policy);

/// Fixed-width policy table used for top-policy reports.
void write_top_table(std::span<const TopPolicyRow> rows, std::ostream& out);

}  // namespace polex

#endif  // POLEX_CLI_HPP
