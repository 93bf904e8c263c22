#ifndef POLEX_POLICY_HPP
#define POLEX_POLICY_HPP

#include <cstddef>
#include <vector>

#include "polex/rng.hpp"

namespace polex {

/// A point in the intervention coverage space. Both components are
/// population coverage fractions in (0, 1]; zero coverage is represented by
/// the dedicated no-intervention baseline, never by a Policy.
struct Policy {
    double a_itn = 0.0;  ///< fraction covered by insecticide-treated nets
    double a_irs = 0.0;  ///< fraction covered by indoor residual spraying

    friend bool operator==(const Policy&, const Policy&) = default;

    /// Throws ConfigError unless both components are in (0, 1].
    void validate() const;
};

/// Euclidean distance in raw coverage units. Both axes share the [0, 1]
/// scale, so no per-axis normalization is applied.
double distance(const Policy& a, const Policy& b);

std::uint64_t hash_policy(const Policy& p);

/// Regular grid specification for discretizing the coverage space.
struct GridSpec {
    int resolution_itn = 100;
    int resolution_irs = 100;
    double lower = 0.01;
    double upper = 1.0;

    void validate() const;  // throws ConfigError
    double cell_itn() const { return (upper - lower) / (resolution_itn - 1); }
    double cell_irs() const { return (upper - lower) / (resolution_irs - 1); }
};

/// An ordered list of candidate policies with an availability mask. The
/// point list is fixed at construction; masking only flips availability.
/// Mutated by a single agent loop; snapshots may be read concurrently.
class CandidateSet {
public:
    explicit CandidateSet(std::vector<Policy> points);

    std::size_t size() const { return points_.size(); }
    std::size_t available_count() const { return points_.size() - removed_count_; }
    const Policy& point(std::size_t i) const { return points_[i]; }
    const std::vector<Policy>& points() const { return points_; }
    bool is_available(std::size_t i) const { return !removed_[i]; }

    std::vector<std::size_t> available_indices() const;
    std::vector<Policy> available() const;

    /// Marks one point removed (no-op if already removed).
    void remove(std::size_t i);

    /// Removes every available point at Euclidean distance strictly less
    /// than radius from center. Returns how many points this call removed.
    std::size_t mask_near(const Policy& center, double radius);

    /// Makes every point available again.
    void reset();

private:
    std::vector<Policy> points_;
    std::vector<char> removed_;
    std::size_t removed_count_ = 0;
};

/// Full regular grid over the spec's bounds, all points available, ordered
/// row-major by (itn index, irs index). Deterministic for a given spec.
CandidateSet discretize(const GridSpec& spec);

/// n distinct available points, uniform without replacement. Does not
/// modify the set. Throws DomainError if n exceeds the available count.
std::vector<Policy> sample_random(const CandidateSet& set, std::size_t n, RngStream& rng);

}  // namespace polex

#endif  // POLEX_POLICY_HPP
