#include "polex/policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "polex/errors.hpp"

namespace polex {

void Policy::validate() const {
    if (!(a_itn > 0.0) || a_itn > 1.0 || !(a_irs > 0.0) || a_irs > 1.0) {
        throw ConfigError("policy coverage must lie in (0,1], got (" + std::to_string(a_itn) +
                          ", " + std::to_string(a_irs) + ")");
    }
}

double distance(const Policy& a, const Policy& b) {
    return std::hypot(a.a_itn - b.a_itn, a.a_irs - b.a_irs);
}

std::uint64_t hash_policy(const Policy& p) {
    return hash_combine(hash_double(p.a_itn), hash_double(p.a_irs));
}

void GridSpec::validate() const {
    if (resolution_itn < 2 || resolution_irs < 2) {
        throw ConfigError("grid resolution must be >= 2 per axis");
    }
    if (!(lower > 0.0) || !(lower < upper) || upper > 1.0) {
        throw ConfigError("grid bounds must satisfy 0 < lower < upper <= 1");
    }
}

CandidateSet::CandidateSet(std::vector<Policy> points)
    : points_(std::move(points)), removed_(points_.size(), 0) {
    std::set<std::pair<double, double>> seen;
    for (const Policy& p : points_) {
        if (!seen.insert({p.a_itn, p.a_irs}).second) {
            throw ConfigError("candidate set contains duplicate points");
        }
    }
}

std::vector<std::size_t> CandidateSet::available_indices() const {
    std::vector<std::size_t> out;
    out.reserve(available_count());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!removed_[i]) out.push_back(i);
    }
    return out;
}

std::vector<Policy> CandidateSet::available() const {
    std::vector<Policy> out;
    out.reserve(available_count());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!removed_[i]) out.push_back(points_[i]);
    }
    return out;
}

void CandidateSet::remove(std::size_t i) {
    if (!removed_[i]) {
        removed_[i] = 1;
        ++removed_count_;
    }
}

std::size_t CandidateSet::mask_near(const Policy& center, double radius) {
    if (radius < 0.0) throw DomainError("mask_near: radius must be >= 0");
    std::size_t removed = 0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!removed_[i] && distance(points_[i], center) < radius) {
            removed_[i] = 1;
            ++removed_count_;
            ++removed;
        }
    }
    return removed;
}

void CandidateSet::reset() {
    std::fill(removed_.begin(), removed_.end(), 0);
    removed_count_ = 0;
}

CandidateSet discretize(const GridSpec& spec) {
    spec.validate();
    std::vector<Policy> points;
    points.reserve(static_cast<std::size_t>(spec.resolution_itn) * spec.resolution_irs);
    const double step_itn = spec.cell_itn();
    const double step_irs = spec.cell_irs();
    for (int i = 0; i < spec.resolution_itn; ++i) {
        const double itn = (i == spec.resolution_itn - 1) ? spec.upper : spec.lower + i * step_itn;
        for (int j = 0; j < spec.resolution_irs; ++j) {
            const double irs = (j == spec.resolution_irs - 1) ? spec.upper : spec.lower + j * step_irs;
            points.push_back(Policy{itn, irs});
        }
    }
    return CandidateSet(std::move(points));
}

std::vector<Policy> sample_random(const CandidateSet& set, std::size_t n, RngStream& rng) {
    std::vector<std::size_t> pool = set.available_indices();
    if (n > pool.size()) {
        throw DomainError("sample_random: requested " + std::to_string(n) + " of " +
                          std::to_string(pool.size()) + " available points");
    }
    std::vector<Policy> out;
    out.reserve(n);
    // Partial Fisher-Yates over the available pool.
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t pick = k + rng.next_below(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        out.push_back(set.point(pool[k]));
    }
    return out;
}

}  // namespace polex
