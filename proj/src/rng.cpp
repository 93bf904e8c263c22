#include "polex/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "polex/errors.hpp"

namespace polex {

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n == 0) throw DomainError("next_below: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

double RngStream::exponential(double mean) {
    // 1 - u is in (0, 1], so the log is finite.
    return -mean * std::log(1.0 - next_unit());
}

double RngStream::normal(double mean, double sd) {
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t poisson_knuth(RngStream& rng, double lambda) {
    const double threshold = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_unit();
    } while (p > threshold);
    return k - 1;
}

}  // namespace

std::uint64_t RngStream::poisson(double lambda) {
    std::uint64_t count = 0;
    while (lambda > 30.0) {
        count += poisson_knuth(*this, 30.0);
        lambda -= 30.0;
    }
    return count + poisson_knuth(*this, lambda);
}

std::size_t RngStream::discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw DomainError("discrete: weights must have positive sum");
    const double x = next_unit() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = i;
        acc += weights[i];
        if (x < acc) return i;
    }
    return last_positive;
}

}  // namespace polex
