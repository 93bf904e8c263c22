#ifndef POLEX_ERRORS_HPP
#define POLEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polex {

/// Invalid configuration document, field, or parameter value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request violated a domain precondition (e.g. sampling more points than
/// are available).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kernel matrix factorization failed or produced unusable numbers.
class IllConditioned : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gradient or loss became non-finite during training.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A policy averted no DALYs relative to the no-intervention baseline, so
/// cost per DALY averted is undefined.
class NonPositiveAverted : public std::runtime_error {
public:
    explicit NonPositiveAverted(double averted)
        : std::runtime_error("non-positive DALYs averted: " + std::to_string(averted)),
          averted_(averted) {}

    double dalys_averted() const noexcept { return averted_; }

private:
    double averted_;
};

/// External simulator process failed, timed out, or produced unparseable
/// output. Carries captured diagnostics.
class ExternalSimError : public std::runtime_error {
public:
    ExternalSimError(const std::string& what, std::string diagnostics)
        : std::runtime_error(what + (diagnostics.empty() ? "" : "\n" + diagnostics)),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// More than half of a batch failed to evaluate.
class BatchAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace polex

#endif  // POLEX_ERRORS_HPP
