#ifndef POLEX_GP_HPP
#define POLEX_GP_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "polex/policy.hpp"

namespace polex {

/// Matern-5/2 kernel hyperparameters (nu is fixed at 5/2). Hyperparameters
/// are config values, not optimized, so surfaces from different agents stay
/// comparable.
struct KernelParams {
    double lengthscale = 0.15;     // in coverage units
    double signal_variance = 1.0;

    void validate() const;  // throws ConfigError
};

/// k(a,b) = signal_variance * (1 + sqrt5 r/l + 5r^2/(3l^2)) exp(-sqrt5 r/l),
/// r = ||a-b||.
double matern52(const Policy& a, const Policy& b, const KernelParams& params);

struct PosteriorPoint {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact GP regression over policy space. Observations are standardized
/// (centered and scaled by their standard deviation) before fitting and
/// mapped back on output, so the zero-mean prior reverts to the data mean
/// far from observations rather than biasing toward raw zero.
///
/// A fitted model is immutable and safe for concurrent posterior queries.
class GpModel {
public:
    /// Model with no observations: posterior mean 0, variance k(a,a).
    static GpModel prior(KernelParams params, double noise_variance);

    /// Fits K + sigma^2 I via Cholesky (with 1e-9 diagonal jitter). Throws
    /// IllConditioned if the factorization fails.
    static GpModel fit(std::vector<Policy> inputs, const std::vector<double>& rewards,
                       double noise_variance, KernelParams params);

    PosteriorPoint posterior(const Policy& a) const;

    /// Batched posterior over many points (one triangular solve for the
    /// whole block; used for full-grid sweeps).
    void posterior_many(std::span<const Policy> points, std::vector<double>& means,
                        std::vector<double>& variances) const;

    std::size_t training_size() const { return inputs_.size(); }
    const std::vector<Policy>& inputs() const { return inputs_; }
    const KernelParams& kernel() const { return params_; }
    double noise_variance() const { return noise_variance_; }
    double output_mean() const { return data_mean_; }
    double output_scale() const { return data_scale_; }
    /// Lower-triangular factor of K + sigma^2 I (empty for the prior model).
    const Eigen::MatrixXd& factor() const { return factor_; }

private:
    GpModel(KernelParams params, double noise_variance)
        : params_(params), noise_variance_(noise_variance) {}

    double clamp_variance(double v) const;

    KernelParams params_;
    double noise_variance_ = 0.0;
    std::vector<Policy> inputs_;
    double data_mean_ = 0.0;
    double data_scale_ = 1.0;
    Eigen::MatrixXd factor_;       // L with L L^T = K + sigma^2 I
    Eigen::VectorXd alpha_;        // (K + sigma^2 I)^{-1} y_standardized
};

struct SurfaceRow {
    Policy policy;
    double post_mean = 0.0;
    double post_sd = 0.0;
};

/// Posterior mean/sd at every point of the grid, in grid order (masking is
/// ignored; the surface always covers the full set).
std::vector<SurfaceRow> surface(const GpModel& model, const CandidateSet& grid);

/// CSV export: header a_itn,a_irs,post_mean,post_sd, 10 significant digits.
void write_surface_csv(std::span<const SurfaceRow> rows, std::ostream& out);

}  // namespace polex

#endif  // POLEX_GP_HPP
