#include "polex/gp.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

#include "polex/errors.hpp"

namespace polex {

namespace {

constexpr double kJitter = 1e-9;
constexpr double kVarianceClamp = 1e-10;
const double kSqrt5 = std::sqrt(5.0);

}  // namespace

void KernelParams::validate() const {
    if (!(lengthscale > 0.0)) throw ConfigError("kernel lengthscale must be positive");
    if (!(signal_variance > 0.0)) throw ConfigError("kernel signal_variance must be positive");
}

double matern52(const Policy& a, const Policy& b, const KernelParams& params) {
    const double r = distance(a, b);
    const double s = kSqrt5 * r / params.lengthscale;
    return params.signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

GpModel GpModel::prior(KernelParams params, double noise_variance) {
    params.validate();
    if (!(noise_variance > 0.0)) throw ConfigError("noise variance must be positive");
    return GpModel(params, noise_variance);
}

GpModel GpModel::fit(std::vector<Policy> inputs, const std::vector<double>& rewards,
                     double noise_variance, KernelParams params) {
    params.validate();
    if (inputs.empty()) throw DomainError("gp fit: inputs must be non-empty");
    if (inputs.size() != rewards.size()) {
        throw DomainError("gp fit: inputs and rewards must have equal length");
    }
    if (!(noise_variance > 0.0)) throw ConfigError("noise variance must be positive");

    GpModel model(params, noise_variance);
    model.inputs_ = std::move(inputs);
    const auto n = static_cast<Eigen::Index>(model.inputs_.size());

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = rewards[static_cast<std::size_t>(i)];
    model.data_mean_ = y.mean();
    const double sd = n > 1 ? std::sqrt((y.array() - model.data_mean_).square().sum() /
                                        static_cast<double>(n - 1))
                            : 0.0;
    model.data_scale_ = sd > 1e-12 ? sd : 1.0;
    y = (y.array() - model.data_mean_) / model.data_scale_;

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = matern52(model.inputs_[static_cast<std::size_t>(i)],
                                      model.inputs_[static_cast<std::size_t>(j)], params);
            k(i, j) = v;
            k(j, i) = v;
        }
        k(i, i) += noise_variance + kJitter;
    }

    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
        throw IllConditioned("kernel matrix factorization failed; consider raising the noise variance");
    }
    model.factor_ = llt.matrixL();
    model.alpha_ = llt.solve(y);
    return model;
}

double GpModel::clamp_variance(double v) const {
    if (v >= 0.0) return v;
    if (v > -kVarianceClamp) return 0.0;
    throw IllConditioned("posterior variance fell below the clamp threshold: " + std::to_string(v));
}

PosteriorPoint GpModel::posterior(const Policy& a) const {
    const double prior_var = params_.signal_variance;
    if (inputs_.empty()) {
        return PosteriorPoint{0.0, prior_var};
    }
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd kvec(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        kvec(i) = matern52(inputs_[static_cast<std::size_t>(i)], a, params_);
    }
    const double mean_std = kvec.dot(alpha_);
    const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(kvec);
    const double var_std = clamp_variance(prior_var - v.squaredNorm());
    return PosteriorPoint{data_mean_ + data_scale_ * mean_std,
                          data_scale_ * data_scale_ * var_std};
}

void GpModel::posterior_many(std::span<const Policy> points, std::vector<double>& means,
                             std::vector<double>& variances) const {
    const std::size_t m = points.size();
    means.assign(m, 0.0);
    variances.assign(m, params_.signal_variance);
    if (inputs_.empty()) return;

    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::MatrixXd kstar(n, static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            kstar(i, static_cast<Eigen::Index>(j)) =
                matern52(inputs_[static_cast<std::size_t>(i)], points[j], params_);
        }
    }
    const Eigen::VectorXd mean_std = kstar.transpose() * alpha_;
    factor_.triangularView<Eigen::Lower>().solveInPlace(kstar);
    const double out_var = data_scale_ * data_scale_;
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = kstar.col(static_cast<Eigen::Index>(j));
        means[j] = data_mean_ + data_scale_ * mean_std(static_cast<Eigen::Index>(j));
        variances[j] = out_var * clamp_variance(params_.signal_variance - col.squaredNorm());
    }
}

std::vector<SurfaceRow> surface(const GpModel& model, const CandidateSet& grid) {
    std::vector<double> means;
    std::vector<double> variances;
    model.posterior_many(grid.points(), means, variances);
    std::vector<SurfaceRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back(SurfaceRow{grid.point(i), means[i], std::sqrt(std::max(variances[i], 0.0))});
    }
    return rows;
}

void write_surface_csv(std::span<const SurfaceRow> rows, std::ostream& out) {
    out << "a_itn,a_irs,post_mean,post_sd\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", row.policy.a_itn,
                      row.policy.a_irs, row.post_mean, row.post_sd);
        out << buf;
    }
}

}  // namespace polex
