#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybridcover/sample.hpp"

namespace hc {

enum class TailKind {
    ParetoUnit,  // S(t|w) = t^(-1/gamma(w)), t >= 1
    Gpd,         // S(t|w) = (1 + t gamma(w) / sigma)^(-1/gamma(w)), t >= 0
};

const char* to_string(TailKind kind);
TailKind tail_kind_from_string(const std::string& name);

// Heavy-tailed conditional loss law whose shape depends on covariates through
// gamma(w) = exp(-a - <b, w>). Coefficients are stored as (a, b_1, ..., b_d).
// Immutable after construction.
class TailLinkModel {
public:
    TailLinkModel(TailKind kind, std::vector<double> link_coeffs, double sigma = 1.0);

    TailKind kind() const noexcept { return kind_; }
    const std::vector<double>& link_coeffs() const noexcept { return coeffs_; }
    double sigma() const noexcept { return sigma_; }
    std::size_t covariate_dim() const noexcept { return coeffs_.size() - 1; }
    double support_start() const noexcept { return kind_ == TailKind::ParetoUnit ? 1.0 : 0.0; }

    double tail_index(std::span<const double> w) const;
    double survival(double t, std::span<const double> w) const;
    // The loss level q with P(Y <= q | w) = p.
    double quantile(double p, std::span<const double> w) const;
    double log_density(double t, std::span<const double> w) const;

    // E[Y | Y > s, W = w]; throws UndefinedMomentError when gamma(w) >= 1.
    double mean_excess(double s, std::span<const double> w) const;
    // Median of Y given Y > s, W = w.
    double median_excess(double s, std::span<const double> w) const;

    // Inverse-transform draws at a fixed covariate; deterministic per (seed, stream).
    std::vector<double> sample(std::span<const double> w, std::size_t count, std::uint64_t seed,
                               std::uint64_t stream = 0) const;

    std::string to_json() const;
    static TailLinkModel from_json(const std::string& text);

    bool operator==(const TailLinkModel& other) const = default;

private:
    void check_support(double t) const;
    void check_dim(std::span<const double> w) const;

    TailKind kind_;
    std::vector<double> coeffs_;
    double sigma_;
};

// gamma(w) = exp(-a - b w) with gamma(w_lo) = gamma_hi and gamma(w_hi) = gamma_lo.
TailLinkModel link_from_gamma_range(TailKind kind, double gamma_at_zero, double gamma_at_one,
                                    double sigma = 1.0);

// W ~ U[0,1]^d, Y | W drawn from the model. Rows are generated in order from a
// single stream so a prefix of a larger sample equals the smaller sample.
LossSample simulate_dataset(const TailLinkModel& model, std::size_t rows, std::uint64_t seed,
                            std::uint64_t stream = 0);

// ParetoUnit log-likelihood in the link coefficients and its closed-form gradient.
double pareto_log_likelihood(const LossSample& sample, std::span<const double> coeffs);
std::vector<double> pareto_log_likelihood_gradient(const LossSample& sample,
                                                   std::span<const double> coeffs);
double gpd_log_likelihood(const LossSample& sample, std::span<const double> coeffs, double sigma);

struct FitOptions {
    // When set, a GPD is fitted to the excesses y - threshold of losses above it.
    std::optional<double> exceedance_threshold;
    int starts = 5;
    int max_iterations = 500;
    double rel_tolerance = 1e-8;
    std::uint64_t jitter_seed = 7;
};

struct FitResult {
    TailLinkModel model;
    double log_likelihood = 0.0;
    int iterations = 0;
    int converged_starts = 0;
    std::size_t used_rows = 0;
    std::size_t excluded_zero = 0;  // zero losses dropped from a GPD fit
    std::size_t below_threshold = 0;
};

// Maximum-likelihood fit of the link coefficients (and sigma for GPD).
// Throws DataError for undersized samples and FitError if no start converges.
FitResult fit_mle(const LossSample& sample, TailKind kind, const FitOptions& options = {});

}  // namespace hc
