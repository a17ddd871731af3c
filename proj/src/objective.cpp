#include "hybridcover/objective.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

namespace hc {

void validate(const MetricConfig& config) {
    if (config.loss == LossKind::ExpUtility && !(config.mu > 0.0))
        throw ConfigError("exponential utility needs mu > 0");
    if (!(config.kappa >= 0.0) || !std::isfinite(config.kappa))
        throw ConfigError("price aversion scale kappa must be nonnegative");
    if (!(config.beta > 0.0)) throw ConfigError("price aversion rate beta must be positive");
    if (!(config.tau > -1.0)) throw ConfigError("loading factor must exceed -1");
}

double metric_L(const MetricConfig& config, double x) {
    if (config.loss == LossKind::Identity) return x;
    return -std::exp(-config.mu * x);
}

double metric_L_prime(const MetricConfig& config, double x) {
    if (config.loss == LossKind::Identity) return 1.0;
    return config.mu * std::exp(-config.mu * x);
}

double price_f(const MetricConfig& config, double pi) {
    if (pi < 0.0 || std::isnan(pi)) throw DomainError("premium must be nonnegative");
    if (config.aversion == AversionKind::Logistic)
        return config.kappa / (1.0 + std::exp(-config.beta * pi));
    if (pi == 0.0) return 0.0;
    if (std::isinf(pi)) return config.kappa;
    // kappa pi^b / (1 + pi^b) = kappa / (1 + pi^-b), stable for large pi.
    return config.kappa / (1.0 + std::exp(-config.beta * std::log(pi)));
}

namespace {

double identity_aversion_at_limit(const MetricConfig& config) {
    if (!config.pi_plus)
        throw ConfigError("identity utility needs the limiting premium pi_plus");
    const double fp = price_f(config, *config.pi_plus);
    if (!(fp < 1.0))
        throw ConfigError("identity utility requires f(pi_plus) < 1, got " + std::to_string(fp));
    return fp;
}

void check_phi_args(double x, double gamma) {
    if (!(x > 0.0)) throw DomainError("Phi functions need x > 0");
    if (!(gamma > 0.0)) throw DomainError("Phi functions need gamma > 0");
}

}  // namespace

double phi0(const MetricConfig& config, double t) {
    if (config.loss == LossKind::ExpUtility) return std::exp(-config.mu * (t - 1.0));
    const double fp = identity_aversion_at_limit(config);
    return (t - fp) / (1.0 - fp);
}

double phi1(const MetricConfig& config, double t) {
    if (config.loss == LossKind::ExpUtility) return -config.mu * std::exp(-config.mu * (t - 1.0));
    const double fp = identity_aversion_at_limit(config);
    return 1.0 / (1.0 - fp);
}

double Phi1(const MetricConfig& config, double x, double gamma, Phi1Form form) {
    check_phi_args(x, gamma);
    const double inv_gamma = 1.0 / gamma;
    const double a = 1.0 + inv_gamma;
    if (config.loss == LossKind::Identity) {
        const double slope = phi1(config, 1.0);
        if (form == Phi1Form::WithPrefactor) return slope * x / a;
        return slope * std::pow(x, a) / a;
    }
    // int_0^x v^(a-1) e^(-mu v) dv = mu^(-a) * lower_gamma(a, mu x)
    const double mu = config.mu;
    double log_scale = std::lgamma(a) - a * std::log(mu);
    if (form == Phi1Form::WithPrefactor) log_scale -= inv_gamma * std::log(x);
    const double regularized = boost::math::gamma_p(a, mu * x);
    return -mu * std::exp(mu + log_scale) * regularized;
}

double Phi1_quadrature(const MetricConfig& config, double x, double gamma, Phi1Form form) {
    check_phi_args(x, gamma);
    const double inv_gamma = 1.0 / gamma;
    // The prefactor is folded into the integrand, (v/x)^(1/gamma), so the
    // absolute tolerance applies to the returned value.
    const double base = form == Phi1Form::WithPrefactor ? x : 1.0;
    auto integrand = [&](double v) { return std::pow(v / base, inv_gamma) * phi1(config, v); };
    constexpr double tol = 1e-10;
    if (x <= 1.0) return integrate_gk15(integrand, 0.0, x, tol).value;
    return integrate_gk15(integrand, 0.0, 1.0, 0.5 * tol).value +
           integrate_gk15(integrand, 1.0, x, 0.5 * tol).value;
}

double Phi0(const MetricConfig& config, double x, double gamma, Phi1Form form) {
    return 1.0 - phi0(config, x) + Phi1(config, x, gamma, form);
}

double psi(const MetricConfig& config, double pi, double phi_val, double S_s, double gamma,
           Phi1Form form) {
    const MetricConfig at_pi = config.with_pi_plus(pi);
    const double price_term = metric_L(config, 1.0 - price_f(config, pi));
    return price_term * (1.0 - S_s * Phi0(at_pi, phi_val, gamma, form));
}

namespace {

ObjectiveValue criterion_from_payouts(std::span<const double> losses,
                                      std::span<const double> payouts,
                                      const MetricConfig& config) {
    const double premium = (1.0 + config.tau) * pairwise_mean(payouts);
    const double f = price_f(config, premium);
    std::vector<double> terms(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i)
        terms[i] = metric_L(config, compensation_ratio(payouts[i], losses[i]) - f);
    return {pairwise_mean(terms), premium};
}

void require_covariates(const CovariateSample& cov, const PayoffFamily& family) {
    if (cov.empty()) throw DataError("empty covariate sample");
    if (cov.dim() != family.model().covariate_dim())
        throw DimensionError("covariate sample dimension does not match the payoff family");
}

}  // namespace

double empirical_objective(const LossSample& sample, const PayoffFamily& family,
                           std::span<const double> theta, const MetricConfig& config) {
    if (sample.empty()) throw DataError("empty loss sample");
    std::vector<double> payouts(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i)
        payouts[i] = hybrid_payout(sample.y(i), sample.w(i), family, theta).x;
    return criterion_from_payouts(sample.losses(), payouts, config).value;
}

double approx_objective(const TailLinkModel& fitted, const CovariateSample& cov,
                        const PayoffFamily& family, std::span<const double> theta,
                        const MetricConfig& config, double pi_hat, Phi1Form form) {
    require_covariates(cov, family);
    const double s = family.threshold();
    std::vector<double> terms(cov.rows());
    for (std::size_t j = 0; j < cov.rows(); ++j) {
        auto w = cov.row(j);
        terms[j] = psi(config, pi_hat, family.phi(theta, w), fitted.survival(s, w),
                       fitted.tail_index(w), form);
    }
    return pairwise_mean(terms);
}

double approx_objective_factored(const TailLinkModel& fitted, const CovariateSample& cov,
                                 const PayoffFamily& family, std::span<const double> theta,
                                 const MetricConfig& config, double pi_hat, Phi1Form form) {
    require_covariates(cov, family);
    const double s = family.threshold();
    const MetricConfig at_pi = config.with_pi_plus(pi_hat);
    std::vector<double> terms(cov.rows());
    for (std::size_t j = 0; j < cov.rows(); ++j) {
        auto w = cov.row(j);
        terms[j] = 1.0 - fitted.survival(s, w) *
                             Phi0(at_pi, family.phi(theta, w), fitted.tail_index(w), form);
    }
    return metric_L(config, 1.0 - price_f(config, pi_hat)) * pairwise_mean(terms);
}

OneStepObjective::OneStepObjective(const LossSample& sample, PayoffFamily family,
                                   MetricConfig config)
    : family_(std::move(family)),
      config_(std::move(config)),
      losses_(sample.losses().begin(), sample.losses().end()),
      covariates_(sample.covariates().data().begin(), sample.covariates().data().end()),
      upper_(sample.rows(), std::numeric_limits<double>::quiet_NaN()),
      dim_(sample.dim()) {
    if (sample.empty()) throw DataError("empty loss sample");
    validate(config_);
    const double s = family_.threshold();
    for (std::size_t i = 0; i < losses_.size(); ++i)
        if (losses_[i] > s) upper_[i] = family_.upper(sample.w(i));
}

double OneStepObjective::premium(std::span<const double> theta) const {
    return evaluate(theta).premium;
}

ObjectiveValue OneStepObjective::evaluate(std::span<const double> theta) const {
    if (theta.size() != family_.theta_dim()) throw DimensionError("theta has the wrong dimension");
    const double s = family_.threshold();
    std::vector<double> payouts(losses_.size());
    for (std::size_t i = 0; i < losses_.size(); ++i) {
        const double y = losses_[i];
        if (y <= s) {
            payouts[i] = y;
        } else {
            std::span<const double> w(covariates_.data() + i * dim_, dim_);
            payouts[i] = s * family_.phi_with_upper(theta, w, upper_[i]);
        }
    }
    return criterion_from_payouts(losses_, payouts, config_);
}

TwoStepObjective::TwoStepObjective(const LossSample& joint, const CovariateSample& cov,
                                   const TailLinkModel& fitted, PayoffFamily family,
                                   MetricConfig config, Phi1Form form)
    : premium_source_(joint, family, config),
      family_(std::move(family)),
      config_(std::move(config)),
      form_(form),
      covariates_(cov.data().begin(), cov.data().end()),
      dim_(cov.dim()) {
    require_covariates(cov, family_);
    const double s = family_.threshold();
    const std::size_t m = cov.rows();
    survival_.resize(m);
    gamma_.resize(m);
    upper_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        auto w = cov.row(j);
        survival_[j] = fitted.survival(s, w);
        gamma_[j] = fitted.tail_index(w);
        upper_[j] = family_.upper(w);
    }
    if (config_.loss == LossKind::ExpUtility) {
        phi0_floor_.resize(m);
        phi0_cap_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            phi0_floor_[j] = Phi0(config_, 1.0, gamma_[j], form_);
            phi0_cap_[j] = Phi0(config_, std::max(upper_[j], s) / s, gamma_[j], form_);
        }
    }
}

double TwoStepObjective::evaluate_with_premium(std::span<const double> theta, double pi_hat) const {
    if (theta.size() != family_.theta_dim()) throw DimensionError("theta has the wrong dimension");
    const double s = family_.threshold();
    const MetricConfig at_pi = config_.with_pi_plus(pi_hat);
    const bool cached = !phi0_floor_.empty();
    std::vector<double> terms(survival_.size());
    for (std::size_t j = 0; j < survival_.size(); ++j) {
        std::span<const double> w(covariates_.data() + j * dim_, dim_);
        const double variable = family_.variable_part(theta, w);
        const double upper = upper_[j];
        double value;
        // Mirrors max(min(upper, variable), s) / s branch by branch.
        if (std::min(upper, variable) <= s) {
            value = cached ? phi0_floor_[j] : Phi0(at_pi, 1.0, gamma_[j], form_);
        } else if (variable >= upper) {
            value = cached ? phi0_cap_[j] : Phi0(at_pi, upper / s, gamma_[j], form_);
        } else {
            value = Phi0(at_pi, variable / s, gamma_[j], form_);
        }
        terms[j] = 1.0 - survival_[j] * value;
    }
    return metric_L(config_, 1.0 - price_f(config_, pi_hat)) * pairwise_mean(terms);
}

ObjectiveValue TwoStepObjective::evaluate(std::span<const double> theta) const {
    const double pi_hat = premium_source_.premium(theta);
    return {evaluate_with_premium(theta, pi_hat), pi_hat};
}

std::vector<double> partial_cover_curve(const LossSample& sample, const MetricConfig& config,
                                        std::span<const double> s_grid) {
    if (sample.empty()) throw DataError("empty loss sample");
    std::vector<double> out;
    out.reserve(s_grid.size());
    std::vector<double> payouts(sample.rows());
    for (double s : s_grid) {
        for (std::size_t i = 0; i < sample.rows(); ++i) payouts[i] = capped_payout(sample.y(i), s);
        out.push_back(criterion_from_payouts(sample.losses(), payouts, config).value);
    }
    return out;
}

TriggerComparison compare_trigger(const LossSample& sample, const PayoffFamily& family,
                                  std::span<const double> theta, double s_tilde,
                                  const MetricConfig& config) {
    if (sample.empty()) throw DataError("empty loss sample");
    std::vector<double> hybrid(sample.rows());
    std::vector<double> triggered(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        hybrid[i] = hybrid_payout(sample.y(i), sample.w(i), family, theta).x;
        triggered[i] = trigger_payout(sample.y(i), sample.w(i), family, theta, s_tilde).x;
    }
    TriggerComparison out;
    out.mismatch = trigger_mismatch(sample, family, theta, s_tilde);
    out.objective_hybrid = criterion_from_payouts(sample.losses(), hybrid, config).value;
    out.objective_trigger = criterion_from_payouts(sample.losses(), triggered, config).value;
    out.gap = std::abs(out.objective_trigger - out.objective_hybrid);
    return out;
}

}  // namespace hc
