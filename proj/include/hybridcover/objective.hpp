#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybridcover/contract.hpp"
#include "hybridcover/dists.hpp"
#include "hybridcover/sample.hpp"

namespace hc {

enum class LossKind {
    Identity,    // L(x) = x
    ExpUtility,  // L(x) = -exp(-mu x)
};

enum class AversionKind {
    Logistic,  // f(pi) = kappa / (1 + exp(-beta pi))
    Rational,  // f(pi) = kappa pi^beta / (1 + pi^beta)
};

// The decision metric: utility-like L, price aversion f and premium loading.
// kappa may exceed 1; f is only required to be bounded and non-decreasing.
struct MetricConfig {
    LossKind loss = LossKind::ExpUtility;
    double mu = 1.5;
    AversionKind aversion = AversionKind::Rational;
    double kappa = 1.415;
    double beta = 1.65;
    double tau = 0.10;
    // Premium level at which the limit functions phi0/phi1 are evaluated.
    // The objectives below overwrite it with the current empirical premium.
    std::optional<double> pi_plus;

    MetricConfig with_pi_plus(double pi) const {
        MetricConfig c = *this;
        c.pi_plus = pi;
        return c;
    }
};

void validate(const MetricConfig& config);

double metric_L(const MetricConfig& config, double x);
double metric_L_prime(const MetricConfig& config, double x);
double price_f(const MetricConfig& config, double pi);

// Limits of L(t - f)/L(1 - f) and L'(t - f)/L(1 - f). For Identity these need
// pi_plus with f(pi_plus) < 1, otherwise ConfigError.
double phi0(const MetricConfig& config, double t);
double phi1(const MetricConfig& config, double t);

// Which display of the special function to use. WithPrefactor carries the
// x^(-1/gamma) factor produced by the change of variables u = x / v and is the
// default; Unscaled drops it and exists to demonstrate the difference.
enum class Phi1Form { WithPrefactor, Unscaled };

// Phi1(x, gamma) = x^(-1/gamma) int_0^x v^(1/gamma) phi1(v) dv, closed form.
double Phi1(const MetricConfig& config, double x, double gamma,
            Phi1Form form = Phi1Form::WithPrefactor);
// Same integral by adaptive Gauss-Kronrod quadrature (abs tol 1e-10).
double Phi1_quadrature(const MetricConfig& config, double x, double gamma,
                       Phi1Form form = Phi1Form::WithPrefactor);
double Phi0(const MetricConfig& config, double x, double gamma,
            Phi1Form form = Phi1Form::WithPrefactor);

// L(1 - f(pi)) * (1 - S_s * Phi0(phi_val, gamma)), with phi0/phi1 taken at pi.
double psi(const MetricConfig& config, double pi, double phi_val, double S_s, double gamma,
           Phi1Form form = Phi1Form::WithPrefactor);

// Exact empirical criterion: mean of L(X_i / Y_i - f(pi_hat)) with pi_hat the
// loaded mean payout of the same sample.
double empirical_objective(const LossSample& sample, const PayoffFamily& family,
                           std::span<const double> theta, const MetricConfig& config);

// Tail approximation averaged over covariates: mean of
// psi(pi_hat, phi_theta(W_j); S(s|W_j), gamma(W_j)) under the fitted model.
double approx_objective(const TailLinkModel& fitted, const CovariateSample& cov,
                        const PayoffFamily& family, std::span<const double> theta,
                        const MetricConfig& config, double pi_hat,
                        Phi1Form form = Phi1Form::WithPrefactor);

// L(1 - f(pi_hat)) * mean_j [1 - S(s|W_j) Phi0(phi_theta(W_j), gamma(W_j))].
double approx_objective_factored(const TailLinkModel& fitted, const CovariateSample& cov,
                                 const PayoffFamily& family, std::span<const double> theta,
                                 const MetricConfig& config, double pi_hat,
                                 Phi1Form form = Phi1Form::WithPrefactor);

struct ObjectiveValue {
    double value = 0.0;
    double premium = 0.0;
};

// Empirical criterion over a fixed joint sample, with the clamp statistic of
// every exceedance cached. Evaluation is a pure function of theta.
class OneStepObjective {
public:
    OneStepObjective(const LossSample& sample, PayoffFamily family, MetricConfig config);

    ObjectiveValue evaluate(std::span<const double> theta) const;
    double premium(std::span<const double> theta) const;
    double operator()(std::span<const double> theta) const { return evaluate(theta).value; }

    const PayoffFamily& family() const noexcept { return family_; }
    std::size_t rows() const noexcept { return losses_.size(); }

private:
    PayoffFamily family_;
    MetricConfig config_;
    std::vector<double> losses_;
    std::vector<double> covariates_;  // row-major, only rows with y > s are read
    std::vector<double> upper_;       // clamp statistic for exceedances, NaN otherwise
    std::size_t dim_;
};

// Two-step criterion: premium from the joint sample, tail terms averaged over a
// covariate sample under a fitted model. Per-row survival, tail index, clamp
// and the clamp-boundary values of Phi0 are cached at construction.
class TwoStepObjective {
public:
    TwoStepObjective(const LossSample& joint, const CovariateSample& cov, const TailLinkModel& fitted,
                     PayoffFamily family, MetricConfig config,
                     Phi1Form form = Phi1Form::WithPrefactor);

    ObjectiveValue evaluate(std::span<const double> theta) const;
    double operator()(std::span<const double> theta) const { return evaluate(theta).value; }

    // Same tail average with an externally supplied premium.
    double evaluate_with_premium(std::span<const double> theta, double pi_hat) const;

private:
    OneStepObjective premium_source_;
    PayoffFamily family_;
    MetricConfig config_;
    Phi1Form form_;
    std::vector<double> covariates_;
    std::size_t dim_;
    std::vector<double> survival_;
    std::vector<double> gamma_;
    std::vector<double> upper_;
    std::vector<double> phi0_floor_;  // Phi0(1, gamma_j), ExpUtility only
    std::vector<double> phi0_cap_;    // Phi0(upper_j / s, gamma_j), ExpUtility only
};

// Criterion for the plain capped cover X = min(Y, s) across thresholds.
std::vector<double> partial_cover_curve(const LossSample& sample, const MetricConfig& config,
                                        std::span<const double> s_grid);

struct TriggerComparison {
    TriggerMismatch mismatch;
    double objective_hybrid = 0.0;   // loss-triggered contract
    double objective_trigger = 0.0;  // index-triggered contract
    double gap = 0.0;                // |objective_trigger - objective_hybrid|
};

TriggerComparison compare_trigger(const LossSample& sample, const PayoffFamily& family,
                                  std::span<const double> theta, double s_tilde,
                                  const MetricConfig& config);

}  // namespace hc
