#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"
#include "hybridcover/objective.hpp"

using namespace hc;

namespace {

// Composite Simpson on [0, x] of v^(1/g) phi1(v), with the prefactor applied
// afterwards. Used as an oracle independent of the library quadrature.
double simpson_Phi1(const MetricConfig& c, double x, double g) {
    const int panels = 200000;
    const double h = x / panels;
    auto f = [&](double v) { return std::pow(v, 1.0 / g) * phi1(c, v); };
    double sum = f(0.0) + f(x);
    for (int i = 1; i < panels; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return std::pow(x, -1.0 / g) * sum * h / 3.0;
}

MetricConfig identity_zero_aversion() {
    MetricConfig c;
    c.loss = LossKind::Identity;
    c.kappa = 0.0;
    c.pi_plus = 1.0;
    return c;
}

const TailLinkModel kSim(TailKind::ParetoUnit, {0.35667494393873245, 1.2527629684953681});

PayoffFamily sim_family(double s) {
    return PayoffFamily(PayoffKind::ExpLink1D, UpperStat::MeanExcess, s, kSim, ThetaBox{{0.0}, {5.0}},
                        ClampSource::Oracle);
}

}  // namespace

TEST_CASE("utility and price aversion") {
    MetricConfig id;
    id.loss = LossKind::Identity;
    CHECK(metric_L(id, 0.3) == 0.3);
    const MetricConfig eu;
    CHECK(metric_L(eu, 0.0) == -1.0);
    CHECK(metric_L(eu, 1.0) == doctest::Approx(-0.22313).epsilon(1e-4));
    CHECK(metric_L_prime(eu, 0.0) == doctest::Approx(1.5));
    CHECK(price_f(eu, 0.0) == 0.0);
    CHECK(price_f(eu, 1.0) == doctest::Approx(0.7075).epsilon(1e-12));
    MetricConfig lg;
    lg.aversion = AversionKind::Logistic;
    CHECK(price_f(lg, 1e6) == doctest::Approx(lg.kappa));
    CHECK(price_f(lg, 0.0) == doctest::Approx(lg.kappa / 2));
    CHECK_THROWS_AS(price_f(eu, -0.1), DomainError);
    double prev = 0.0;
    for (double p = 0.0; p < 20.0; p += 0.1) {
        CHECK(price_f(eu, p) >= prev);
        prev = price_f(eu, p);
    }
}

TEST_CASE("limit functions") {
    const MetricConfig eu;
    CHECK(phi0(eu, 1.0) == 1.0);
    CHECK(phi1(eu, 1.0) == -1.5);
    CHECK(phi0(eu, 2.0) == doctest::Approx(std::exp(-1.5)));
    const MetricConfig id = identity_zero_aversion();
    CHECK(phi0(id, 2.5) == 2.5);
    CHECK(phi1(id, 2.5) == 1.0);
    MetricConfig no_limit;
    no_limit.loss = LossKind::Identity;
    CHECK_THROWS_AS(phi0(no_limit, 1.0), ConfigError);
    MetricConfig saturated = no_limit;
    saturated.pi_plus = 100.0;  // f close to kappa = 1.415 > 1
    CHECK_THROWS_AS(phi1(saturated, 1.0), ConfigError);
}

TEST_CASE("limit assumption: utility ratio converges to phi0 as pi approaches pi_plus") {
    const MetricConfig eu;
    const double pi_plus = 1.6;
    double prev = INFINITY;
    for (double gap : {0.5, 0.1, 0.02, 0.004}) {
        const double f = price_f(eu, pi_plus - gap);
        double sup = 0.0;
        for (double t = 0.0; t <= 5.0; t += 0.05)
            sup = std::max(sup, std::abs(metric_L(eu, t - f) / metric_L(eu, 1.0 - f) - phi0(eu, t)));
        CHECK(sup <= prev);
        prev = sup;
    }
    CHECK(prev < 1e-9);  // the exponential ratio is exact in f
}

TEST_CASE("special function values") {
    const MetricConfig id = identity_zero_aversion();
    CHECK(Phi1(id, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(Phi0(id, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(psi(id, 1.0, 1.0, 0.15, 1.0) == doctest::Approx(0.925));
    CHECK_THROWS_AS(Phi1(id, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(Phi1(id, 1.0, 0.0), DomainError);
}

TEST_CASE("closed forms agree with adaptive quadrature and an independent Simpson rule") {
    const MetricConfig eu;
    MetricConfig id;
    id.loss = LossKind::Identity;
    id.pi_plus = 0.4;
    for (const MetricConfig* c : std::initializer_list<const MetricConfig*>{&eu, &id})
        for (double x : {0.5, 1.0, 2.0, 5.0})
            for (double g : {0.2, 0.5, 0.7, 1.0}) {
                const double closed = Phi1(*c, x, g);
                CHECK(std::abs(closed - Phi1_quadrature(*c, x, g)) < 1e-8);
                CHECK(std::abs(closed - simpson_Phi1(*c, x, g)) < 1e-7);
                const double unscaled = Phi1(*c, x, g, Phi1Form::Unscaled);
                CHECK(std::abs(unscaled - Phi1_quadrature(*c, x, g, Phi1Form::Unscaled)) <
                      1e-8 * std::max(1.0, std::abs(unscaled)));
                CHECK(unscaled == doctest::Approx(closed * std::pow(x, 1.0 / g)).epsilon(1e-12));
            }
}

TEST_CASE("pareto excess: conditional phi0 expectation equals phi0 - Phi1") {
    // V = Y / s with survival v^(-1/g) on [1, inf); the index branch pays x, so
    // the exceedance ratio is x / V. Integration by parts gives phi0(x) - Phi1.
    const MetricConfig eu;
    for (double g : {0.2, 0.5})
        for (double x : {1.0, 1.7, 3.0}) {
            auto integrand = [&](double v) {
                return phi0(eu, x / v) * (1.0 / g) * std::pow(v, -1.0 / g - 1.0);
            };
            const double direct = integrate_gk15(integrand, 1.0, 50.0, 1e-12).value +
                                  integrate_gk15(integrand, 50.0, 1e6, 1e-12).value;
            CHECK(direct == doctest::Approx(phi0(eu, x) - Phi1(eu, x, g)).epsilon(1e-7));
        }
}

TEST_CASE("empirical objective on fully traditional samples") {
    LossSample data;
    const double w[] = {0.5};
    for (double y : {0.0, 0.3, 1.0, 1.5}) data.push_back(y, w);
    const PayoffFamily fam = sim_family(2.0);
    const double theta[] = {1.0};
    MetricConfig id = identity_zero_aversion();
    CHECK(empirical_objective(data, fam, theta, id) == 1.0);
    MetricConfig eu;
    eu.kappa = 0.0;
    CHECK(empirical_objective(data, fam, theta, eu) == doctest::Approx(-std::exp(-1.5)));
    CHECK_THROWS_AS(empirical_objective(LossSample{}, fam, theta, eu), DataError);
}

TEST_CASE("one-step evaluator reproduces the free function and the premium") {
    const LossSample data = simulate_dataset(kSim, 2000, 31);
    const PayoffFamily fam = sim_family(empirical_quantile(data.losses(), 0.85));
    const MetricConfig eu;
    const OneStepObjective obj(data, fam, eu);
    for (double t : {0.0, 0.7, 1.9, 3.3, 5.0}) {
        const double th[] = {t};
        CHECK(obj(th) == empirical_objective(data, fam, th, eu));
        CHECK(obj.premium(th) == doctest::Approx(empirical_premium(data, fam, th, eu.tau)).epsilon(1e-14));
    }
}

TEST_CASE("psi-sum and factored forms agree") {
    const LossSample data = simulate_dataset(kSim, 3000, 32);
    const PayoffFamily fam = sim_family(empirical_quantile(data.losses(), 0.85));
    for (LossKind kind : {LossKind::ExpUtility, LossKind::Identity}) {
        MetricConfig c;
        c.loss = kind;
        c.kappa = kind == LossKind::Identity ? 0.5 : 1.415;
        for (double t : {0.0, 1.5, 4.0}) {
            const double th[] = {t};
            const double pi = empirical_premium(data, fam, th, c.tau);
            const double a = approx_objective(kSim, data.covariates(), fam, th, c, pi);
            const double b = approx_objective_factored(kSim, data.covariates(), fam, th, c, pi);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
        }
    }
}

TEST_CASE("two-step evaluator matches the factored form with caching") {
    const LossSample data = simulate_dataset(kSim, 3000, 33);
    const PayoffFamily fam = sim_family(empirical_quantile(data.losses(), 0.85));
    const LossSample joint = data.head(500);
    const FitResult fit = fit_mle(joint, TailKind::ParetoUnit);
    const MetricConfig eu;
    const TwoStepObjective two(joint, data.covariates(), fit.model, fam, eu);
    for (double t : {0.0, 0.9, 2.2, 5.0}) {
        const double th[] = {t};
        const auto v = two.evaluate(th);
        CHECK(v.premium == doctest::Approx(empirical_premium(joint, fam, th, eu.tau)).epsilon(1e-14));
        const double ref = approx_objective_factored(fit.model, data.covariates(), fam, th, eu, v.premium);
        CHECK(std::abs(v.value - ref) <= 1e-13 * std::abs(ref));
    }
}

TEST_CASE("no tail mass leaves only the price term") {
    const TailLinkModel thin(TailKind::ParetoUnit, {5.0, 0.0});  // gamma ~ 0.0067
    CovariateSample cov(1);
    for (double w : {0.1, 0.6}) cov.push_back(std::vector<double>{w});
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, 1e9, thin, ThetaBox{{0.0}, {1.0}});
    const MetricConfig eu;
    const double th[] = {0.5};
    CHECK(approx_objective(thin, cov, fam, th, eu, 0.8) == metric_L(eu, 1.0 - price_f(eu, 0.8)));
}

TEST_CASE("approximation ignores joint losses beyond the premium and fit") {
    const LossSample data = simulate_dataset(kSim, 1500, 34);
    const PayoffFamily fam = sim_family(empirical_quantile(data.losses(), 0.85));
    const MetricConfig eu;
    const double th[] = {2.0};
    const double pi = empirical_premium(data, fam, th, eu.tau);
    std::vector<double> shuffled(data.losses().begin(), data.losses().end());
    std::reverse(shuffled.begin(), shuffled.end());
    const LossSample permuted(shuffled, data.covariates());
    const double a = approx_objective(kSim, data.covariates(), fam, th, eu, pi);
    const double b = approx_objective(kSim, permuted.covariates(), fam, th, eu, pi);
    CHECK(a == b);
}

TEST_CASE("psi is negative for exponential utility across the simulation range") {
    const MetricConfig eu;
    for (double S : {0.0, 0.1, 0.15, 0.5})
        for (double g : {0.2, 0.45, 0.7})
            for (double x : {1.0, 1.5, 3.0})
                for (double pi : {0.5, 1.6, 3.0}) CHECK(psi(eu, pi, x, S, g) < 0.0);
}

TEST_CASE("partial cover curve") {
    LossSample data;
    const double w[] = {0.5};
    for (double y : {1.0, 2.0, 4.0}) data.push_back(y, w);
    MetricConfig id;
    id.loss = LossKind::Identity;
    id.kappa = 0.0;
    id.tau = 0.0;
    const std::vector<double> grid = {1.0, 2.0, 10.0};
    const auto curve = partial_cover_curve(data, id, grid);
    CHECK(curve[0] == doctest::Approx((1.0 + 0.5 + 0.25) / 3));
    CHECK(curve[1] == doctest::Approx((1.0 + 1.0 + 0.5) / 3));
    CHECK(curve[2] == doctest::Approx(1.0));
}

TEST_CASE("trigger comparison with exact agreement has zero gap") {
    // Index equals the loss event exactly: y > s iff w = 1.
    const TailLinkModel clamp(TailKind::ParetoUnit, {-std::log(0.9), 0.0});
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, 2.0, clamp, ThetaBox{{0.0}, {2.0}});
    LossSample data;
    const double on[] = {1.0};
    const double off[] = {0.0};
    for (double y : {3.0, 5.0, 9.0}) data.push_back(y, on);
    for (double y : {0.0, 1.0, 1.9}) data.push_back(y, off);
    const double th[] = {1.0};  // e^1 > 2 triggers at w = 1, e^0 = 1 does not at w = 0
    const MetricConfig eu;
    const auto cmp = compare_trigger(data, fam, th, 2.0, eu);
    CHECK(cmp.mismatch.p_minus == 0.0);
    CHECK(cmp.mismatch.p_plus == 0.0);
    CHECK(cmp.gap == 0.0);
}
