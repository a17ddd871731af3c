#include <doctest.h>

#include <cmath>
#include <vector>

#include "hybridcover/calibrate.hpp"
#include "hybridcover/compare.hpp"
#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

using namespace hc;

namespace {

LossSample two_losses() {
    LossSample s;
    const double w[] = {0.5};
    s.push_back(1.0, w);
    s.push_back(3.0, w);
    return s;
}

const TailLinkModel kSim(TailKind::ParetoUnit, {0.35667494393873245, 1.2527629684953681});

}  // namespace

TEST_CASE("capped premium") {
    const LossSample s = two_losses();
    CHECK(capped_premium(s, 2.0, 0.0) == 1.5);
    CHECK(capped_premium(s, 1e-12, 0.0) == doctest::Approx(1e-12));
    CHECK(capped_premium(s, 10.0, 0.4) == doctest::Approx(1.4 * 2.0));
    CHECK_THROWS_AS(capped_premium(s, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(capped_premium(LossSample{}, 1.0, 0.0), DataError);
}

TEST_CASE("solve cap inverts the capped premium") {
    const LossSample s = two_losses();
    CHECK(solve_cap(s, 1.5, 0.0).m == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(solve_cap(s, 2.0, 0.0).m == doctest::Approx(3.0).epsilon(1e-8));
    CHECK_THROWS_AS(solve_cap(s, 2.5, 0.0), DomainError);
    CHECK_THROWS_AS(solve_cap(s, 0.0, 0.0), DomainError);
    const LossSample big = simulate_dataset(kSim, 3000, 7);
    double prev = 0.0;
    for (double target = 0.2; target < 1.9; target += 0.1) {
        const auto cap = solve_cap(big, target, 0.4);
        CHECK(cap.m > prev);
        CHECK(std::abs(cap.premium - target) <= 1e-9 * target);
        prev = cap.m;
    }
}

TEST_CASE("degenerate family collapses to the capped contract at the threshold") {
    const LossSample data = simulate_dataset(kSim, 4000, 8);
    const double s = empirical_quantile(data.losses(), 0.85);
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, s, kSim, ThetaBox{{0.0}, {5.0}});
    const double theta[] = {0.0};  // e^0 = 1 < s, so phi = 1 everywhere
    const double grid[] = {s};
    const double taus[] = {0.4};
    const auto rows = comparison_sweep(data, fam, theta, grid, taus, 0.4);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].m_of_s == doctest::Approx(s).epsilon(1e-8));
    CHECK(rows[0].ratio_hybrid == doctest::Approx(rows[0].ratio_capped).epsilon(1e-8));
    CHECK_FALSE(rows[0].saturated);
}

TEST_CASE("sweep invariants") {
    const LossSample data = simulate_dataset(kSim, 5000, 9);
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, empirical_quantile(data.losses(), 0.85),
                           kSim, ThetaBox{{0.0}, {5.0}}, ClampSource::Oracle);
    const auto cal = one_step_calibrate(data, fam, MetricConfig{});
    std::vector<double> grid;
    for (double q : {0.7, 0.8, 0.9, 0.95}) grid.push_back(empirical_quantile(data.losses(), q));
    const std::vector<double> taus = {0.05, 0.1, 0.2, 0.4};
    const auto rows = comparison_sweep(data, fam, cal.theta_hat, grid, taus, 0.4);
    REQUIRE(rows.size() == grid.size() * taus.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.saturated) CHECK(std::abs(r.premium_hybrid - r.premium_capped) <= 1e-6 * r.premium_hybrid);
        CHECK(r.ratio_capped >= 0.0);
        CHECK(r.ratio_capped <= 1.0);
        if (i % taus.size() != 0) {
            const auto& prev = rows[i - 1];
            CHECK(r.m_of_s >= prev.m_of_s);  // larger index loading, larger budget
            CHECK(r.ratio_hybrid == prev.ratio_hybrid);
            CHECK(r.ratio_capped >= prev.ratio_capped);
        }
    }
}

TEST_CASE("recalibration callback is used per threshold") {
    const LossSample data = simulate_dataset(kSim, 1000, 10);
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, 2.0, kSim, ThetaBox{{0.0}, {5.0}});
    std::vector<double> seen;
    Recalibrate cb = [&](const PayoffFamily& f) {
        seen.push_back(f.threshold());
        return std::vector<double>{1.0};
    };
    const double base[] = {3.0};
    const std::vector<double> grid = {2.0, 3.0};
    const std::vector<double> taus = {0.1};
    const auto rows = comparison_sweep(data, fam, base, grid, taus, 0.4, cb);
    CHECK(seen == grid);
    CHECK(rows[0].theta == std::vector<double>{1.0});
}

TEST_CASE("saturated rows are flagged, not dropped") {
    LossSample data;
    const double w[] = {1.0};
    for (double y : {1.0, 1.0, 1.0, 50.0}) data.push_back(y, w);
    // Big clamp and a large index loading: the hybrid premium exceeds every capped premium.
    const TailLinkModel heavy(TailKind::ParetoUnit, {-std::log(0.95), 0.0});
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, 1.0, heavy, ThetaBox{{0.0}, {10.0}});
    const double theta[] = {10.0};
    const double grid[] = {1.0};
    const double taus[] = {3.0};
    const auto rows = comparison_sweep(data, fam, theta, grid, taus, 0.0);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].saturated);
    CHECK(rows[0].m_of_s == 50.0);
}

TEST_CASE("zero losses use the unit ratio convention") {
    LossSample data;
    const double w[] = {0.5};
    for (double y : {0.0, 0.0, 2.0, 4.0}) data.push_back(y, w);
    const PayoffFamily fam(PayoffKind::ExpLink1D, UpperStat::MeanExcess, 3.0, kSim, ThetaBox{{0.0}, {5.0}});
    const double theta[] = {0.0};
    const double grid[] = {3.0};
    const double taus[] = {0.4};
    const auto rows = comparison_sweep(data, fam, theta, grid, taus, 0.4);
    CHECK(rows[0].ratio_hybrid == doctest::Approx((1.0 + 1.0 + 1.0 + 0.75) / 4));
}
