#include "hybridcover/compare.hpp"

#include <algorithm>
#include <cmath>

#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

namespace hc {

double capped_premium(const LossSample& sample, double m, double tau_trad) {
    if (sample.empty()) throw DataError("empty loss sample");
    if (!(m > 0.0)) throw DomainError("cap must be positive");
    std::vector<double> paid(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) paid[i] = std::min(sample.y(i), m);
    return (1.0 + tau_trad) * pairwise_mean(paid);
}

CapSolution solve_cap(const LossSample& sample, double target, double tau_trad) {
    if (sample.empty()) throw DataError("empty loss sample");
    if (!(target > 0.0)) throw DomainError("target premium must be positive");
    const auto losses = sample.losses();
    const double top = *std::max_element(losses.begin(), losses.end());
    if (!(top > 0.0)) throw DomainError("all losses are zero; no cap reaches a positive premium");
    const double saturated = capped_premium(sample, top, tau_trad);
    constexpr double rel_tol = 1e-9;
    if (target > saturated * (1.0 + rel_tol))
        throw DomainError("target premium exceeds the uncapped premium");

    // Invariant: premium(lo) < target <= premium(hi); the premium is strictly
    // increasing below max y, so hi converges to the smallest solution.
    double lo = 0.0;
    double hi = top;
    double p_hi = saturated;
    CapSolution out;
    while (out.iterations < 200 && p_hi - target > rel_tol * target) {
        ++out.iterations;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double p_mid = capped_premium(sample, mid, tau_trad);
        if (p_mid >= target) {
            hi = mid;
            p_hi = p_mid;
        } else {
            lo = mid;
        }
    }
    out.m = hi;
    out.premium = p_hi;
    return out;
}

std::vector<ComparisonRow> comparison_sweep(const LossSample& sample, const PayoffFamily& family,
                                            std::span<const double> theta_hat,
                                            std::span<const double> s_grid,
                                            std::span<const double> tau_index_list, double tau_trad,
                                            const Recalibrate& recalibrate) {
    if (sample.empty()) throw DataError("empty loss sample");
    const auto losses = sample.losses();
    const double top = *std::max_element(losses.begin(), losses.end());
    std::vector<ComparisonRow> rows;
    std::vector<double> ratios(sample.rows());
    for (double s : s_grid) {
        const PayoffFamily at_s = family.with_threshold(s);
        const std::vector<double> theta =
            recalibrate ? recalibrate(at_s) : std::vector<double>(theta_hat.begin(), theta_hat.end());

        for (std::size_t i = 0; i < sample.rows(); ++i)
            ratios[i] = compensation_ratio(hybrid_payout(sample.y(i), sample.w(i), at_s, theta).x,
                                           sample.y(i));
        const double ratio_hybrid = pairwise_mean(ratios);

        for (double tau_index : tau_index_list) {
            ComparisonRow row;
            row.s = s;
            row.tau_index = tau_index;
            row.theta = theta;
            row.ratio_hybrid = ratio_hybrid;
            row.premium_hybrid = split_premium(sample, at_s, theta, tau_trad, tau_index);
            try {
                const CapSolution cap = solve_cap(sample, row.premium_hybrid, tau_trad);
                row.m_of_s = cap.m;
                row.premium_capped = cap.premium;
            } catch (const DomainError&) {
                row.saturated = true;
                row.m_of_s = top;
                row.premium_capped = capped_premium(sample, top, tau_trad);
            }
            for (std::size_t i = 0; i < sample.rows(); ++i)
                ratios[i] = compensation_ratio(capped_payout(sample.y(i), row.m_of_s), sample.y(i));
            row.ratio_capped = pairwise_mean(ratios);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace hc
