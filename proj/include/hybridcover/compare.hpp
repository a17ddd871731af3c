#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hybridcover/contract.hpp"
#include "hybridcover/sample.hpp"

namespace hc {

// (1 + tau_trad) * mean min(y, m).
double capped_premium(const LossSample& sample, double m, double tau_trad);

struct CapSolution {
    double m = 0.0;
    double premium = 0.0;  // capped premium at m
    int iterations = 0;
};

// Smallest cap whose capped premium reaches the target, by bisection on
// [0, max y] until the premium is within 1e-9 relative of the target. Throws
// DomainError when the target is not positive or exceeds the saturated premium.
CapSolution solve_cap(const LossSample& sample, double target_premium, double tau_trad);

struct ComparisonRow {
    double s = 0.0;
    double tau_index = 0.0;
    double premium_hybrid = 0.0;
    double m_of_s = 0.0;
    double premium_capped = 0.0;
    double ratio_hybrid = 0.0;  // mean X_hybrid / Y
    double ratio_capped = 0.0;  // mean min(Y, m) / Y
    bool saturated = false;     // no cap reaches the hybrid premium; m = max y
    std::vector<double> theta;
};

// Returns theta for a family rebuilt at a new threshold.
using Recalibrate = std::function<std::vector<double>(const PayoffFamily&)>;

// One row per (s, tau_index): hybrid premium with loading tau_trad on the
// indemnity part and tau_index on the index part, and the cap of the capped
// contract with the same premium under loading tau_trad. Without a
// recalibration callback theta_hat is reused at every s.
std::vector<ComparisonRow> comparison_sweep(const LossSample& sample, const PayoffFamily& family,
                                            std::span<const double> theta_hat,
                                            std::span<const double> s_grid,
                                            std::span<const double> tau_index_list, double tau_trad,
                                            const Recalibrate& recalibrate = {});

}  // namespace hc
