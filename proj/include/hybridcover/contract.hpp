#pragma once

#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "hybridcover/dists.hpp"
#include "hybridcover/sample.hpp"

namespace hc {

enum class PayoffKind {
    ExpLink1D,  // variable part exp(theta * w), scalar covariate
    Linear2D,   // variable part theta_1 w_1 + theta_2 w_2
};

enum class UpperStat { MeanExcess, MedianExcess };

// Which law backs the clamp statistic: the model estimated from the data, or
// the data-generating model in oracle simulations.
enum class ClampSource { Fitted, Oracle };

struct ThetaBox {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const noexcept { return lower.size(); }
    bool contains(std::span<const double> theta) const;
    std::vector<double> midpoint() const;
};

// phi_theta(w) = max(min(upper_stat(s, w), variable_part(theta, w)), s) / s.
class PayoffFamily {
public:
    PayoffFamily(PayoffKind kind, UpperStat upper_stat, double s, TailLinkModel model, ThetaBox box,
                 ClampSource clamp_source = ClampSource::Fitted);

    PayoffKind kind() const noexcept { return kind_; }
    UpperStat upper_stat() const noexcept { return upper_stat_; }
    ClampSource clamp_source() const noexcept { return clamp_source_; }
    double threshold() const noexcept { return s_; }
    const TailLinkModel& model() const noexcept { return model_; }
    const ThetaBox& box() const noexcept { return box_; }
    std::size_t theta_dim() const noexcept { return box_.dim(); }

    double variable_part(std::span<const double> theta, std::span<const double> w) const;
    double upper(std::span<const double> w) const;
    double phi(std::span<const double> theta, std::span<const double> w) const;
    // Same as phi() with the clamp statistic supplied by the caller.
    double phi_with_upper(std::span<const double> theta, std::span<const double> w, double upper) const;

    PayoffFamily with_threshold(double s) const;
    PayoffFamily with_model(TailLinkModel model) const;

private:
    PayoffKind kind_;
    UpperStat upper_stat_;
    double s_;
    TailLinkModel model_;
    ThetaBox box_;
    ClampSource clamp_source_;
};

enum class Branch { Traditional, Index };

struct ContractPayout {
    double x = 0.0;
    Branch branch = Branch::Traditional;
};

// y on {y <= s}, s * phi_theta(w) on {y > s}.
ContractPayout hybrid_payout(double y, std::span<const double> w, const PayoffFamily& family,
                             std::span<const double> theta);

// Trigger decided on the index: s * phi_theta(w) > s_tilde pays the index amount,
// otherwise full indemnity y.
ContractPayout trigger_payout(double y, std::span<const double> w, const PayoffFamily& family,
                              std::span<const double> theta, double s_tilde);

inline constexpr double kUncapped = std::numeric_limits<double>::infinity();

double capped_payout(double y, double m);

// X / Y with 0/0 = 1.
double compensation_ratio(double x, double y);

// (1 + tau) * mean hybrid payout.
double empirical_premium(const LossSample& sample, const PayoffFamily& family,
                         std::span<const double> theta, double tau);

// (1 + tau_trad) E[Y 1{Y<=s}] + (1 + tau_index) E[s phi 1{Y>s}].
double split_premium(const LossSample& sample, const PayoffFamily& family,
                     std::span<const double> theta, double tau_trad, double tau_index);

// Mismatch between the loss-triggered and index-triggered contracts.
struct TriggerMismatch {
    double p_minus = 0.0;      // P(Y <= s, s phi > s_tilde)
    double p_plus = 0.0;       // P(Y > s, s phi <= s_tilde)
    double delta = 0.0;        // E[(s phi - Y)_+ 1{E-}]
    std::size_t overcompensated = 0;  // rows of E- with s phi > Y
    double overcompensation_mass = 0.0;
};

TriggerMismatch trigger_mismatch(const LossSample& sample, const PayoffFamily& family,
                                 std::span<const double> theta, double s_tilde);

// One CSV row per observation: y, w..., branch, x.
void write_payout_trace(std::ostream& out, const LossSample& sample, const PayoffFamily& family,
                        std::span<const double> theta);

}  // namespace hc
