#include "hybridcover/contract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

namespace hc {

bool ThetaBox::contains(std::span<const double> theta) const {
    if (theta.size() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k)
        if (theta[k] < lower[k] || theta[k] > upper[k]) return false;
    return true;
}

std::vector<double> ThetaBox::midpoint() const {
    std::vector<double> mid(dim());
    for (std::size_t k = 0; k < dim(); ++k) mid[k] = 0.5 * (lower[k] + upper[k]);
    return mid;
}

PayoffFamily::PayoffFamily(PayoffKind kind, UpperStat upper_stat, double s, TailLinkModel model,
                           ThetaBox box, ClampSource clamp_source)
    : kind_(kind),
      upper_stat_(upper_stat),
      s_(s),
      model_(std::move(model)),
      box_(std::move(box)),
      clamp_source_(clamp_source) {
    if (!(s_ > 0.0) || !std::isfinite(s_)) throw DomainError("threshold s must be positive");
    const std::size_t expected_theta = kind_ == PayoffKind::ExpLink1D ? 1 : 2;
    if (box_.lower.size() != expected_theta || box_.upper.size() != expected_theta)
        throw DimensionError("theta box must have dimension " + std::to_string(expected_theta));
    for (std::size_t k = 0; k < expected_theta; ++k)
        if (!(box_.lower[k] <= box_.upper[k])) throw DomainError("theta box is empty");
    if (model_.covariate_dim() != expected_theta)
        throw DimensionError("payoff family and clamp model disagree on covariate dimension");
}

double PayoffFamily::variable_part(std::span<const double> theta, std::span<const double> w) const {
    if (kind_ == PayoffKind::ExpLink1D) return std::exp(theta[0] * w[0]);
    return theta[0] * w[0] + theta[1] * w[1];
}

double PayoffFamily::upper(std::span<const double> w) const {
    return upper_stat_ == UpperStat::MeanExcess ? model_.mean_excess(s_, w)
                                                : model_.median_excess(s_, w);
}

double PayoffFamily::phi_with_upper(std::span<const double> theta, std::span<const double> w,
                                    double upper) const {
    return std::max(std::min(upper, variable_part(theta, w)), s_) / s_;
}

double PayoffFamily::phi(std::span<const double> theta, std::span<const double> w) const {
    if (theta.size() != theta_dim()) throw DimensionError("theta has the wrong dimension");
    return phi_with_upper(theta, w, upper(w));
}

PayoffFamily PayoffFamily::with_threshold(double s) const {
    return PayoffFamily(kind_, upper_stat_, s, model_, box_, clamp_source_);
}

PayoffFamily PayoffFamily::with_model(TailLinkModel model) const {
    return PayoffFamily(kind_, upper_stat_, s_, std::move(model), box_, clamp_source_);
}

ContractPayout hybrid_payout(double y, std::span<const double> w, const PayoffFamily& family,
                             std::span<const double> theta) {
    if (y < 0.0) throw DomainError("loss must be nonnegative");
    const double s = family.threshold();
    if (y <= s) return {y, Branch::Traditional};
    return {s * family.phi(theta, w), Branch::Index};
}

ContractPayout trigger_payout(double y, std::span<const double> w, const PayoffFamily& family,
                              std::span<const double> theta, double s_tilde) {
    const double s = family.threshold();
    if (!(s_tilde > 0.0 && s_tilde <= s)) throw DomainError("s_tilde must lie in (0, s]");
    const double index = s * family.phi(theta, w);
    if (index > s_tilde) return {index, Branch::Index};
    return {y, Branch::Traditional};
}

double capped_payout(double y, double m) {
    if (!(m > 0.0)) throw DomainError("cap must be positive");
    return std::min(y, m);
}

double compensation_ratio(double x, double y) {
    if (y == 0.0 && x == 0.0) return 1.0;
    return x / y;
}

namespace {

void require_rows(const LossSample& sample) {
    if (sample.empty()) throw DataError("empty loss sample");
}

}  // namespace

double empirical_premium(const LossSample& sample, const PayoffFamily& family,
                         std::span<const double> theta, double tau) {
    require_rows(sample);
    std::vector<double> payouts(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i)
        payouts[i] = hybrid_payout(sample.y(i), sample.w(i), family, theta).x;
    return (1.0 + tau) * pairwise_mean(payouts);
}

double split_premium(const LossSample& sample, const PayoffFamily& family,
                     std::span<const double> theta, double tau_trad, double tau_index) {
    require_rows(sample);
    std::vector<double> traditional(sample.rows(), 0.0);
    std::vector<double> index(sample.rows(), 0.0);
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto p = hybrid_payout(sample.y(i), sample.w(i), family, theta);
        (p.branch == Branch::Traditional ? traditional : index)[i] = p.x;
    }
    return (1.0 + tau_trad) * pairwise_mean(traditional) + (1.0 + tau_index) * pairwise_mean(index);
}

TriggerMismatch trigger_mismatch(const LossSample& sample, const PayoffFamily& family,
                                 std::span<const double> theta, double s_tilde) {
    require_rows(sample);
    const double s = family.threshold();
    std::size_t minus = 0;
    std::size_t plus = 0;
    std::vector<double> excess(sample.rows(), 0.0);
    TriggerMismatch out;
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        const double y = sample.y(i);
        const double index = s * family.phi(theta, sample.w(i));
        const bool triggered = index > s_tilde;
        if (y <= s && triggered) {
            ++minus;
            if (index > y) {
                excess[i] = index - y;
                ++out.overcompensated;
            }
        } else if (y > s && !triggered) {
            ++plus;
        }
    }
    const double n = static_cast<double>(sample.rows());
    out.p_minus = static_cast<double>(minus) / n;
    out.p_plus = static_cast<double>(plus) / n;
    out.overcompensation_mass = pairwise_sum(excess);
    out.delta = out.overcompensation_mass / n;
    return out;
}

void write_payout_trace(std::ostream& out, const LossSample& sample, const PayoffFamily& family,
                        std::span<const double> theta) {
    out << "y";
    for (std::size_t k = 0; k < sample.dim(); ++k) out << ",w" << (k + 1);
    out << ",branch,x\n";
    char buf[64];
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto p = hybrid_payout(sample.y(i), sample.w(i), family, theta);
        std::snprintf(buf, sizeof buf, "%.17g", sample.y(i));
        out << buf;
        for (double v : sample.w(i)) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%s,%.17g\n",
                      p.branch == Branch::Traditional ? "traditional" : "index", p.x);
        out << buf;
    }
}

}  // namespace hc
