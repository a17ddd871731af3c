#include "hybridcover/dists.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

namespace hc {

const char* to_string(TailKind kind) {
    return kind == TailKind::ParetoUnit ? "pareto_unit" : "gpd";
}

TailKind tail_kind_from_string(const std::string& name) {
    if (name == "pareto_unit" || name == "pareto") return TailKind::ParetoUnit;
    if (name == "gpd") return TailKind::Gpd;
    throw ConfigError("unknown tail model kind '" + name + "'");
}

TailLinkModel::TailLinkModel(TailKind kind, std::vector<double> link_coeffs, double sigma)
    : kind_(kind), coeffs_(std::move(link_coeffs)), sigma_(sigma) {
    if (coeffs_.size() < 2)
        throw DimensionError("link needs an intercept and at least one covariate coefficient");
    for (double c : coeffs_)
        if (!std::isfinite(c)) throw DomainError("link coefficients must be finite");
    if (kind_ == TailKind::Gpd && !(sigma_ > 0.0 && std::isfinite(sigma_)))
        throw DomainError("GPD scale sigma must be positive");
}

void TailLinkModel::check_dim(std::span<const double> w) const {
    if (w.size() != covariate_dim())
        throw DimensionError("covariate of length " + std::to_string(w.size()) + ", model expects " +
                             std::to_string(covariate_dim()));
}

void TailLinkModel::check_support(double t) const {
    if (!(t >= support_start()) || std::isnan(t))
        throw DomainError("t = " + std::to_string(t) + " is outside the support [" +
                          std::to_string(support_start()) + ", inf)");
}

double TailLinkModel::tail_index(std::span<const double> w) const {
    check_dim(w);
    double eta = coeffs_[0];
    for (std::size_t k = 0; k < w.size(); ++k) eta += coeffs_[k + 1] * w[k];
    return std::exp(-eta);
}

double TailLinkModel::survival(double t, std::span<const double> w) const {
    check_support(t);
    const double g = tail_index(w);
    if (std::isinf(t)) return 0.0;
    if (kind_ == TailKind::ParetoUnit) return std::exp(-std::log(t) / g);
    return std::exp(-std::log1p(t * g / sigma_) / g);
}

double TailLinkModel::quantile(double p, std::span<const double> w) const {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile level must lie in [0, 1)");
    const double g = tail_index(w);
    // (1 - p)^(-g), computed through log1p for small p.
    const double tail = -g * std::log1p(-p);
    if (kind_ == TailKind::ParetoUnit) return std::exp(tail);
    return sigma_ * std::expm1(tail) / g;
}

double TailLinkModel::log_density(double t, std::span<const double> w) const {
    const double g = tail_index(w);
    if (kind_ == TailKind::ParetoUnit) {
        if (t < 1.0) return -std::numeric_limits<double>::infinity();
        return -std::log(g) - (1.0 / g + 1.0) * std::log(t);
    }
    if (t < 0.0) return -std::numeric_limits<double>::infinity();
    return -std::log(sigma_) - (1.0 / g + 1.0) * std::log1p(g * t / sigma_);
}

double TailLinkModel::mean_excess(double s, std::span<const double> w) const {
    check_support(s);
    const double g = tail_index(w);
    if (g >= 1.0)
        throw UndefinedMomentError("conditional mean excess is infinite for tail index " +
                                   std::to_string(g) + " >= 1");
    if (kind_ == TailKind::ParetoUnit) return s / (1.0 - g);
    return s + (sigma_ + g * s) / (1.0 - g);
}

double TailLinkModel::median_excess(double s, std::span<const double> w) const {
    check_support(s);
    const double g = tail_index(w);
    const double ln2 = std::log(2.0);
    if (kind_ == TailKind::ParetoUnit) return s * std::exp(g * ln2);
    // (2^g - 1) / g -> ln 2 as g -> 0; expm1 keeps that limit accurate.
    return s + (sigma_ + g * s) * std::expm1(g * ln2) / g;
}

std::vector<double> TailLinkModel::sample(std::span<const double> w, std::size_t count,
                                          std::uint64_t seed, std::uint64_t stream) const {
    const double g = tail_index(w);
    Rng rng(seed, stream);
    std::vector<double> out(count);
    for (auto& y : out) {
        const double u = rng.uniform();
        const double tail = -g * std::log(u);  // log of u^(-g)
        y = kind_ == TailKind::ParetoUnit ? std::exp(tail) : sigma_ * std::expm1(tail) / g;
    }
    return out;
}

std::string TailLinkModel::to_json() const {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(kind_);
    doc["link_coeffs"] = coeffs_;
    doc["sigma"] = sigma_;
    doc["covariate_dim"] = covariate_dim();
    return doc.dump();
}

TailLinkModel TailLinkModel::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        auto kind = tail_kind_from_string(doc.at("kind").get<std::string>());
        auto coeffs = doc.at("link_coeffs").get<std::vector<double>>();
        double sigma = doc.value("sigma", 1.0);
        if (doc.contains("covariate_dim") &&
            doc["covariate_dim"].get<std::size_t>() + 1 != coeffs.size())
            throw DimensionError("covariate_dim does not match link_coeffs length");
        return TailLinkModel(kind, std::move(coeffs), sigma);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

TailLinkModel link_from_gamma_range(TailKind kind, double gamma_at_zero, double gamma_at_one,
                                    double sigma) {
    if (!(gamma_at_zero > 0.0 && gamma_at_one > 0.0)) throw DomainError("tail indices must be positive");
    const double a = -std::log(gamma_at_zero);
    const double b = std::log(gamma_at_zero / gamma_at_one);
    return TailLinkModel(kind, {a, b}, sigma);
}

LossSample simulate_dataset(const TailLinkModel& model, std::size_t rows, std::uint64_t seed,
                            std::uint64_t stream) {
    const std::size_t dim = model.covariate_dim();
    Rng rng(seed, stream);
    std::vector<double> losses;
    std::vector<double> covs;
    losses.reserve(rows);
    covs.reserve(rows * dim);
    std::vector<double> w(dim);
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& x : w) x = rng.uniform();
        const double g = model.tail_index(w);
        const double tail = -g * std::log(rng.uniform());
        const double y = model.kind() == TailKind::ParetoUnit
                             ? std::exp(tail)
                             : model.sigma() * std::expm1(tail) / g;
        losses.push_back(y);
        covs.insert(covs.end(), w.begin(), w.end());
    }
    return LossSample(std::move(losses), CovariateSample(dim, std::move(covs)));
}

double pareto_log_likelihood(const LossSample& sample, std::span<const double> coeffs) {
    if (coeffs.size() != sample.dim() + 1) throw DimensionError("coefficient count mismatch");
    std::vector<double> terms(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto w = sample.w(i);
        double eta = coeffs[0];
        for (std::size_t k = 0; k < w.size(); ++k) eta += coeffs[k + 1] * w[k];
        // alpha = 1 / gamma = exp(eta); log f = log alpha - (alpha + 1) log y
        const double ly = std::log(sample.y(i));
        terms[i] = eta - (std::exp(eta) + 1.0) * ly;
    }
    return pairwise_sum(terms);
}

std::vector<double> pareto_log_likelihood_gradient(const LossSample& sample,
                                                   std::span<const double> coeffs) {
    if (coeffs.size() != sample.dim() + 1) throw DimensionError("coefficient count mismatch");
    const std::size_t d = sample.dim();
    std::vector<std::vector<double>> parts(d + 1, std::vector<double>(sample.rows()));
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto w = sample.w(i);
        double eta = coeffs[0];
        for (std::size_t k = 0; k < d; ++k) eta += coeffs[k + 1] * w[k];
        const double score = 1.0 - std::exp(eta) * std::log(sample.y(i));
        parts[0][i] = score;
        for (std::size_t k = 0; k < d; ++k) parts[k + 1][i] = score * w[k];
    }
    std::vector<double> grad(d + 1);
    for (std::size_t k = 0; k <= d; ++k) grad[k] = pairwise_sum(parts[k]);
    return grad;
}

double gpd_log_likelihood(const LossSample& sample, std::span<const double> coeffs, double sigma) {
    if (coeffs.size() != sample.dim() + 1) throw DimensionError("coefficient count mismatch");
    if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
    const double log_sigma = std::log(sigma);
    std::vector<double> terms(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto w = sample.w(i);
        double eta = coeffs[0];
        for (std::size_t k = 0; k < w.size(); ++k) eta += coeffs[k + 1] * w[k];
        const double g = std::exp(-eta);
        terms[i] = -log_sigma - (1.0 / g + 1.0) * std::log1p(g * sample.y(i) / sigma);
    }
    return pairwise_sum(terms);
}

namespace {

// Affine map between link coefficients on standardized covariates (used by
// the optimizer) and on raw covariates.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    explicit Standardizer(const CovariateSample& cov) : mean(cov.dim(), 0.0), scale(cov.dim(), 1.0) {
        const std::size_t n = cov.rows();
        for (std::size_t k = 0; k < cov.dim(); ++k) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = cov.row(i)[k];
            mean[k] = pairwise_mean(col);
            for (auto& v : col) v = (v - mean[k]) * (v - mean[k]);
            const double sd = std::sqrt(pairwise_mean(col));
            scale[k] = sd > 0.0 ? sd : 1.0;
        }
    }

    std::vector<double> to_raw(std::span<const double> std_coeffs) const {
        std::vector<double> raw(std_coeffs.begin(), std_coeffs.begin() + mean.size() + 1);
        for (std::size_t k = 0; k < mean.size(); ++k) {
            raw[k + 1] = std_coeffs[k + 1] / scale[k];
            raw[0] -= raw[k + 1] * mean[k];
        }
        return raw;
    }

    // Chain rule: gradient w.r.t. raw coefficients -> standardized.
    void gradient_to_std(std::span<const double> raw_grad, std::span<double> std_grad) const {
        std_grad[0] = raw_grad[0];
        for (std::size_t k = 0; k < mean.size(); ++k)
            std_grad[k + 1] = (raw_grad[k + 1] - raw_grad[0] * mean[k]) / scale[k];
    }
};

double param_norm(const std::vector<double>& p) {
    double acc = 0.0;
    for (double v : p) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace

FitResult fit_mle(const LossSample& input, TailKind kind, const FitOptions& options) {
    const std::size_t n_coeffs = input.dim() + 1;

    LossSample sample(input.dim());
    std::size_t excluded_zero = 0;
    std::size_t below_threshold = 0;
    if (kind == TailKind::Gpd) {
        const double u = options.exceedance_threshold.value_or(0.0);
        for (std::size_t i = 0; i < input.rows(); ++i) {
            const double y = input.y(i);
            if (y == 0.0) {
                ++excluded_zero;
            } else if (options.exceedance_threshold && y <= u) {
                ++below_threshold;
            } else {
                sample.push_back(y - u, input.w(i));
            }
        }
    } else {
        for (std::size_t i = 0; i < input.rows(); ++i) {
            if (input.y(i) < 1.0)
                throw DataError("unit Pareto fit requires losses >= 1, row " + std::to_string(i) +
                                " has " + std::to_string(input.y(i)));
        }
        sample = input;
    }

    const std::size_t n = sample.rows();
    if (n < 10 * n_coeffs)
        throw DataError("fit needs at least " + std::to_string(10 * n_coeffs) + " rows, got " +
                        std::to_string(n));

    const Standardizer standardizer(sample.covariates());
    const double inv_n = 1.0 / static_cast<double>(n);

    ObjectiveFn objective;
    GradientFn gradient;
    std::vector<double> base(n_coeffs, 0.0);

    if (kind == TailKind::ParetoUnit) {
        std::vector<double> logs(n);
        for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(sample.y(i));
        const double sum_log = pairwise_sum(logs);
        if (!(sum_log > 0.0)) throw DataError("all losses equal 1; tail index is not identifiable");
        base[0] = std::log(static_cast<double>(n) / sum_log);
        objective = [&, inv_n](std::span<const double> p) {
            return -pareto_log_likelihood(sample, standardizer.to_raw(p)) * inv_n;
        };
        gradient = [&, inv_n](std::span<const double> p, std::span<double> g) {
            auto raw = pareto_log_likelihood_gradient(sample, standardizer.to_raw(p));
            for (auto& v : raw) v *= -inv_n;
            standardizer.gradient_to_std(raw, g);
        };
    } else {
        std::vector<double> ys(sample.losses().begin(), sample.losses().end());
        const double med = empirical_quantile(ys, 0.5);
        const double g0 = 0.5;
        base[0] = -std::log(g0);
        base.push_back(std::log(med * g0 / std::expm1(g0 * std::log(2.0))));
        objective = [&, inv_n](std::span<const double> p) {
            auto raw = standardizer.to_raw(p);
            return -gpd_log_likelihood(sample, raw, std::exp(p.back())) * inv_n;
        };
        gradient = [&](std::span<const double> p, std::span<double> g) {
            numeric_gradient(objective, p, g, 1e-6);
        };
    }

    BfgsOptions bfgs;
    bfgs.max_iterations = options.max_iterations;
    bfgs.rel_tolerance = options.rel_tolerance;

    struct Candidate {
        std::vector<double> params;
        double log_likelihood;
        int iterations;
        bool converged;
    };
    std::vector<Candidate> candidates;
    for (int start = 0; start < std::max(1, options.starts); ++start) {
        std::vector<double> x0 = base;
        if (start > 0) {
            Rng rng(options.jitter_seed, static_cast<std::uint64_t>(start));
            for (auto& v : x0) v += 0.5 * rng.normal();
        }
        auto res = minimize_bfgs(objective, gradient, x0, bfgs);
        candidates.push_back({res.x, -res.value * static_cast<double>(n), res.iterations,
                              res.converged && std::isfinite(res.value)});
    }

    auto better = [](const Candidate& a, const Candidate& b) {
        const double scale = std::max(std::abs(a.log_likelihood), std::abs(b.log_likelihood));
        if (std::abs(a.log_likelihood - b.log_likelihood) > 1e-10 * std::max(1.0, scale))
            return a.log_likelihood > b.log_likelihood;
        return param_norm(a.params) < param_norm(b.params);
    };

    const Candidate* best = nullptr;
    const Candidate* best_any = nullptr;
    int converged = 0;
    for (const auto& c : candidates) {
        if (!std::isfinite(c.log_likelihood)) continue;
        if (!best_any || better(c, *best_any)) best_any = &c;
        if (!c.converged) continue;
        ++converged;
        if (!best || better(c, *best)) best = &c;
    }

    auto to_model_params = [&](const std::vector<double>& p) {
        auto raw = standardizer.to_raw(p);
        if (kind == TailKind::Gpd) raw.push_back(std::exp(p.back()));
        return raw;
    };

    if (!best) {
        std::vector<double> point = best_any ? to_model_params(best_any->params) : std::vector<double>{};
        const double ll = best_any ? best_any->log_likelihood : -std::numeric_limits<double>::infinity();
        throw FitError("maximum likelihood did not converge from any of " +
                           std::to_string(candidates.size()) + " starts",
                       std::move(point), ll);
    }

    auto raw = standardizer.to_raw(best->params);
    const double sigma = kind == TailKind::Gpd ? std::exp(best->params.back()) : 1.0;
    FitResult result{TailLinkModel(kind, raw, sigma), best->log_likelihood, best->iterations,
                     converged, n, excluded_zero, below_threshold};
    return result;
}

}  // namespace hc
