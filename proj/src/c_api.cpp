#include "hybridcover/hybridcover.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "hybridcover/calibrate.hpp"
#include "hybridcover/compare.hpp"
#include "hybridcover/error.hpp"
#include "hybridcover/experiment.hpp"
#include "hybridcover/numerics.hpp"

struct hc_model {
    hc::TailLinkModel model;
};
struct hc_sample {
    hc::LossSample sample;
};
struct hc_family {
    hc::PayoffFamily family;
};
struct hc_config {
    hc::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

hc_status status_of(hc::ErrorKind kind) {
    switch (kind) {
        case hc::ErrorKind::InvalidArgument: return HC_ERR_INVALID_ARGUMENT;
        case hc::ErrorKind::Config: return HC_ERR_CONFIG;
        case hc::ErrorKind::Data: return HC_ERR_DATA;
        case hc::ErrorKind::Numerical: return HC_ERR_NUMERIC;
        case hc::ErrorKind::Domain: return HC_ERR_DOMAIN;
        case hc::ErrorKind::UndefinedMoment: return HC_ERR_UNDEFINED_MOMENT;
        case hc::ErrorKind::DimensionMismatch: return HC_ERR_DIMENSION;
        case hc::ErrorKind::Io: return HC_ERR_IO;
        case hc::ErrorKind::Fit: return HC_ERR_FIT;
    }
    return HC_ERR_INTERNAL;
}

template <class F>
hc_status guard(F&& body) {
    try {
        body();
        last_error.clear();
        return HC_OK;
    } catch (const hc::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HC_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw hc::Error(hc::ErrorKind::InvalidArgument, what);
}

std::span<const double> covariate(const hc_model* m, const double* w, std::size_t dim) {
    require(m != nullptr && (w != nullptr || dim == 0), "null argument");
    return {w, dim};
}

hc::MetricConfig metric_of(const hc_metric* m) {
    require(m != nullptr, "null metric");
    require(m->loss == HC_LOSS_IDENTITY || m->loss == HC_LOSS_EXP_UTILITY, "unknown loss kind");
    require(m->aversion == HC_AVERSION_LOGISTIC || m->aversion == HC_AVERSION_RATIONAL,
            "unknown aversion kind");
    hc::MetricConfig c;
    c.loss = m->loss == HC_LOSS_IDENTITY ? hc::LossKind::Identity : hc::LossKind::ExpUtility;
    c.aversion = m->aversion == HC_AVERSION_LOGISTIC ? hc::AversionKind::Logistic
                                                     : hc::AversionKind::Rational;
    c.mu = m->mu;
    c.kappa = m->kappa;
    c.beta = m->beta;
    c.tau = m->tau;
    hc::validate(c);
    return c;
}

hc::TailKind tail_kind(int kind) {
    require(kind == HC_TAIL_PARETO_UNIT || kind == HC_TAIL_GPD, "unknown tail kind");
    return kind == HC_TAIL_GPD ? hc::TailKind::Gpd : hc::TailKind::ParetoUnit;
}

std::span<const double> theta_of(const double* theta, std::size_t dim) {
    require(theta != nullptr, "null theta");
    return {theta, dim};
}

}  // namespace

extern "C" {

const char* hc_version(void) { return "1.0.0"; }

const char* hc_last_error(void) { return last_error.c_str(); }

const char* hc_status_name(hc_status status) {
    switch (status) {
        case HC_OK: return "ok";
        case HC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case HC_ERR_CONFIG: return "config error";
        case HC_ERR_DATA: return "data error";
        case HC_ERR_NUMERIC: return "numerical error";
        case HC_ERR_DOMAIN: return "domain error";
        case HC_ERR_UNDEFINED_MOMENT: return "undefined moment";
        case HC_ERR_DIMENSION: return "dimension mismatch";
        case HC_ERR_IO: return "i/o error";
        case HC_ERR_FIT: return "fit did not converge";
        case HC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

hc_metric hc_metric_default(void) {
    const hc::MetricConfig d;
    return {HC_LOSS_EXP_UTILITY, d.mu, HC_AVERSION_RATIONAL, d.kappa, d.beta, d.tau};
}

hc_status hc_model_create(int kind, const double* coeffs, size_t n_coeffs, double sigma, hc_model** out) {
    return guard([&] {
        require(out != nullptr && coeffs != nullptr, "null argument");
        *out = new hc_model{hc::TailLinkModel(tail_kind(kind),
                                              std::vector<double>(coeffs, coeffs + n_coeffs), sigma)};
    });
}

void hc_model_free(hc_model* model) { delete model; }

hc_status hc_model_coeffs(const hc_model* model, double* out, size_t capacity, size_t* n_out,
                          double* sigma) {
    return guard([&] {
        require(model != nullptr, "null model");
        const auto& c = model->model.link_coeffs();
        if (n_out) *n_out = c.size();
        if (sigma) *sigma = model->model.sigma();
        if (out) {
            require(capacity >= c.size(), "output buffer too small");
            std::copy(c.begin(), c.end(), out);
        }
    });
}

hc_status hc_model_tail_index(const hc_model* model, const double* w, size_t dim, double* out) {
    return guard([&] {
        auto cw = covariate(model, w, dim);
        require(out != nullptr, "null output");
        *out = model->model.tail_index(cw);
    });
}

hc_status hc_model_survival(const hc_model* model, double t, const double* w, size_t dim, double* out) {
    return guard([&] {
        auto cw = covariate(model, w, dim);
        require(out != nullptr, "null output");
        *out = model->model.survival(t, cw);
    });
}

hc_status hc_model_quantile(const hc_model* model, double p, const double* w, size_t dim, double* out) {
    return guard([&] {
        auto cw = covariate(model, w, dim);
        require(out != nullptr, "null output");
        *out = model->model.quantile(p, cw);
    });
}

hc_status hc_model_mean_excess(const hc_model* model, double s, const double* w, size_t dim, double* out) {
    return guard([&] {
        auto cw = covariate(model, w, dim);
        require(out != nullptr, "null output");
        *out = model->model.mean_excess(s, cw);
    });
}

hc_status hc_model_median_excess(const hc_model* model, double s, const double* w, size_t dim,
                                 double* out) {
    return guard([&] {
        auto cw = covariate(model, w, dim);
        require(out != nullptr, "null output");
        *out = model->model.median_excess(s, cw);
    });
}

hc_status hc_sample_create(const double* y, const double* w, size_t rows, size_t dim, hc_sample** out) {
    return guard([&] {
        require(out != nullptr && (rows == 0 || (y != nullptr && w != nullptr)), "null argument");
        require(dim > 0, "covariate dimension must be positive");
        hc::CovariateSample cov(dim, std::vector<double>(w, w + rows * dim));
        *out = new hc_sample{hc::LossSample(std::vector<double>(y, y + rows), std::move(cov))};
    });
}

hc_status hc_simulate(const hc_model* model, size_t rows, uint64_t seed, uint64_t stream, hc_sample** out) {
    return guard([&] {
        require(model != nullptr && out != nullptr, "null argument");
        *out = new hc_sample{hc::simulate_dataset(model->model, rows, seed, stream)};
    });
}

void hc_sample_free(hc_sample* sample) { delete sample; }

size_t hc_sample_rows(const hc_sample* sample) { return sample ? sample->sample.rows() : 0; }

size_t hc_sample_dim(const hc_sample* sample) { return sample ? sample->sample.dim() : 0; }

hc_status hc_sample_losses(const hc_sample* sample, double* out, size_t capacity) {
    return guard([&] {
        require(sample != nullptr && out != nullptr, "null argument");
        auto y = sample->sample.losses();
        require(capacity >= y.size(), "output buffer too small");
        std::copy(y.begin(), y.end(), out);
    });
}

hc_status hc_sample_quantile(const hc_sample* sample, double p, double* out) {
    return guard([&] {
        require(sample != nullptr && out != nullptr, "null argument");
        *out = hc::empirical_quantile(sample->sample.losses(), p);
    });
}

hc_status hc_fit_mle(const hc_sample* sample, int kind, hc_model** out, double* log_likelihood) {
    return guard([&] {
        require(sample != nullptr && out != nullptr, "null argument");
        hc::FitResult fit = hc::fit_mle(sample->sample, tail_kind(kind));
        if (log_likelihood) *log_likelihood = fit.log_likelihood;
        *out = new hc_model{std::move(fit.model)};
    });
}

hc_status hc_family_create(int payoff_kind, int upper_stat, double s, const hc_model* clamp,
                           const double* theta_lower, const double* theta_upper, size_t theta_dim,
                           hc_family** out) {
    return guard([&] {
        require(clamp != nullptr && theta_lower != nullptr && theta_upper != nullptr && out != nullptr,
                "null argument");
        require(payoff_kind == HC_PAYOFF_EXP_LINK_1D || payoff_kind == HC_PAYOFF_LINEAR_2D,
                "unknown payoff kind");
        require(upper_stat == HC_UPPER_MEAN_EXCESS || upper_stat == HC_UPPER_MEDIAN_EXCESS,
                "unknown clamp statistic");
        hc::ThetaBox box{std::vector<double>(theta_lower, theta_lower + theta_dim),
                         std::vector<double>(theta_upper, theta_upper + theta_dim)};
        *out = new hc_family{hc::PayoffFamily(
            payoff_kind == HC_PAYOFF_EXP_LINK_1D ? hc::PayoffKind::ExpLink1D : hc::PayoffKind::Linear2D,
            upper_stat == HC_UPPER_MEAN_EXCESS ? hc::UpperStat::MeanExcess : hc::UpperStat::MedianExcess,
            s, clamp->model, std::move(box))};
    });
}

void hc_family_free(hc_family* family) { delete family; }

hc_status hc_phi(const hc_family* family, const double* theta, size_t theta_dim, const double* w,
                 size_t dim, double* out) {
    return guard([&] {
        require(family != nullptr && w != nullptr && out != nullptr, "null argument");
        require(dim == family->family.model().covariate_dim(), "covariate has the wrong dimension");
        *out = family->family.phi(theta_of(theta, theta_dim), {w, dim});
    });
}

hc_status hc_hybrid_payout(const hc_family* family, double y, const double* w, size_t dim,
                           const double* theta, size_t theta_dim, double* x, int* branch) {
    return guard([&] {
        require(family != nullptr && w != nullptr && x != nullptr, "null argument");
        require(dim == family->family.model().covariate_dim(), "covariate has the wrong dimension");
        const auto p = hc::hybrid_payout(y, {w, dim}, family->family, theta_of(theta, theta_dim));
        *x = p.x;
        if (branch) *branch = p.branch == hc::Branch::Traditional ? HC_BRANCH_TRADITIONAL : HC_BRANCH_INDEX;
    });
}

hc_status hc_empirical_premium(const hc_sample* sample, const hc_family* family, const double* theta,
                               size_t theta_dim, double tau, double* out) {
    return guard([&] {
        require(sample != nullptr && family != nullptr && out != nullptr, "null argument");
        *out = hc::empirical_premium(sample->sample, family->family, theta_of(theta, theta_dim), tau);
    });
}

hc_status hc_Phi1(const hc_metric* metric, double pi_plus, double x, double gamma, double* out) {
    return guard([&] {
        require(out != nullptr, "null output");
        *out = hc::Phi1(metric_of(metric).with_pi_plus(pi_plus), x, gamma);
    });
}

hc_status hc_empirical_objective(const hc_sample* sample, const hc_family* family, const double* theta,
                                 size_t theta_dim, const hc_metric* metric, double* out) {
    return guard([&] {
        require(sample != nullptr && family != nullptr && out != nullptr, "null argument");
        *out = hc::empirical_objective(sample->sample, family->family, theta_of(theta, theta_dim),
                                       metric_of(metric));
    });
}

hc_status hc_approx_objective(const hc_model* fitted, const hc_sample* covariates, const hc_family* family,
                              const double* theta, size_t theta_dim, const hc_metric* metric,
                              double pi_hat, double* out) {
    return guard([&] {
        require(fitted != nullptr && covariates != nullptr && family != nullptr && out != nullptr,
                "null argument");
        *out = hc::approx_objective(fitted->model, covariates->sample.covariates(), family->family,
                                    theta_of(theta, theta_dim), metric_of(metric), pi_hat);
    });
}

namespace {

void copy_theta(const hc::CalibrationResult& r, double* theta_out, size_t theta_dim, double* objective_out) {
    require(theta_out != nullptr, "null theta output");
    require(theta_dim == r.theta_hat.size(), "theta output has the wrong dimension");
    std::copy(r.theta_hat.begin(), r.theta_hat.end(), theta_out);
    if (objective_out) *objective_out = r.objective_at_opt;
}

}  // namespace

hc_status hc_one_step_calibrate(const hc_sample* sample, const hc_family* family, const hc_metric* metric,
                                double* theta_out, size_t theta_dim, double* objective_out) {
    return guard([&] {
        require(sample != nullptr && family != nullptr, "null argument");
        copy_theta(hc::one_step_calibrate(sample->sample, family->family, metric_of(metric)), theta_out,
                   theta_dim, objective_out);
    });
}

hc_status hc_two_step_calibrate(const hc_sample* joint, const hc_sample* covariates, const hc_family* family,
                                const hc_metric* metric, double* theta_out, size_t theta_dim,
                                double* objective_out) {
    return guard([&] {
        require(joint != nullptr && covariates != nullptr && family != nullptr, "null argument");
        copy_theta(hc::two_step_calibrate(joint->sample, covariates->sample.covariates(), family->family,
                                          metric_of(metric)),
                   theta_out, theta_dim, objective_out);
    });
}

hc_status hc_capped_premium(const hc_sample* sample, double m, double tau_trad, double* out) {
    return guard([&] {
        require(sample != nullptr && out != nullptr, "null argument");
        *out = hc::capped_premium(sample->sample, m, tau_trad);
    });
}

hc_status hc_solve_cap(const hc_sample* sample, double target, double tau_trad, double* m_out) {
    return guard([&] {
        require(sample != nullptr && m_out != nullptr, "null argument");
        *m_out = hc::solve_cap(sample->sample, target, tau_trad).m;
    });
}

hc_status hc_config_create(hc_config** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        *out = new hc_config{};
    });
}

void hc_config_free(hc_config* config) { delete config; }

hc_status hc_config_load_file(hc_config* config, const char* path) {
    return guard([&] {
        require(config != nullptr && path != nullptr, "null argument");
        config->config.load_file(path);
    });
}

hc_status hc_config_apply_env(hc_config* config) {
    return guard([&] {
        require(config != nullptr, "null argument");
        config->config.apply_env();
    });
}

hc_status hc_config_set(hc_config* config, const char* key, const char* value) {
    return guard([&] {
        require(config != nullptr && key != nullptr && value != nullptr, "null argument");
        config->config.set(key, value);
    });
}

hc_status hc_config_get(const hc_config* config, const char* key, char* buf, size_t capacity, size_t* needed) {
    return guard([&] {
        require(config != nullptr && key != nullptr, "null argument");
        const std::string& v = config->config.get(key);
        if (needed) *needed = v.size() + 1;
        if (buf) {
            require(capacity > v.size(), "output buffer too small");
            std::memcpy(buf, v.c_str(), v.size() + 1);
        }
    });
}

hc_status hc_config_hash(const hc_config* config, uint64_t* out) {
    return guard([&] {
        require(config != nullptr && out != nullptr, "null argument");
        *out = config->config.hash();
    });
}

hc_status hc_run(const hc_config* config, const char* command, const char* out_dir) {
    return guard([&] {
        require(config != nullptr && command != nullptr && out_dir != nullptr, "null argument");
        hc::run_command(config->config, command, out_dir);
    });
}

}  // extern "C"
