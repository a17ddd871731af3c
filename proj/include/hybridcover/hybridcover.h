/* C interface to the hybridcover library. Every function returns an
 * hc_status; on failure hc_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller. */
#ifndef HYBRIDCOVER_H
#define HYBRIDCOVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HC_API __declspec(dllexport)
#else
#define HC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hc_status {
    HC_OK = 0,
    HC_ERR_INVALID_ARGUMENT = 1,
    HC_ERR_CONFIG = 2,
    HC_ERR_DATA = 3,
    HC_ERR_NUMERIC = 4,
    HC_ERR_DOMAIN = 5,
    HC_ERR_UNDEFINED_MOMENT = 6,
    HC_ERR_DIMENSION = 7,
    HC_ERR_IO = 8,
    HC_ERR_FIT = 9,
    HC_ERR_INTERNAL = 10
} hc_status;

typedef enum hc_tail_kind { HC_TAIL_PARETO_UNIT = 0, HC_TAIL_GPD = 1 } hc_tail_kind;
typedef enum hc_payoff_kind { HC_PAYOFF_EXP_LINK_1D = 0, HC_PAYOFF_LINEAR_2D = 1 } hc_payoff_kind;
typedef enum hc_upper_stat { HC_UPPER_MEAN_EXCESS = 0, HC_UPPER_MEDIAN_EXCESS = 1 } hc_upper_stat;
typedef enum hc_loss_kind { HC_LOSS_IDENTITY = 0, HC_LOSS_EXP_UTILITY = 1 } hc_loss_kind;
typedef enum hc_aversion_kind { HC_AVERSION_LOGISTIC = 0, HC_AVERSION_RATIONAL = 1 } hc_aversion_kind;
typedef enum hc_branch { HC_BRANCH_TRADITIONAL = 0, HC_BRANCH_INDEX = 1 } hc_branch;

typedef struct hc_model hc_model;
typedef struct hc_sample hc_sample;
typedef struct hc_family hc_family;
typedef struct hc_config hc_config;

/* Plain parameter block for the decision metric. */
typedef struct hc_metric {
    int loss;     /* hc_loss_kind */
    double mu;
    int aversion; /* hc_aversion_kind */
    double kappa;
    double beta;
    double tau;
} hc_metric;

HC_API const char* hc_version(void);
HC_API const char* hc_last_error(void);
HC_API const char* hc_status_name(hc_status status);
HC_API hc_metric hc_metric_default(void);

/* Tail models. coeffs holds (a, b_1, ..., b_d). */
HC_API hc_status hc_model_create(int kind, const double* coeffs, size_t n_coeffs, double sigma,
                                 hc_model** out);
HC_API void hc_model_free(hc_model* model);
HC_API hc_status hc_model_coeffs(const hc_model* model, double* out, size_t capacity, size_t* n_out,
                                 double* sigma);
HC_API hc_status hc_model_tail_index(const hc_model* model, const double* w, size_t dim, double* out);
HC_API hc_status hc_model_survival(const hc_model* model, double t, const double* w, size_t dim,
                                   double* out);
HC_API hc_status hc_model_quantile(const hc_model* model, double p, const double* w, size_t dim,
                                   double* out);
HC_API hc_status hc_model_mean_excess(const hc_model* model, double s, const double* w, size_t dim,
                                      double* out);
HC_API hc_status hc_model_median_excess(const hc_model* model, double s, const double* w, size_t dim,
                                        double* out);

/* Samples. w is row-major with rows * dim entries. */
HC_API hc_status hc_sample_create(const double* y, const double* w, size_t rows, size_t dim,
                                  hc_sample** out);
HC_API hc_status hc_simulate(const hc_model* model, size_t rows, uint64_t seed, uint64_t stream,
                             hc_sample** out);
HC_API void hc_sample_free(hc_sample* sample);
HC_API size_t hc_sample_rows(const hc_sample* sample);
HC_API size_t hc_sample_dim(const hc_sample* sample);
HC_API hc_status hc_sample_losses(const hc_sample* sample, double* out, size_t capacity);
HC_API hc_status hc_sample_quantile(const hc_sample* sample, double p, double* out);

/* Maximum-likelihood fit; *out receives a new model. */
HC_API hc_status hc_fit_mle(const hc_sample* sample, int kind, hc_model** out, double* log_likelihood);

/* Payoff families. The clamp model is copied. */
HC_API hc_status hc_family_create(int payoff_kind, int upper_stat, double s, const hc_model* clamp,
                                  const double* theta_lower, const double* theta_upper,
                                  size_t theta_dim, hc_family** out);
HC_API void hc_family_free(hc_family* family);
HC_API hc_status hc_phi(const hc_family* family, const double* theta, size_t theta_dim,
                        const double* w, size_t dim, double* out);
HC_API hc_status hc_hybrid_payout(const hc_family* family, double y, const double* w, size_t dim,
                                  const double* theta, size_t theta_dim, double* x, int* branch);
HC_API hc_status hc_empirical_premium(const hc_sample* sample, const hc_family* family,
                                      const double* theta, size_t theta_dim, double tau, double* out);

/* Decision metric and objectives. */
HC_API hc_status hc_Phi1(const hc_metric* metric, double pi_plus, double x, double gamma, double* out);
HC_API hc_status hc_empirical_objective(const hc_sample* sample, const hc_family* family,
                                        const double* theta, size_t theta_dim,
                                        const hc_metric* metric, double* out);
HC_API hc_status hc_approx_objective(const hc_model* fitted, const hc_sample* covariates,
                                     const hc_family* family, const double* theta, size_t theta_dim,
                                     const hc_metric* metric, double pi_hat, double* out);

/* Calibration. theta_out must hold theta_dim values. */
HC_API hc_status hc_one_step_calibrate(const hc_sample* sample, const hc_family* family,
                                       const hc_metric* metric, double* theta_out, size_t theta_dim,
                                       double* objective_out);
HC_API hc_status hc_two_step_calibrate(const hc_sample* joint, const hc_sample* covariates,
                                       const hc_family* family, const hc_metric* metric,
                                       double* theta_out, size_t theta_dim, double* objective_out);

/* Equal-price comparison. */
HC_API hc_status hc_capped_premium(const hc_sample* sample, double m, double tau_trad, double* out);
HC_API hc_status hc_solve_cap(const hc_sample* sample, double target, double tau_trad, double* m_out);

/* Experiment configuration and commands. */
HC_API hc_status hc_config_create(hc_config** out);
HC_API void hc_config_free(hc_config* config);
HC_API hc_status hc_config_load_file(hc_config* config, const char* path);
HC_API hc_status hc_config_apply_env(hc_config* config);
HC_API hc_status hc_config_set(hc_config* config, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf; *needed gets the full length + 1. */
HC_API hc_status hc_config_get(const hc_config* config, const char* key, char* buf, size_t capacity,
                               size_t* needed);
HC_API hc_status hc_config_hash(const hc_config* config, uint64_t* out);
HC_API hc_status hc_run(const hc_config* config, const char* command, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
