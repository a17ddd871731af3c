// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "hybridcover/hybridcover.h"

TEST_CASE("model handles") {
    const double coeffs[] = {0.35667494393873245, 1.2527629684953681};
    hc_model* m = nullptr;
    REQUIRE(hc_model_create(HC_TAIL_PARETO_UNIT, coeffs, 2, 1.0, &m) == HC_OK);
    const double w[] = {0.5};
    double g = 0.0;
    CHECK(hc_model_tail_index(m, w, 1, &g) == HC_OK);
    CHECK(g == doctest::Approx(0.37417).epsilon(1e-4));
    double s = 0.0;
    CHECK(hc_model_survival(m, 0.5, w, 1, &s) == HC_ERR_DOMAIN);
    CHECK(std::string(hc_last_error()).find("support") != std::string::npos);
    CHECK(hc_model_survival(m, 1.0, w, 1, &s) == HC_OK);
    CHECK(s == 1.0);
    CHECK(std::string(hc_last_error()).empty());
    const double w2[] = {0.5, 0.5};
    CHECK(hc_model_tail_index(m, w2, 2, &g) == HC_ERR_DIMENSION);
    double q = 0.0;
    CHECK(hc_model_quantile(m, 0.3, w, 1, &q) == HC_OK);
    CHECK(hc_model_survival(m, q, w, 1, &s) == HC_OK);
    CHECK(s == doctest::Approx(0.7).epsilon(1e-12));
    const double heavy[] = {0.0, 0.0};
    hc_model* h = nullptr;
    REQUIRE(hc_model_create(HC_TAIL_PARETO_UNIT, heavy, 2, 1.0, &h) == HC_OK);
    double me = 0.0;
    CHECK(hc_model_mean_excess(h, 2.0, w, 1, &me) == HC_ERR_UNDEFINED_MOMENT);
    CHECK(hc_model_median_excess(h, 2.0, w, 1, &me) == HC_OK);
    CHECK(me == doctest::Approx(4.0));
    CHECK(hc_model_create(7, coeffs, 2, 1.0, &h) == HC_ERR_INVALID_ARGUMENT);
    CHECK(hc_model_create(HC_TAIL_GPD, coeffs, 2, -1.0, &h) == HC_ERR_DOMAIN);
    hc_model_free(h);
    hc_model_free(m);
}

TEST_CASE("simulate, fit, calibrate and compare through the C interface") {
    const double coeffs[] = {0.35667494393873245, 1.2527629684953681};
    hc_model* truth = nullptr;
    REQUIRE(hc_model_create(HC_TAIL_PARETO_UNIT, coeffs, 2, 1.0, &truth) == HC_OK);
    hc_sample* data = nullptr;
    REQUIRE(hc_simulate(truth, 3000, 42, 0, &data) == HC_OK);
    CHECK(hc_sample_rows(data) == 3000);
    CHECK(hc_sample_dim(data) == 1);

    hc_model* fitted = nullptr;
    double ll = 0.0;
    REQUIRE(hc_fit_mle(data, HC_TAIL_PARETO_UNIT, &fitted, &ll) == HC_OK);
    double est[2];
    size_t n = 0;
    CHECK(hc_model_coeffs(fitted, est, 2, &n, nullptr) == HC_OK);
    CHECK(n == 2);
    CHECK(std::abs(est[1] - coeffs[1]) < 0.2);

    double s = 0.0;
    REQUIRE(hc_sample_quantile(data, 0.85, &s) == HC_OK);
    const double lo[] = {0.0}, hi[] = {5.0};
    hc_family* fam = nullptr;
    REQUIRE(hc_family_create(HC_PAYOFF_EXP_LINK_1D, HC_UPPER_MEAN_EXCESS, s, truth, lo, hi, 1, &fam) == HC_OK);

    const hc_metric metric = hc_metric_default();
    CHECK(metric.kappa == 1.415);
    double theta[1];
    double value = 0.0;
    REQUIRE(hc_one_step_calibrate(data, fam, &metric, theta, 1, &value) == HC_OK);
    double direct = 0.0;
    CHECK(hc_empirical_objective(data, fam, theta, 1, &metric, &direct) == HC_OK);
    CHECK(direct == value);
    double theta2[1];
    CHECK(hc_two_step_calibrate(data, data, fam, &metric, theta2, 1, &value) == HC_OK);
    CHECK(hc_one_step_calibrate(data, fam, &metric, theta, 2, &value) == HC_ERR_INVALID_ARGUMENT);

    double x = 0.0;
    int branch = -1;
    const double w[] = {0.5};
    CHECK(hc_hybrid_payout(fam, s, w, 1, theta, 1, &x, &branch) == HC_OK);
    CHECK(x == s);
    CHECK(branch == HC_BRANCH_TRADITIONAL);

    double premium = 0.0, m = 0.0, capped = 0.0;
    CHECK(hc_empirical_premium(data, fam, theta, 1, 0.4, &premium) == HC_OK);
    CHECK(hc_solve_cap(data, premium, 0.4, &m) == HC_OK);
    CHECK(hc_capped_premium(data, m, 0.4, &capped) == HC_OK);
    CHECK(std::abs(capped - premium) <= 1e-9 * premium);
    CHECK(hc_solve_cap(data, 1e9, 0.4, &m) == HC_ERR_DOMAIN);

    double phi1 = 0.0;
    CHECK(hc_Phi1(&metric, 1.0, 1.0, 0.5, &phi1) == HC_OK);
    CHECK(phi1 < 0.0);

    hc_family_free(fam);
    hc_model_free(fitted);
    hc_sample_free(data);
    hc_model_free(truth);
}

TEST_CASE("sample validation") {
    const double y[] = {1.0, -2.0};
    const double w[] = {0.1, 0.2};
    hc_sample* s = nullptr;
    CHECK(hc_sample_create(y, w, 2, 1, &s) == HC_ERR_DATA);
    CHECK(hc_sample_create(y, w, 2, 0, &s) == HC_ERR_INVALID_ARGUMENT);
    CHECK(hc_sample_create(nullptr, w, 2, 1, &s) == HC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config handles") {
    hc_config* c = nullptr;
    REQUIRE(hc_config_create(&c) == HC_OK);
    CHECK(hc_config_set(c, "sim.rows", "200") == HC_OK);
    CHECK(hc_config_set(c, "bogus", "1") == HC_ERR_CONFIG);
    char buf[16];
    size_t needed = 0;
    CHECK(hc_config_get(c, "sim.rows", buf, sizeof buf, &needed) == HC_OK);
    CHECK(std::string(buf) == "200");
    CHECK(needed == 4);
    CHECK(hc_config_get(c, "sim.rows", buf, 2, &needed) == HC_ERR_INVALID_ARGUMENT);
    uint64_t h1 = 0, h2 = 0;
    CHECK(hc_config_hash(c, &h1) == HC_OK);
    CHECK(hc_config_set(c, "seed", "5") == HC_OK);
    CHECK(hc_config_hash(c, &h2) == HC_OK);
    CHECK(h1 != h2);
    CHECK(hc_run(c, "nothing", "/tmp/hybridcover_c_api") == HC_ERR_CONFIG);
    CHECK(hc_config_load_file(c, "/nonexistent.conf") == HC_ERR_CONFIG);
    CHECK(std::strlen(hc_status_name(HC_ERR_FIT)) > 0);
    hc_config_free(c);
}
