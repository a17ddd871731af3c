#include "hybridcover/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hybridcover/error.hpp"

namespace hc {

const char* to_string(CalibrationMethod method) {
    return method == CalibrationMethod::OneStep ? "one_step" : "two_step";
}

namespace {

// Keeps the best evaluated point with ties resolved toward the lowest theta.
class Tracker {
public:
    Tracker(const ObjectiveFn& f, bool keep_trace, OptimizeResult& out)
        : f_(f), keep_trace_(keep_trace), out_(out) {}

    double operator()(const std::vector<double>& theta, const char* phase) {
        const double v = f_(theta);
        ++out_.evaluations;
        if (keep_trace_) out_.trace.push_back({phase, theta, v});
        if (std::isfinite(v) && better(v, theta)) {
            best_value_ = v;
            best_theta_ = theta;
        }
        return v;
    }

    const std::vector<double>& best_theta() const { return best_theta_; }
    double best_value() const { return best_value_; }

private:
    bool better(double v, const std::vector<double>& theta) const {
        if (best_theta_.empty() || v > best_value_) return true;
        return v == best_value_ && theta < best_theta_;
    }

    const ObjectiveFn& f_;
    bool keep_trace_;
    OptimizeResult& out_;
    std::vector<double> best_theta_;
    double best_value_ = -std::numeric_limits<double>::infinity();
};

std::string format_theta(const std::vector<double>& theta) {
    std::string s = "(";
    char buf[32];
    for (std::size_t k = 0; k < theta.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.6g", k ? ", " : "", theta[k]);
        s += buf;
    }
    return s + ")";
}

void golden_section(Tracker& eval, const ThetaBox& box, const std::vector<double>& grid_best,
                    double spacing, const OptimizeOptions& options) {
    const double width = box.upper[0] - box.lower[0];
    double a = std::max(box.lower[0], grid_best[0] - spacing);
    double b = std::min(box.upper[0], grid_best[0] + spacing);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = eval({c}, "golden");
    double fd = eval({d}, "golden");
    for (int it = 0; it < options.max_iterations && (b - a) > options.rel_tolerance * width; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval({c}, "golden");
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval({d}, "golden");
        }
    }
    eval({0.5 * (a + b)}, "golden");
}

void nelder_mead(Tracker& eval, const ThetaBox& box, const std::vector<double>& start,
                 const std::vector<double>& spacing, const OptimizeOptions& options) {
    const std::size_t d = box.dim();
    auto clamp = [&](std::vector<double> x) {
        for (std::size_t k = 0; k < d; ++k) x[k] = std::clamp(x[k], box.lower[k], box.upper[k]);
        return x;
    };
    struct Vertex {
        std::vector<double> x;
        double f;  // objective to maximize
    };
    std::vector<Vertex> simplex;
    simplex.push_back({start, eval(start, "simplex")});
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> x = start;
        x[k] += (x[k] + spacing[k] <= box.upper[k]) ? spacing[k] : -spacing[k];
        x = clamp(x);
        simplex.push_back({x, eval(x, "simplex")});
    }
    auto value = [](double f) { return std::isfinite(f) ? f : -std::numeric_limits<double>::infinity(); };
    auto order = [&](const Vertex& l, const Vertex& r) {
        if (value(l.f) != value(r.f)) return value(l.f) > value(r.f);
        return l.x < r.x;
    };
    auto converged = [&]() {
        for (std::size_t i = 1; i < simplex.size(); ++i)
            for (std::size_t k = 0; k < d; ++k) {
                const double width = box.upper[k] - box.lower[k];
                if (std::abs(simplex[i].x[k] - simplex[0].x[k]) > options.rel_tolerance * width)
                    return false;
            }
        return true;
    };
    for (int it = 0; it < options.max_iterations; ++it) {
        std::sort(simplex.begin(), simplex.end(), order);
        if (converged()) break;
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i].x[k] / static_cast<double>(d);
        const Vertex& worst = simplex.back();
        auto along = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k) x[k] = centroid[k] + t * (worst.x[k] - centroid[k]);
            return clamp(x);
        };
        std::vector<double> xr = along(-1.0);
        const double fr = eval(xr, "simplex");
        if (value(fr) > value(simplex[0].f)) {
            std::vector<double> xe = along(-2.0);
            const double fe = eval(xe, "simplex");
            simplex.back() = value(fe) > value(fr) ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (value(fr) > value(simplex[d - 1].f)) {
            simplex.back() = {xr, fr};
            continue;
        }
        const bool outside = value(fr) > value(worst.f);
        std::vector<double> xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc, "simplex");
        if (value(fc) > value(outside ? fr : worst.f)) {
            simplex.back() = {xc, fc};
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k)
                simplex[i].x[k] = simplex[0].x[k] + 0.5 * (simplex[i].x[k] - simplex[0].x[k]);
            simplex[i].f = eval(simplex[i].x, "simplex");
        }
    }
}

}  // namespace

std::vector<std::vector<double>> theta_grid(const ThetaBox& box, std::size_t points) {
    const std::size_t d = box.dim();
    if (d == 0) throw DimensionError("theta box has no dimensions");
    if (points < 2) throw DomainError("theta grid needs at least two points");
    std::size_t per_axis = points;
    if (d > 1)
        per_axis = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(points), 1.0 / d))));
    std::vector<std::vector<double>> axes(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lo = box.lower[k];
        const double hi = box.upper[k];
        for (std::size_t i = 0; i < per_axis; ++i)
            axes[k].push_back(i + 1 == per_axis
                                  ? hi
                                  : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_axis - 1));
    }
    std::vector<std::vector<double>> grid;
    std::vector<std::size_t> idx(d, 0);
    while (true) {
        std::vector<double> theta(d);
        for (std::size_t k = 0; k < d; ++k) theta[k] = axes[k][idx[k]];
        grid.push_back(std::move(theta));
        std::size_t k = d;
        while (k > 0) {
            --k;
            if (++idx[k] < per_axis) break;
            idx[k] = 0;
            if (k == 0) return grid;
        }
    }
}

OptimizeResult optimize_theta(const ObjectiveFn& objective, const ThetaBox& box,
                              const OptimizeOptions& options) {
    const std::size_t d = box.dim();
    if (d == 0) throw DimensionError("theta box has no dimensions");
    for (std::size_t k = 0; k < d; ++k)
        if (!(box.lower[k] <= box.upper[k])) throw DomainError("theta box is empty");

    OptimizeResult out;
    Tracker eval(objective, options.keep_trace, out);
    const std::size_t points = d == 1 ? static_cast<std::size_t>(options.grid_points_1d)
                                      : static_cast<std::size_t>(std::pow(options.grid_points_per_dim, d));
    const auto grid = theta_grid(box, points);

    std::vector<std::vector<double>> bad;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& theta : grid) {
        const double v = eval(theta, "grid");
        if (!std::isfinite(v)) {
            bad.push_back(theta);
            continue;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!bad.empty()) {
        std::string msg = "objective is not finite at theta =";
        for (const auto& t : bad) msg += " " + format_theta(t);
        throw NumericalError(msg);
    }
    out.grid_theta = eval.best_theta();
    out.grid_value = eval.best_value();

    if (lo == hi) {
        out.flat = true;
        out.theta = box.midpoint();
        out.value = objective(out.theta);
        ++out.evaluations;
        return out;
    }

    std::vector<double> spacing(d);
    const std::size_t per_axis = d == 1 ? grid.size() : static_cast<std::size_t>(options.grid_points_per_dim);
    for (std::size_t k = 0; k < d; ++k)
        spacing[k] = (box.upper[k] - box.lower[k]) / static_cast<double>(per_axis - 1);

    if (spacing[0] > 0.0 || d > 1) {
        if (d == 1)
            golden_section(eval, box, out.grid_theta, spacing[0], options);
        else
            nelder_mead(eval, box, out.grid_theta, spacing, options);
    }
    out.theta = eval.best_theta();
    out.value = eval.best_value();
    return out;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("sup_distance needs equal lengths");
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = std::abs(a[i] - b[i]);
        if (std::isnan(diff)) return std::numeric_limits<double>::quiet_NaN();
        sup = std::max(sup, diff);
    }
    return sup;
}

CalibrationResult one_step_calibrate(const LossSample& sample, const PayoffFamily& family,
                                     const MetricConfig& config, const OptimizeOptions& options) {
    const OneStepObjective objective(sample, family, config);
    CalibrationResult out;
    out.method = CalibrationMethod::OneStep;
    out.optimizer = optimize_theta([&](std::span<const double> t) { return objective(t); },
                                   family.box(), options);
    out.theta_hat = out.optimizer.theta;
    const ObjectiveValue at = objective.evaluate(out.theta_hat);
    out.objective_at_opt = at.value;
    out.premium_at_opt = at.premium;
    out.flat_objective = out.optimizer.flat;
    return out;
}

CalibrationResult two_step_calibrate_with_model(const LossSample& joint, const CovariateSample& cov,
                                                const TailLinkModel& fitted,
                                                const PayoffFamily& family,
                                                const MetricConfig& config, Phi1Form form,
                                                const OptimizeOptions& options) {
    const PayoffFamily bound =
        family.clamp_source() == ClampSource::Fitted ? family.with_model(fitted) : family;
    const TwoStepObjective objective(joint, cov, fitted, bound, config, form);
    CalibrationResult out;
    out.method = CalibrationMethod::TwoStep;
    out.optimizer = optimize_theta([&](std::span<const double> t) { return objective(t); },
                                   bound.box(), options);
    out.theta_hat = out.optimizer.theta;
    const ObjectiveValue at = objective.evaluate(out.theta_hat);
    out.objective_at_opt = at.value;
    out.premium_at_opt = at.premium;
    out.flat_objective = out.optimizer.flat;
    return out;
}

CalibrationResult two_step_calibrate(const LossSample& joint, const CovariateSample& cov,
                                     const PayoffFamily& family, const MetricConfig& config,
                                     const FitOptions& fit_options, Phi1Form form,
                                     const OptimizeOptions& options) {
    FitResult fit = fit_mle(joint, family.model().kind(), fit_options);
    CalibrationResult out =
        two_step_calibrate_with_model(joint, cov, fit.model, family, config, form, options);
    out.fit = std::move(fit);
    return out;
}

namespace {

std::size_t argmax_first(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

}  // namespace

LearningCurve learning_curve(const LossSample& full, const PayoffFamily& family,
                             const MetricConfig& config, const LearningCurveOptions& options) {
    const std::size_t total = full.rows();
    if (options.n_start == 0 || options.n_start > total)
        throw ConfigError("learning curve start must lie in [1, sample size]");
    if (options.increment == 0) throw ConfigError("learning curve increment must be positive");

    LearningCurve out;
    out.grid = theta_grid(family.box(), options.grid_points);
    const std::size_t g = out.grid.size();

    auto evaluate_grid = [&](const auto& objective) {
        std::vector<double> values(g);
        for (std::size_t i = 0; i < g; ++i) values[i] = objective(out.grid[i]);
        return values;
    };

    const OneStepObjective reference(full, family, config);
    out.reference = evaluate_grid(reference);
    const double opt_ref = out.reference[argmax_first(out.reference)];

    std::vector<std::size_t> sizes;
    for (std::size_t n = options.n_start; n < total; n += options.increment) sizes.push_back(n);
    sizes.push_back(total);

    const CovariateSample& cov = full.covariates();
    for (std::size_t n : sizes) {
        LearningCurveRow row;
        row.n = n;
        row.opt_ref = opt_ref;
        const LossSample head = full.head(n);

        const std::vector<double> one = evaluate_grid(OneStepObjective(head, family, config));
        row.error_one = sup_distance(one, out.reference);
        const std::size_t k1 = argmax_first(one);
        row.theta_one = out.grid[k1];
        row.opt_one = one[k1];

        try {
            const FitResult fit = fit_mle(head, family.model().kind(), options.fit);
            row.fitted_params = fit.model.link_coeffs();
            if (fit.model.kind() == TailKind::Gpd) row.fitted_params.push_back(fit.model.sigma());
            const TwoStepObjective two_step(head, cov, fit.model, family, config, options.form);
            const std::vector<double> two = evaluate_grid(two_step);
            row.error_two = sup_distance(two, out.reference);
            const std::size_t k2 = argmax_first(two);
            row.theta_two = out.grid[k2];
            row.opt_two = two[k2];
        } catch (const Error& e) {
            row.fit_ok = false;
            row.fit_message = e.what();
            row.error_two = std::numeric_limits<double>::quiet_NaN();
            row.opt_two = std::numeric_limits<double>::quiet_NaN();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace hc
