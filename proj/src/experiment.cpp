#include "hybridcover/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hybridcover/calibrate.hpp"
#include "hybridcover/compare.hpp"
#include "hybridcover/error.hpp"
#include "hybridcover/numerics.hpp"

namespace hc {

namespace {

using json = nlohmann::ordered_json;

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"dataset", "sim"},
        {"seed", "20240917"},
        {"replications", "20"},
        {"sim.rows", "5000"},
        {"sim.a", "0.35667494393873245"},
        {"sim.b", "1.2527629684953681"},
        {"sim.upper_stat", "mean_excess"},
        {"sim.theta_lower", "0"},
        {"sim.theta_upper", "5"},
        {"tornado.path", ""},
        {"tornado.year_min", "2016"},
        {"tornado.year_max", "2023"},
        {"tornado.upper_stat", "median_excess"},
        {"tornado.theta_box", "auto"},
        {"tornado.box_scale", "2"},
        {"metric.loss", "exp_utility"},
        {"metric.mu", "1.5"},
        {"metric.aversion", "rational"},
        {"metric.kappa", "1.415"},
        {"metric.beta", "1.65"},
        {"metric.phi1_form", "with_prefactor"},
        {"tau", "0.10"},
        {"tau_trad", "0.40"},
        {"tau_index", "0.05,0.10,0.20,0.30,0.40"},
        {"s_quantile", "0.85"},
        {"calibrate.joint_rows", "0"},
        {"curve.n_start", "250"},
        {"curve.increment", "250"},
        {"curve.grid", "256"},
        {"compare.s_quantiles", "0.70,0.75,0.80,0.85,0.90,0.95"},
        {"compare.recalibrate_per_s", "false"},
    };
    return d;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : values_(defaults()) {}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second = trim(value);
}

void ExperimentConfig::load_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!has(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        set(key, line.substr(eq + 1));
    }
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path);
}

std::string ExperimentConfig::env_name(const std::string& key) {
    std::string name = kEnvPrefix;
    for (char c : key) name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

void ExperimentConfig::apply_env() {
    for (auto& [key, value] : values_)
        if (const char* v = std::getenv(env_name(key).c_str())) value = trim(v);
}

bool ExperimentConfig::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& ExperimentConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
    const std::string& text = get(key);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError("key '" + key + "' needs a number, got '" + text + "'");
    return v;
}

std::int64_t ExperimentConfig::get_int(const std::string& key) const {
    const std::string& text = get(key);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "' needs an integer, got '" + text + "'");
    return v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
    const std::string& text = get(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "' needs an unsigned integer, got '" + text + "'");
    return v;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
    const std::string& text = get(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("key '" + key + "' needs true or false, got '" + text + "'");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
            throw ConfigError("key '" + key + "' needs a comma-separated list of numbers");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is empty");
    return out;
}

std::string ExperimentConfig::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::header_line() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# hybridcover config_hash=%016llx seed=%llu",
                  static_cast<unsigned long long>(hash()),
                  static_cast<unsigned long long>(get_u64("seed")));
    return buf;
}

MetricConfig metric_config(const ExperimentConfig& config) {
    MetricConfig m;
    const std::string& loss = config.get("metric.loss");
    if (loss == "exp_utility") {
        m.loss = LossKind::ExpUtility;
    } else if (loss == "identity") {
        m.loss = LossKind::Identity;
    } else {
        throw ConfigError("metric.loss must be exp_utility or identity");
    }
    const std::string& aversion = config.get("metric.aversion");
    if (aversion == "rational") {
        m.aversion = AversionKind::Rational;
    } else if (aversion == "logistic") {
        m.aversion = AversionKind::Logistic;
    } else {
        throw ConfigError("metric.aversion must be rational or logistic");
    }
    m.mu = config.get_double("metric.mu");
    m.kappa = config.get_double("metric.kappa");
    m.beta = config.get_double("metric.beta");
    m.tau = config.get_double("tau");
    validate(m);
    return m;
}

Phi1Form phi1_form(const ExperimentConfig& config) {
    const std::string& v = config.get("metric.phi1_form");
    if (v == "with_prefactor") return Phi1Form::WithPrefactor;
    if (v == "unscaled") return Phi1Form::Unscaled;
    throw ConfigError("metric.phi1_form must be with_prefactor or unscaled");
}

namespace {

UpperStat upper_stat(const std::string& key, const ExperimentConfig& config) {
    const std::string& v = config.get(key);
    if (v == "mean_excess") return UpperStat::MeanExcess;
    if (v == "median_excess") return UpperStat::MedianExcess;
    throw ConfigError(key + " must be mean_excess or median_excess");
}

double s_quantile(const ExperimentConfig& config) {
    const double q = config.get_double("s_quantile");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("s_quantile must lie in (0, 1)");
    return q;
}

ThetaBox parse_box(const std::string& text, std::size_t dim) {
    ThetaBox box;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("theta box entries look like lower:upper");
        try {
            box.lower.push_back(std::stod(item.substr(0, colon)));
            box.upper.push_back(std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("unparseable theta box entry '" + item + "'");
        }
    }
    if (box.dim() != dim) throw ConfigError("theta box needs " + std::to_string(dim) + " entries");
    return box;
}

}  // namespace

ThetaBox auto_linear_box(const LossSample& sample, const PayoffFamily& family, double scale) {
    if (!(scale > 0.0)) throw ConfigError("theta box scale must be positive");
    const std::size_t d = sample.dim();
    double top = 0.0;
    std::vector<double> mean_abs(d, 0.0);
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        auto w = sample.w(i);
        top = std::max(top, family.upper(w));
        for (std::size_t k = 0; k < d; ++k) mean_abs[k] += std::abs(w[k]);
    }
    ThetaBox box;
    for (std::size_t k = 0; k < d; ++k) {
        const double m = mean_abs[k] / static_cast<double>(sample.rows());
        if (!(m > 0.0)) throw DataError("covariate " + std::to_string(k + 1) + " is identically zero");
        const double c = scale * top / m;
        box.lower.push_back(-c);
        box.upper.push_back(c);
    }
    return box;
}

Dataset load_dataset(const ExperimentConfig& config, std::uint64_t replication) {
    const std::string& name = config.get("dataset");
    const double q = s_quantile(config);
    if (name == "sim") {
        const auto rows = config.get_int("sim.rows");
        if (rows < 10) throw ConfigError("sim.rows must be at least 10");
        TailLinkModel model(TailKind::ParetoUnit,
                            {config.get_double("sim.a"), config.get_double("sim.b")});
        LossSample sample = simulate_dataset(model, static_cast<std::size_t>(rows),
                                             config.get_u64("seed"), replication);
        const double s = empirical_quantile(sample.losses(), q);
        ThetaBox box{{config.get_double("sim.theta_lower")}, {config.get_double("sim.theta_upper")}};
        PayoffFamily family(PayoffKind::ExpLink1D, upper_stat("sim.upper_stat", config), s, model,
                            box, ClampSource::Oracle);
        return Dataset{"sim", std::move(sample), std::move(family), model, std::nullopt,
                       std::nullopt, std::nullopt};
    }
    if (name == "tornado") {
        const std::string& path = config.get("tornado.path");
        if (path.empty()) throw ConfigError("dataset tornado needs tornado.path");
        if (!std::filesystem::exists(path)) throw IoError("tornado file '" + path + "' does not exist");
        ParseReport parsed = parse_tornado_file(path);
        BuildReport built = build_sample(parsed.records, static_cast<int>(config.get_int("tornado.year_min")),
                                         static_cast<int>(config.get_int("tornado.year_max")));
        LossSample sample = built.sample;
        const double s = empirical_quantile(sample.losses(), q);
        FitResult fit = fit_mle(sample, TailKind::Gpd);
        const UpperStat stat = upper_stat("tornado.upper_stat", config);
        const ThetaBox placeholder{{-1.0, -1.0}, {1.0, 1.0}};
        PayoffFamily family(PayoffKind::Linear2D, stat, s, fit.model, placeholder, ClampSource::Fitted);
        const std::string& box_text = config.get("tornado.theta_box");
        ThetaBox box = box_text == "auto"
                           ? auto_linear_box(sample, family, config.get_double("tornado.box_scale"))
                           : parse_box(box_text, 2);
        PayoffFamily sized(PayoffKind::Linear2D, stat, s, fit.model, box, ClampSource::Fitted);
        return Dataset{"tornado", std::move(sample), std::move(sized), std::nullopt, std::move(fit),
                       std::move(parsed), std::move(built)};
    }
    throw ConfigError("dataset must be sim or tornado, got '" + name + "'");
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"simulate", "calibrate", "curve", "compare", "ingest"};
    return names;
}

namespace {

namespace fs = std::filesystem;

class Output {
public:
    Output(const ExperimentConfig& config, const fs::path& dir, const std::string& name)
        : path_(dir / name), out_(path_, std::ios::binary) {
        if (!out_) throw IoError("cannot write '" + path_.string() + "'");
        if (path_.extension() == ".csv") out_ << config.header_line() << '\n';
    }
    std::ostream& stream() { return out_; }
    ~Output() { out_.flush(); }

private:
    fs::path path_;
    std::ofstream out_;
};

json provenance(const ExperimentConfig& config) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config.hash()));
    json j;
    j["config_hash"] = buf;
    j["seed"] = config.get_u64("seed");
    return j;
}

void write_json(const ExperimentConfig& config, const fs::path& dir, const std::string& name,
                const json& body) {
    json doc = provenance(config);
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    Output out(config, dir, name);
    out.stream() << doc.dump(2) << '\n';
}

json model_json(const TailLinkModel& model) { return json::parse(model.to_json()); }

json calibration_json(const CalibrationResult& r) {
    json j;
    j["method"] = to_string(r.method);
    j["theta_hat"] = r.theta_hat;
    j["objective_at_opt"] = r.objective_at_opt;
    j["premium_at_opt"] = r.premium_at_opt;
    j["flat_objective"] = r.flat_objective;
    j["evaluations"] = r.optimizer.evaluations;
    j["grid_theta"] = r.optimizer.grid_theta;
    j["grid_value"] = r.optimizer.grid_value;
    if (r.fit) {
        j["fitted_model"] = model_json(r.fit->model);
        j["log_likelihood"] = r.fit->log_likelihood;
        j["converged_starts"] = r.fit->converged_starts;
        j["fit_rows"] = r.fit->used_rows;
    }
    return j;
}

void write_sample(std::ostream& out, const LossSample& sample) {
    out << "y";
    for (std::size_t k = 0; k < sample.dim(); ++k) out << ",w" << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        out << fmt(sample.y(i));
        for (double v : sample.w(i)) out << ',' << fmt(v);
        out << '\n';
    }
}

void cmd_simulate(const ExperimentConfig& config, const fs::path& dir) {
    if (config.get("dataset") != "sim") throw ConfigError("simulate needs dataset = sim");
    const Dataset data = load_dataset(config, 0);
    {
        Output out(config, dir, "sample.csv");
        write_sample(out.stream(), data.sample);
    }
    double gmin = INFINITY;
    double gmax = -INFINITY;
    for (std::size_t i = 0; i < data.sample.rows(); ++i) {
        const double g = data.generator->tail_index(data.sample.w(i));
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    json j;
    j["model"] = model_json(*data.generator);
    j["rows"] = data.sample.rows();
    j["replication"] = 0;
    j["gamma_min"] = gmin;
    j["gamma_max"] = gmax;
    j["threshold"] = data.family.threshold();
    j["s_quantile"] = config.get_double("s_quantile");
    write_json(config, dir, "model.json", j);
}

void cmd_calibrate(const ExperimentConfig& config, const fs::path& dir) {
    const Dataset data = load_dataset(config, 0);
    const MetricConfig metric = metric_config(config);
    const Phi1Form form = phi1_form(config);
    const auto joint_rows = config.get_int("calibrate.joint_rows");
    if (joint_rows < 0) throw ConfigError("calibrate.joint_rows must be nonnegative");
    const LossSample joint = joint_rows == 0 ? data.sample
                                             : data.sample.head(std::min<std::size_t>(
                                                   static_cast<std::size_t>(joint_rows), data.sample.rows()));

    const CalibrationResult one = one_step_calibrate(data.sample, data.family, metric);
    const CalibrationResult two =
        two_step_calibrate(joint, data.sample.covariates(), data.family, metric, {}, form);

    const PayoffFamily two_family = data.family.clamp_source() == ClampSource::Fitted
                                        ? data.family.with_model(two.fit->model)
                                        : data.family;
    const OneStepObjective exact(data.sample, data.family, metric);
    const TwoStepObjective approx(joint, data.sample.covariates(), two.fit->model, two_family, metric, form);
    {
        Output out(config, dir, "objective_curve.csv");
        for (std::size_t k = 0; k < data.family.theta_dim(); ++k) out.stream() << "theta" << (k + 1) << ',';
        out.stream() << "L_hat,L_star_hat,premium\n";
        for (const auto& theta : theta_grid(data.family.box(),
                                            static_cast<std::size_t>(config.get_int("curve.grid")))) {
            const ObjectiveValue e = exact.evaluate(theta);
            for (double t : theta) out.stream() << fmt(t) << ',';
            out.stream() << fmt(e.value) << ',' << fmt(approx(theta)) << ',' << fmt(e.premium) << '\n';
        }
    }
    {
        Output out(config, dir, "payout_scatter.csv");
        write_payout_trace(out.stream(), data.sample, data.family, one.theta_hat);
    }
    json j;
    j["dataset"] = data.name;
    j["rows"] = data.sample.rows();
    j["joint_rows"] = joint.rows();
    j["threshold"] = data.family.threshold();
    j["clamp_model"] = model_json(data.family.model());
    j["theta_lower"] = data.family.box().lower;
    j["theta_upper"] = data.family.box().upper;
    j["one_step"] = calibration_json(one);
    j["two_step"] = calibration_json(two);
    write_json(config, dir, "calibration.json", j);
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void cmd_curve(const ExperimentConfig& config, const fs::path& dir) {
    const MetricConfig metric = metric_config(config);
    LearningCurveOptions options;
    const auto n_start = config.get_int("curve.n_start");
    const auto increment = config.get_int("curve.increment");
    const auto grid = config.get_int("curve.grid");
    if (n_start < 1 || increment < 1 || grid < 2) throw ConfigError("curve settings must be positive");
    options.n_start = static_cast<std::size_t>(n_start);
    options.increment = static_cast<std::size_t>(increment);
    options.grid_points = static_cast<std::size_t>(grid);
    options.form = phi1_form(config);

    const bool simulated = config.get("dataset") == "sim";
    const auto reps = simulated ? config.get_int("replications") : 1;
    if (reps < 1) throw ConfigError("replications must be at least 1");

    std::vector<LearningCurve> curves;
    for (std::int64_t rep = 0; rep < reps; ++rep) {
        const Dataset data = load_dataset(config, static_cast<std::uint64_t>(rep));
        curves.push_back(learning_curve(data.sample, data.family, metric, options));
    }
    const std::size_t params = curves[0].rows[0].fitted_params.size();
    const bool gpd = !simulated;
    const char* names[] = {"a_hat", "b_hat", "c_hat"};
    const std::size_t links = gpd ? params - 1 : params;

    Output out(config, dir, "learning_curve.csv");
    auto& os = out.stream();
    os << "rep,n";
    for (std::size_t k = 0; k < links && k < 3; ++k) os << ',' << names[k];
    if (gpd) os << ",sigma_hat";
    os << ",error_one,error_two,opt_one,opt_two,opt_ref,fit_ok\n";
    for (std::size_t r = 0; r < curves.size(); ++r)
        for (const auto& row : curves[r].rows) {
            os << r << ',' << row.n;
            for (std::size_t k = 0; k < params; ++k)
                os << ',' << (k < row.fitted_params.size() ? fmt(row.fitted_params[k]) : "nan");
            os << ',' << fmt(row.error_one) << ',' << fmt(row.error_two) << ',' << fmt(row.opt_one)
               << ',' << fmt(row.opt_two) << ',' << fmt(row.opt_ref) << ',' << (row.fit_ok ? 1 : 0)
               << '\n';
        }

    Output med(config, dir, "learning_curve_median.csv");
    med.stream() << "n,error_one,error_two,opt_gap_one,opt_gap_two\n";
    for (std::size_t i = 0; i < curves[0].rows.size(); ++i) {
        std::vector<double> e1, e2, g1, g2;
        for (const auto& c : curves) {
            const auto& row = c.rows[i];
            e1.push_back(row.error_one);
            e2.push_back(row.error_two);
            g1.push_back(std::abs(row.opt_one - row.opt_ref));
            g2.push_back(std::abs(row.opt_two - row.opt_ref));
        }
        med.stream() << curves[0].rows[i].n << ',' << fmt(median(e1)) << ',' << fmt(median(e2)) << ','
                     << fmt(median(g1)) << ',' << fmt(median(g2)) << '\n';
    }
}

void cmd_compare(const ExperimentConfig& config, const fs::path& dir) {
    const Dataset data = load_dataset(config, 0);
    const MetricConfig metric = metric_config(config);
    const CalibrationResult base = one_step_calibrate(data.sample, data.family, metric);
    std::vector<double> s_grid;
    const std::vector<double> quantiles = config.get_list("compare.s_quantiles");
    for (double q : quantiles) {
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("compare.s_quantiles must lie in (0, 1)");
        s_grid.push_back(empirical_quantile(data.sample.losses(), q));
    }
    const std::vector<double> tau_index = config.get_list("tau_index");
    Recalibrate recalibrate;
    if (config.get_bool("compare.recalibrate_per_s"))
        recalibrate = [&](const PayoffFamily& family) {
            return one_step_calibrate(data.sample, family, metric).theta_hat;
        };
    const auto rows = comparison_sweep(data.sample, data.family, base.theta_hat, s_grid, tau_index,
                                       config.get_double("tau_trad"), recalibrate);
    Output out(config, dir, "comparison_" + data.name + ".csv");
    auto& os = out.stream();
    os << "s_quantile,s,tau_index,premium_hybrid,m_of_s,premium_capped,ratio_hybrid,ratio_capped,saturated";
    for (std::size_t k = 0; k < data.family.theta_dim(); ++k) os << ",theta" << (k + 1);
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << fmt(quantiles[i / tau_index.size()]) << ',' << fmt(r.s) << ',' << fmt(r.tau_index) << ','
           << fmt(r.premium_hybrid) << ',' << fmt(r.m_of_s) << ',' << fmt(r.premium_capped) << ','
           << fmt(r.ratio_hybrid) << ',' << fmt(r.ratio_capped) << ',' << (r.saturated ? 1 : 0);
        for (double t : r.theta) os << ',' << fmt(t);
        os << '\n';
    }
}

void cmd_ingest(const ExperimentConfig& config, const fs::path& dir) {
    const std::string& path = config.get("tornado.path");
    if (path.empty()) throw ConfigError("ingest needs tornado.path");
    const ParseReport parsed = parse_tornado_file(path);
    const BuildReport built = build_sample(parsed.records, static_cast<int>(config.get_int("tornado.year_min")),
                                           static_cast<int>(config.get_int("tornado.year_max")));
    {
        Output out(config, dir, "records.csv");
        write_records_csv(out.stream(), parsed.records);
    }
    {
        Output out(config, dir, "sample.csv");
        write_sample_csv(out.stream(), built);
    }
    {
        Output out(config, dir, "rejects.csv");
        write_rejects_csv(out.stream(), parsed.rejects);
    }
    json j;
    j["input"] = path;
    j["records"] = parsed.records.size();
    j["rejects"] = parsed.rejects.size();
    j["end_point_imputed"] = parsed.end_point_imputed;
    j["outside_years"] = built.outside_years;
    j["zero_loss"] = built.zero_loss;
    j["zero_area"] = built.zero_area;
    j["sample_rows"] = built.sample.rows();
    j["s_quantile"] = config.get_double("s_quantile");
    j["threshold"] = empirical_quantile(built.sample.losses(), s_quantile(config));
    write_json(config, dir, "ingest_report.json", j);
}

}  // namespace

void run_command(const ExperimentConfig& config, const std::string& command, const std::string& out_dir) {
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    if (command == "simulate") return cmd_simulate(config, dir);
    if (command == "calibrate") return cmd_calibrate(config, dir);
    if (command == "curve") return cmd_curve(config, dir);
    if (command == "compare") return cmd_compare(config, dir);
    if (command == "ingest") return cmd_ingest(config, dir);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace hc
