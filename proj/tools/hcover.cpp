// Command-line front end. Talks to the library only through the C interface.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridcover/hybridcover.h"

namespace {

int exit_code(hc_status status) {
    switch (status) {
        case HC_OK: return 0;
        case HC_ERR_CONFIG:
        case HC_ERR_INVALID_ARGUMENT: return 2;
        case HC_ERR_DATA:
        case HC_ERR_IO:
        case HC_ERR_DIMENSION: return 3;
        case HC_ERR_NUMERIC:
        case HC_ERR_DOMAIN:
        case HC_ERR_UNDEFINED_MOMENT:
        case HC_ERR_FIT: return 4;
        case HC_ERR_INTERNAL: return 1;
    }
    return 1;
}

struct ConfigHandle {
    hc_config* ptr = nullptr;
    ~ConfigHandle() { hc_config_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid index insurance: calibration and comparison experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::string dataset;
    std::string tornado_path;
    std::string tau_index;
    std::vector<std::string> overrides;
    unsigned long long seed = 0;
    double s_quantile = 0.0;
    int replications = 0;
    bool recalibrate = false;

    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--dataset", dataset, "sim or tornado")->check(CLI::IsMember({"sim", "tornado"}));
    app.add_option("--tornado", tornado_path, "SPC tornado CSV (sets tornado.path)");
    app.add_option("--s-quantile", s_quantile, "threshold quantile in (0, 1)");
    app.add_option("--tau-index", tau_index, "comma-separated index loadings");
    app.add_option("--replications", replications, "simulation replications");
    app.add_flag("--recalibrate-per-s", recalibrate, "recalibrate theta at every threshold in compare");
    app.add_option("--set", overrides, "extra key=value override, repeatable");

    const char* descriptions[][2] = {
        {"simulate", "draw the synthetic sample and write its generating parameters"},
        {"calibrate", "one-step and two-step calibration, objective curves and payout scatter"},
        {"curve", "learning curve of both estimators against the full-sample criterion"},
        {"compare", "equal-price comparison with the capped indemnity contract"},
        {"ingest", "parse a tornado table into the canonical sample and a rejects report"},
    };
    std::string command;
    for (const auto& d : descriptions) {
        auto* sub = app.add_subcommand(d[0], d[1]);
        sub->callback([&command, name = std::string(d[0])] { command = name; });
        if (std::string(d[0]) == "ingest")
            sub->add_option("path", tornado_path, "tornado CSV");
    }

    CLI11_PARSE(app, argc, argv);

    ConfigHandle config;
    hc_status st = hc_config_create(&config.ptr);
    auto fail = [&](hc_status status) {
        std::fprintf(stderr, "hcover: %s: %s\n", hc_status_name(status), hc_last_error());
        return exit_code(status);
    };
    auto set = [&](const char* key, const std::string& value) {
        if (st == HC_OK) st = hc_config_set(config.ptr, key, value.c_str());
    };
    if (st == HC_OK && !config_path.empty()) st = hc_config_load_file(config.ptr, config_path.c_str());
    if (st == HC_OK) st = hc_config_apply_env(config.ptr);
    if (app.count("--seed")) set("seed", std::to_string(seed));
    if (!dataset.empty()) set("dataset", dataset);
    if (!tornado_path.empty()) set("tornado.path", tornado_path);
    if (app.count("--s-quantile")) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", s_quantile);
        set("s_quantile", buf);
    }
    if (!tau_index.empty()) set("tau_index", tau_index);
    if (app.count("--replications")) set("replications", std::to_string(replications));
    if (recalibrate) set("compare.recalibrate_per_s", "true");
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "hcover: --set expects key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    if (st == HC_OK) st = hc_run(config.ptr, command.c_str(), out_dir.c_str());
    if (st != HC_OK) return fail(st);
    return 0;
}
