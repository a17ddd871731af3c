#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridcover/contract.hpp"
#include "hybridcover/dists.hpp"
#include "hybridcover/ingest.hpp"
#include "hybridcover/objective.hpp"
#include "hybridcover/sample.hpp"

namespace hc {

// Flat key = value settings. Every key has a built-in default; files and
// environment variables may only set known keys. Later sources win:
// defaults, then file, then environment, then explicit set() calls.
class ExperimentConfig {
public:
    static constexpr const char* kEnvPrefix = "HYBRIDCOVER_";

    ExperimentConfig();

    // '#' starts a comment; blank lines are ignored. Throws ConfigError on an
    // unknown key or a line without '='.
    void load_text(const std::string& text, const std::string& origin = "<text>");
    void load_file(const std::string& path);
    // HYBRIDCOVER_ + key upper-cased with '.' replaced by '_', e.g.
    // HYBRIDCOVER_SIM_ROWS for sim.rows.
    void apply_env();
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    // "key=value\n" lines in key order; the hash input.
    std::string canonical() const;
    // FNV-1a 64 of canonical().
    std::uint64_t hash() const;
    // "# hybridcover config_hash=<hex> seed=<seed>"
    std::string header_line() const;

    static std::string env_name(const std::string& key);

private:
    std::map<std::string, std::string> values_;
};

MetricConfig metric_config(const ExperimentConfig& config);
Phi1Form phi1_form(const ExperimentConfig& config);

struct Dataset {
    std::string name;  // "sim" or "tornado"
    LossSample sample;
    PayoffFamily family;
    std::optional<TailLinkModel> generator;  // simulated data only
    std::optional<FitResult> clamp_fit;      // real data: fit backing the clamp
    std::optional<ParseReport> parsed;
    std::optional<BuildReport> built;
};

// The configured dataset with its payoff family at the configured quantile.
// Simulated data are drawn from stream `replication` of the master seed.
Dataset load_dataset(const ExperimentConfig& config, std::uint64_t replication = 0);

// Data-adaptive symmetric box for the linear 2D payoff: |theta_k| <= scale *
// max_j upper(w_j) / mean_j |w_jk|, large enough for the variable part to reach
// every clamp.
ThetaBox auto_linear_box(const LossSample& sample, const PayoffFamily& family, double scale);

const std::vector<std::string>& command_names();

// Runs one command and writes its tables into out_dir (created if needed).
void run_command(const ExperimentConfig& config, const std::string& command,
                 const std::string& out_dir);

}  // namespace hc
