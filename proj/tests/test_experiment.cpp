#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hybridcover/error.hpp"
#include "hybridcover/experiment.hpp"

using namespace hc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hybridcover_test_" + name);
    fs::remove_all(dir);
    return dir;
}

// A small synthetic SPC-style table with a plausible spatial spread.
fs::path write_tornado_table(const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path file = dir / "tornado.csv";
    std::ofstream out(file);
    out << "om,yr,loss,slat,slon,elat,elon,len,wid\n";
    const TailLinkModel gen(TailKind::Gpd, {-std::log(0.6), 0.0, 0.0}, 50.0);
    const LossSample draws = simulate_dataset(gen, 600, 5);
    for (std::size_t i = 0; i < draws.rows(); ++i) {
        const double lat = 30.0 + 15.0 * draws.w(i)[0];
        const double lon = -100.0 + 20.0 * draws.w(i)[1];
        out << i << ',' << 2016 + static_cast<int>(i % 8) << ',' << 1000.0 * (1.0 + draws.y(i)) << ','
            << lat << ',' << lon << ',' << lat + 0.1 << ',' << lon + 0.1 << ",2.0,100\n";
    }
    out << "999,2019,abc,35,-90,35,-90,1,1\n";
    return file;
}

}  // namespace

TEST_CASE("config defaults, file and overrides") {
    ExperimentConfig c;
    CHECK(c.get_double("metric.mu") == 1.5);
    CHECK(c.get_double("metric.kappa") == 1.415);
    CHECK(c.get_double("metric.beta") == 1.65);
    CHECK(c.get_double("tau") == 0.10);
    CHECK(c.get_double("tau_trad") == 0.40);
    CHECK(c.get_double("s_quantile") == 0.85);
    CHECK(c.get_int("sim.rows") == 5000);
    c.load_text("# comment\nsim.rows = 100   # trailing\n\nmetric.mu=2\n");
    CHECK(c.get_int("sim.rows") == 100);
    CHECK(c.get_double("metric.mu") == 2.0);
    CHECK_THROWS_AS(c.load_text("nope = 1\n"), ConfigError);
    CHECK_THROWS_AS(c.load_text("sim.rows\n"), ConfigError);
    c.set("metric.mu", "abc");
    CHECK_THROWS_AS(c.get_double("metric.mu"), ConfigError);
    CHECK_THROWS_AS(metric_config(c), ConfigError);
    CHECK(c.get_list("tau_index") == std::vector<double>{0.05, 0.10, 0.20, 0.30, 0.40});
}

TEST_CASE("environment overrides use the documented prefix") {
    CHECK(ExperimentConfig::env_name("sim.rows") == "HYBRIDCOVER_SIM_ROWS");
    ::setenv("HYBRIDCOVER_SIM_ROWS", "321", 1);
    ExperimentConfig c;
    c.apply_env();
    ::unsetenv("HYBRIDCOVER_SIM_ROWS");
    CHECK(c.get_int("sim.rows") == 321);
}

TEST_CASE("config hash tracks every value") {
    ExperimentConfig a, b;
    CHECK(a.hash() == b.hash());
    b.set("seed", "1");
    CHECK(a.hash() != b.hash());
    CHECK(a.header_line().rfind("# hybridcover config_hash=", 0) == 0);
    CHECK(a.header_line().find("seed=20240917") != std::string::npos);
}

TEST_CASE("simulate writes the configured sample deterministically") {
    ExperimentConfig c;
    c.set("sim.rows", "5000");
    const fs::path d1 = scratch("sim1"), d2 = scratch("sim2");
    run_command(c, "simulate", d1.string());
    run_command(c, "simulate", d2.string());
    CHECK(slurp(d1 / "sample.csv") == slurp(d2 / "sample.csv"));
    CHECK(slurp(d1 / "model.json") == slurp(d2 / "model.json"));
    const std::string sample = slurp(d1 / "sample.csv");
    CHECK(sample.rfind(c.header_line() + "\ny,w1\n", 0) == 0);
    CHECK(std::count(sample.begin(), sample.end(), '\n') == 5002);
    const Dataset data = load_dataset(c);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < data.sample.rows(); ++i) {
        const double g = data.generator->tail_index(data.sample.w(i));
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    CHECK(lo >= 0.2);
    CHECK(hi <= 0.7);
}

TEST_CASE("calibrate, curve and compare run end to end and rerun identically") {
    ExperimentConfig c;
    c.set("sim.rows", "1000");
    c.set("replications", "2");
    c.set("curve.n_start", "400");
    c.set("curve.increment", "300");
    c.set("curve.grid", "32");
    c.set("compare.s_quantiles", "0.8,0.9");
    const fs::path d1 = scratch("run1"), d2 = scratch("run2");
    for (const char* cmd : {"calibrate", "curve", "compare"}) {
        run_command(c, cmd, d1.string());
        run_command(c, cmd, d2.string());
    }
    for (const char* f : {"objective_curve.csv", "payout_scatter.csv", "calibration.json", "learning_curve.csv",
                          "learning_curve_median.csv", "comparison_sim.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    CHECK(slurp(d1 / "learning_curve.csv").find("rep,n,a_hat,b_hat,error_one") != std::string::npos);
    CHECK(slurp(d1 / "calibration.json").find("\"config_hash\"") != std::string::npos);
}

TEST_CASE("ingest and real-data commands on a synthetic SPC table") {
    const fs::path dir = scratch("tornado");
    const fs::path file = write_tornado_table(dir);
    ExperimentConfig c;
    c.set("dataset", "tornado");
    c.set("tornado.path", file.string());
    c.set("compare.s_quantiles", "0.85,0.9");
    run_command(c, "ingest", (dir / "out").string());
    const std::string report = slurp(dir / "out" / "ingest_report.json");
    CHECK(report.find("\"sample_rows\": 600") != std::string::npos);
    CHECK(report.find("\"rejects\": 1") != std::string::npos);
    run_command(c, "compare", (dir / "out").string());
    CHECK(fs::exists(dir / "out" / "comparison_tornado.csv"));
    const Dataset data = load_dataset(c);
    CHECK(data.family.kind() == PayoffKind::Linear2D);
    CHECK(data.family.upper_stat() == UpperStat::MedianExcess);
    CHECK(data.family.box().lower[0] < 0.0);
}

TEST_CASE("command errors carry their kind") {
    ExperimentConfig c;
    CHECK_THROWS_AS(run_command(c, "bogus", scratch("bogus").string()), ConfigError);
    c.set("dataset", "tornado");
    CHECK_THROWS_AS(load_dataset(c), ConfigError);
    c.set("tornado.path", "/nonexistent/file.csv");
    CHECK_THROWS_AS(load_dataset(c), IoError);
    ExperimentConfig q;
    q.set("s_quantile", "1.5");
    CHECK_THROWS_AS(load_dataset(q), ConfigError);
}

TEST_CASE("shipped default config matches the built-in defaults") {
    ExperimentConfig shipped;
    shipped.load_file(HC_DEFAULT_CONF);
    CHECK(shipped.hash() == ExperimentConfig().hash());
}
