#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "effham/cli.hpp"
#include "effham/errors.hpp"

using namespace effham;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double field_of(const std::string& line, const std::string& key) {
    const auto at = line.find(key + "=");
    if (at == std::string::npos) return std::nan("");
    return std::stod(line.substr(at + key.size() + 1));
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("effham_cli_" + name); }

}  // namespace

TEST(Cli, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0}) EXPECT_EQ(std::stod(cli::format_double(v)), v);
    EXPECT_EQ(cli::format_double(0.5), "0.5");
}

TEST(Cli, ExitCodeMapping) {
    EXPECT_EQ(cli::exit_code_for("ConfigError"), 2);
    EXPECT_EQ(cli::exit_code_for("IoError"), 4);
    EXPECT_EQ(cli::exit_code_for("NotConverged"), 3);
}

TEST(Cli, VersionAndHelpExitZero) {
    EXPECT_EQ(run_cli({"--version"}).code, 0);
    EXPECT_EQ(run_cli({"cell", "--help"}).code, 0);
}

TEST(Cli, MissingSubcommandIsConfigError) { EXPECT_EQ(run_cli({}).code, 2); }

TEST(Cli, CheckGodunovPasses) {
    const auto r = run_cli({"check", "--flux", "godunov", "--samples", "10000"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("check=pass"), std::string::npos);
}

TEST(Cli, CheckUnderDissipatedLaxFriedrichsFails) {
    const auto r = run_cli({"check", "--flux", "lax-friedrichs", "--lf-sigma", "0.1,0.1", "--samples", "2000"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, DiscountedStateFreeGivesSlope) {
    const auto r = run_cli({"cell", "--hamiltonian", "state_free_abs", "--method", "discounted", "--p", "2",
                            "--alpha", "0.01", "--nx", "16", "--ny", "4", "--dt", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(field_of(r.out, "lambda"), 2.0, 1e-8);
}

TEST(Cli, UnknownConfigKeyRejected) {
    const auto cfg = temp("unknown.json");
    std::ofstream(cfg) << R"({"method": "barles", "gird": 5, "nx": 10})";
    const auto r = run_cli({"cell", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    const auto e = nlohmann::json::parse(r.err);
    EXPECT_EQ(e["error"], "ConfigError");
    EXPECT_NE(e.dump().find("gird"), std::string::npos);
    fs::remove(cfg);
}

TEST(Cli, AllViolationsListedAtOnce) {
    const auto r = run_cli({"cell", "--method", "magic", "--nx", "0", "--dt", "fast", "--p", "1"});
    EXPECT_EQ(r.code, 2);
    const auto e = nlohmann::json::parse(r.err);
    ASSERT_TRUE(e.contains("violations"));
    EXPECT_GE(e["violations"].size(), 3u);
}

TEST(Cli, FlagsOverrideConfig) {
    const auto cfg = temp("override.json");
    std::ofstream(cfg) << R"({"hamiltonian": "state_free_abs", "method": "barles", "p": 5,
                              "nx": 10, "ny": 4, "dt": 0, "tau_max": 1})";
    const auto r = run_cli({"cell", "--config", cfg.string(), "--p", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(field_of(r.out, "lambda"), 0.5, 1e-12);
    fs::remove(cfg);
}

TEST(Cli, MalformedConfigIsIoError) {
    const auto cfg = temp("broken.json");
    std::ofstream(cfg) << "{\n\"nx\": 10,\n\"ny\": }\n";
    const auto r = run_cli({"cell", "--config", cfg.string()});
    EXPECT_EQ(r.code, 4);
    EXPECT_EQ(nlohmann::json::parse(r.err)["line"], 3);
    fs::remove(cfg);
    EXPECT_EQ(run_cli({"cell", "--config", cfg.string()}).code, 4);
}

TEST(Cli, HistoryCsvIsByteIdenticalAcrossRuns) {
    const auto path = temp("hist.csv");
    const std::vector<std::string> args{"cell", "--method", "barles", "--p", "1.3", "--nx", "20", "--ny", "5",
                                        "--dt", "0.01", "--tau-max", "1", "--out", path.string()};
    ASSERT_EQ(run_cli(args).code, 0);
    const auto first = slurp(path);
    ASSERT_EQ(run_cli(args).code, 0);
    EXPECT_EQ(first, slurp(path));
    EXPECT_NE(first.find("# effham 1.0.0 cell"), std::string::npos);
    EXPECT_NE(first.find("tau,stat,scaled_stat,lambda_estimate,node_minus_median"), std::string::npos);
    fs::remove(path);
}

TEST(Cli, StateFreeHistoryIsConstant) {
    const auto path = temp("hist_sf.csv");
    ASSERT_EQ(run_cli({"cell", "--hamiltonian", "state_free_abs", "--method", "barles", "--p", "0.5", "--nx",
                       "10", "--ny", "4", "--dt", "0", "--tau-max", "1", "--record-every", "0.1", "--out",
                       path.string()})
                  .code,
              0);
    std::istringstream is(slurp(path));
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::stringstream ls(line);
        std::string tau, stat, scaled;
        std::getline(ls, tau, ',');
        std::getline(ls, stat, ',');
        std::getline(ls, scaled, ',');
        EXPECT_NEAR(std::stod(scaled), -0.5, 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 10);
    fs::remove(path);
}

TEST(Cli, EmptyHistoryRejected) {
    CellSolution s;
    std::ostringstream os;
    EXPECT_THROW(cli::emit_history(s, os), ConfigError);
}

TEST(Cli, TabulateThenSolve) {
    const auto table = temp("table.json"), csv = temp("solve.csv");
    auto r = run_cli({"tabulate", "--hamiltonian", "state_free_abs", "--p-set", "-8:8:17", "--nx", "10",
                      "--ny", "4", "--dt", "0", "--tau-max", "1", "--out", table.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run_cli({"solve", "--table", table.string(), "--u0", "sin:0.2", "--n", "50", "--T", "0.1", "--out",
                 csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(csv).find("t,x0,u"), std::string::npos);
    r = run_cli({"check", "--table", table.string(), "--f-lip", "1"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    r = run_cli({"solve", "--table", table.string(), "--u0", "sin:3", "--n", "50", "--T", "0.1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "GradientOutOfHull");
    fs::remove(table);
    fs::remove(csv);
}

TEST(Cli, MissingTableIsIoError) {
    const auto r = run_cli({"solve", "--table", "/nonexistent/table.json"});
    EXPECT_EQ(r.code, 4);
}
