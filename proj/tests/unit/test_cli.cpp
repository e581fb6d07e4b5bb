#include "mildito/cli/run.hpp"
#include "mildito/cli/suites.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mildito;
using namespace mildito::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mildito_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

ExperimentConfig small(const std::string& suite) {
    ExperimentConfig c;
    c.suite = suite;
    c.modes = 8;
    c.noise_modes = 8;
    c.resolution = 64;
    c.steps = 40;
    c.paths = 200;
    c.mc_samples = 1000;
    return c;
}

}  // namespace

TEST(Report, CsvQuotingAndNumbers) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Report, Verdicts) {
    EXPECT_TRUE(make_row("s", "c", Relation::le, 1.0, 2.0, 0, 0).pass());
    EXPECT_FALSE(make_row("s", "c", Relation::le, 2.0, 1.0, 0, 0.5).pass());
    EXPECT_TRUE(make_row("s", "c", Relation::eq, 1.0, 1.2, 0, 0.25).pass());
    EXPECT_TRUE(make_row("s", "c", Relation::ge, 0.9, 1.0, 0, 0.1 + 1e-12).pass());
    EXPECT_FALSE(make_row("s", "c", Relation::eq, std::nan(""), 1.0, 0, 1e9).pass());
}

TEST(Config, JsonRoundTrip) {
    ExperimentConfig c;
    c.p = 6.0;
    c.terminal = 0.2;
    c.delta = 0.6;
    const ExperimentConfig back = config_from_json(to_json(c));
    EXPECT_EQ(back.p, 6.0);
    EXPECT_EQ(back.terminal, 0.2);
    EXPECT_EQ(back.delta_or_default(), 0.6);
    EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(config_from_json(nlohmann::json{{"pathz", 3}}), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"paths", "many"}}), ConfigError);
}

TEST(Config, EmbeddingHypothesisNamed) {
    ExperimentConfig c;
    c.suite = "gamma";
    c.beta = -0.2;
    try {
        validate(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("β + ε < −¼"), std::string::npos) << e.what();
    }
}

TEST(Run, BadConfigExitsTwo) {
    ExperimentConfig c = small("gamma");
    c.beta = -0.2;
    c.out = scratch("bad").string();
    std::ostringstream log;
    const RunResult r = run(c, log);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(log.str().find("β + ε < −¼"), std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(std::filesystem::path(c.out) / "summary.json"));
    EXPECT_EQ(summary["exit_code"], 2);
    EXPECT_EQ(summary["schema_version"], 1);
}

TEST(Run, BlowUpExitsThree) {
    ExperimentConfig c = small("simulate");
    c.drift = "linear";
    c.drift_rate = -1e308;
    c.initial_amplitude = 1e10;
    c.out = scratch("blowup").string();
    std::ostringstream log;
    const RunResult r = run(c, log);
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.error.find("path"), std::string::npos);
}

TEST(Run, DynkinOnOuPasses) {
    ExperimentConfig c = small("dynkin");
    c.out = scratch("dynkin").string();
    std::ostringstream log;
    const RunResult r = run(c, log);
    EXPECT_EQ(r.exit_code, 0) << log.str();
    bool found = false;
    for (const auto& row : r.rows) found |= row.check == "second_moment_lhs";
    EXPECT_TRUE(found);
    const std::string csv = slurp(std::filesystem::path(c.out) / "report.csv");
    EXPECT_EQ(csv.rfind("suite,check,relation,lhs,rhs,stderr,tolerance,violation,verdict\r\n", 0), 0u);
}

TEST(Run, ReportsAreByteStable) {
    ExperimentConfig c = small("weak");
    std::ostringstream log;
    const auto first = scratch("stable_a"), second = scratch("stable_b");
    c.out = first.string();
    run(c, log);
    c.out = second.string();
    c.workers = 3;
    run(c, log);
    const std::string a = slurp(first / "report.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(second / "report.csv"));
}

TEST(Suites, ClosedForm) {
    const auto spec = ou_spec(32, 32, 0.0, 0.1);
    EXPECT_NEAR(second_moment_closed_form(spec, Matrix::Identity(32, 32), 0.0, 0.1), 0.074732632675525755, 1e-15);
}

TEST(Suites, SmallConfigsPass) {
    for (const std::string suite : {"gamma", "nemytskii", "simulate", "ito", "weak"}) {
        ExperimentConfig c = small(suite);
        validate(c);
        for (const auto& row : run_suite(suite, c))
            EXPECT_TRUE(row.pass()) << suite << "/" << row.check << " lhs=" << row.lhs << " rhs=" << row.rhs
                                    << " tol=" << row.tolerance;
    }
}
