#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "neqt/cli.hpp"
#include "neqt/csv.hpp"
#include "neqt/errors.hpp"

#ifndef NEQT_CONFIG_DIR
#define NEQT_CONFIG_DIR "configs"
#endif

using namespace neqt;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(NEQT_CONFIG_DIR) + "/" + name + ".json"; }

std::vector<std::vector<double>> rows_of(const std::string& csv)
{
    const auto path = std::filesystem::temp_directory_path() / "neqt_cli_rows.csv";
    std::ofstream(path) << csv;
    return read_csv(path.string()).rows;
}

} // namespace

TEST(Cli, EquilibriumCurrentsVanish)
{
    const auto r = run({"currents", "--config", config("eq")});
    ASSERT_EQ(r.code, cli::exit_ok) << r.err;
    const auto rows = rows_of(r.out);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& row : rows) {
        EXPECT_LT(std::abs(row[1]), 1e-8);
        EXPECT_LT(std::abs(row[2]), 1e-8);
    }
    EXPECT_NE(r.out.find("# config_hash: "), std::string::npos);
    EXPECT_NE(r.out.find("# density_normalization: "), std::string::npos);
}

TEST(Cli, StrongCouplingViolatesSpectralCondition)
{
    const auto r = run({"check-spectral", "--config", config("strong_coupling")});
    EXPECT_EQ(r.code, cli::exit_numerical);
    EXPECT_NE(r.err.find("10.05"), std::string::npos) << r.err;
    const auto rows = rows_of(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[1][0], 10.05, 0.005);
}

TEST(Cli, MissingConfigIsValidationError)
{
    const auto r = run({"currents", "--config", "/no/such/file.json"});
    EXPECT_EQ(r.code, cli::exit_validation);
    EXPECT_NE(r.err.find("/no/such/file.json"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError)
{
    const auto r = run({"currents", "--config", config("eq"), "--bogus"});
    EXPECT_EQ(r.code, cli::exit_usage);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_EQ(run({}).code, cli::exit_usage);
    EXPECT_EQ(run({"--help"}).code, cli::exit_ok);
}

TEST(Cli, OutputIsDeterministic)
{
    const std::vector<std::string> args{"transmission", "--config", config("three_lead"), "--points", "33", "--threads", "2"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("E,T_1_2,T_1_3,T_2_1"), std::string::npos);
}

TEST(Cli, FilesCarryManifest)
{
    const auto dir = std::filesystem::temp_directory_path() / "neqt_cli_out";
    std::filesystem::remove_all(dir);
    const auto path = (dir / "onsager.csv").string();
    const auto r = run({"onsager", "--config", config("three_lead"), "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "onsager.gp"));
    EXPECT_TRUE(std::filesystem::exists(path + ".manifest.json"));
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("# tool: neqt", 0), 0u);
}

TEST(Cli, GreensSitesAndKinds)
{
    const auto r = run({"greens", "--config", config("symmetric_dot"), "--x", "0", "--y", "1:2", "--tmax", "1", "--dt", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(rows_of(r.out).size(), 3u);
    EXPECT_EQ(run({"greens", "--config", config("symmetric_dot"), "--x", "7"}).code, cli::exit_validation);
    EXPECT_EQ(run({"greens", "--config", config("symmetric_dot"), "--kind", "odd"}).code, cli::exit_validation);
    const auto f = run({"greens", "--config", config("symmetric_dot"), "--fourier", "--points", "9"});
    ASSERT_EQ(f.code, 0);
    EXPECT_EQ(rows_of(f.out).size(), 9u);
}

TEST(Cli, SiteSyntax)
{
    EXPECT_EQ(cli::parse_site("3").lead, -1);
    EXPECT_EQ(cli::parse_site("3").index, 3);
    EXPECT_EQ(cli::parse_site("1:4").lead, 1);
    EXPECT_EQ(cli::parse_site("1:4").index, 4);
    EXPECT_THROW(cli::parse_site("a"), ConfigError);
    EXPECT_THROW(cli::parse_site("1:"), ConfigError);
}

TEST(Cli, OracleRejectsUnconvergedPlateau)
{
    const std::vector<std::string> base{"oracle", "--config", config("two_site_interacting"), "--mode", "interacting",
                                        "--L", "4", "--dt", "0.1", "--no-recurrence-check"};
    EXPECT_EQ(run(base).code, cli::exit_numerical);
    auto relaxed = base;
    relaxed.push_back("--allow-unconverged");
    EXPECT_EQ(run(relaxed).code, cli::exit_ok);
    auto capped = base;
    capped[6] = "7";
    EXPECT_EQ(run(capped).code, cli::exit_validation);
}

TEST(Cli, OracleFreeRunsQuickly)
{
    const auto r = run({"oracle", "--config", config("symmetric_dot"), "--mode", "free", "--L", "200", "--dt", "1"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("\"accepted\": true"), std::string::npos);
}

TEST(Cli, HartreeFockReport)
{
    const auto r = run({"hartree-fock", "--config", config("two_site_interacting")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# v_HF row 0:"), std::string::npos);
    EXPECT_EQ(rows_of(r.out).size(), 2u);
}
