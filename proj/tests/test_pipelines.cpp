#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bellmem/pipelines.hpp"

using namespace bellmem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Revival settings with sweep overrides appended to the file's [sweep] section.
RunConfig revival_cfg(const std::string& sweep_extra = "") {
    std::string text = read_file(std::string(BELLMEM_CONFIG_DIR) + "/revival.ini");
    if (!sweep_extra.empty()) {
        const auto pos = text.find("samples_per_period");
        text.erase(pos, text.find('\n', pos) - pos);
        text.insert(pos, sweep_extra);
    }
    return parse_config(text);
}

// A 6x6 corner of the map settings, cheap enough for unit tests.
RunConfig small_map(const std::string& d_list) {
    return parse_config("[physical]\nomega0 = 1\nv = 1\ng = 0.05 omega0\nJ = -0.005 omega0\nlambda = 0.001\n"
                        "[sweep]\nd = " + d_list + "\nlambda = logspace(1e-3, 1, 6) omega0\n"
                        "time_horizon = 200 /omega0\nsamples_per_period = 100\n[output]\nnormalized = true\n");
}

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd = std::string(BELLMEM_CLI_PATH) + " " + args + " > " + stdout_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Revival, BoundsAndConservation) {
    set_warning_handler({});
    const auto r = run_revival(revival_cfg(), 2);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        EXPECT_LE(r.B[i], 2.0 * std::sqrt(2.0) + 1e-9);
        EXPECT_GE(r.D[i], 0.0);
        EXPECT_LE(r.D[i], 1.0 + 1e-12);
        EXPECT_NEAR(r.P1[i] + r.P2[i] + r.P_bath[i], 1.0, 1e-12);
        EXPECT_NEAR(r.s2[i], 0.5, 1e-10);  // symmetric component is dark at lambda0/4
    }
    EXPECT_GT(*std::max_element(r.B.begin() + 1, r.B.end()), 2.0);
    EXPECT_EQ(r.csv.rows.size(), r.t.size());
    EXPECT_EQ(r.csv.columns.size(), 9u);
}

TEST(Revival, ZeroCouplingGivesConstantSeries) {
    set_warning_handler({});
    const auto r = run_revival(parse_config("[physical]\ngamma = 0\nJ = 0\n[sweep]\ntime_horizon = 1 T_P\n"
                                            "samples_per_period = 200\n"), 1);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        EXPECT_NEAR(r.D[i], r.D[0], 1e-12);
        EXPECT_NEAR(r.B[i], r.B[0], 1e-12);
        EXPECT_NEAR(r.I_AB[i], r.I_AB[0], 1e-12);
    }
    EXPECT_EQ(r.N_blp, 0.0);
}

TEST(Revival, GridRefinementConverges) {
    set_warning_handler({});
    const auto coarse = run_revival(revival_cfg("samples_per_period = 1000"), 2);
    const auto fine = run_revival(revival_cfg("samples_per_period = 2000"), 2);
    EXPECT_NEAR(coarse.N_blp / fine.N_blp, 1.0, 0.01);
    EXPECT_NEAR(coarse.N_bell / fine.N_bell, 1.0, 0.01);
}

TEST(Revival, ThreadCountDoesNotChangeOutput) {
    set_warning_handler({});
    EXPECT_EQ(run_revival(revival_cfg(), 1).csv.str(), run_revival(revival_cfg(), 4).csv.str());
}

TEST(Map, PeriodicInLambda0) {
    const auto a = run_map(small_map("0.05 lambda0, 0.2 lambda0, 0.25 lambda0"), 2);
    const auto b = run_map(small_map("1.05 lambda0, 1.2 lambda0, 1.25 lambda0"), 2);
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        EXPECT_NEAR(a.cells[k].N_blp, b.cells[k].N_blp, 1e-9);
        EXPECT_NEAR(a.cells[k].N_bell, b.cells[k].N_bell, 1e-9);
    }
}

TEST(Map, RowOrderAndDeterminism) {
    const auto cfg = small_map("linspace(0, 0.5, 6) lambda0");
    const auto m1 = run_map(cfg, 1);
    const auto m3 = run_map(cfg, 3);
    EXPECT_EQ(m1.csv.str(), m3.csv.str());
    ASSERT_EQ(m1.cells.size(), 36u);
    EXPECT_EQ(m1.at(1, 0).d, m1.cells[6].d);
    EXPECT_LT(m1.cells[0].lambda, m1.cells[1].lambda);
    for (const auto& c : m1.cells) {
        EXPECT_GE(c.N_blp, 0.0);
        EXPECT_GE(c.N_bell, 0.0);
    }
}

TEST(Map, OverdampedNodeIsMarkovian) {
    const auto cfg = parse_config("[physical]\nomega0 = 1\nv = 1\ng = 0.05\nJ = -0.005\n"
                                  "[sweep]\nd = 0.25 lambda0\nlambda = 1\ntime_horizon = 400 /omega0\n");
    const auto m = run_map(cfg, 1);
    EXPECT_LT(m.cells[0].N_blp, 1e-3);
    EXPECT_LT(m.cells[0].N_bell, 1e-3);
}

TEST(Lifetime, ScanMatchesAnalyticNearNode) {
    const auto r = run_lifetime_scan(parse_config(read_file(std::string(BELLMEM_CONFIG_DIR) + "/lifetime.ini")), 2);
    EXPECT_NEAR(r.slope, 2.0, 0.02);
    int quadratic = 0;
    for (const auto& row : r.rows) {
        if (row.frac <= 1e-3) {
            EXPECT_NEAR(row.gamma_exact / row.gamma_analytic, 1.0, 0.01) << row.frac;
        }
        if (row.gamma_exact > 0 && std::abs(row.gamma_exact / row.gamma_analytic - 1.0) < 0.01) ++quadratic;
    }
    // 10 points per decade: at least five decades on the quadratic law
    EXPECT_GE(quadratic, 50);
}

TEST(Crb, TableAnchors) {
    const auto r = run_crb(parse_config(read_file(std::string(BELLMEM_CONFIG_DIR) + "/crb.ini")));
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_NEAR(r.rows[0].delta_d_min * 1e9, 57.0, 0.02 * 57.0);
    EXPECT_NEAR(r.rows[1].delta_d_min * 1e9, 180.0, 0.02 * 180.0);
    EXPECT_NEAR(r.rows[2].delta_d_min, 0.5 * r.rows[0].delta_d_min, 1e-20);
    EXPECT_EQ(r.csv.rows[1][1], "100000000");
    auto bad = parse_config(read_file(std::string(BELLMEM_CONFIG_DIR) + "/crb.ini") + "lambda0 = 6.9e5\n");
    EXPECT_THROW(run_crb(bad), ConfigError);
}

TEST(Cli, ExitCodesAndCheck) {
    const std::string dir = BELLMEM_CONFIG_DIR;
    EXPECT_EQ(run_cli("crb --config " + dir + "/crb.ini"), 0);
    EXPECT_EQ(run_cli("lifetime --check --config " + dir + "/lifetime.ini"), 0);
    EXPECT_EQ(run_cli("crb --config /nonexistent.ini"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);

    const std::string bad = ::testing::TempDir() + "bad.ini";
    std::ofstream(bad) << "[physical]\nlambda = -3\n";
    EXPECT_EQ(run_cli("revival --config " + bad), 2);
    // pole of the self-energy is unreachable from the CLI; a non-physical
    // population drives the numerical exit path instead
    const std::string huge = ::testing::TempDir() + "huge.ini";
    std::ofstream(huge) << "[physical]\nomega0 = 1\nv = 1\ngamma = 1e300\nlambda = 1e10\n[bath]\nn_modes = 4\n"
                           "[sweep]\ntime_horizon = 1\nsamples_per_period = 100\n";
    EXPECT_EQ(run_cli("revival --config " + huge), 3);
}

TEST(Cli, ByteIdenticalAcrossThreadsAndEffectiveConfig) {
    const std::string dir = BELLMEM_CONFIG_DIR;
    const std::string tmp = ::testing::TempDir();
    // stdout keeps the output path out of the header
    ASSERT_EQ(run_cli("revival --config " + dir + "/revival.ini --threads 1", tmp + "r1.csv"), 0);
    ASSERT_EQ(run_cli("revival --config " + dir + "/revival.ini --threads 3", tmp + "r3.csv"), 0);
    const std::string a = read_file(tmp + "r1.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read_file(tmp + "r3.csv"));
    EXPECT_EQ(a.rfind("# bellmem ", 0), 0u);

    // serialize the effective config, run again from it, compare bytes
    const std::string eff = tmp + "effective.ini";
    ASSERT_EQ(run_cli("revival --check --config " + dir + "/revival.ini", eff), 0);
    ASSERT_EQ(run_cli("revival --config " + eff + " --threads 2", tmp + "r_eff.csv"), 0);
    EXPECT_EQ(a, read_file(tmp + "r_eff.csv"));
}
