#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "alm/config.hpp"

using namespace alm;

TEST_CASE("presets") {
    const RunConfig base = preset("paper-2pct");
    CHECK(base.setup.factor.x0 == 0.02);
    CHECK(base.setup.factor.theta == 0.02);
    CHECK(base.setup.factor.k == 0.2);
    CHECK(base.setup.factor.sigma_r == 0.01);
    CHECK(base.setup.equity.sigma_s == 0.1);
    CHECK(base.setup.equity.gamma == 0.0);
    CHECK(base.setup.mgmt.w_s == 0.05);
    CHECK(base.setup.mgmt.n == 20);
    CHECK(base.setup.years == 30);
    CHECK(base.setup.liability.r_g == 0.015);
    CHECK(base.setup.liability.p_low == 0.05);
    CHECK(base.s_eq == -0.39);
    CHECK(base.regime == ShockRegime::eiopa2012);
    CHECK(base.paths == 50000);
    CHECK(base.seed == 20190101);

    const RunConfig low = preset("paper-lowyield");
    CHECK(low.setup.factor.x0 == 0.005);
    CHECK(low.setup.liability.r_g == 0.0);
    CHECK(low.setup.liability.p_low == 0.1);
    CHECK(low.setup.mgmt.w_s == 0.08);
    CHECK(low.setup.mgmt.n == 10);
    CHECK(low.regime == ShockRegime::eiopa2018);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
    CHECK(preset_names().size() == 2);
}

TEST_CASE("INI values override the base") {
    const RunConfig c = parse_config(
        "; comment\n[market]\nr0 = 0.01\nsigma_r=0.015\n[management]\nengine = proxy\nn = 12\n"
        "[liability]\ncompetitor = max_with_eta\neta = 0.8\n[run]\nexperiment = sweep_gamma\n"
        "grid = -0.5, 0, 0.5\npaths = 100\nseed = 7\n[shock]\nregime = eiopa2018\nfloor_1pct = true\n");
    CHECK(c.setup.factor.x0 == 0.01);
    CHECK(c.setup.factor.sigma_r == 0.015);
    CHECK(c.setup.factor.theta == 0.02);
    CHECK(c.setup.mgmt.engine == BondEngine::proxy);
    CHECK(c.setup.mgmt.n == 12);
    CHECK(c.setup.liability.competitor == CompetitorRule::max_with_eta);
    CHECK(c.setup.liability.eta == 0.8);
    CHECK(c.experiment == Experiment::sweep_gamma);
    CHECK(c.grid == std::vector<double>{-0.5, 0.0, 0.5});
    CHECK(c.paths == 100);
    CHECK(c.seed == 7);
    CHECK(c.regime == ShockRegime::eiopa2018);
    CHECK(c.floor_1pct);

    const RunConfig commented = parse_config("[market]\nr0 = 0.03   ; initial factor\nk = 0.1 # speed\n");
    CHECK(commented.setup.factor.x0 == 0.03);
    CHECK(commented.setup.factor.k == 0.1);
}

TEST_CASE("invalid configurations name the key") {
    CHECK_THROWS_WITH_AS(parse_config("[liability]\npi_pr = 0.5\n"), doctest::Contains("pi_pr"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[liability]\nbogus = 1\n"), doctest::Contains("liability.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nowhere]\nx = 1\n"), doctest::Contains("[nowhere]"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[market]\nr0 = abc\n"), doctest::Contains("market.r0"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\npaths = 0\n"), doctest::Contains("paths"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nexperiment = magic\n"), doctest::Contains("experiment"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[shock]\nfloor_1pct = maybe\n"), doctest::Contains("floor_1pct"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[curve]\nsource = csv\n"), doctest::Contains("curve.file"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[curve]\nmax_maturity = 40\n"), doctest::Contains("max_maturity"), ConfigError);
    CHECK_THROWS_AS(parse_config("[market\nr0 = 1\n"), ConfigError);
}

TEST_CASE("saved configurations load back identically") {
    RunConfig c = preset("paper-lowyield");
    c.setup.factor.sigma_r = 0.0123456789012345;
    c.setup.mgmt.engine = BondEngine::proxy;
    c.grid = {1.0, 2.5, 10.0};
    c.curve_source = "csv";
    c.curve_file = "curves/eur.csv";
    c.shock_table_file = "tables/custom.csv";
    c.experiment = Experiment::durations;
    c.seed = 18446744073709551615ull;
    c.ledger_dump_paths = 3;
    CHECK(parse_config(save_config(c)) == c);
    CHECK(parse_config(save_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("config files and default grids") {
    const auto path = std::filesystem::temp_directory_path() / "alm_test_config.ini";
    {
        std::ofstream out(path);
        out << "[management]\nw_s = 0.1\n";
    }
    const RunConfig c = load_config(path.string(), preset("paper-lowyield"));
    CHECK(c.setup.mgmt.w_s == 0.1);
    CHECK(c.setup.mgmt.n == 10);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);

    CHECK(default_grid(Experiment::sweep_n, c).size() == 30);
    CHECK(default_grid(Experiment::sweep_gamma, c).front() == doctest::Approx(-1.0));
    CHECK(default_grid(Experiment::sweep_ws, c).back() == doctest::Approx(0.2));
    CHECK(default_grid(Experiment::durations, c) == std::vector<double>{10.0});
    CHECK(default_grid(Experiment::scr, c).empty());
}

TEST_CASE("csv market curves") {
    const auto path = std::filesystem::temp_directory_path() / "alm_test_curve.csv";
    {
        std::ofstream out(path);
        out << "maturity,zero_rate\n";
        for (int t = 1; t <= 60; ++t) out << t << ',' << 0.01 + 0.0001 * t << '\n';
    }
    const RunConfig c = parse_config("[curve]\nsource = csv\nfile = " + path.string() + "\n");
    const MarketCurve curve = c.market_curve();
    CHECK(curve.max_maturity() == 60);
    CHECK(curve.zero_rate(10) == doctest::Approx(0.011));
    std::filesystem::remove(path);
    CHECK_THROWS(c.market_curve());
}
