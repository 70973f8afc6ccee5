#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "alm/run.hpp"

namespace {

int fail(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message, int code) {
    const std::string report = alm::error_report(kind, message, code);
    std::cerr << report;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) std::ofstream(out_dir / "error.json") << report;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo ALM engine for with-profits life insurance portfolios"};
    app.require_subcommand(1);
    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment and write its outputs");

    std::string config_file;
    std::string preset_name;
    std::string experiment;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
    bool ledger_dump = false;

    run_cmd->add_option("--config", config_file, "INI configuration file");
    run_cmd->add_option("--preset", preset_name, "base parameter set (paper-2pct, paper-lowyield)");
    run_cmd->add_option("--experiment", experiment, "value|scr|sweep_ws|sweep_n|sweep_gamma|durations");
    run_cmd->add_option("--paths", paths, "number of Monte Carlo paths");
    run_cmd->add_option("--seed", seed, "64-bit seed");
    run_cmd->add_option("--threads", threads, "worker threads (results do not depend on it)");
    run_cmd->add_option("--out", out_dir, "output directory (default $ALM_OUT_DIR or ./alm_out)");
    run_cmd->add_flag("--ledger-dump", ledger_dump, "write per-year ledgers of the first paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    alm::RunOptions options;
    if (!out_dir.empty()) {
        options.out_dir = out_dir;
    } else if (const char* env = std::getenv("ALM_OUT_DIR"); env && *env) {
        options.out_dir = env;
    }
    options.ledger_dump = ledger_dump;

    alm::RunConfig config;
    try {
        if (config_file.empty() && preset_name.empty())
            throw alm::ConfigError("either --config or --preset is required");
        if (!preset_name.empty()) config = alm::preset(preset_name);
        if (!config_file.empty()) config = alm::load_config(config_file, config);
        if (!experiment.empty()) config.experiment = alm::parse_experiment(experiment);
        if (paths) config.paths = *paths;
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        config.validate();
    } catch (const std::exception& e) {
        return fail(options.out_dir, "config", e.what(), 2);
    }

    try {
        const alm::RunSummary summary = alm::run(config, options);
        for (const auto& f : summary.files) std::cout << (options.out_dir / f).string() << '\n';
    } catch (const alm::ConfigError& e) {
        return fail(options.out_dir, "config", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return fail(options.out_dir, "config", e.what(), 2);
    } catch (const std::exception& e) {
        return fail(options.out_dir, "runtime", e.what(), 3);
    }
    return 0;
}
