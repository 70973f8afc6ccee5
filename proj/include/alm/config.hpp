#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "alm/shocks.hpp"
#include "alm/valuation.hpp"

namespace alm {

enum class Experiment { value, scr, sweep_ws, sweep_n, sweep_gamma, durations };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view text);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    AlmSetup setup;

    // market curve: "vasicek" builds it from the [market] parameters,
    // "csv" reads curve_file
    std::string curve_source = "vasicek";
    std::string curve_file;
    int curve_max_maturity = 100;

    ShockRegime regime = ShockRegime::eiopa2012;
    double s_eq = -0.39;
    bool floor_1pct = false;
    std::string shock_table_file;  // overrides the built-in table when set

    Experiment experiment = Experiment::scr;
    std::size_t paths = 50000;
    std::uint64_t seed = 20190101;
    int threads = 1;
    std::vector<double> grid;  // sweep values; durations use it as a list of n
    std::size_t ledger_dump_paths = 10;

    ShockSpec shock_spec() const;
    MarketCurve market_curve() const;
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

// INI text: sections [market] [curve] [liability] [management] [shock] [run].
// Keys not present keep the value of `base`. Unknown sections or keys throw
// ConfigError, as do values out of range.
RunConfig parse_config(const std::string& text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});
std::string save_config(const RunConfig& config);

// Grid used when none is configured.
std::vector<double> default_grid(Experiment e, const RunConfig& config);

}  // namespace alm
