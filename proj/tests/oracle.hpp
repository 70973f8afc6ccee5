#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alm/valuation.hpp"

// Brute-force reference for zero-volatility runs. It keeps every bond
// purchase as a separate lot, prices them from the closed-form deterministic
// short rate and recomputes the management rules from scratch; nothing is
// shared with the engine beyond the input types.
namespace oracle {

struct Config {
    double x0 = 0.02;
    double theta = 0.02;
    double k = 0.2;
    std::vector<double> phi_initial;  // shift used for the t = 0 coupons
    std::vector<double> phi_run;      // shift used from 0+ on
    double s0 = 1.0;
    double gamma = 0.0;
    double equity_multiplier = 1.0;
    alm::LiabilityParams liability;
    alm::ManagementParams mgmt;
    int years = 10;
    double mr0 = 1.0;

    alm::AlmSetup setup() const;
    alm::Scenario scenario() const;
    std::string describe() const;
};

struct Result {
    std::vector<alm::YearLedger> ledger;
    double pv_pnl = 0.0;
    double pv_cof = 0.0;
};

Result run(const Config& config);

// Random deterministic configuration; roughly a quarter use the proxy engine.
Config random_config(std::uint64_t seed);
// Configuration whose assets collapse right after the shock.
Config bailout_config();

struct Mismatch {
    int t = 0;
    std::string field;
    double engine = 0.0;
    double reference = 0.0;
};

// Runs the engine on the same configuration and lists every ledger field that
// differs from the oracle by more than tol * max(1, |reference|).
std::vector<Mismatch> compare_with_engine(const Config& config, double tol);

}  // namespace oracle
