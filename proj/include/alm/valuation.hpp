#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alm/alm_engine.hpp"
#include "alm/rates.hpp"
#include "alm/scenario.hpp"
#include "alm/shocks.hpp"

namespace alm {

// Everything except the market curve and the shock that defines one ALM run.
struct AlmSetup {
    VasicekParams factor{0.02, 0.02, 0.2, 0.01};  // x0 = r0 in the central model
    EquityParams equity;
    LiabilityParams liability;
    ManagementParams mgmt;
    int years = 30;
    double mr0 = 1.0;

    // Shift horizon needed by a run: the last ladder bought at T-1 matures at T-1+n.
    int required_horizon() const { return years + mgmt.max_tenor(); }
    void validate() const;
    friend bool operator==(const AlmSetup&, const AlmSetup&) = default;
};

// Models used for one valuation. The portfolio is built at t = 0 with
// `initial`; the shock hits right after, so every later price, discount
// factor and equity value comes from `run`.
struct Scenario {
    std::string id = "central";
    VasicekPPModel initial;
    VasicekPPModel run;
    double equity_multiplier = 1.0;
};

// Shifts fitted to the market curve and to its shocked versions.
Scenario make_scenario(const MarketCurve& curve, const AlmSetup& setup, const ShockSpec& shock);

struct YearDiagnostics {
    int t = 0;
    double mean_r_ph = 0.0;
    double mean_p_e = 0.0;
    double mean_avg_coupon = 0.0;
    double mean_pnl = 0.0;
    double mean_cof = 0.0;
    // fractions of paths in cases A, B, C, D, bailout; the closing year is reported as its own label
    double freq_a = 0.0, freq_b = 0.0, freq_c = 0.0, freq_d = 0.0, freq_bailout = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0;  // NaN when fewer than two paths
};

struct ValuationResult {
    std::string scenario_id;
    std::size_t paths = 0;
    Estimate bof;
    Estimate bel;
    double initial_value = 0.0;  // portfolio market value right after the shock
    Estimate leakage;            // per-path BOF + BEL - initial_value
    std::size_t bailouts = 0;
    std::vector<YearDiagnostics> years;  // t = 1..T
    std::vector<double> pv_pnl;          // per path, kept only when requested
    std::vector<double> pv_cof;

    bool ci_defined() const { return paths >= 2; }
};

struct ValueOptions {
    int threads = 1;
    bool keep_paths = false;
};

// One path through the engine; fills `ledger` (one row per year) when non-null.
struct PathValue {
    double pv_pnl = 0.0;
    double pv_cof = 0.0;
};
PathValue value_path(const ScenarioSet& set, std::size_t path, const AlmSetup& setup, const Scenario& scenario,
                     std::vector<YearLedger>* ledger = nullptr);

// Market value of the t = 0 portfolio under the run model (MR0 when unshocked).
double initial_market_value(const AlmSetup& setup, const Scenario& scenario);

ValuationResult value(const ScenarioSet& set, const AlmSetup& setup, const Scenario& scenario,
                      const ValueOptions& options = {});

Estimate paired_difference(const std::vector<double>& a, const std::vector<double>& b);

struct ScrReport {
    ValuationResult central, equity, up, down;
    Estimate scr_eq, scr_up, scr_down;  // se of the paired per-path differences
    double scr_int = 0.0;
    double scr_mkt = 0.0;
    double epsilon = 0.0;
};

double aggregate_market_scr(double scr_eq, double scr_up, double scr_down, double* epsilon = nullptr);

// Central, equity, up and down valuations on the same paths. The shock
// template supplies regime, tables, s_eq and the 1% floor flag.
ScrReport scr(const ScenarioSet& set, const MarketCurve& curve, const AlmSetup& setup, const ShockSpec& shocks,
              const ValueOptions& options = {});

enum class SweepAxis { w_s, n, gamma };

struct SweepRow {
    double value = 0.0;
    ScrReport report;
};

// One row per grid point. w_s and n rows share one scenario set; each gamma
// gets its own set drawn with the same seed.
std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& grid, const MarketCurve& curve,
                            const AlmSetup& setup, const ShockSpec& shocks,
                            std::size_t paths, std::uint64_t seed, int threads);

struct DurationResult {
    double mv_bonds = 0.0;  // w_b B(0, n, c0)
    double d_mv_bonds = 0.0;  // d/dr0 of the bond market value
    double bel = 0.0;
    double d_bel = 0.0;
    double d_bel_forward = 0.0;
    double d_bel_backward = 0.0;
};

// Central differences in x0 (bump h) with common random numbers; the
// initial coupons stay those of the unbumped curve.
DurationResult durations(const MarketCurve& curve, const AlmSetup& setup, std::size_t paths, std::uint64_t seed,
                         int threads, double h = 1e-4);

}  // namespace alm
