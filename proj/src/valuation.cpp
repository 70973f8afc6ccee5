#include "alm/valuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "alm/parallel.hpp"

namespace alm {

void AlmSetup::validate() const {
    factor.validate();
    equity.validate();
    liability.validate();
    mgmt.validate();
    if (years < 1) throw std::invalid_argument("T must be >= 1 (got " + std::to_string(years) + ")");
    if (!(mr0 > 0.0)) throw std::invalid_argument("mr0 must be > 0");
}

Scenario make_scenario(const MarketCurve& curve, const AlmSetup& setup, const ShockSpec& shock) {
    if (curve.max_maturity() < setup.required_horizon())
        throw std::invalid_argument("market curve too short: required " + std::to_string(setup.required_horizon()) +
                                    " years, available " + std::to_string(curve.max_maturity()));
    const VasicekPPModel central(setup.factor, calibrate_shift(curve, setup.factor));
    switch (shock.kind) {
        case ShockKind::central:
            return {"central", central, central, 1.0};
        case ShockKind::equity:
            return {"equity", central, central, 1.0 + shock.s_eq};
        case ShockKind::ir_up:
        case ShockKind::ir_down: {
            const MarketCurve shocked = apply_shock(curve, shock);
            VasicekPPModel run(setup.factor, calibrate_shift(shocked, setup.factor));
            return {std::string(to_string(shock.kind)), central, std::move(run), 1.0};
        }
    }
    throw std::logic_error("make_scenario: unknown shock kind");
}

namespace {

constexpr std::size_t chunk_paths = 1024;

template <class OnYear>
PathValue run_path(const ScenarioSet& set, std::size_t path, const AlmSetup& setup, const Scenario& sc,
                   DerivedPath& derived, OnYear&& on_year) {
    const int years = set.years();
    if (years != setup.years) throw std::invalid_argument("scenario set horizon differs from T");
    const ManagementParams& mgmt = setup.mgmt;
    const int tenor = mgmt.max_tenor();
    derive_into(set, path, sc.run.shift(), setup.equity, sc.equity_multiplier, derived);

    DiscountStrip initial;
    const double x0 = sc.initial.params().x0;
    initial.assign(sc.initial, x0, 0, tenor);
    BalanceSheet sheet = initialize(setup.mr0, mgmt, setup.liability, setup.equity.s0, initial,
                                    sc.initial.short_rate(x0, 0.0));

    DiscountStrip prev;
    prev.assign(sc.run, set.x(path, 0), 0, tenor);
    if (mgmt.engine == BondEngine::proxy) {
        // keep the proxy position worth what the ladder would be worth right after the shock
        const CouponLadder ladder = CouponLadder::at_par(mgmt.n, 1.0, initial);
        const double ladder_value = mgmt.w_b() * setup.mr0 * prev.basket(ladder.coupons);
        sheet.bonds.quantity = ladder_value / prev.bond(mgmt.proxy_maturity(), sheet.bonds.coupons[0]);
    }

    PathValue pv;
    DiscountStrip strip;
    for (int t = 1; t <= years; ++t) {
        strip.assign(sc.run, set.x(path, t), t, tenor);
        const YearMarket market{t, derived.equity[t], derived.short_rate[t], prev.zcb(1), strip};
        YearResult res = t < years ? step_year(sheet, market, mgmt, setup.liability)
                                   : close_at_T(sheet, market, mgmt, setup.liability);
        pv.pv_pnl += derived.discount[t] * res.ledger.pnl;
        pv.pv_cof += derived.discount[t] * res.ledger.cof;
        on_year(res.ledger);
        sheet = std::move(res.sheet);
        std::swap(prev, strip);
    }
    return pv;
}

struct YearSums {
    double r_ph = 0.0, p_e = 0.0, avg_coupon = 0.0, pnl = 0.0, cof = 0.0;
    std::array<std::size_t, 5> cases{};  // A, B, C, D, bailout
};

Estimate estimate(const std::vector<double>& v) {
    Estimate e;
    if (v.empty()) return e;
    double sum = 0.0;
    for (double x : v) sum += x;
    e.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) {
        e.se = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return e;
}

}  // namespace

PathValue value_path(const ScenarioSet& set, std::size_t path, const AlmSetup& setup, const Scenario& scenario,
                     std::vector<YearLedger>* ledger) {
    DerivedPath derived;
    if (ledger) ledger->clear();
    return run_path(set, path, setup, scenario, derived, [&](const YearLedger& row) {
        if (ledger) ledger->push_back(row);
    });
}

double initial_market_value(const AlmSetup& setup, const Scenario& scenario) {
    const int n = setup.mgmt.n;
    DiscountStrip initial;
    initial.assign(scenario.initial, scenario.initial.params().x0, 0, n);
    DiscountStrip shocked;
    shocked.assign(scenario.run, scenario.run.params().x0, 0, n);
    const CouponLadder ladder = CouponLadder::at_par(n, 1.0, initial);
    return setup.mr0 * (setup.mgmt.w_s * scenario.equity_multiplier + setup.mgmt.w_b() * shocked.basket(ladder.coupons));
}

ValuationResult value(const ScenarioSet& set, const AlmSetup& setup, const Scenario& scenario,
                      const ValueOptions& options) {
    setup.validate();
    const std::size_t n = set.paths();
    const int years = set.years();
    const std::size_t chunks = (n + chunk_paths - 1) / chunk_paths;

    ValuationResult out;
    out.scenario_id = scenario.id;
    out.paths = n;
    out.pv_pnl.resize(n);
    out.pv_cof.resize(n);
    std::vector<std::vector<YearSums>> partial(chunks, std::vector<YearSums>(static_cast<std::size_t>(years)));

    parallel_chunks(chunks, options.threads, [&](std::size_t c) {
        DerivedPath derived;
        auto& sums = partial[c];
        const std::size_t end = std::min(n, (c + 1) * chunk_paths);
        for (std::size_t i = c * chunk_paths; i < end; ++i) {
            const PathValue pv = run_path(set, i, setup, scenario, derived, [&](const YearLedger& row) {
                YearSums& s = sums[static_cast<std::size_t>(row.t - 1)];
                s.r_ph += row.r_ph;
                s.p_e += row.p_e;
                s.avg_coupon += row.avg_coupon;
                s.pnl += row.pnl;
                s.cof += row.cof;
                switch (row.label) {
                    case CreditingCase::A: ++s.cases[0]; break;
                    case CreditingCase::B: ++s.cases[1]; break;
                    case CreditingCase::C: ++s.cases[2]; break;
                    case CreditingCase::D: ++s.cases[3]; break;
                    case CreditingCase::bailout: ++s.cases[4]; break;
                    case CreditingCase::closing: break;
                }
            });
            out.pv_pnl[i] = pv.pv_pnl;
            out.pv_cof[i] = pv.pv_cof;
        }
    });

    const double inv = 1.0 / static_cast<double>(n);
    out.years.resize(static_cast<std::size_t>(years));
    for (int t = 1; t <= years; ++t) {
        YearSums total;
        for (const auto& chunk : partial) {
            const YearSums& s = chunk[static_cast<std::size_t>(t - 1)];
            total.r_ph += s.r_ph;
            total.p_e += s.p_e;
            total.avg_coupon += s.avg_coupon;
            total.pnl += s.pnl;
            total.cof += s.cof;
            for (std::size_t k = 0; k < 5; ++k) total.cases[k] += s.cases[k];
        }
        YearDiagnostics& d = out.years[static_cast<std::size_t>(t - 1)];
        d.t = t;
        d.mean_r_ph = total.r_ph * inv;
        d.mean_p_e = total.p_e * inv;
        d.mean_avg_coupon = total.avg_coupon * inv;
        d.mean_pnl = total.pnl * inv;
        d.mean_cof = total.cof * inv;
        d.freq_a = static_cast<double>(total.cases[0]) * inv;
        d.freq_b = static_cast<double>(total.cases[1]) * inv;
        d.freq_c = static_cast<double>(total.cases[2]) * inv;
        d.freq_d = static_cast<double>(total.cases[3]) * inv;
        d.freq_bailout = static_cast<double>(total.cases[4]) * inv;
        out.bailouts += total.cases[4];
    }

    out.bof = estimate(out.pv_pnl);
    out.bel = estimate(out.pv_cof);
    out.initial_value = initial_market_value(setup, scenario);
    std::vector<double> leak(n);
    for (std::size_t i = 0; i < n; ++i) leak[i] = out.pv_pnl[i] + out.pv_cof[i] - out.initial_value;
    out.leakage = estimate(leak);
    if (!options.keep_paths) {
        out.pv_pnl = {};
        out.pv_cof = {};
    }
    return out;
}

Estimate paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired difference: path counts differ");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return estimate(d);
}

double aggregate_market_scr(double scr_eq, double scr_up, double scr_down, double* epsilon) {
    const double scr_int = std::max(scr_up, scr_down);
    const double eps = scr_down > scr_up ? 0.5 : 0.0;
    if (epsilon) *epsilon = eps;
    return std::sqrt(scr_eq * scr_eq + scr_int * scr_int + 2.0 * eps * scr_eq * scr_int);
}

ScrReport scr(const ScenarioSet& set, const MarketCurve& curve, const AlmSetup& setup, const ShockSpec& shocks,
              const ValueOptions& options) {
    ValueOptions keep = options;
    keep.keep_paths = true;
    auto run = [&](ShockKind kind) {
        ShockSpec spec = shocks;
        spec.kind = kind;
        return value(set, setup, make_scenario(curve, setup, spec), keep);
    };
    ScrReport r;
    r.central = run(ShockKind::central);
    r.equity = run(ShockKind::equity);
    r.up = run(ShockKind::ir_up);
    r.down = run(ShockKind::ir_down);

    auto module = [&](const ValuationResult& shocked) {
        Estimate e = paired_difference(r.central.pv_pnl, shocked.pv_pnl);
        e.mean = std::max(0.0, r.central.bof.mean - shocked.bof.mean);
        return e;
    };
    r.scr_eq = module(r.equity);
    r.scr_up = module(r.up);
    r.scr_down = module(r.down);
    r.scr_int = std::max(r.scr_up.mean, r.scr_down.mean);
    r.scr_mkt = aggregate_market_scr(r.scr_eq.mean, r.scr_up.mean, r.scr_down.mean, &r.epsilon);
    if (!options.keep_paths) {
        for (ValuationResult* v : {&r.central, &r.equity, &r.up, &r.down}) {
            v->pv_pnl = {};
            v->pv_cof = {};
        }
    }
    return r;
}

std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& grid, const MarketCurve& curve,
                            const AlmSetup& setup, const ShockSpec& shocks, std::size_t paths, std::uint64_t seed,
                            int threads) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    const ValueOptions options{threads, false};
    if (axis == SweepAxis::gamma) {
        for (double g : grid) {
            AlmSetup s = setup;
            s.equity.gamma = g;
            const ScenarioSet set = simulate(s.factor, s.equity, s.years, paths, seed, threads);
            rows.push_back({g, scr(set, curve, s, shocks, options)});
        }
        return rows;
    }
    const ScenarioSet set = simulate(setup.factor, setup.equity, setup.years, paths, seed, threads);
    for (double v : grid) {
        AlmSetup s = setup;
        if (axis == SweepAxis::w_s) {
            s.mgmt.w_s = v;
        } else {
            s.mgmt.n = static_cast<int>(std::lround(v));
        }
        rows.push_back({v, scr(set, curve, s, shocks, options)});
    }
    return rows;
}

DurationResult durations(const MarketCurve& curve, const AlmSetup& setup, std::size_t paths, std::uint64_t seed,
                         int threads, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("durations: bump must be > 0");
    const VasicekPPModel central(setup.factor, calibrate_shift(curve, setup.factor));
    const int n = setup.mgmt.n;
    DiscountStrip strip;
    strip.assign(central, setup.factor.x0, 0, n);
    const CouponLadder ladder = CouponLadder::at_par(n, 1.0, strip);
    const double bond_weight = setup.mgmt.w_b() * setup.mr0;

    auto bel_at = [&](double bump) {
        AlmSetup s = setup;
        s.factor.x0 += bump;
        const ScenarioSet set = simulate(s.factor, s.equity, s.years, paths, seed, threads);
        const Scenario sc{"central", central, central.with_x0(s.factor.x0), 1.0};
        return value(set, setup, sc, {threads, false}).bel.mean;
    };
    auto mv_at = [&](double bump) {
        DiscountStrip s;
        s.assign(central, setup.factor.x0 + bump, 0, n);
        return bond_weight * s.basket(ladder.coupons);
    };

    DurationResult r;
    r.mv_bonds = mv_at(0.0);
    r.d_mv_bonds = (mv_at(h) - mv_at(-h)) / (2.0 * h);
    r.bel = bel_at(0.0);
    const double up = bel_at(h);
    const double down = bel_at(-h);
    r.d_bel = (up - down) / (2.0 * h);
    r.d_bel_forward = (up - r.bel) / h;
    r.d_bel_backward = (r.bel - down) / h;
    return r;
}

}  // namespace alm
