#include "alm/alm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace alm {

std::string_view to_string(CompetitorRule rule) {
    return rule == CompetitorRule::short_rate ? "short_rate" : "max_with_eta";
}

std::string_view to_string(BondEngine engine) { return engine == BondEngine::ladder ? "ladder" : "proxy"; }

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? -v : 0.0; }

[[noreturn]] void bad(const std::string& key, const std::string& bound, double value) {
    throw std::invalid_argument(key + " must be " + bound + " (got " + std::to_string(value) + ")");
}

}  // namespace

void LiabilityParams::validate() const {
    if (!(r_g >= 0.0 && std::isfinite(r_g))) bad("r_g", ">= 0", r_g);
    if (!(pi_pr >= 0.85 && pi_pr <= 1.0)) bad("pi_pr", "in [0.85, 1]", pi_pr);
    if (!(rho_bar > 0.0 && rho_bar <= 1.0)) bad("rho_bar", "in (0, 1]", rho_bar);
    if (!(p_low > 0.0 && p_low < 1.0)) bad("p_low", "in (0, 1)", p_low);
    if (!(dsr_max > 0.0 && dsr_max < 1.0 - p_low)) bad("dsr_max", "in (0, 1 - p_low)", dsr_max);
    if (!(alpha_s < beta_s)) bad("alpha_s", "< beta_s", alpha_s);
    if (competitor == CompetitorRule::max_with_eta && !(eta > 0.0 && eta < 1.0)) bad("eta", "in (0, 1)", eta);
}

void ManagementParams::validate() const {
    if (!(w_s >= 0.0 && w_s <= 1.0)) bad("w_s", "in [0, 1]", w_s);
    if (n < 1) bad("n", ">= 1", n);
}

double surrender_rate(double delta, const LiabilityParams& p) {
    double dsr;
    if (delta < p.alpha_s) {
        dsr = p.dsr_max;
    } else if (delta > p.beta_s) {
        dsr = 0.0;
    } else {
        dsr = p.dsr_max * (p.beta_s - delta) / (p.beta_s - p.alpha_s);
    }
    return p.p_low + dsr;
}

// ------------------------------------------------------------------ crediting

double latent_gain_loss(double latent, double alpha) { return -(1.0 - alpha) * neg(latent) + alpha * pos(latent); }

double amount_to_distribute(const CreditingInputs& in, double alpha, double rho) {
    const double equity = in.cgl_s + latent_gain_loss(in.latent_s, alpha);
    return in.fi_tilde - in.overflow_loss + rho * (in.psr_prev + equity) - (1.0 - rho) * neg(equity);
}

CreditingDecision decide_crediting(const CreditingInputs& in) {
    const double base = in.mr_after_exits + in.psr_prev;
    const double target = std::max(in.guaranteed, in.competitor);
    const double pi = in.pi_pr;
    const double td0 = amount_to_distribute(in, 0.0, in.rho_bar);
    const double td1 = amount_to_distribute(in, 1.0, in.rho_bar);

    CreditingDecision d;
    if (pi * td0 >= target) {
        d.label = CreditingCase::A;
        d.alpha = 0.0;
        d.rho = in.rho_bar;
        d.td = td0;
        d.credited = pi * td0;
    } else if (pi * td1 >= target) {
        d.rho = in.rho_bar;
        if (td1 - td0 < 1e-14) {
            // alpha-constant TD; the target is met at alpha = 1 up to rounding
            d.label = CreditingCase::C;
            d.alpha = 1.0;
            d.td = td1;
        } else {
            d.label = CreditingCase::B;
            d.alpha = std::clamp((target / pi - td0) / (td1 - td0), 0.0, 1.0);
            d.td = amount_to_distribute(in, d.alpha, d.rho);
        }
        d.credited = pi * d.td;
    } else if (pi * td1 >= in.guaranteed) {
        d.label = CreditingCase::C;
        d.alpha = 1.0;
        d.rho = in.rho_bar;
        d.td = td1;
        d.credited = pi * td1;
    } else {
        d.label = CreditingCase::D;
        d.alpha = 1.0;
        d.rho = 1.0;
        d.td = amount_to_distribute(in, 1.0, 1.0);
        d.credited = std::max(pi * d.td, in.guaranteed);
    }
    d.lgl = latent_gain_loss(in.latent_s, d.alpha);
    d.r_ph = base > 0.0 ? d.credited / base : 0.0;
    d.mr = in.mr_after_exits * (1.0 + d.r_ph);
    d.psr = in.psr_prev * d.r_ph + (1.0 - d.rho) * (in.psr_prev + pos(in.cgl_s + d.lgl));
    const double guaranteed_alpha_rho = std::max(in.guaranteed, pi * d.td);
    d.am = (1.0 - pi) * d.td - pos(guaranteed_alpha_rho - pi * d.td);
    return d;
}

// ------------------------------------------------------------ initialization

BalanceSheet initialize(double mr0, const ManagementParams& mgmt, const LiabilityParams& params, double s0,
                        const DiscountStrip& curve0, double r0) {
    if (!(mr0 > 0.0)) throw std::invalid_argument("initial mathematical reserve must be > 0");
    mgmt.validate();
    BalanceSheet sheet;
    sheet.t = 0;
    sheet.mr = mr0;
    sheet.bv_s = mgmt.w_s * mr0;
    sheet.phi_s = mgmt.w_s * mr0 / s0;
    const double bonds = mgmt.w_b() * mr0;
    if (mgmt.engine == BondEngine::ladder) {
        sheet.bonds = CouponLadder::at_par(mgmt.n, bonds, curve0);
    } else {
        const int np = mgmt.proxy_maturity();
        sheet.bonds.coupons = {curve0.swap_rate(np)};
        sheet.bonds.quantity = bonds / curve0.bond(np, sheet.bonds.coupons[0]);
        sheet.bonds.book_value = bonds;
    }
    // no crediting history yet: spread taken as zero
    sheet.r_ph_prev = r0;
    sheet.p_e = surrender_rate(0.0, params);
    return sheet;
}

// ------------------------------------------------------------ yearly steps

namespace {

struct Income {
    double fi = 0.0;
    double nominal = 0.0;
    double bv_b1 = 0.0;
};

struct BondState {
    CouponLadder bonds;  // holdings before reallocation (proxy: after the CGL-free adjustment)
    double market_value = 0.0;
};

Income bond_income(const BalanceSheet& sheet, const ManagementParams& mgmt) {
    if (mgmt.engine == BondEngine::ladder) {
        const LadderIncome inc = annual_income(sheet.bonds);
        return {inc.coupons, inc.nominal, inc.book_value};
    }
    return {sheet.bonds.quantity * sheet.bonds.coupons.at(0), 0.0, sheet.bonds.book_value};
}

// Proxy: reprice the ageing bond into a maturity-n/2 bond with mixed coupon
// at constant market value, without realizing gains.
BondState proxy_adjust(const BalanceSheet& sheet, const ManagementParams& mgmt, const DiscountStrip& curve) {
    const int np = mgmt.proxy_maturity();
    const double c_old = sheet.bonds.coupons.at(0);
    const double value_old = curve.bond(np - 1, c_old);
    const double inv_n = 1.0 / mgmt.n;
    const double c_mix = inv_n * curve.swap_rate(mgmt.n) + (1.0 - inv_n) * c_old;
    const double value_new = curve.bond(np, c_mix);
    BondState s;
    s.bonds.coupons = {c_mix};
    s.bonds.quantity = sheet.bonds.quantity * value_old / value_new;
    s.bonds.book_value = sheet.bonds.book_value;
    s.market_value = sheet.bonds.quantity * value_old;
    return s;
}

BondReallocResult proxy_reallocate(const BondState& state, double target, int np, const DiscountStrip& curve) {
    const double price = curve.bond(np, state.bonds.coupons[0]);
    const double phi_old = state.bonds.quantity;
    const double current = phi_old * price;
    BondReallocResult out;
    out.reference_value = current;
    out.ladder.coupons.resize(1);
    if (target >= current || phi_old <= 0.0) {
        const double delta = target - current;  // par bonds: units == amount
        const double total = phi_old + delta;
        const double fresh = curve.swap_rate(np);
        out.ladder.coupons[0] = total > 0.0 ? (phi_old * state.bonds.coupons[0] + delta * fresh) / total : fresh;
        out.ladder.quantity = total;
        out.ladder.book_value = state.bonds.book_value + delta;
        out.purchase = true;
    } else {
        const double q = target / price;
        const double sold = phi_old - q;
        out.ladder.coupons[0] = state.bonds.coupons[0];
        out.ladder.quantity = q;
        out.ladder.book_value = state.bonds.book_value * (q / phi_old);
        out.realized_gain = sold * (price - state.bonds.book_value / phi_old);
        out.purchase = false;
    }
    out.market_value = out.ladder.quantity * curve.bond(np, out.ladder.coupons[0]);
    return out;
}

double unit_price(const CouponLadder& bonds, const ManagementParams& mgmt, const DiscountStrip& curve) {
    if (mgmt.engine == BondEngine::ladder) return curve.basket(bonds.coupons);
    return curve.bond(mgmt.proxy_maturity(), bonds.coupons[0]);
}

double competitor_rate(const BalanceSheet& sheet, const YearMarket& market, const LiabilityParams& params) {
    if (params.competitor == CompetitorRule::short_rate) return market.short_rate;
    return std::max(market.short_rate, params.eta * sheet.r_ph_prev);
}

void record_state(YearLedger& l, const BalanceSheet& s) {
    l.mr = s.mr;
    l.psr = s.psr;
    l.cr = s.cr;
    l.bv_s = s.bv_s;
    l.bv_b = s.bv_b();
    l.phi_s = s.phi_s;
    l.phi_b = s.phi_b();
    l.avg_coupon = s.bonds.average_coupon();
}

// MV_t <= 0: shareholders pay the surrenders, liabilities are credited at
// r_G and the portfolio is rebuilt at market with book = market value equal
// to MR_t + PSR_t; the difference is a shareholder cash flow.
YearResult bailout(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                   const LiabilityParams& params, YearLedger ledger, double mr2, double r_comp) {
    BalanceSheet next;
    next.t = market.t;
    next.mr = mr2 * (1.0 + params.r_g);
    next.psr = sheet.psr * (1.0 + params.r_g);
    next.cr = sheet.cr;
    const double value = next.mr + next.psr;
    next.bv_s = mgmt.w_s * value;
    next.phi_s = next.bv_s / market.equity;
    const double bonds = mgmt.w_b() * value;
    if (mgmt.engine == BondEngine::ladder) {
        next.bonds = CouponLadder::at_par(mgmt.n, bonds, market.curve);
    } else {
        const int np = mgmt.proxy_maturity();
        next.bonds.coupons = {market.curve.swap_rate(np)};
        next.bonds.quantity = bonds;
        next.bonds.book_value = bonds;
    }
    next.r_ph_prev = params.r_g;
    next.p_e = surrender_rate(params.r_g - r_comp, params);

    ledger.label = CreditingCase::bailout;
    ledger.r_comp = r_comp;
    ledger.r_ph = params.r_g;
    ledger.rho = 1.0;
    ledger.alpha = 1.0;
    ledger.p_e = next.p_e;
    ledger.am = ledger.mv - value;
    ledger.pnl = ledger.am + sheet.cr * (1.0 / market.prev_zcb - 1.0);
    ledger.bond_purchase = true;
    record_state(ledger, next);
    return {std::move(next), ledger};
}

}  // namespace

YearResult step_year(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                     const LiabilityParams& params) {
    const DiscountStrip& curve = market.curve;
    const double S = market.equity;
    YearLedger ledger;
    ledger.t = market.t;

    // Step 1: coupons and matured nominal.
    const Income inc = bond_income(sheet, mgmt);
    ledger.fi = inc.fi;
    ledger.cif = inc.fi + inc.nominal;

    // Step 2: surrenders paid with r_G/2 pro rata.
    ledger.cof = sheet.p_e * sheet.mr * (1.0 + params.r_g / 2.0);
    const double mr2 = (1.0 - sheet.p_e) * sheet.mr;
    ledger.gap = ledger.cif - ledger.cof;
    ledger.fi_tilde = inc.fi - params.r_g / 2.0 * sheet.p_e * sheet.mr;

    // Step 3: market value and reallocation.
    BondState held;
    AgedLadder aged;
    if (mgmt.engine == BondEngine::ladder) {
        aged = age(sheet.bonds, inc.bv_b1);
        held.market_value = sheet.bonds.quantity * aged_unit_value(aged, curve);
    } else {
        held = proxy_adjust(sheet, mgmt, curve);
    }
    const double mv = ledger.gap + sheet.phi_s * S + held.market_value;
    ledger.mv = mv;
    const double r_comp = competitor_rate(sheet, market, params);
    if (mv <= 0.0) return bailout(sheet, market, mgmt, params, ledger, mr2, r_comp);

    const double phi_s3 = mgmt.w_s * mv / S;
    const double d_phi = phi_s3 - sheet.phi_s;
    double bv_s3 = sheet.bv_s;
    if (d_phi >= 0.0) {
        bv_s3 += d_phi * S;
    } else {
        const double unit_book = sheet.bv_s / sheet.phi_s;
        bv_s3 -= -d_phi * unit_book;
        ledger.cgl_s = -d_phi * (S - unit_book);
    }

    const double bond_target = mgmt.w_b() * mv;
    BondReallocResult realloc = mgmt.engine == BondEngine::ladder
                                    ? reallocate(aged, bond_target, curve)
                                    : proxy_reallocate(held, bond_target, mgmt.proxy_maturity(), curve);
    ledger.cgl_b = realloc.realized_gain;
    ledger.bond_purchase = realloc.purchase;
    const CapitalizationUpdate cr = update_capitalization_reserve(sheet.cr, realloc.realized_gain);
    ledger.overflow_loss = cr.overflow_loss;
    ledger.delta_cr = cr.reserve - sheet.cr;

    // Step 4: crediting rate.
    CreditingInputs in;
    in.mr_after_exits = mr2;
    in.psr_prev = sheet.psr;
    in.fi_tilde = ledger.fi_tilde;
    in.overflow_loss = cr.overflow_loss;
    in.cgl_s = ledger.cgl_s;
    in.latent_s = mgmt.w_s * mv - bv_s3;
    in.guaranteed = params.r_g * (mr2 + sheet.psr);
    in.competitor = r_comp * (mr2 + sheet.psr);
    in.pi_pr = params.pi_pr;
    in.rho_bar = params.rho_bar;
    const CreditingDecision dec = decide_crediting(in);

    ledger.label = dec.label;
    ledger.alpha = dec.alpha;
    ledger.rho = dec.rho;
    ledger.td = dec.td;
    ledger.lgl = dec.lgl;
    ledger.r_comp = r_comp;
    ledger.r_ph = dec.r_ph;
    ledger.am = dec.am;
    ledger.pnl = dec.am + sheet.cr * (1.0 / market.prev_zcb - 1.0);
    const double bv_s4 = bv_s3 + dec.lgl;

    // Step 5: clear AM + delta CR from the books with a slice of the portfolio.
    BalanceSheet next;
    next.t = market.t;
    next.mr = dec.mr;
    next.psr = dec.psr;
    next.cr = cr.reserve;
    next.bonds = std::move(realloc.ladder);
    const double cleared = dec.am + ledger.delta_cr;
    ledger.externalized = cleared;
    if (cleared > 0.0) {
        const double keep = 1.0 - cleared / (bv_s4 + next.bonds.book_value);
        next.bv_s = bv_s4 * keep;
        next.phi_s = phi_s3 * keep;
        next.bonds.book_value *= keep;
        next.bonds.quantity *= keep;
    } else {
        const double bought = -cleared;
        next.bv_s = bv_s4 + mgmt.w_s * bought;
        next.phi_s = phi_s3 + mgmt.w_s * bought / S;
        if (mgmt.w_b() > 0.0) {
            next.bonds.book_value += mgmt.w_b() * bought;
            next.bonds.quantity += mgmt.w_b() * bought / unit_price(next.bonds, mgmt, curve);
        }
    }
    next.r_ph_prev = dec.r_ph;
    next.p_e = surrender_rate(dec.r_ph - r_comp, params);
    ledger.p_e = next.p_e;
    record_state(ledger, next);
    return {std::move(next), ledger};
}

YearResult proxy_step_year(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                           const LiabilityParams& params) {
    ManagementParams proxy = mgmt;
    proxy.engine = BondEngine::proxy;
    return step_year(sheet, market, proxy, params);
}

YearResult close_at_T(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                      const LiabilityParams& params) {
    const DiscountStrip& curve = market.curve;
    YearLedger ledger;
    ledger.t = market.t;
    ledger.label = CreditingCase::closing;

    const Income inc = bond_income(sheet, mgmt);
    ledger.fi = inc.fi;
    ledger.cif = inc.fi + inc.nominal;

    double bond_value;
    if (mgmt.engine == BondEngine::ladder) {
        bond_value = sheet.bonds.quantity * aged_unit_value(age(sheet.bonds, inc.bv_b1), curve);
    } else {
        bond_value = sheet.bonds.quantity * curve.bond(mgmt.proxy_maturity() - 1, sheet.bonds.coupons.at(0));
    }
    ledger.cgl_s = sheet.phi_s * market.equity - sheet.bv_s;
    ledger.cgl_b = bond_value - inc.bv_b1;
    ledger.mv = ledger.cif + sheet.phi_s * market.equity + bond_value;
    const CapitalizationUpdate cr = update_capitalization_reserve(sheet.cr, ledger.cgl_b);
    ledger.overflow_loss = cr.overflow_loss;
    ledger.delta_cr = cr.reserve - sheet.cr;

    const double base = sheet.mr + sheet.psr;
    ledger.td = inc.fi - cr.overflow_loss + sheet.psr + ledger.cgl_s;
    ledger.fi_tilde = inc.fi;
    const double credited = std::max(params.pi_pr * ledger.td, params.r_g * base);
    ledger.r_ph = base > 0.0 ? credited / base : 0.0;
    ledger.alpha = 1.0;
    ledger.rho = 1.0;
    ledger.r_comp = market.short_rate;

    BalanceSheet next;
    next.t = market.t;
    const double mr_T = sheet.mr * (1.0 + ledger.r_ph);
    const double psr_T = sheet.psr * ledger.r_ph;
    ledger.am = (1.0 - params.pi_pr) * ledger.td - pos(credited - params.pi_pr * ledger.td);
    ledger.pnl = ledger.am + sheet.cr * (1.0 / market.prev_zcb - 1.0) + cr.reserve;
    ledger.cof = mr_T + psr_T;
    ledger.gap = ledger.cif - ledger.cof;
    ledger.p_e = 1.0;
    ledger.avg_coupon = sheet.bonds.average_coupon();
    // everything is paid out
    next.r_ph_prev = ledger.r_ph;
    next.p_e = 1.0;
    ledger.mr = ledger.psr = ledger.cr = ledger.bv_s = ledger.bv_b = ledger.phi_s = ledger.phi_b = 0.0;
    next.bonds.coupons = sheet.bonds.coupons;
    return {std::move(next), ledger};
}

}  // namespace alm
