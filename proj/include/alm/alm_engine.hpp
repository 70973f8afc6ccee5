#pragma once

#include <string_view>

#include "alm/bond_book.hpp"
#include "alm/rates.hpp"

namespace alm {

enum class CompetitorRule { short_rate, max_with_eta };
enum class BondEngine { ladder, proxy };

std::string_view to_string(CompetitorRule rule);
std::string_view to_string(BondEngine engine);

struct LiabilityParams {
    double r_g = 0.015;      // minimum guaranteed rate
    double pi_pr = 0.9;      // participation rate
    double rho_bar = 0.5;    // share of the profit-sharing reserve released per year
    double p_low = 0.05;     // structural surrender rate
    double dsr_max = 0.3;    // maximum dynamic surrender rate
    double alpha_s = -0.05;  // massive surrender threshold
    double beta_s = -0.01;   // surrender triggering threshold
    CompetitorRule competitor = CompetitorRule::short_rate;
    double eta = 0.9;

    void validate() const;
    friend bool operator==(const LiabilityParams&, const LiabilityParams&) = default;
};

struct ManagementParams {
    double w_s = 0.05;  // constant equity weight; bonds get 1 - w_s
    int n = 20;         // ladder length
    BondEngine engine = BondEngine::ladder;

    double w_b() const { return 1.0 - w_s; }
    // Maturity of the single bond held by the proxy engine.
    int proxy_maturity() const { return n / 2 > 0 ? n / 2 : 1; }
    // Longest tenor priced at a reallocation date.
    int max_tenor() const { return n; }
    void validate() const;
    friend bool operator==(const ManagementParams&, const ManagementParams&) = default;
};

// p_e = p_low + DSR(delta), delta = r_ph - r_comp.
double surrender_rate(double delta, const LiabilityParams& params);

enum class CreditingCase : char { A = 'A', B = 'B', C = 'C', D = 'D', bailout = 'X', closing = 'T' };

// Book-value state after the reallocation of year t. For the proxy engine
// `bonds` holds a single coupon (the bond of maturity n/2).
struct BalanceSheet {
    int t = 0;
    double mr = 0.0;
    double psr = 0.0;
    double cr = 0.0;
    double bv_s = 0.0;
    double phi_s = 0.0;
    CouponLadder bonds;
    double r_ph_prev = 0.0;  // last crediting rate
    double p_e = 0.0;        // exit proportion for the coming year

    double bv_b() const { return bonds.book_value; }
    double phi_b() const { return bonds.quantity; }
};

struct YearLedger {
    int t = 0;
    CreditingCase label = CreditingCase::A;
    double fi = 0.0;
    double cif = 0.0;
    double cof = 0.0;
    double gap = 0.0;
    double fi_tilde = 0.0;
    double mv = 0.0;
    double cgl_s = 0.0;
    double cgl_b = 0.0;
    double overflow_loss = 0.0;
    double delta_cr = 0.0;
    double lgl = 0.0;
    double alpha = 0.0;
    double rho = 0.0;
    double td = 0.0;
    double r_comp = 0.0;
    double r_ph = 0.0;
    double p_e = 0.0;  // exit proportion decided for the next year
    double am = 0.0;
    double pnl = 0.0;
    double externalized = 0.0;  // AM + delta CR cleared at step 5
    double avg_coupon = 0.0;
    bool bond_purchase = true;
    // state after the year
    double mr = 0.0;
    double psr = 0.0;
    double cr = 0.0;
    double bv_s = 0.0;
    double bv_b = 0.0;
    double phi_s = 0.0;
    double phi_b = 0.0;
};

// Market data seen at reallocation date t.
struct YearMarket {
    int t = 0;
    double equity = 1.0;      // S_t
    double short_rate = 0.0;  // r_t
    double prev_zcb = 1.0;    // P(t-1, t)
    const DiscountStrip& curve;  // P(t, t+i) for i = 0..ManagementParams::max_tenor()
};

// ---- crediting decision

struct CreditingInputs {
    double mr_after_exits = 0.0;  // MR_{t2}
    double psr_prev = 0.0;
    double fi_tilde = 0.0;
    double overflow_loss = 0.0;   // (CR_{t-1} + CGL_b)^-
    double cgl_s = 0.0;
    double latent_s = 0.0;        // MV^s_t - BV^s_{t3}
    double guaranteed = 0.0;      // R^G_t = r_G (MR_{t2} + PSR_{t-1})
    double competitor = 0.0;      // R^comp_t
    double pi_pr = 0.9;
    double rho_bar = 0.5;
};

double latent_gain_loss(double latent, double alpha);
// TD_t(alpha, rho)
double amount_to_distribute(const CreditingInputs& in, double alpha, double rho);

struct CreditingDecision {
    CreditingCase label = CreditingCase::A;
    double alpha = 0.0;
    double rho = 0.0;
    double td = 0.0;
    double lgl = 0.0;
    double credited = 0.0;  // R^ph_t
    double r_ph = 0.0;
    double mr = 0.0;
    double psr = 0.0;
    double am = 0.0;
};

CreditingDecision decide_crediting(const CreditingInputs& in);

// ---- yearly recursion

struct YearResult {
    BalanceSheet sheet;
    YearLedger ledger;
};

// Portfolio at t = 0: par ladder (or par proxy bond) and equity at S0.
BalanceSheet initialize(double mr0, const ManagementParams& mgmt, const LiabilityParams& params, double s0,
                        const DiscountStrip& curve0, double r0);

// Steps 1-5 for t in 1..T-1, for either bond engine.
YearResult step_year(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                     const LiabilityParams& params);

// Liquidation at T after the step-1 income: ledger with P&L_T and COF_T.
YearResult close_at_T(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                      const LiabilityParams& params);

// Proxy engine entry points; same pipeline with a single bond of maturity n/2.
YearResult proxy_step_year(const BalanceSheet& sheet, const YearMarket& market, const ManagementParams& mgmt,
                           const LiabilityParams& params);

}  // namespace alm
