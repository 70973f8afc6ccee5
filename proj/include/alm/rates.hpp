#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace alm {

// Zero-coupon yield curve on annual pillars 1..max_maturity, continuously
// compounded. Negative rates are allowed.
class MarketCurve {
public:
    MarketCurve() = default;
    // zero_rates[i] holds R(0, i + 1).
    explicit MarketCurve(std::vector<double> zero_rates);

    // Pillars must be the contiguous integer maturities 1, 2, ..., H.
    static MarketCurve from_pillars(std::span<const std::pair<int, double>> pillars);

    int max_maturity() const { return static_cast<int>(rates_.size()); }
    double zero_rate(int maturity) const;
    // exp(-t R(0,t)); 1 at t = 0.
    double discount(int maturity) const;
    std::span<const double> zero_rates() const { return rates_; }

    friend bool operator==(const MarketCurve&, const MarketCurve&) = default;

private:
    std::vector<double> rates_;
};

// CSV with header "maturity,zero_rate" and one row per annual pillar.
MarketCurve read_curve_csv(const std::string& path);
MarketCurve parse_curve_csv(const std::string& text);
std::string format_curve_csv(const MarketCurve& curve);

// Piecewise-constant deterministic function: value(i) on [i, i+1).
class ShiftFunction {
public:
    ShiftFunction() = default;
    explicit ShiftFunction(std::vector<double> values);
    static ShiftFunction constant(double value, int horizon);

    int horizon() const { return static_cast<int>(values_.size()); }
    double value(int i) const;
    double at(double t) const;
    // Exact integral over [0, t]; throws when t exceeds the horizon.
    double integral(double t) const;
    double integral(double from, double to) const { return integral(to) - integral(from); }
    std::span<const double> values() const { return values_; }

    ShiftFunction shifted(double delta) const;

private:
    std::vector<double> values_;
    std::vector<double> cumulative_;  // cumulative_[i] = integral over [0, i]
};

// g_k(t) = (1 - e^{-kt}) / k, with the k -> 0 limit t.
double g_k(double k, double t);

// Unit-volatility Ornstein-Uhlenbeck moments over a step of length t
// (series expansions near k t = 0, closed forms otherwise):
//   factor_variance     Var(x_t)                = g_{2k}(t)
//   integral_variance   Var(int_0^t x)          = (t - 2 g_k + g_{2k}) / k^2
//   cross_covariance    Cov(x_t, int_0^t x)     = (g_k - g_{2k}) / k
//   integrated_kernel   int_0^t g_k(v) dv       = (t - g_k) / k
double ou_factor_variance(double k, double t);
double ou_integral_variance(double k, double t);
double ou_cross_covariance(double k, double t);
double ou_integrated_kernel(double k, double t);

// log A(t) = (sigma^2 / 2) Var(int x) for unit sigma, i.e.
// sigma^2/(2k^2) (t - g_k(t)) - sigma^2/(4k) g_k(t)^2.
double log_a(double k, double sigma, double t);

struct VasicekParams {
    double x0 = 0.0;
    double theta = 0.0;
    double k = 0.2;
    double sigma_r = 0.0;

    void validate() const;
    friend bool operator==(const VasicekParams&, const VasicekParams&) = default;
};

// Vasicek++: r_t = x_t + phi(t), x an Ornstein-Uhlenbeck factor and phi a
// piecewise-constant shift. Immutable; safe to share across threads.
class VasicekPPModel {
public:
    VasicekPPModel(VasicekParams params, ShiftFunction shift);

    const VasicekParams& params() const { return params_; }
    const ShiftFunction& shift() const { return shift_; }
    int horizon() const { return shift_.horizon(); }

    double short_rate(double x, double t) const { return x + shift_.at(t); }

    // P(t, maturity) given the factor value x = x_t.
    double zcb_price(double x, double t, double maturity) const;

    // Fills out[i] = P(t, t + i) for i = 0..out.size()-1 at integer t.
    void discount_strip(double x, int t, std::span<double> out) const;

    VasicekPPModel with_shift(ShiftFunction shift) const { return {params_, std::move(shift)}; }
    VasicekPPModel with_x0(double x0) const;

private:
    VasicekParams params_;
    ShiftFunction shift_;
    // Per integer tenor i: log A(i) - theta (i - g_k(i)), and g_k(i).
    std::vector<double> tenor_const_;
    std::vector<double> tenor_g_;
};

// Prices P(t, t+i), i = 0..m, at one date and factor state, with running
// annuities so coupon bonds and swap rates cost O(1) each.
class DiscountStrip {
public:
    DiscountStrip() = default;
    explicit DiscountStrip(std::vector<double> zcb_prices);

    void assign(const VasicekPPModel& model, double x, int t, int max_tenor);

    int max_tenor() const { return static_cast<int>(zcb_.size()) - 1; }
    double zcb(int tenor) const { return zcb_[tenor]; }
    // sum_{i=1..tenor} P(t, t+i)
    double annuity(int tenor) const { return annuity_[tenor]; }

    // B(t, n, c): unit-nominal bond with n annual coupons c.
    double bond(int n, double coupon) const { return coupon * annuity_[n] + zcb_[n]; }
    double swap_rate(int n) const;
    // (1/n) sum_i B(t, i, c^i) over the ladder coupons c^1..c^n.
    double basket(std::span<const double> coupons) const;

private:
    void rebuild_annuity();

    std::vector<double> zcb_;
    std::vector<double> annuity_;
};

double swap_rate(const VasicekPPModel& model, double x, int t, int n);
double bond_price(const VasicekPPModel& model, double x, int t, int n, double coupon);
double basket_price(const VasicekPPModel& model, double x, int t, std::span<const double> coupons);

// Exact annual bootstrap of the piecewise-constant shift so that the model
// reprices every pillar of the curve at t = 0.
ShiftFunction calibrate_shift(const MarketCurve& curve, const VasicekParams& params);

// Curve produced by a plain Vasicek model (phi = 0) up to max_maturity.
MarketCurve vasicek_curve(const VasicekParams& params, int max_maturity);

// Hull-White with piecewise-constant mean-reversion level theta_fn.
struct HullWhiteModel {
    double r0 = 0.0;
    double k = 0.2;
    double sigma_r = 0.0;
    std::vector<double> theta_fn;

    // P(t, maturity) given r_t = r; requires maturity <= theta_fn.size().
    double zcb_price(double r, double t, double maturity) const;
};

HullWhiteModel calibrate_hw_theta(const MarketCurve& curve, double r0, double k, double sigma_r);

}  // namespace alm
