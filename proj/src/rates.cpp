#include "alm/rates.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace alm {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// sum_{m >= m0} coef(m) k^{m - shift} t^m / m!, for small k t.
template <class Coef>
double ou_series(double k, double t, int m0, int shift, Coef coef) {
    double sum = 0.0;
    // k^{m0 - shift} t^{m0} / m0!
    double base = std::pow(t, m0) / std::tgamma(m0 + 1.0) * std::pow(k, m0 - shift);
    for (int m = m0; m < m0 + 40; ++m) {
        const double term = coef(m) * base;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        base *= k * t / (m + 1);
    }
    return sum;
}

constexpr double series_cutoff = 0.5;

}  // namespace

// ---------------------------------------------------------------- MarketCurve

MarketCurve::MarketCurve(std::vector<double> zero_rates) : rates_(std::move(zero_rates)) {
    if (rates_.empty()) throw std::invalid_argument("market curve: no pillars");
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        if (!std::isfinite(rates_[i]))
            throw std::invalid_argument("market curve: non-finite zero rate at maturity " +
                                        std::to_string(i + 1));
    }
}

MarketCurve MarketCurve::from_pillars(std::span<const std::pair<int, double>> pillars) {
    std::vector<double> rates;
    rates.reserve(pillars.size());
    int expected = 1;
    for (const auto& [maturity, rate] : pillars) {
        if (maturity != expected)
            throw std::invalid_argument("market curve: pillars must be contiguous from 1; expected maturity " +
                                        std::to_string(expected) + ", got " + std::to_string(maturity));
        rates.push_back(rate);
        ++expected;
    }
    return MarketCurve(std::move(rates));
}

double MarketCurve::zero_rate(int maturity) const {
    if (maturity < 1 || maturity > max_maturity())
        throw std::out_of_range("market curve: maturity " + std::to_string(maturity) + " outside [1, " +
                                std::to_string(max_maturity()) + "]");
    return rates_[maturity - 1];
}

double MarketCurve::discount(int maturity) const {
    if (maturity == 0) return 1.0;
    return std::exp(-maturity * zero_rate(maturity));
}

MarketCurve parse_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<std::pair<int, double>> pillars;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "maturity,zero_rate")
                throw std::invalid_argument("curve csv: expected header 'maturity,zero_rate', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("curve csv: line " + std::to_string(line_no) + ": expected two fields");
        try {
            std::size_t used = 0;
            const std::string mat = trim(line.substr(0, comma));
            const int maturity = std::stoi(mat, &used);
            if (used != mat.size()) throw std::invalid_argument("maturity");
            const double rate = std::stod(trim(line.substr(comma + 1)));
            pillars.emplace_back(maturity, rate);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("curve csv: line " + std::to_string(line_no) + ": malformed row '" + line +
                                        "'");
        }
    }
    if (!header_seen) throw std::invalid_argument("curve csv: empty input");
    return MarketCurve::from_pillars(pillars);
}

MarketCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_curve_csv(buf.str());
}

std::string format_curve_csv(const MarketCurve& curve) {
    std::ostringstream out;
    out.precision(17);
    out << "maturity,zero_rate\n";
    for (int t = 1; t <= curve.max_maturity(); ++t) out << t << ',' << curve.zero_rate(t) << '\n';
    return out.str();
}

// -------------------------------------------------------------- ShiftFunction

ShiftFunction::ShiftFunction(std::vector<double> values) : values_(std::move(values)) {
    cumulative_.resize(values_.size() + 1, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("shift function: non-finite value at year " + std::to_string(i));
        cumulative_[i + 1] = cumulative_[i] + values_[i];
    }
}

ShiftFunction ShiftFunction::constant(double value, int horizon) {
    return ShiftFunction(std::vector<double>(static_cast<std::size_t>(horizon), value));
}

double ShiftFunction::value(int i) const {
    if (i < 0 || i >= horizon())
        throw std::out_of_range("shift function: year " + std::to_string(i) + " beyond horizon " +
                                std::to_string(horizon()));
    return values_[i];
}

double ShiftFunction::at(double t) const {
    const int i = static_cast<int>(std::floor(t));
    // the right end of the last piece belongs to it
    if (i == horizon() && t == static_cast<double>(i) && i > 0) return values_[i - 1];
    return value(i);
}

double ShiftFunction::integral(double t) const {
    if (t < 0.0) throw std::out_of_range("shift function: negative time");
    if (t > horizon() + 1e-12)
        throw std::out_of_range("shift horizon exceeded: required " + std::to_string(t) + " years, available " +
                                std::to_string(horizon()));
    const int i = static_cast<int>(std::floor(t));
    if (i >= horizon()) return cumulative_.back();
    return cumulative_[i] + (t - i) * values_[i];
}

ShiftFunction ShiftFunction::shifted(double delta) const {
    std::vector<double> v = values_;
    for (double& x : v) x += delta;
    return ShiftFunction(std::move(v));
}

// ------------------------------------------------------------ OU helpers

double g_k(double k, double t) {
    if (k == 0.0) return t;
    return -std::expm1(-k * t) / k;
}

double ou_factor_variance(double k, double t) { return g_k(2.0 * k, t); }

double ou_integral_variance(double k, double t) {
    if (std::abs(k * t) < series_cutoff) {
        return ou_series(k, t, 3, 3, [](int m) {
            const double sign = (m % 2 == 1) ? 1.0 : -1.0;
            return sign * (std::ldexp(1.0, m - 1) - 2.0);
        });
    }
    return (t - 2.0 * g_k(k, t) + g_k(2.0 * k, t)) / (k * k);
}

double ou_cross_covariance(double k, double t) {
    if (std::abs(k * t) < series_cutoff) {
        return ou_series(k, t, 2, 2, [](int m) {
            const double sign = (m % 2 == 1) ? 1.0 : -1.0;
            return sign * (1.0 - std::ldexp(1.0, m - 1));
        });
    }
    return (g_k(k, t) - g_k(2.0 * k, t)) / k;
}

double ou_integrated_kernel(double k, double t) {
    if (std::abs(k * t) < series_cutoff) {
        return ou_series(k, t, 2, 2, [](int m) { return (m % 2 == 0) ? 1.0 : -1.0; });
    }
    return (t - g_k(k, t)) / k;
}

double log_a(double k, double sigma, double t) { return 0.5 * sigma * sigma * ou_integral_variance(k, t); }

// ------------------------------------------------------------- Vasicek++

void VasicekParams::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("k must be > 0 (got " + std::to_string(k) + ")");
    if (!(sigma_r >= 0.0)) throw std::invalid_argument("sigma_r must be >= 0 (got " + std::to_string(sigma_r) + ")");
    if (!std::isfinite(x0) || !std::isfinite(theta)) throw std::invalid_argument("x0 and theta must be finite");
}

VasicekPPModel::VasicekPPModel(VasicekParams params, ShiftFunction shift)
    : params_(params), shift_(std::move(shift)) {
    params_.validate();
    const int h = shift_.horizon();
    tenor_const_.resize(static_cast<std::size_t>(h) + 1);
    tenor_g_.resize(static_cast<std::size_t>(h) + 1);
    for (int i = 0; i <= h; ++i) {
        const double g = g_k(params_.k, i);
        tenor_g_[i] = g;
        tenor_const_[i] = log_a(params_.k, params_.sigma_r, i) - params_.theta * (i - g);
    }
}

VasicekPPModel VasicekPPModel::with_x0(double x0) const {
    VasicekParams p = params_;
    p.x0 = x0;
    return {p, shift_};
}

double VasicekPPModel::zcb_price(double x, double t, double maturity) const {
    if (t < 0.0 || maturity < t) throw std::invalid_argument("zcb_price: need 0 <= t <= maturity");
    if (maturity > horizon() + 1e-12)
        throw std::out_of_range("shift horizon exceeded: required " + std::to_string(maturity) +
                                " years, available " + std::to_string(horizon()));
    const double tau = maturity - t;
    if (tau == 0.0) return 1.0;
    const double g = g_k(params_.k, tau);
    return std::exp(log_a(params_.k, params_.sigma_r, tau) - shift_.integral(t, maturity) - x * g -
                    params_.theta * (tau - g));
}

void VasicekPPModel::discount_strip(double x, int t, std::span<double> out) const {
    const int m = static_cast<int>(out.size()) - 1;
    if (t < 0 || t + m > horizon())
        throw std::out_of_range("shift horizon exceeded: required " + std::to_string(t + m) + " years, available " +
                                std::to_string(horizon()));
    const double base = shift_.integral(t);
    out[0] = 1.0;
    for (int i = 1; i <= m; ++i) {
        out[i] = std::exp(tenor_const_[i] - (shift_.integral(t + i) - base) - x * tenor_g_[i]);
    }
}

// ---------------------------------------------------------- DiscountStrip

DiscountStrip::DiscountStrip(std::vector<double> zcb_prices) : zcb_(std::move(zcb_prices)) {
    if (zcb_.empty()) throw std::invalid_argument("discount strip: empty");
    rebuild_annuity();
}

void DiscountStrip::assign(const VasicekPPModel& model, double x, int t, int max_tenor) {
    zcb_.resize(static_cast<std::size_t>(max_tenor) + 1);
    model.discount_strip(x, t, zcb_);
    rebuild_annuity();
}

void DiscountStrip::rebuild_annuity() {
    annuity_.resize(zcb_.size());
    annuity_[0] = 0.0;
    for (std::size_t i = 1; i < zcb_.size(); ++i) annuity_[i] = annuity_[i - 1] + zcb_[i];
}

double DiscountStrip::swap_rate(int n) const {
    if (n < 1) throw std::invalid_argument("swap rate: n must be >= 1");
    const double denom = annuity_[n];
    if (!(denom > 0.0)) throw std::domain_error("swap rate: non-positive annuity");
    return (1.0 - zcb_[n]) / denom;
}

double DiscountStrip::basket(std::span<const double> coupons) const {
    const auto n = coupons.size();
    if (n == 0) throw std::invalid_argument("basket price: empty ladder");
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) sum += bond(static_cast<int>(i), coupons[i - 1]);
    return sum / static_cast<double>(n);
}

double swap_rate(const VasicekPPModel& model, double x, int t, int n) {
    DiscountStrip strip;
    strip.assign(model, x, t, n);
    return strip.swap_rate(n);
}

double bond_price(const VasicekPPModel& model, double x, int t, int n, double coupon) {
    if (n < 1) throw std::invalid_argument("bond price: n must be >= 1");
    DiscountStrip strip;
    strip.assign(model, x, t, n);
    return strip.bond(n, coupon);
}

double basket_price(const VasicekPPModel& model, double x, int t, std::span<const double> coupons) {
    DiscountStrip strip;
    strip.assign(model, x, t, static_cast<int>(coupons.size()));
    return strip.basket(coupons);
}

// ------------------------------------------------------------- calibration

ShiftFunction calibrate_shift(const MarketCurve& curve, const VasicekParams& params) {
    params.validate();
    const int h = curve.max_maturity();
    std::vector<double> phi(static_cast<std::size_t>(h));
    double cumulative = 0.0;
    for (int t = 1; t <= h; ++t) {
        const double g = g_k(params.k, t);
        // -log P^mkt(0,t) = -log A(t) + int_0^t phi + x0 g + theta (t - g)
        const double total = t * curve.zero_rate(t) + log_a(params.k, params.sigma_r, t) - params.x0 * g -
                             params.theta * (t - g);
        phi[t - 1] = total - cumulative;
        cumulative += phi[t - 1];
    }
    return ShiftFunction(std::move(phi));
}

MarketCurve vasicek_curve(const VasicekParams& params, int max_maturity) {
    const VasicekPPModel model(params, ShiftFunction::constant(0.0, max_maturity));
    std::vector<double> rates(static_cast<std::size_t>(max_maturity));
    for (int t = 1; t <= max_maturity; ++t) rates[t - 1] = -std::log(model.zcb_price(params.x0, 0.0, t)) / t;
    return MarketCurve(std::move(rates));
}

// ------------------------------------------------------------ Hull-White

namespace {

// int_a^b (1 - e^{-k(T - s)}) ds
double hw_kernel_integral(double k, double maturity, double a, double b) {
    return (b - a) - (std::exp(-k * (maturity - b)) - std::exp(-k * (maturity - a))) / k;
}

}  // namespace

double HullWhiteModel::zcb_price(double r, double t, double maturity) const {
    if (maturity > static_cast<double>(theta_fn.size()) + 1e-12)
        throw std::out_of_range("hull-white: maturity beyond calibrated horizon");
    const double tau = maturity - t;
    if (tau == 0.0) return 1.0;
    double integral = 0.0;
    for (int i = static_cast<int>(std::floor(t)); i < maturity; ++i) {
        const double a = std::max(t, static_cast<double>(i));
        const double b = std::min(maturity, static_cast<double>(i + 1));
        if (b > a) integral += theta_fn[i] * hw_kernel_integral(k, maturity, a, b);
    }
    return std::exp(log_a(k, sigma_r, tau) - r * g_k(k, tau) - integral);
}

HullWhiteModel calibrate_hw_theta(const MarketCurve& curve, double r0, double k, double sigma_r) {
    VasicekParams{r0, 0.0, k, sigma_r}.validate();
    const int h = curve.max_maturity();
    HullWhiteModel model{r0, k, sigma_r, std::vector<double>(static_cast<std::size_t>(h))};
    for (int t = 1; t <= h; ++t) {
        double known = 0.0;
        for (int i = 0; i < t - 1; ++i) known += model.theta_fn[i] * hw_kernel_integral(k, t, i, i + 1);
        const double rhs = t * curve.zero_rate(t) + log_a(k, sigma_r, t) - r0 * g_k(k, t) - known;
        model.theta_fn[t - 1] = rhs / hw_kernel_integral(k, t, t - 1, t);
    }
    return model;
}

}  // namespace alm
