#include "alm/bond_book.hpp"

#include <numeric>
#include <stdexcept>

namespace alm {

double CouponLadder::average_coupon() const {
    if (coupons.empty()) return 0.0;
    return std::accumulate(coupons.begin(), coupons.end(), 0.0) / static_cast<double>(coupons.size());
}

CouponLadder CouponLadder::at_par(int n, double amount, const DiscountStrip& curve) {
    if (n < 1) throw std::invalid_argument("ladder: n must be >= 1");
    CouponLadder ladder;
    ladder.coupons.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) ladder.coupons[i - 1] = curve.swap_rate(i);
    ladder.quantity = amount;
    ladder.book_value = amount;
    return ladder;
}

LadderIncome annual_income(const CouponLadder& ladder) {
    if (ladder.quantity < 0.0) throw std::invalid_argument("ladder: negative quantity");
    const double n = ladder.n();
    LadderIncome income;
    income.coupons = ladder.quantity * ladder.average_coupon();
    income.nominal = ladder.quantity / n;
    income.book_value = ladder.book_value - income.nominal;
    return income;
}

AgedLadder age(const CouponLadder& ladder, double book_value_after_income) {
    AgedLadder aged;
    aged.coupons = std::span<const double>(ladder.coupons).subspan(1);
    aged.quantity = ladder.quantity;
    aged.book_value = book_value_after_income;
    aged.n = ladder.n();
    return aged;
}

double aged_unit_value(const AgedLadder& aged, const DiscountStrip& curve) {
    double sum = 0.0;
    for (int i = 1; i < aged.n; ++i) sum += curve.bond(i, aged.coupons[i - 1]);
    return sum / aged.n;
}

BondReallocResult reallocate(const AgedLadder& aged, double target, const DiscountStrip& curve) {
    const int n = aged.n;
    if (n < 1) throw std::invalid_argument("reallocate: empty ladder");
    if (target < 0.0) throw std::invalid_argument("reallocate: negative target");
    const double inv_n = 1.0 / n;
    const double unit_aged = aged_unit_value(aged, curve);
    const double phi_old = aged.quantity;

    BondReallocResult out;
    out.reference_value = phi_old * (unit_aged + inv_n);  // new n-rung at par is worth 1/n per unit
    out.ladder.coupons.resize(static_cast<std::size_t>(n));
    auto& c = out.ladder.coupons;
    const double swap_n = curve.swap_rate(n);

    if (target >= out.reference_value || phi_old <= 0.0) {
        const double delta = target - out.reference_value;
        const double total = phi_old + delta;
        for (int i = 1; i < n; ++i) {
            const double fresh = curve.swap_rate(i);
            // an empty ladder is rebuilt entirely at par
            c[i - 1] = total > 0.0 ? (phi_old * aged.coupons[i - 1] + delta * fresh) / total : fresh;
        }
        c[n - 1] = swap_n;
        out.ladder.quantity = total;
        out.ladder.book_value = aged.book_value + delta + phi_old * inv_n;
        out.realized_gain = 0.0;
        out.purchase = true;
    } else {
        const double q = target / (unit_aged + inv_n);
        const double sold = phi_old - q;  // (Delta phi)^-
        for (int i = 1; i < n; ++i) c[i - 1] = aged.coupons[i - 1];
        c[n - 1] = swap_n;
        out.ladder.quantity = q;
        out.ladder.book_value = aged.book_value * (1.0 - sold / phi_old) + q * inv_n;
        out.realized_gain = sold * (unit_aged - aged.book_value / phi_old);
        out.purchase = false;
    }
    out.market_value = out.ladder.quantity * curve.basket(out.ladder.coupons);
    return out;
}

CapitalizationUpdate update_capitalization_reserve(double previous, double realized_gain) {
    const double level = previous + realized_gain;
    return level >= 0.0 ? CapitalizationUpdate{level, 0.0} : CapitalizationUpdate{0.0, -level};
}

}  // namespace alm
