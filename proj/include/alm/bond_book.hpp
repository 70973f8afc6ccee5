#pragma once

#include <span>
#include <vector>

#include "alm/rates.hpp"

namespace alm {

// Equally weighted ladder of unit-nominal bonds: quantity/n bonds with time
// to maturity i and coupon coupons[i-1], i = 1..n.
struct CouponLadder {
    std::vector<double> coupons;
    double quantity = 0.0;
    double book_value = 0.0;

    int n() const { return static_cast<int>(coupons.size()); }
    double average_coupon() const;

    // Par ladder worth `amount`: coupons are the swap rates of the strip.
    static CouponLadder at_par(int n, double amount, const DiscountStrip& curve);
};

struct LadderIncome {
    double coupons = 0.0;     // FI
    double nominal = 0.0;     // matured principal
    double book_value = 0.0;  // book value with the matured nominal removed
};

LadderIncome annual_income(const CouponLadder& ladder);

// The ladder one year later, before reallocation: rung i (i = 1..n-1) carries
// the coupon of the former rung i+1.
struct AgedLadder {
    std::span<const double> coupons;  // n - 1 entries
    double quantity = 0.0;
    double book_value = 0.0;          // after the matured nominal is removed
    int n = 0;
};

AgedLadder age(const CouponLadder& ladder, double book_value_after_income);

// (1/n) sum_{i<n} B(t, i, c^{i+1}): value per unit of the aged rungs.
double aged_unit_value(const AgedLadder& aged, const DiscountStrip& curve);

struct BondReallocResult {
    CouponLadder ladder;
    double realized_gain = 0.0;    // CGL_b, zero when buying
    double market_value = 0.0;     // quantity * basket price after the trade
    double reference_value = 0.0;  // value if exactly the matured rung were replaced
    bool purchase = true;
};

// Brings the ladder to market value `target` while buying the n-year rung
// at par; see the purchase/sale rules in the README.
BondReallocResult reallocate(const AgedLadder& aged, double target, const DiscountStrip& curve);

struct CapitalizationUpdate {
    double reserve = 0.0;
    double overflow_loss = 0.0;  // part of a loss the reserve cannot absorb
};

CapitalizationUpdate update_capitalization_reserve(double previous, double realized_gain);

}  // namespace alm
