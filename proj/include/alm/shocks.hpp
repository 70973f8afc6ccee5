#pragma once

#include <array>
#include <string>
#include <string_view>

#include "alm/rates.hpp"

namespace alm {

enum class ShockKind { central, equity, ir_up, ir_down };
enum class ShockRegime { eiopa2012, eiopa2018 };

std::string_view to_string(ShockKind kind);
std::string_view to_string(ShockRegime regime);
ShockRegime parse_regime(std::string_view text);

// Standard-formula stress factors for maturities 1..20. Beyond 20 years the
// multiplicative factor is interpolated linearly to +/-20% at 90 years and
// the additive factor linearly to 0 at 60 years.
struct ShockTable {
    std::array<double, 20> s_up{};
    std::array<double, 20> s_down{};
    std::array<double, 20> b_up{};
    std::array<double, 20> b_down{};

    static ShockTable builtin(ShockRegime regime);
    friend bool operator==(const ShockTable&, const ShockTable&) = default;
};

// CSV with header "t,s_up,s_down,b_up,b_down" and rows t = 1..20.
ShockTable parse_shock_table_csv(const std::string& text);
ShockTable read_shock_table_csv(const std::string& path);

inline constexpr int shock_t_a = 20;
inline constexpr int shock_t_b = 90;
inline constexpr int shock_t_b_additive = 60;
inline constexpr double shock_s_inf = 0.20;

struct ShockSpec {
    ShockKind kind = ShockKind::central;
    ShockRegime regime = ShockRegime::eiopa2012;
    ShockTable table = ShockTable::builtin(ShockRegime::eiopa2012);
    double s_eq = -0.39;
    // Minimum absolute move of 1% on the shocked yield.
    bool floor_1pct = false;

    static ShockSpec make(ShockKind kind, ShockRegime regime);

    // Multiplicative factor s_t and additive factor b_t for the curve shock
    // direction of `kind` (ir_up or ir_down), any maturity t >= 1.
    double multiplicative(int t) const;
    double additive(int t) const;
};

// R'(0,t) = (1 + s_t) R(0,t) + b_t for every pillar.
MarketCurve apply_shock(const MarketCurve& curve, const ShockSpec& spec);

// f(0,t) = (t+1) R(0,t+1) - t R(0,t), the annual forward rate on (t, t+1).
double forward_rate(const MarketCurve& curve, int t);

}  // namespace alm
