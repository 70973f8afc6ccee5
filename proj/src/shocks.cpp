#include "alm/shocks.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace alm {

std::string_view to_string(ShockKind kind) {
    switch (kind) {
        case ShockKind::central: return "central";
        case ShockKind::equity: return "equity";
        case ShockKind::ir_up: return "ir_up";
        case ShockKind::ir_down: return "ir_down";
    }
    return "?";
}

std::string_view to_string(ShockRegime regime) {
    return regime == ShockRegime::eiopa2012 ? "eiopa2012" : "eiopa2018";
}

ShockRegime parse_regime(std::string_view text) {
    if (text == "eiopa2012") return ShockRegime::eiopa2012;
    if (text == "eiopa2018") return ShockRegime::eiopa2018;
    throw std::invalid_argument("unknown shock regime '" + std::string(text) + "' (eiopa2012|eiopa2018)");
}

ShockTable ShockTable::builtin(ShockRegime regime) {
    ShockTable table;
    if (regime == ShockRegime::eiopa2012) {
        table.s_up = {0.70, 0.70, 0.64, 0.59, 0.55, 0.52, 0.49, 0.47, 0.44, 0.42,
                      0.39, 0.37, 0.35, 0.34, 0.33, 0.31, 0.30, 0.29, 0.27, 0.26};
        table.s_down = {-0.75, -0.65, -0.56, -0.50, -0.46, -0.42, -0.39, -0.36, -0.33, -0.31,
                        -0.30, -0.29, -0.28, -0.27, -0.28, -0.28, -0.28, -0.28, -0.29, -0.29};
        return table;
    }
    table.s_up = {0.61, 0.53, 0.49, 0.46, 0.45, 0.41, 0.37, 0.34, 0.32, 0.30,
                  0.30, 0.30, 0.30, 0.29, 0.28, 0.28, 0.27, 0.26, 0.26, 0.25};
    table.s_down = {-0.58, -0.51, -0.44, -0.40, -0.40, -0.38, -0.37, -0.38, -0.39, -0.40,
                    -0.41, -0.42, -0.43, -0.44, -0.45, -0.47, -0.48, -0.49, -0.49, -0.50};
    table.b_up = {0.0214, 0.0186, 0.0172, 0.0161, 0.0158, 0.0144, 0.0130, 0.0119, 0.0112, 0.0105,
                  0.0105, 0.0105, 0.0105, 0.0102, 0.0098, 0.0098, 0.0095, 0.0091, 0.0091, 0.0088};
    table.b_down = {-0.0116, -0.0099, -0.0083, -0.0074, -0.0071, -0.0067, -0.0063, -0.0062, -0.0061, -0.0061,
                    -0.0060, -0.0060, -0.0059, -0.0058, -0.0057, -0.0056, -0.0055, -0.0054, -0.0052, -0.0050};
    return table;
}

ShockTable parse_shock_table_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::vector<bool> seen(20, false);
    ShockTable table;
    while (std::getline(in, line)) {
        line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r'; }),
                   line.end());
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "t,s_up,s_down,b_up,b_down")
                throw std::invalid_argument("shock table csv: expected header 't,s_up,s_down,b_up,b_down'");
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ',')) {
            try {
                values.push_back(std::stod(field));
            } catch (const std::logic_error&) {
                throw std::invalid_argument("shock table csv: malformed field '" + field + "'");
            }
        }
        if (values.size() != 5) throw std::invalid_argument("shock table csv: expected 5 fields per row");
        const int t = static_cast<int>(values[0]);
        if (t < 1 || t > 20 || values[0] != t) throw std::invalid_argument("shock table csv: t must be 1..20");
        table.s_up[t - 1] = values[1];
        table.s_down[t - 1] = values[2];
        table.b_up[t - 1] = values[3];
        table.b_down[t - 1] = values[4];
        seen[t - 1] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw std::invalid_argument("shock table csv: rows for every t = 1..20 are required");
    return table;
}

ShockTable read_shock_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shock table '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_shock_table_csv(buf.str());
}

ShockSpec ShockSpec::make(ShockKind kind, ShockRegime regime) {
    ShockSpec spec;
    spec.kind = kind;
    spec.regime = regime;
    spec.table = ShockTable::builtin(regime);
    return spec;
}

namespace {

void require_curve_shock(ShockKind kind) {
    if (kind != ShockKind::ir_up && kind != ShockKind::ir_down)
        throw std::invalid_argument("shock kind '" + std::string(to_string(kind)) + "' is not a curve shock");
}

}  // namespace

double ShockSpec::multiplicative(int t) const {
    require_curve_shock(kind);
    if (t < 1) throw std::invalid_argument("shock maturity must be >= 1");
    const bool up = kind == ShockKind::ir_up;
    const auto& s = up ? table.s_up : table.s_down;
    if (t <= shock_t_a) return s[t - 1];
    const double s_inf = up ? shock_s_inf : -shock_s_inf;
    if (t >= shock_t_b) return s_inf;
    const double s_a = s[shock_t_a - 1];
    return s_a + (s_inf - s_a) * (t - shock_t_a) / static_cast<double>(shock_t_b - shock_t_a);
}

double ShockSpec::additive(int t) const {
    require_curve_shock(kind);
    if (t < 1) throw std::invalid_argument("shock maturity must be >= 1");
    if (regime == ShockRegime::eiopa2012) return 0.0;
    const auto& b = kind == ShockKind::ir_up ? table.b_up : table.b_down;
    if (t <= shock_t_a) return b[t - 1];
    if (t >= shock_t_b_additive) return 0.0;
    const double b_a = b[shock_t_a - 1];
    return b_a * (1.0 - (t - shock_t_a) / static_cast<double>(shock_t_b_additive - shock_t_a));
}

MarketCurve apply_shock(const MarketCurve& curve, const ShockSpec& spec) {
    require_curve_shock(spec.kind);
    std::vector<double> rates(static_cast<std::size_t>(curve.max_maturity()));
    for (int t = 1; t <= curve.max_maturity(); ++t) {
        const double base = curve.zero_rate(t);
        double shocked = (1.0 + spec.multiplicative(t)) * base + spec.additive(t);
        if (spec.floor_1pct) {
            shocked = spec.kind == ShockKind::ir_up ? std::max(shocked, base + 0.01) : std::min(shocked, base - 0.01);
        }
        rates[t - 1] = shocked;
    }
    return MarketCurve(std::move(rates));
}

double forward_rate(const MarketCurve& curve, int t) {
    if (t < 0 || t + 1 > curve.max_maturity()) throw std::out_of_range("forward rate: t + 1 beyond curve");
    const double rt = t == 0 ? 0.0 : t * curve.zero_rate(t);
    return (t + 1) * curve.zero_rate(t + 1) - rt;
}

}  // namespace alm
