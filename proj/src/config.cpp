#include "alm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace alm {

namespace pt = boost::property_tree;

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::value: return "value";
        case Experiment::scr: return "scr";
        case Experiment::sweep_ws: return "sweep_ws";
        case Experiment::sweep_n: return "sweep_n";
        case Experiment::sweep_gamma: return "sweep_gamma";
        case Experiment::durations: return "durations";
    }
    return "?";
}

Experiment parse_experiment(std::string_view text) {
    for (Experiment e : {Experiment::value, Experiment::scr, Experiment::sweep_ws, Experiment::sweep_n,
                         Experiment::sweep_gamma, Experiment::durations}) {
        if (to_string(e) == text) return e;
    }
    throw ConfigError("run.experiment: unknown experiment '" + std::string(text) +
                      "' (value|scr|sweep_ws|sweep_n|sweep_gamma|durations)");
}

ShockSpec RunConfig::shock_spec() const {
    ShockSpec spec = ShockSpec::make(ShockKind::central, regime);
    if (!shock_table_file.empty()) spec.table = read_shock_table_csv(shock_table_file);
    spec.s_eq = s_eq;
    spec.floor_1pct = floor_1pct;
    return spec;
}

MarketCurve RunConfig::market_curve() const {
    if (curve_source == "csv") return read_curve_csv(curve_file);
    return vasicek_curve(setup.factor, curve_max_maturity);
}

void RunConfig::validate() const {
    try {
        setup.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (curve_source != "vasicek" && curve_source != "csv")
        throw ConfigError("curve.source must be vasicek or csv (got '" + curve_source + "')");
    if (curve_source == "csv" && curve_file.empty()) throw ConfigError("curve.file is required when curve.source = csv");
    if (curve_source == "vasicek" && curve_max_maturity < setup.required_horizon())
        throw ConfigError("curve.max_maturity must be >= T + n = " + std::to_string(setup.required_horizon()) +
                          " (got " + std::to_string(curve_max_maturity) + ")");
    if (!(s_eq > -1.0 && s_eq <= 0.0)) throw ConfigError("shock.s_eq must be in (-1, 0] (got " + std::to_string(s_eq) + ")");
    if (paths < 1) throw ConfigError("run.paths must be >= 1");
    if (threads < 1) throw ConfigError("run.threads must be >= 1");
}

RunConfig preset(std::string_view name) {
    RunConfig c;
    if (name == "paper-2pct") return c;
    if (name == "paper-lowyield") {
        c.setup.factor.x0 = 0.005;
        c.setup.factor.theta = 0.005;
        c.setup.mgmt.w_s = 0.08;
        c.setup.mgmt.n = 10;
        c.setup.liability.r_g = 0.0;
        c.setup.liability.p_low = 0.1;
        c.regime = ShockRegime::eiopa2018;
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (paper-2pct|paper-lowyield)");
}

std::vector<std::string> preset_names() { return {"paper-2pct", "paper-lowyield"}; }

namespace {

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse_double(key, item.substr(b, e - b + 1)));
    }
    return out;
}

std::string format(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
    Setter set;
    Getter get;
};

Field real(std::function<double&(RunConfig&)> ref) {
    return {[ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_double(k, v); },
            [ref](const RunConfig& c) {
                RunConfig copy = c;
                return format(ref(copy));
            }};
}

Field integer(std::function<int&(RunConfig&)> ref) {
    return {[ref](RunConfig& c, const std::string& k, const std::string& v) {
                const long long x = parse_integer(k, v);
                if (x < -1000000 || x > 1000000) throw ConfigError(k + ": out of range");
                ref(c) = static_cast<int>(x);
            },
            [ref](const RunConfig& c) {
                RunConfig copy = c;
                return std::to_string(ref(copy));
            }};
}

// section -> key -> field, in the order written by save_config
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>& schema() {
    static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>> s = {
        {"market",
         {{"s0", real([](RunConfig& c) -> double& { return c.setup.equity.s0; })},
          {"sigma_s", real([](RunConfig& c) -> double& { return c.setup.equity.sigma_s; })},
          {"gamma", real([](RunConfig& c) -> double& { return c.setup.equity.gamma; })},
          {"r0", real([](RunConfig& c) -> double& { return c.setup.factor.x0; })},
          {"theta", real([](RunConfig& c) -> double& { return c.setup.factor.theta; })},
          {"k", real([](RunConfig& c) -> double& { return c.setup.factor.k; })},
          {"sigma_r", real([](RunConfig& c) -> double& { return c.setup.factor.sigma_r; })}}},
        {"curve",
         {{"source", {[](RunConfig& c, const std::string&, const std::string& v) { c.curve_source = v; },
                      [](const RunConfig& c) { return c.curve_source; }}},
          {"file", {[](RunConfig& c, const std::string&, const std::string& v) { c.curve_file = v; },
                    [](const RunConfig& c) { return c.curve_file; }}},
          {"max_maturity", integer([](RunConfig& c) -> int& { return c.curve_max_maturity; })}}},
        {"liability",
         {{"r_g", real([](RunConfig& c) -> double& { return c.setup.liability.r_g; })},
          {"pi_pr", real([](RunConfig& c) -> double& { return c.setup.liability.pi_pr; })},
          {"rho_bar", real([](RunConfig& c) -> double& { return c.setup.liability.rho_bar; })},
          {"p_low", real([](RunConfig& c) -> double& { return c.setup.liability.p_low; })},
          {"dsr_max", real([](RunConfig& c) -> double& { return c.setup.liability.dsr_max; })},
          {"alpha_s", real([](RunConfig& c) -> double& { return c.setup.liability.alpha_s; })},
          {"beta_s", real([](RunConfig& c) -> double& { return c.setup.liability.beta_s; })},
          {"competitor",
           {[](RunConfig& c, const std::string& k, const std::string& v) {
                if (v == "short_rate") {
                    c.setup.liability.competitor = CompetitorRule::short_rate;
                } else if (v == "max_with_eta") {
                    c.setup.liability.competitor = CompetitorRule::max_with_eta;
                } else {
                    throw ConfigError(k + ": expected short_rate or max_with_eta, got '" + v + "'");
                }
            },
            [](const RunConfig& c) { return std::string(to_string(c.setup.liability.competitor)); }}},
          {"eta", real([](RunConfig& c) -> double& { return c.setup.liability.eta; })}}},
        {"management",
         {{"w_s", real([](RunConfig& c) -> double& { return c.setup.mgmt.w_s; })},
          {"n", integer([](RunConfig& c) -> int& { return c.setup.mgmt.n; })},
          {"engine",
           {[](RunConfig& c, const std::string& k, const std::string& v) {
                if (v == "ladder") {
                    c.setup.mgmt.engine = BondEngine::ladder;
                } else if (v == "proxy") {
                    c.setup.mgmt.engine = BondEngine::proxy;
                } else {
                    throw ConfigError(k + ": expected ladder or proxy, got '" + v + "'");
                }
            },
            [](const RunConfig& c) { return std::string(to_string(c.setup.mgmt.engine)); }}}}},
        {"shock",
         {{"regime",
           {[](RunConfig& c, const std::string& k, const std::string& v) {
                try {
                    c.regime = parse_regime(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(k + ": " + e.what());
                }
            },
            [](const RunConfig& c) { return std::string(to_string(c.regime)); }}},
          {"s_eq", real([](RunConfig& c) -> double& { return c.s_eq; })},
          {"floor_1pct", {[](RunConfig& c, const std::string& k, const std::string& v) { c.floor_1pct = parse_bool(k, v); },
                          [](const RunConfig& c) { return std::string(c.floor_1pct ? "true" : "false"); }}},
          {"table_file", {[](RunConfig& c, const std::string&, const std::string& v) { c.shock_table_file = v; },
                          [](const RunConfig& c) { return c.shock_table_file; }}}}},
        {"run",
         {{"experiment", {[](RunConfig& c, const std::string&, const std::string& v) { c.experiment = parse_experiment(v); },
                          [](const RunConfig& c) { return std::string(to_string(c.experiment)); }}},
          {"horizon", integer([](RunConfig& c) -> int& { return c.setup.years; })},
          {"paths", {[](RunConfig& c, const std::string& k, const std::string& v) {
                         const long long x = parse_integer(k, v);
                         if (x < 1) throw ConfigError(k + " must be >= 1 (got " + v + ")");
                         c.paths = static_cast<std::size_t>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.paths); }}},
          {"seed", {[](RunConfig& c, const std::string& k, const std::string& v) {
                        std::uint64_t x = 0;
                        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
                        if (ec != std::errc() || ptr != v.data() + v.size())
                            throw ConfigError(k + ": expected an unsigned integer, got '" + v + "'");
                        c.seed = x;
                    },
                    [](const RunConfig& c) { return std::to_string(c.seed); }}},
          {"threads", integer([](RunConfig& c) -> int& { return c.threads; })},
          {"grid", {[](RunConfig& c, const std::string& k, const std::string& v) { c.grid = parse_list(k, v); },
                    [](const RunConfig& c) {
                        std::string out;
                        for (std::size_t i = 0; i < c.grid.size(); ++i) out += (i ? "," : "") + format(c.grid[i]);
                        return out;
                    }}},
          {"ledger_dump_paths", {[](RunConfig& c, const std::string& k, const std::string& v) {
                                     const long long x = parse_integer(k, v);
                                     if (x < 0) throw ConfigError(k + " must be >= 0");
                                     c.ledger_dump_paths = static_cast<std::size_t>(x);
                                 },
                                 [](const RunConfig& c) { return std::to_string(c.ledger_dump_paths); }}}}},
    };
    return s;
}

}  // namespace

namespace {

// Drops trailing "; ..." or "# ..." comments, which the INI reader keeps as
// part of the value; a marker must follow whitespace.
std::string strip_inline_comments(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        for (std::size_t i = 1; i < line.size(); ++i) {
            if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        }
        out << line << '\n';
    }
    return out.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    pt::ptree tree;
    std::istringstream in(strip_inline_comments(text));
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    RunConfig config = base;
    for (const auto& [section, body] : tree) {
        const auto& sch = schema();
        auto sec = std::find_if(sch.begin(), sch.end(), [&](const auto& s) { return s.first == section; });
        if (sec == sch.end()) {
            if (body.empty()) throw ConfigError("key '" + section + "' outside of any section");
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            auto field = std::find_if(sec->second.begin(), sec->second.end(), [&](const auto& f) { return f.first == key; });
            const std::string name = section + "." + key;
            if (field == sec->second.end()) throw ConfigError("unknown key '" + name + "'");
            field->second.set(config, name, value.data());
        }
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

std::string save_config(const RunConfig& config) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, fields] : schema()) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, field] : fields) out << key << " = " << field.get(config) << '\n';
    }
    return out.str();
}

std::vector<double> default_grid(Experiment e, const RunConfig& config) {
    std::vector<double> g;
    switch (e) {
        case Experiment::sweep_ws:
            for (int i = 0; i <= 10; ++i) g.push_back(0.02 * i);
            break;
        case Experiment::sweep_n:
            for (int n = 1; n <= 30; ++n) g.push_back(n);
            break;
        case Experiment::sweep_gamma:
            for (int i = -10; i <= 10; ++i) g.push_back(0.1 * i);
            break;
        case Experiment::durations:
            g.push_back(config.setup.mgmt.n);
            break;
        default:
            break;
    }
    return g;
}

}  // namespace alm
