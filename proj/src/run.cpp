#include "alm/run.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef ALM_VERSION
#define ALM_VERSION "dev"
#endif

namespace alm {

using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

std::string error_report(const std::string& kind, const std::string& message, int exit_code) {
    json j;
    j["status"] = "error";
    j["kind"] = kind;
    j["message"] = message;
    j["exit_code"] = exit_code;
    return j.dump(2) + "\n";
}

namespace {

class Writer {
public:
    Writer(std::filesystem::path dir, std::string config_hash) : dir_(std::move(dir)), hash_(std::move(config_hash)) {}

    void csv(const std::string& name, const std::string& body) { write(name, "# config_sha256=" + hash_ + "\n" + body); }
    void json_file(const std::string& name, json j) {
        j["config_sha256"] = hash_;
        write(name, j.dump(2) + "\n");
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + (dir_ / name).string() + "'");
        files_.emplace_back(name, sha256_hex(content));
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::string hash_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::ostringstream csv_stream() {
    std::ostringstream s;
    s.precision(12);
    return s;
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"se", e.se}}; }

json valuation_json(const ValuationResult& v) {
    return {{"scenario", v.scenario_id},   {"paths", v.paths},
            {"bof", estimate_json(v.bof)}, {"bel", estimate_json(v.bel)},
            {"initial_value", v.initial_value}, {"leakage", estimate_json(v.leakage)}, {"bailouts", v.bailouts},
            {"ci_defined", v.ci_defined()}};
}

void diagnostics_rows(std::ostringstream& out, const ValuationResult& v) {
    for (const YearDiagnostics& d : v.years) {
        out << v.scenario_id << ',' << d.t << ',' << d.mean_r_ph << ',' << d.mean_p_e << ',' << d.mean_avg_coupon
            << ',' << d.mean_pnl << ',' << d.mean_cof << ',' << d.freq_a << ',' << d.freq_b << ',' << d.freq_c << ','
            << d.freq_d << ',' << d.freq_bailout << '\n';
    }
}

const char* diagnostics_header =
    "scenario,t,mean_r_ph,mean_p_e,mean_avg_coupon,mean_pnl,mean_cof,freq_a,freq_b,freq_c,freq_d,freq_bailout\n";

json scr_json(const ScrReport& r) {
    return {{"scr_eq", estimate_json(r.scr_eq)},
            {"scr_up", estimate_json(r.scr_up)},
            {"scr_down", estimate_json(r.scr_down)},
            {"scr_int", r.scr_int},
            {"scr_mkt", r.scr_mkt},
            {"epsilon", r.epsilon},
            {"valuations", json::array({valuation_json(r.central), valuation_json(r.equity), valuation_json(r.up),
                                        valuation_json(r.down)})}};
}

std::string shifts_csv(const MarketCurve& curve, const RunConfig& config) {
    auto out = csv_stream();
    ShockSpec spec = config.shock_spec();
    const ShiftFunction central = calibrate_shift(curve, config.setup.factor);
    spec.kind = ShockKind::ir_up;
    const MarketCurve up_curve = apply_shock(curve, spec);
    spec.kind = ShockKind::ir_down;
    const MarketCurve down_curve = apply_shock(curve, spec);
    const ShiftFunction up = calibrate_shift(up_curve, config.setup.factor);
    const ShiftFunction down = calibrate_shift(down_curve, config.setup.factor);
    out << "t,zero_rate,zero_rate_up,zero_rate_down,phi_central,phi_up,phi_down\n";
    for (int i = 0; i < central.horizon(); ++i) {
        out << i << ',' << curve.zero_rate(i + 1) << ',' << up_curve.zero_rate(i + 1) << ','
            << down_curve.zero_rate(i + 1) << ',' << central.value(i) << ',' << up.value(i) << ',' << down.value(i)
            << '\n';
    }
    return out.str();
}

std::string ledger_csv(const ScenarioSet& set, const AlmSetup& setup, const Scenario& sc, std::size_t paths) {
    auto out = csv_stream();
    out << "path,t,case,fi,cif,cof,gap,fi_tilde,mv,cgl_s,cgl_b,overflow_loss,delta_cr,lgl,alpha,rho,td,r_comp,r_ph,"
           "p_e,am,pnl,externalized,avg_coupon,bond_purchase,mr,psr,cr,bv_s,bv_b,phi_s,phi_b\n";
    std::vector<YearLedger> rows;
    for (std::size_t p = 0; p < std::min(paths, set.paths()); ++p) {
        value_path(set, p, setup, sc, &rows);
        for (const YearLedger& l : rows) {
            out << p << ',' << l.t << ',' << static_cast<char>(l.label) << ',' << l.fi << ',' << l.cif << ','
                << l.cof << ',' << l.gap << ',' << l.fi_tilde << ',' << l.mv << ',' << l.cgl_s << ',' << l.cgl_b
                << ',' << l.overflow_loss << ',' << l.delta_cr << ',' << l.lgl << ',' << l.alpha << ',' << l.rho
                << ',' << l.td << ',' << l.r_comp << ',' << l.r_ph << ',' << l.p_e << ',' << l.am << ',' << l.pnl
                << ',' << l.externalized << ',' << l.avg_coupon << ',' << (l.bond_purchase ? 1 : 0) << ',' << l.mr
                << ',' << l.psr << ',' << l.cr << ',' << l.bv_s << ',' << l.bv_b << ',' << l.phi_s << ','
                << l.phi_b << '\n';
        }
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& axis) {
    auto out = csv_stream();
    out << axis
        << ",bof,bof_se,bof_eq,bof_up,bof_down,bel,scr_eq,scr_eq_se,scr_up,scr_up_se,scr_down,scr_down_se,scr_int,"
           "epsilon,scr_mkt,bailouts\n";
    for (const SweepRow& row : rows) {
        const ScrReport& r = row.report;
        out << row.value << ',' << r.central.bof.mean << ',' << r.central.bof.se << ',' << r.equity.bof.mean << ','
            << r.up.bof.mean << ',' << r.down.bof.mean << ',' << r.central.bel.mean << ',' << r.scr_eq.mean << ','
            << r.scr_eq.se << ',' << r.scr_up.mean << ',' << r.scr_up.se << ',' << r.scr_down.mean << ','
            << r.scr_down.se << ',' << r.scr_int << ',' << r.epsilon << ',' << r.scr_mkt << ','
            << (r.central.bailouts + r.equity.bailouts + r.up.bailouts + r.down.bailouts) << '\n';
    }
    return out.str();
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

RunSummary run(const RunConfig& config, const RunOptions& options) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const std::string config_text = save_config(config);
    RunSummary summary;
    summary.config_sha256 = sha256_hex(config_text);

    std::filesystem::create_directories(options.out_dir);
    Writer out(options.out_dir, summary.config_sha256);
    out.write("config.ini", config_text);

    const MarketCurve curve = config.market_curve();
    const ShockSpec shocks = config.shock_spec();
    const AlmSetup& setup = config.setup;
    const ValueOptions vopt{config.threads, false};
    out.csv("shifts.csv", shifts_csv(curve, config));

    auto simulate_central = [&] {
        return simulate(setup.factor, setup.equity, setup.years, config.paths, config.seed, config.threads);
    };
    auto dump_ledger = [&](const ScenarioSet& set) {
        if (!options.ledger_dump) return;
        const Scenario sc = make_scenario(curve, setup, shocks);
        out.csv("ledger.csv", ledger_csv(set, setup, sc, config.ledger_dump_paths));
    };

    switch (config.experiment) {
        case Experiment::value: {
            const ScenarioSet set = simulate_central();
            const ValuationResult v = value(set, setup, make_scenario(curve, setup, shocks), vopt);
            auto csv = csv_stream();
            csv << diagnostics_header;
            diagnostics_rows(csv, v);
            out.csv("valuation.csv", csv.str());
            out.json_file("value.json", valuation_json(v));
            dump_ledger(set);
            break;
        }
        case Experiment::scr: {
            const ScenarioSet set = simulate_central();
            const ScrReport r = scr(set, curve, setup, shocks, vopt);
            auto csv = csv_stream();
            csv << diagnostics_header;
            for (const ValuationResult* v : {&r.central, &r.equity, &r.up, &r.down}) diagnostics_rows(csv, *v);
            out.csv("valuation.csv", csv.str());
            out.json_file("scr.json", scr_json(r));
            dump_ledger(set);
            break;
        }
        case Experiment::sweep_ws:
        case Experiment::sweep_n:
        case Experiment::sweep_gamma: {
            const std::vector<double> grid = config.grid.empty() ? default_grid(config.experiment, config) : config.grid;
            const SweepAxis axis = config.experiment == Experiment::sweep_ws  ? SweepAxis::w_s
                                   : config.experiment == Experiment::sweep_n ? SweepAxis::n
                                                                               : SweepAxis::gamma;
            const char* name = axis == SweepAxis::w_s ? "w_s" : axis == SweepAxis::n ? "n" : "gamma";
            const auto rows = sweep(axis, grid, curve, setup, shocks, config.paths, config.seed, config.threads);
            out.csv("sweep.csv", sweep_csv(rows, name));
            break;
        }
        case Experiment::durations: {
            const std::vector<double> grid = config.grid.empty() ? default_grid(config.experiment, config) : config.grid;
            auto csv = csv_stream();
            csv << "n,mv_bonds,d_mv_bonds,bel,d_bel,d_bel_forward,d_bel_backward\n";
            for (double n : grid) {
                AlmSetup s = setup;
                s.mgmt.n = static_cast<int>(std::lround(n));
                const DurationResult d = durations(curve, s, config.paths, config.seed, config.threads);
                csv << s.mgmt.n << ',' << d.mv_bonds << ',' << d.d_mv_bonds << ',' << d.bel << ',' << d.d_bel << ','
                    << d.d_bel_forward << ',' << d.d_bel_backward << '\n';
            }
            out.csv("durations.csv", csv.str());
            break;
        }
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest;
    manifest["code_version"] = ALM_VERSION;
    manifest["experiment"] = std::string(to_string(config.experiment));
    manifest["seed"] = config.seed;
    manifest["paths"] = config.paths;
    manifest["generator"] = ScenarioSet::generator_id;
    manifest["threads"] = config.threads;
    manifest["config_sha256"] = summary.config_sha256;
    manifest["config"] = config_text;
    manifest["started_at"] = started;
    manifest["wall_time_s"] = wall;
    json files = json::object();
    for (const auto& [name, digest] : out.files()) {
        files[name] = digest;
        summary.files.push_back(name);
    }
    manifest["files"] = files;
    out.write("manifest.json", manifest.dump(2) + "\n");
    summary.files.push_back("manifest.json");
    return summary;
}

}  // namespace alm
