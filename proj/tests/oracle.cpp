#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace oracle {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? -v : 0.0; }

// Closed-form prices when the factor has no volatility:
// x_t = theta + (x0 - theta) e^{-kt}, r_t = x_t + phi(t).
struct Rates {
    double x0, theta, k;
    const std::vector<double>& phi;

    double x(int t) const { return theta + (x0 - theta) * std::exp(-k * t); }
    double short_rate(int t) const { return x(t) + phi.at(static_cast<std::size_t>(t)); }
    double zcb(int t, int tau) const {
        double acc = theta * tau + (x(t) - theta) * (1.0 - std::exp(-k * tau)) / k;
        for (int j = t; j < t + tau; ++j) acc += phi.at(static_cast<std::size_t>(j));
        return std::exp(-acc);
    }
    double discount(int t) const { return zcb(0, t); }
    double annuity(int t, int m) const {
        double a = 0.0;
        for (int j = 1; j <= m; ++j) a += zcb(t, j);
        return a;
    }
    double par_coupon(int t, int m) const { return (1.0 - zcb(t, m)) / annuity(t, m); }
    double bond(int t, int m, double c) const { return c * annuity(t, m) + zcb(t, m); }
};

struct Lot {
    int maturity;
    double nominal;
    double coupon;
};

// Either an explicit list of ladder lots or the single proxy bond.
struct Bonds {
    bool proxy = false;
    int n = 1;
    int np = 1;
    std::vector<Lot> lots;
    double q = 0.0;
    double coupon = 0.0;
    double book = 0.0;

    double quantity() const {
        if (proxy) return q;
        double s = 0.0;
        for (const Lot& l : lots) s += l.nominal;
        return s;
    }
    double avg_coupon() const {
        if (proxy) return coupon;
        double s = 0.0, w = 0.0;
        for (const Lot& l : lots) {
            s += l.nominal * l.coupon;
            w += l.nominal;
        }
        return s / w;
    }
    double value(const Rates& m, int t) const {
        if (proxy) return q * m.bond(t, np, coupon);
        double v = 0.0;
        for (const Lot& l : lots) v += l.nominal * m.bond(t, l.maturity - t, l.coupon);
        return v;
    }
    void scale(double f) {
        q *= f;
        for (Lot& l : lots) l.nominal *= f;
        book *= f;
    }
    void reset_par(const Rates& m, int t, double amount) {
        book = amount;
        if (proxy) {
            q = amount;
            coupon = m.par_coupon(t, np);
            return;
        }
        lots.clear();
        for (int i = 1; i <= n; ++i) lots.push_back({t + i, amount / n, m.par_coupon(t, i)});
    }
    // coupons received and matured nominal; matured lots leave the book at nominal
    std::pair<double, double> income(int t) {
        if (proxy) return {q * coupon, 0.0};
        double fi = 0.0, matured = 0.0;
        for (const Lot& l : lots) {
            fi += l.nominal * l.coupon;
            if (l.maturity == t) matured += l.nominal;
        }
        std::erase_if(lots, [t](const Lot& l) { return l.maturity == t; });
        book -= matured;
        return {fi, matured};
    }
};

double dsr(double delta, const alm::LiabilityParams& p) {
    if (delta <= p.alpha_s) return p.dsr_max;
    if (delta >= p.beta_s) return 0.0;
    return p.dsr_max * (p.beta_s - delta) / (p.beta_s - p.alpha_s);
}

struct Sheet {
    Bonds bonds;
    double shares = 0.0;
    double bv_s = 0.0;
    double mr = 0.0;
    double psr = 0.0;
    double cr = 0.0;
    double r_ph_prev = 0.0;
    double p_e = 0.0;
};

void record(alm::YearLedger& l, const Sheet& s) {
    l.mr = s.mr;
    l.psr = s.psr;
    l.cr = s.cr;
    l.bv_s = s.bv_s;
    l.bv_b = s.bonds.book;
    l.phi_s = s.shares;
    l.phi_b = s.bonds.quantity();
    l.avg_coupon = s.bonds.avg_coupon();
}

}  // namespace

alm::AlmSetup Config::setup() const {
    alm::AlmSetup s;
    s.factor = {x0, theta, k, 0.0};
    s.equity = {s0, 0.0, gamma};
    s.liability = liability;
    s.mgmt = mgmt;
    s.years = years;
    s.mr0 = mr0;
    return s;
}

alm::Scenario Config::scenario() const {
    const alm::VasicekParams p{x0, theta, k, 0.0};
    return {"oracle", alm::VasicekPPModel(p, alm::ShiftFunction(phi_initial)),
            alm::VasicekPPModel(p, alm::ShiftFunction(phi_run)), equity_multiplier};
}

std::string Config::describe() const {
    std::ostringstream out;
    out << "T=" << years << " n=" << mgmt.n << " engine=" << alm::to_string(mgmt.engine) << " w_s=" << mgmt.w_s
        << " x0=" << x0 << " theta=" << theta << " k=" << k << " r_g=" << liability.r_g
        << " pi=" << liability.pi_pr << " rho=" << liability.rho_bar << " mult=" << equity_multiplier
        << " competitor=" << alm::to_string(liability.competitor);
    return out.str();
}

Result run(const Config& c) {
    const Rates init{c.x0, c.theta, c.k, c.phi_initial};
    const Rates mkt{c.x0, c.theta, c.k, c.phi_run};
    const alm::LiabilityParams& L = c.liability;
    const int n = c.mgmt.n;
    const double ws = c.mgmt.w_s;
    const double wb = 1.0 - ws;
    const double pi = L.pi_pr;
    auto equity = [&](int t) { return c.s0 / mkt.discount(t) * (t >= 1 ? c.equity_multiplier : 1.0); };

    Sheet st;
    st.mr = c.mr0;
    st.bv_s = ws * c.mr0;
    st.shares = ws * c.mr0 / c.s0;
    st.bonds.proxy = c.mgmt.engine == alm::BondEngine::proxy;
    st.bonds.n = n;
    st.bonds.np = std::max(1, n / 2);
    if (st.bonds.proxy) {
        const int np = st.bonds.np;
        st.bonds.coupon = init.par_coupon(0, np);
        // same market value as the ladder the insurer would have bought
        double ladder = 0.0;
        for (int i = 1; i <= n; ++i) ladder += mkt.bond(0, i, init.par_coupon(0, i)) / n;
        st.bonds.q = wb * c.mr0 * ladder / mkt.bond(0, np, st.bonds.coupon);
        st.bonds.book = wb * c.mr0;
    } else {
        st.bonds.reset_par(init, 0, wb * c.mr0);
    }
    st.r_ph_prev = init.short_rate(0);
    st.p_e = L.p_low + dsr(0.0, L);

    Result out;
    for (int t = 1; t <= c.years; ++t) {
        alm::YearLedger l;
        l.t = t;
        const double S = equity(t);
        const double r = mkt.short_rate(t);
        const double p_prev = mkt.zcb(t - 1, 1);
        const double cr_carry = st.cr * (1.0 / p_prev - 1.0);

        if (t == c.years) {
            l.label = alm::CreditingCase::closing;
            l.avg_coupon = st.bonds.avg_coupon();
            const auto [fi, matured] = st.bonds.income(t);
            l.fi = fi;
            l.cif = fi + matured;
            const double bond_value =
                st.bonds.proxy ? st.bonds.q * mkt.bond(t, st.bonds.np - 1, st.bonds.coupon) : st.bonds.value(mkt, t);
            l.cgl_s = st.shares * S - st.bv_s;
            l.cgl_b = bond_value - st.bonds.book;
            l.mv = l.cif + st.shares * S + bond_value;
            const double level = st.cr + l.cgl_b;
            const double cr_new = pos(level);
            l.overflow_loss = neg(level);
            l.delta_cr = cr_new - st.cr;
            l.td = fi - l.overflow_loss + st.psr + l.cgl_s;
            l.fi_tilde = fi;
            const double base = st.mr + st.psr;
            const double credited = std::max(pi * l.td, L.r_g * base);
            l.r_ph = credited / base;
            l.alpha = 1.0;
            l.rho = 1.0;
            l.r_comp = r;
            l.am = (1.0 - pi) * l.td - pos(credited - pi * l.td);
            l.pnl = l.am + cr_carry + cr_new;
            l.cof = st.mr * (1.0 + l.r_ph) + st.psr * l.r_ph;
            l.gap = l.cif - l.cof;
            l.p_e = 1.0;
            out.ledger.push_back(l);
            out.pv_pnl += mkt.discount(t) * l.pnl;
            out.pv_cof += mkt.discount(t) * l.cof;
            break;
        }

        // coupons and redemptions
        const auto [fi, matured] = st.bonds.income(t);
        l.fi = fi;
        l.cif = fi + matured;

        // surrenders
        l.cof = st.p_e * st.mr * (1.0 + L.r_g / 2.0);
        const double mr2 = (1.0 - st.p_e) * st.mr;
        l.gap = l.cif - l.cof;
        l.fi_tilde = fi - L.r_g / 2.0 * st.p_e * st.mr;

        // market value of everything held
        double held;
        if (st.bonds.proxy) {
            const double value_old = mkt.bond(t, st.bonds.np - 1, st.bonds.coupon);
            const double c_mix = mkt.par_coupon(t, n) / n + (1.0 - 1.0 / n) * st.bonds.coupon;
            held = st.bonds.q * value_old;
            st.bonds.q = held / mkt.bond(t, st.bonds.np, c_mix);
            st.bonds.coupon = c_mix;
        } else {
            held = st.bonds.value(mkt, t);
        }
        const double mv = l.gap + st.shares * S + held;
        l.mv = mv;
        const double r_comp = L.competitor == alm::CompetitorRule::short_rate ? r : std::max(r, L.eta * st.r_ph_prev);
        l.r_comp = r_comp;

        if (mv <= 0.0) {
            st.mr = mr2 * (1.0 + L.r_g);
            st.psr *= 1.0 + L.r_g;
            const double v = st.mr + st.psr;
            st.bv_s = ws * v;
            st.shares = ws * v / S;
            st.bonds.reset_par(mkt, t, wb * v);
            st.r_ph_prev = L.r_g;
            st.p_e = L.p_low + dsr(L.r_g - r_comp, L);
            l.label = alm::CreditingCase::bailout;
            l.r_ph = L.r_g;
            l.alpha = 1.0;
            l.rho = 1.0;
            l.p_e = st.p_e;
            l.am = mv - v;
            l.pnl = l.am + cr_carry;
            l.bond_purchase = true;
            record(l, st);
            out.ledger.push_back(l);
            out.pv_pnl += mkt.discount(t) * l.pnl;
            out.pv_cof += mkt.discount(t) * l.cof;
            continue;
        }

        // equity to its weight
        const double shares3 = ws * mv / S;
        if (shares3 >= st.shares) {
            st.bv_s += (shares3 - st.shares) * S;
        } else {
            const double unit_book = st.bv_s / st.shares;
            const double sold = st.shares - shares3;
            l.cgl_s = sold * (S - unit_book);
            st.bv_s -= sold * unit_book;
        }
        st.shares = shares3;

        // bonds to their weight
        const double target = wb * mv;
        double gain = 0.0;
        if (st.bonds.proxy) {
            const double price = mkt.bond(t, st.bonds.np, st.bonds.coupon);
            const double current = st.bonds.q * price;
            if (target >= current) {
                const double delta = target - current;
                st.bonds.coupon =
                    (st.bonds.q * st.bonds.coupon + delta * mkt.par_coupon(t, st.bonds.np)) / (st.bonds.q + delta);
                st.bonds.q += delta;
                st.bonds.book += delta;
                l.bond_purchase = true;
            } else {
                const double q_new = target / price;
                gain = (st.bonds.q - q_new) * (price - st.bonds.book / st.bonds.q);
                st.bonds.book *= q_new / st.bonds.q;
                st.bonds.q = q_new;
                l.bond_purchase = false;
            }
        } else {
            // the matured nominal is normally reinvested in a new n-year bond at par
            const double reference = held + matured;
            if (target >= reference) {
                const double delta = target - reference;
                st.bonds.lots.push_back({t + n, matured, mkt.par_coupon(t, n)});
                for (int i = 1; i <= n; ++i) st.bonds.lots.push_back({t + i, delta / n, mkt.par_coupon(t, i)});
                st.bonds.book += matured + delta;
                l.bond_purchase = true;
            } else {
                const double keep = target / reference;
                gain = (1.0 - keep) * (held - st.bonds.book);
                for (Lot& lot : st.bonds.lots) lot.nominal *= keep;
                st.bonds.lots.push_back({t + n, keep * matured, mkt.par_coupon(t, n)});
                st.bonds.book = keep * (st.bonds.book + matured);
                l.bond_purchase = false;
            }
        }
        l.cgl_b = gain;
        const double level = st.cr + gain;
        const double cr_new = pos(level);
        l.overflow_loss = neg(level);
        l.delta_cr = cr_new - st.cr;

        // crediting
        const double latent = st.shares * S - st.bv_s;
        auto lgl = [&](double a) { return a * pos(latent) - (1.0 - a) * neg(latent); };
        auto td = [&](double a, double rho) {
            const double eq = l.cgl_s + lgl(a);
            return l.fi_tilde - l.overflow_loss + rho * (st.psr + eq) - (1.0 - rho) * neg(eq);
        };
        const double base = mr2 + st.psr;
        const double guaranteed = L.r_g * base;
        const double aim = std::max(guaranteed, r_comp * base);
        double alpha, rho, credited;
        if (pi * td(0.0, L.rho_bar) >= aim) {
            l.label = alm::CreditingCase::A;
            alpha = 0.0;
            rho = L.rho_bar;
            credited = pi * td(alpha, rho);
        } else if (pi * td(1.0, L.rho_bar) >= aim) {
            l.label = alm::CreditingCase::B;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (pi * td(mid, L.rho_bar) >= aim ? hi : lo) = mid;
            }
            alpha = 0.5 * (lo + hi);
            rho = L.rho_bar;
            credited = pi * td(alpha, rho);
        } else if (pi * td(1.0, L.rho_bar) >= guaranteed) {
            l.label = alm::CreditingCase::C;
            alpha = 1.0;
            rho = L.rho_bar;
            credited = pi * td(alpha, rho);
        } else {
            l.label = alm::CreditingCase::D;
            alpha = 1.0;
            rho = 1.0;
            credited = std::max(pi * td(alpha, rho), guaranteed);
        }
        l.alpha = alpha;
        l.rho = rho;
        l.td = td(alpha, rho);
        l.lgl = lgl(alpha);
        l.r_ph = credited / base;
        l.am = (1.0 - pi) * l.td - pos(std::max(guaranteed, pi * l.td) - pi * l.td);
        l.pnl = l.am + cr_carry;
        const double psr_new = st.psr * l.r_ph + (1.0 - rho) * (st.psr + pos(l.cgl_s + l.lgl));
        st.mr = mr2 * (1.0 + l.r_ph);
        st.psr = psr_new;
        st.cr = cr_new;
        st.bv_s += l.lgl;

        // clear the margin and the reserve movement from the books
        const double cleared = l.am + l.delta_cr;
        l.externalized = cleared;
        if (cleared > 0.0) {
            const double keep = 1.0 - cleared / (st.bv_s + st.bonds.book);
            st.bv_s *= keep;
            st.shares *= keep;
            st.bonds.scale(keep);
        } else {
            const double bought = -cleared;
            st.bv_s += ws * bought;
            st.shares += ws * bought / S;
            if (wb > 0.0) {
                const double grow = 1.0 + wb * bought / st.bonds.value(mkt, t);
                const double book = st.bonds.book + wb * bought;
                st.bonds.scale(grow);
                st.bonds.book = book;
            }
        }
        st.r_ph_prev = l.r_ph;
        st.p_e = L.p_low + dsr(l.r_ph - r_comp, L);
        l.p_e = st.p_e;
        record(l, st);
        out.ledger.push_back(l);
        out.pv_pnl += mkt.discount(t) * l.pnl;
        out.pv_cof += mkt.discount(t) * l.cof;
    }
    return out;
}

Config random_config(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
    auto ui = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); };

    Config c;
    c.years = ui(3, 12);
    c.mgmt.n = ui(1, 12);
    c.mgmt.engine = u(0, 1) < 0.25 ? alm::BondEngine::proxy : alm::BondEngine::ladder;
    c.mgmt.w_s = u(0, 1) < 0.15 ? 0.0 : u(0.0, 0.4);
    c.x0 = u(-0.01, 0.05);
    c.theta = u(-0.01, 0.05);
    c.k = u(0.05, 0.6);
    const int horizon = c.years + c.mgmt.n + 1;
    for (int i = 0; i < horizon; ++i) c.phi_initial.push_back(u(-0.01, 0.02));
    c.phi_run = c.phi_initial;
    if (u(0, 1) < 0.5) {
        for (double& v : c.phi_run) v += u(-0.01, 0.01);
    }
    c.equity_multiplier = u(0, 1) < 0.3 ? 0.61 : 1.0;
    c.s0 = u(0.5, 2.0);
    c.gamma = u(-1.0, 1.0);
    auto& L = c.liability;
    L.r_g = u(0.0, 0.03);
    L.pi_pr = u(0.85, 1.0);
    L.rho_bar = u(0.1, 1.0);
    L.p_low = u(0.01, 0.15);
    L.dsr_max = u(0.05, std::min(0.5, 0.99 - L.p_low));
    L.alpha_s = u(-0.08, -0.03);
    L.beta_s = u(-0.02, 0.0);
    if (u(0, 1) < 0.5) {
        L.competitor = alm::CompetitorRule::max_with_eta;
        L.eta = u(0.5, 0.95);
    }
    c.mr0 = u(0.5, 2.0);
    return c;
}

Config bailout_config() {
    Config c;
    c.years = 6;
    c.mgmt.n = 5;
    c.mgmt.w_s = 0.9;
    c.phi_initial.assign(12, 0.0);
    c.phi_run = c.phi_initial;
    c.equity_multiplier = 0.05;
    c.liability.r_g = 0.02;
    c.liability.p_low = 0.5;
    c.liability.dsr_max = 0.45;
    return c;
}

std::vector<Mismatch> compare_with_engine(const Config& config, double tol) {
    const alm::AlmSetup setup = config.setup();
    const alm::Scenario sc = config.scenario();
    const alm::ScenarioSet set = alm::simulate(setup.factor, setup.equity, setup.years, 1, 11);
    std::vector<alm::YearLedger> engine;
    const alm::PathValue pv = alm::value_path(set, 0, setup, sc, &engine);
    const Result ref = run(config);

    std::vector<Mismatch> out;
    auto check = [&](int t, const char* name, double a, double b) {
        if (!(std::abs(a - b) <= tol * std::max(1.0, std::abs(b)))) out.push_back({t, name, a, b});
    };
    if (engine.size() != ref.ledger.size()) {
        out.push_back({0, "rows", static_cast<double>(engine.size()), static_cast<double>(ref.ledger.size())});
        return out;
    }
    for (std::size_t i = 0; i < engine.size(); ++i) {
        const alm::YearLedger& e = engine[i];
        const alm::YearLedger& r = ref.ledger[i];
        const int t = r.t;
        check(t, "t", e.t, r.t);
        check(t, "label", static_cast<char>(e.label), static_cast<char>(r.label));
        check(t, "bond_purchase", e.bond_purchase, r.bond_purchase);
#define ALM_FIELD(f) check(t, #f, e.f, r.f)
        ALM_FIELD(fi);
        ALM_FIELD(cif);
        ALM_FIELD(cof);
        ALM_FIELD(gap);
        ALM_FIELD(fi_tilde);
        ALM_FIELD(mv);
        ALM_FIELD(cgl_s);
        ALM_FIELD(cgl_b);
        ALM_FIELD(overflow_loss);
        ALM_FIELD(delta_cr);
        ALM_FIELD(lgl);
        ALM_FIELD(alpha);
        ALM_FIELD(rho);
        ALM_FIELD(td);
        ALM_FIELD(r_comp);
        ALM_FIELD(r_ph);
        ALM_FIELD(p_e);
        ALM_FIELD(am);
        ALM_FIELD(pnl);
        ALM_FIELD(externalized);
        ALM_FIELD(avg_coupon);
        ALM_FIELD(mr);
        ALM_FIELD(psr);
        ALM_FIELD(cr);
        ALM_FIELD(bv_s);
        ALM_FIELD(bv_b);
        ALM_FIELD(phi_s);
        ALM_FIELD(phi_b);
#undef ALM_FIELD
    }
    check(0, "pv_pnl", pv.pv_pnl, ref.pv_pnl);
    check(0, "pv_cof", pv.pv_cof, ref.pv_cof);
    return out;
}

}  // namespace oracle
