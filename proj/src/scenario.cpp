#include "alm/scenario.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "alm/parallel.hpp"

namespace alm {

void EquityParams::validate() const {
    if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be > 0");
    if (!(sigma_s >= 0.0)) throw std::invalid_argument("sigma_s must be >= 0");
    if (!(std::abs(gamma) <= 1.0)) throw std::invalid_argument("gamma must lie in [-1, 1]");
}

namespace {

// Lower Cholesky factor of a 3x3 positive semi-definite matrix; columns
// with a vanishing pivot are set to zero.
std::array<double, 9> psd_cholesky(const std::array<double, 9>& a) {
    std::array<double, 9> l{};
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, a[i * 3 + i]);
    const double tiny = 1e-14 * std::max(scale, 1e-300);
    for (int j = 0; j < 3; ++j) {
        double d = a[j * 3 + j];
        for (int p = 0; p < j; ++p) d -= l[j * 3 + p] * l[j * 3 + p];
        if (d <= tiny) continue;
        const double ljj = std::sqrt(d);
        l[j * 3 + j] = ljj;
        for (int i = j + 1; i < 3; ++i) {
            double s = a[i * 3 + j];
            for (int p = 0; p < j; ++p) s -= l[i * 3 + p] * l[j * 3 + p];
            l[i * 3 + j] = s / ljj;
        }
    }
    return l;
}

constexpr std::size_t chunk_paths = 1024;

}  // namespace

AnnualTransition AnnualTransition::make(const VasicekParams& factor, double gamma, double dt) {
    factor.validate();
    const double k = factor.k;
    const double sig = factor.sigma_r;
    AnnualTransition tr;
    tr.decay = std::exp(-k * dt);
    tr.g = g_k(k, dt);
    auto& c = tr.covariance;
    c[0] = dt;
    c[1] = c[3] = gamma * sig * tr.g;
    c[2] = c[6] = gamma * sig * ou_integrated_kernel(k, dt);
    c[4] = sig * sig * ou_factor_variance(k, dt);
    c[5] = c[7] = sig * sig * ou_cross_covariance(k, dt);
    c[8] = sig * sig * ou_integral_variance(k, dt);
    tr.chol = psd_cholesky(c);
    return tr;
}

ScenarioSet::ScenarioSet(int years, std::size_t paths, std::uint64_t seed)
    : years_(years), paths_(paths), seed_(seed) {
    if (years < 1) throw std::invalid_argument("scenario set: horizon T must be >= 1");
    if (paths < 1) throw std::invalid_argument("scenario set: path count N must be >= 1");
    data_.assign(paths * static_cast<std::size_t>(years + 1) * 3, 0.0);
}

std::span<double> ScenarioSet::path_records(std::size_t path) {
    return {data_.data() + index(path, 0), static_cast<std::size_t>(years_ + 1) * 3};
}

std::span<const double> ScenarioSet::path_records(std::size_t path) const {
    return {data_.data() + index(path, 0), static_cast<std::size_t>(years_ + 1) * 3};
}

void simulate_path(const VasicekParams& factor, const AnnualTransition& step, std::uint64_t seed,
                   std::uint64_t index, std::span<double> records) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal;
    const auto& l = step.chol;
    double x = factor.x0;
    double integral = 0.0;
    double w = 0.0;
    records[0] = x;
    records[1] = integral;
    records[2] = w;
    const std::size_t years = records.size() / 3 - 1;
    for (std::size_t t = 1; t <= years; ++t) {
        const double z1 = normal(gen);
        const double z2 = normal(gen);
        const double z3 = normal(gen);
        const double dw = l[0] * z1;
        const double ex = l[3] * z1 + l[4] * z2;
        const double ei = l[6] * z1 + l[7] * z2 + l[8] * z3;
        integral += factor.theta * 1.0 + (x - factor.theta) * step.g + ei;
        x = factor.theta + (x - factor.theta) * step.decay + ex;
        w += dw;
        records[3 * t] = x;
        records[3 * t + 1] = integral;
        records[3 * t + 2] = w;
    }
}

ScenarioSet simulate(const VasicekParams& factor, const EquityParams& equity, int years, std::size_t paths,
                     std::uint64_t seed, int threads) {
    equity.validate();
    ScenarioSet set(years, paths, seed);
    const AnnualTransition step = AnnualTransition::make(factor, equity.gamma);
    const std::size_t chunks = (paths + chunk_paths - 1) / chunk_paths;
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        const std::size_t end = std::min(paths, (c + 1) * chunk_paths);
        for (std::size_t i = c * chunk_paths; i < end; ++i) simulate_path(factor, step, seed, i, set.path_records(i));
    });
    return set;
}

void derive_into(const ScenarioSet& set, std::size_t path, const ShiftFunction& shift, const EquityParams& equity,
                 double equity_multiplier, DerivedPath& out) {
    const int years = set.years();
    if (shift.horizon() < years)
        throw std::invalid_argument("derive: shift horizon " + std::to_string(shift.horizon()) +
                                    " shorter than scenario horizon " + std::to_string(years));
    out.short_rate.resize(static_cast<std::size_t>(years) + 1);
    out.discount.resize(static_cast<std::size_t>(years) + 1);
    out.equity.resize(static_cast<std::size_t>(years) + 1);
    const double var_rate = equity.sigma_s * equity.sigma_s * 0.5;
    for (int t = 0; t <= years; ++t) {
        const double x = set.x(path, t);
        const double log_acc = set.integral(path, t) + shift.integral(t);
        out.short_rate[t] = x + shift.at(t);
        out.discount[t] = std::exp(-log_acc);
        double s = equity.s0 * std::exp(log_acc + equity.sigma_s * set.brownian(path, t) - var_rate * t);
        if (t >= 1) s *= equity_multiplier;
        out.equity[t] = s;
    }
}

DerivedPath derive(const ScenarioSet& set, std::size_t path, const ShiftFunction& shift, const EquityParams& equity,
                   double equity_multiplier) {
    DerivedPath out;
    derive_into(set, path, shift, equity, equity_multiplier, out);
    return out;
}

void write_paths_csv(const ScenarioSet& set, std::ostream& out, std::size_t max_paths) {
    out << "path,t,x,I,W\n";
    const auto old_precision = out.precision(17);
    const std::size_t n = std::min(max_paths, set.paths());
    for (std::size_t p = 0; p < n; ++p) {
        for (int t = 0; t <= set.years(); ++t) {
            out << p << ',' << t << ',' << set.x(p, t) << ',' << set.integral(p, t) << ',' << set.brownian(p, t)
                << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace alm
