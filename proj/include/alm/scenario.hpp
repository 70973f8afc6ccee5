#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alm/rates.hpp"

namespace alm {

struct EquityParams {
    double s0 = 1.0;
    double sigma_s = 0.1;
    // loading of the rate driver on the equity Brownian motion
    double gamma = 0.0;

    void validate() const;
    friend bool operator==(const EquityParams&, const EquityParams&) = default;
};

// Exact Gaussian law of one annual step of (W, x, int x) for the OU factor
// driven by gamma W + sqrt(1 - gamma^2) Z. Increments are ordered
// (dW, dx noise, dI noise); chol is the lower Cholesky factor, row-major.
struct AnnualTransition {
    double decay = 0.0;      // e^{-k dt}
    double g = 0.0;          // g_k(dt)
    std::array<double, 9> covariance{};
    std::array<double, 9> chol{};

    static AnnualTransition make(const VasicekParams& factor, double gamma, double dt = 1.0);
};

// N paths of (x_t, I_t = int_0^t x, W_t) on t = 0..T. Path i is a pure
// function of (seed, i).
class ScenarioSet {
public:
    static constexpr const char* generator_id = "mt19937_64/seed_seq(seed,path)/std::normal_distribution";

    ScenarioSet(int years, std::size_t paths, std::uint64_t seed);

    int years() const { return years_; }
    std::size_t paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }

    double x(std::size_t path, int t) const { return data_[index(path, t)]; }
    double integral(std::size_t path, int t) const { return data_[index(path, t) + 1]; }
    double brownian(std::size_t path, int t) const { return data_[index(path, t) + 2]; }

    // Raw (x, I, W) triplets for one path, t = 0..T.
    std::span<double> path_records(std::size_t path);
    std::span<const double> path_records(std::size_t path) const;

private:
    std::size_t index(std::size_t path, int t) const {
        return (path * static_cast<std::size_t>(years_ + 1) + static_cast<std::size_t>(t)) * 3;
    }

    int years_;
    std::size_t paths_;
    std::uint64_t seed_;
    std::vector<double> data_;
};

// Fills one path (T + 1 triplets) from (seed, index).
void simulate_path(const VasicekParams& factor, const AnnualTransition& step, std::uint64_t seed,
                   std::uint64_t index, std::span<double> records);

ScenarioSet simulate(const VasicekParams& factor, const EquityParams& equity, int years, std::size_t paths,
                     std::uint64_t seed, int threads = 1);

// Market quantities of one path under a given shift.
struct DerivedPath {
    std::vector<double> short_rate;  // r_t = x_t + phi(t)
    std::vector<double> discount;    // exp(-int_0^t r)
    std::vector<double> equity;      // S_t
};

// Rebuilds r, D and S from the stored noise with shift `shift`. The equity
// multiplier (1 + s_eq for an equity shock) applies to every t >= 1.
void derive_into(const ScenarioSet& set, std::size_t path, const ShiftFunction& shift, const EquityParams& equity,
                 double equity_multiplier, DerivedPath& out);
DerivedPath derive(const ScenarioSet& set, std::size_t path, const ShiftFunction& shift, const EquityParams& equity,
                   double equity_multiplier = 1.0);

// CSV "path,t,x,I,W" for the first max_paths paths.
void write_paths_csv(const ScenarioSet& set, std::ostream& out, std::size_t max_paths);

}  // namespace alm
