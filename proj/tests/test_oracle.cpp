#include <doctest.h>

#include <set>

#include "oracle.hpp"

namespace {

std::string report(const std::vector<oracle::Mismatch>& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size() && i < 5; ++i) {
        s += "t=" + std::to_string(m[i].t) + " " + m[i].field + " engine=" + std::to_string(m[i].engine) +
             " oracle=" + std::to_string(m[i].reference) + "\n";
    }
    return s;
}

}  // namespace

TEST_CASE("engine matches the lot-based oracle on random deterministic configurations") {
    int ladders = 0, proxies = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const oracle::Config c = oracle::random_config(seed);
        (c.mgmt.engine == alm::BondEngine::proxy ? proxies : ladders)++;
        const auto mismatches = oracle::compare_with_engine(c, 1e-10);
        INFO(c.describe());
        INFO(report(mismatches));
        CHECK(mismatches.empty());
    }
    CHECK(ladders >= 20);
    CHECK(proxies >= 1);
}

TEST_CASE("engine matches the oracle through a bailout year") {
    const oracle::Config c = oracle::bailout_config();
    const oracle::Result r = oracle::run(c);
    bool bailout = false;
    for (const auto& row : r.ledger) bailout |= row.label == alm::CreditingCase::bailout;
    CHECK(bailout);
    const auto mismatches = oracle::compare_with_engine(c, 1e-10);
    INFO(report(mismatches));
    CHECK(mismatches.empty());

    oracle::Config proxy = c;
    proxy.mgmt.engine = alm::BondEngine::proxy;
    const auto proxy_mismatches = oracle::compare_with_engine(proxy, 1e-10);
    INFO(report(proxy_mismatches));
    CHECK(proxy_mismatches.empty());
}

TEST_CASE("oracle visits every crediting case") {
    std::set<char> labels;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        for (const auto& row : oracle::run(oracle::random_config(seed)).ledger) labels.insert(static_cast<char>(row.label));
    }
    for (char c : {'A', 'B', 'C', 'D', 'T'}) {
        INFO(c);
        CHECK(labels.count(c) == 1);
    }
}
