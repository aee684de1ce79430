#include <doctest.h>

#include <random>

#include "builders.hpp"
#include "oracles.hpp"
#include "paam/config_io.hpp"
#include "paam/simulator.hpp"

using namespace paam;

// The acceptance suite compares the oracle with the simulator at scale;
// these cases pin the oracle itself on hand-checkable systems.

TEST_CASE("oracle: isolated chain") {
    const auto sys = load_system(std::string(PAAM_SOURCE_DIR) + "/experiments/isolated_chain.json");
    CHECK(oracle::hyperperiod(sys) == Duration::ms(20).count());
    const auto out = oracle::brute_force(sys, Duration::ms(100));
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].size() == 5);
    for (const auto& i : out[0]) CHECK(i.response() == Duration::ms(5));
}

TEST_CASE("oracle: preemption charges 2 kappa") {
    auto s = build::system(2, 2, Duration::zero(), Duration::ms(1));
    build::chain(s, "hp", {{build::cpu(Duration::ms(2)), build::acc(Duration::ms(3))}}, Duration::ms(100), 2,
                 {.core = 0});
    build::chain(s, "lp", {{build::acc(Duration::ms(10))}}, Duration::ms(100), 1, {.core = 1});
    const auto out = oracle::brute_force(validate_system(s), Duration::ms(100));
    CHECK(out[0].at(0).response() == Duration::ms(5));
    CHECK(out[1].at(0).response() == Duration::ms(15));
}

TEST_CASE("oracle: random systems are valid and agree with the simulator") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10; ++i) {
        const auto sys = validate_system(oracle::random_small_system(rng));
        CHECK(sys.chains.size() <= 3);
        const auto h = oracle::hyperperiod(sys);
        CHECK(Duration::s(2).count() % h == 0);
        const auto expect = oracle::brute_force(sys, Duration(h));
        SimOptions o;
        o.duration = Duration(h);
        o.record_trace = false;
        const auto got = run_simulation(sys, o);
        for (std::size_t c = 0; c < sys.chains.size(); ++c) {
            const auto& a = expect[c];
            const auto& b = got.stats.chains[c].instances;
            REQUIRE(a.size() == b.size());
            for (std::size_t k = 0; k < a.size(); ++k) {
                CHECK(a[k].release == b[k].release);
                CHECK(a[k].finish == b[k].finish);
            }
        }
    }
}
