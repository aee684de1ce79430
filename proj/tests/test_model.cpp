#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "builders.hpp"
#include "paam/model.hpp"

using namespace paam;

namespace {

SystemSpec isolated() {
    auto s = build::system(1, 1, Duration::zero(), Duration::zero());
    build::chain(s, "c", {{build::cpu(Duration::ms(2)), build::acc(Duration::ms(3))}}, Duration::ms(20), 1);
    return s;
}

std::string validation_message(const SystemSpec& s) {
    try {
        validate_system(s);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("single chain derived fields") {
    const auto sys = validate_system(isolated());
    REQUIRE(sys.chains.size() == 1);
    CHECK(sys.chains[0].accel_segments == 1);
    CHECK(sys.chains[0].exec_sum == Duration::ms(2));
    CHECK(sys.callbacks[0].cpu_wcet == Duration::ms(2));
    CHECK(sys.callbacks[0].accel_wcet == Duration::ms(3));
    CHECK(sys.callbacks[0].accel_segments == 1);
    REQUIRE(sys.accel_segments.size() == 1);
    CHECK(sys.accel_segments[0].wcet == Duration::ms(3));
    CHECK(sys.bucket_of(0, 0) == 0);
}

TEST_CASE("duplicate chain priority is rejected") {
    auto s = isolated();
    build::chain(s, "d", {{build::cpu(Duration::ms(1))}}, Duration::ms(10), 1, {.core = 0, .exec_priority = 2});
    CHECK(validation_message(s).find("duplicate chain priority") != std::string::npos);
}

TEST_CASE("critical deadline beyond period is rejected") {
    auto s = isolated();
    s.chains[0].period = Duration::ms(20);
    s.chains[0].deadline = Duration::ms(30);
    try {
        validate_system(s);
        FAIL("accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("deadline exceeds period") != std::string::npos);
        CHECK(e.path() == "/chains/0/deadline");
    }
}

TEST_CASE("other structural errors") {
    SUBCASE("executor on the server core") {
        auto s = isolated();
        s.executors[0].core = 1;
        CHECK(validation_message(s).find("accelerator server") != std::string::npos);
    }
    SUBCASE("non-alternating segments") {
        auto s = isolated();
        s.callbacks[0].segments.push_back(build::acc(Duration::ms(1)));
        CHECK(validation_message(s).find("alternate") != std::string::npos);
    }
    SUBCASE("unknown accelerator") {
        auto s = isolated();
        s.callbacks[0].segments[1].accelerator = "tpu";
        CHECK(validation_message(s).find("undeclared accelerator") != std::string::npos);
    }
    SUBCASE("zero wcet") {
        auto s = isolated();
        s.callbacks[0].segments[0].wcet = Duration::zero();
        CHECK_FALSE(validation_message(s).empty());
    }
    SUBCASE("best effort above critical") {
        auto s = isolated();
        build::chain(s, "be", {{build::cpu(Duration::ms(1))}}, Duration::ms(10), 5,
                     {.core = 0, .crit = Criticality::BestEffort, .exec_priority = 7});
        CHECK(validation_message(s).find("best-effort") != std::string::npos);
    }
    SUBCASE("duplicate process priority on a core") {
        auto s = isolated();
        build::chain(s, "d", {{build::cpu(Duration::ms(1))}}, Duration::ms(10), 2, {.core = 0, .exec_priority = 1});
        s.executors[0].priority = 1;
        CHECK(validation_message(s).find("duplicate process priority") != std::string::npos);
    }
}

TEST_CASE("bucket downsampling") {
    SUBCASE("one chain per bucket") {
        const std::vector<int> prio{6, 5, 4, 3, 2, 1};
        CHECK(assign_buckets(prio, 6) == std::vector<int>{5, 4, 3, 2, 1, 0});
    }
    SUBCASE("twelve chains into six buckets pair up") {
        std::vector<int> prio;
        for (int p = 12; p >= 1; --p) prio.push_back(p);
        CHECK(assign_buckets(prio, 6) == std::vector<int>{5, 5, 4, 4, 3, 3, 2, 2, 1, 1, 0, 0});
    }
    SUBCASE("input order does not matter") {
        const std::vector<int> prio{1, 12, 7, 3, 10, 2, 5, 11, 4, 9, 8, 6};
        const auto b = assign_buckets(prio, 6);
        for (std::size_t i = 0; i < prio.size(); ++i) CHECK(b[i] == (prio[i] - 1) / 2);
    }
    SUBCASE("single bucket") {
        const std::vector<int> prio{9, 4, 7, 1, 3};
        CHECK(assign_buckets(prio, 1) == std::vector<int>(5, 0));
    }
    SUBCASE("short final group lands lowest") {
        // groups of ceil(5/3)=2: {5,4}->2, {3,2}->1, {1}->0
        const std::vector<int> prio{5, 4, 3, 2, 1};
        CHECK(assign_buckets(prio, 3) == std::vector<int>{2, 2, 1, 1, 0});
    }
    SUBCASE("more buckets than chains keeps the top buckets") {
        const std::vector<int> prio{2, 1};
        CHECK(assign_buckets(prio, 6) == std::vector<int>{5, 4});
    }
}

TEST_CASE("worst-fit decreasing unit assignment") {
    SUBCASE("three items on two units") {
        // 0.4 -> u0; 0.3 -> u1 (empty); 0.2 -> u1 (0.3 < 0.4)
        const std::vector<double> u{0.4, 0.3, 0.2};
        CHECK(assign_accelerator_units(u, 2) == std::vector<int>{0, 1, 1});
    }
    SUBCASE("one unit") {
        const std::vector<double> u{0.1, 0.5, 0.3};
        CHECK(assign_accelerator_units(u, 1) == std::vector<int>{0, 0, 0});
    }
    SUBCASE("equal utilizations alternate") {
        const std::vector<double> u{0.2, 0.2, 0.2, 0.2};
        CHECK(assign_accelerator_units(u, 2) == std::vector<int>{0, 1, 0, 1});
    }
    SUBCASE("sorted by utilization, not input order") {
        const std::vector<double> u{0.1, 0.5, 0.3};
        // 0.5 -> u0, 0.3 -> u1, 0.1 -> u1 (0.3 < 0.5)
        CHECK(assign_accelerator_units(u, 2) == std::vector<int>{1, 0, 1});
    }
}

TEST_CASE("worst-fit replay: each item lands on a least-loaded unit") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const int units = 1 + static_cast<int>(rng() % 4);
        std::vector<double> u(1 + rng() % 9);
        for (auto& v : u) v = static_cast<double>(rng() % 10) / 10.0;
        const auto got = assign_accelerator_units(u, units);
        // replay in non-increasing order; equal items in input order
        std::vector<std::size_t> order(u.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return u[a] != u[b] ? u[a] > u[b] : a < b;
        });
        std::vector<double> load(static_cast<std::size_t>(units), 0.0);
        for (auto i : order) {
            const int unit = got[i];
            REQUIRE(unit >= 0);
            REQUIRE(unit < units);
            for (int k = 0; k < units; ++k) {
                CHECK(load[unit] <= load[k]);
                if (k < unit) CHECK(load[k] != load[unit]);
            }
            load[unit] += u[i];
        }
    }
}

TEST_CASE("validated system carries the bucket and unit maps") {
    auto s = build::system(2, 2, Duration::zero(), Duration::us(5), 2);
    build::chain(s, "hi", {{build::acc(Duration::ms(4))}}, Duration::ms(10), 3, {.core = 0});
    build::chain(s, "mid", {{build::acc(Duration::ms(3))}}, Duration::ms(10), 2, {.core = 1});
    build::chain(s, "lo", {{build::acc(Duration::ms(2))}}, Duration::ms(10), 1, {.core = 0});
    const auto sys = validate_system(s);
    // ceil(3/2)=2 per group: {3,2} -> bucket 1, {1} -> bucket 0
    CHECK(sys.bucket_of(0, 0) == 1);
    CHECK(sys.bucket_of(1, 0) == 1);
    CHECK(sys.bucket_of(2, 0) == 0);
    REQUIRE(sys.accel_segments.size() == 3);
    CHECK(sys.accel_segments[0].unit == 0);
    CHECK(sys.accel_segments[1].unit == 1);
    CHECK(sys.accel_segments[2].unit == 1);
    CHECK(sys.accelerators[0].bucket_preemptive);
    CHECK(sys.accelerators[0].kappa == Duration::us(5));
}

TEST_CASE("single-bucket accelerator charges no preemption cost") {
    auto s = build::system(1, 1, Duration::zero(), Duration::us(130));
    build::chain(s, "c", {{build::acc(Duration::ms(1))}}, Duration::ms(10), 1);
    const auto sys = validate_system(s);
    CHECK_FALSE(sys.accelerators[0].bucket_preemptive);
    CHECK(sys.accelerators[0].kappa == Duration::zero());
}

TEST_CASE("merge_candidate attaches callbacks to existing executors") {
    auto base = isolated();
    Candidate cand;
    cand.additions.callbacks.push_back({"extra_cb", {build::cpu(Duration::ms(1))}});
    cand.additions.chains.push_back({"extra", {"extra_cb"}, Duration::ms(50), Duration::ms(50), 2,
                                     Criticality::Critical});
    cand.attachments.push_back({"x_c", {"extra_cb"}});
    const auto merged = merge_candidate(base, cand);
    const auto sys = validate_system(merged);
    CHECK(sys.chains[1].executor == sys.chains[0].executor);

    cand.attachments[0].executor = "nope";
    CHECK_THROWS_AS(merge_candidate(base, cand), ValidationError);
}
