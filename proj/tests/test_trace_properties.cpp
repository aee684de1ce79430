#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "paam/analysis.hpp"
#include "paam/simulator.hpp"
#include "paam/workload.hpp"

using namespace paam;

namespace {

struct Case {
    SystemConfig sys;
    SimOptions opt;
};

std::vector<Case> property_cases() {
    std::vector<Case> out;
    std::mt19937_64 rng(77);
    for (int i = 0; i < 24; ++i) {
        GenParams p;
        p.chains = 3 + i % 4;
        p.callbacks_per_chain = 1 + i % 3;
        p.utilization = 0.04 + 0.02 * (i % 5);
        p.accelerator_units = 1 + i % 2;
        p.buckets = i % 3 == 0 ? 1 : 6;
        p.wait = i % 4 == 3 ? WaitPolicy::Suspend : WaitPolicy::Spin;
        p.period_max = Duration::ms(200);
        p.seed = 1000 + static_cast<std::uint64_t>(i);
        Case c{generate_chainset(p), {}};
        c.opt.duration = Duration::s(2);
        c.opt.seed = static_cast<std::uint64_t>(i);
        c.opt.jitter_permille = i % 2 == 0 ? 0 : 400;
        c.opt.record_core_timeline = true;
        out.push_back(std::move(c));
    }
    for (int i = 0; i < 16; ++i) {
        Case c{validate_system(oracle::random_small_system(rng)), {}};
        c.opt.duration = Duration::s(2);
        c.opt.record_core_timeline = true;
        out.push_back(std::move(c));
    }
    return out;
}

using SegKey = std::tuple<int, int, int>;  // chain, callback, segment

SegKey key(const SimEvent& e) { return {e.chain, e.callback, e.segment}; }

}  // namespace

TEST_CASE("identical inputs give identical traces") {
    for (auto& c : property_cases()) {
        for (auto mode : {SimMode::Paam, SimMode::FifoDirect}) {
            c.opt.mode = mode;
            const auto a = run_simulation(c.sys, c.opt);
            const auto b = run_simulation(c.sys, c.opt);
            CHECK(a.trace == b.trace);
            CHECK(stats_to_csv(a.stats) == stats_to_csv(b.stats));
            CHECK(unit_stats_to_csv(a.stats) == unit_stats_to_csv(b.stats));
        }
    }
}

TEST_CASE("every submitted request completes at most once, busy time is conserved") {
    int exact = 0;
    for (auto& c : property_cases()) {
        c.opt.jitter_permille = 0;
        const auto r = run_simulation(c.sys, c.opt);
        std::map<SegKey, int> outstanding;
        std::map<SegKey, int> preempted;
        std::map<std::pair<int, int>, Duration> done_work, open_work;
        std::map<std::pair<int, int>, std::set<SegKey>> running;
        for (const auto& e : r.trace) {
            const auto k = key(e);
            if (e.kind == EventKind::ReqSubmit) {
                CHECK(outstanding[k] == 0);
                ++outstanding[k];
                preempted[k] = 0;
            } else if (e.kind == EventKind::AccPreempt) {
                ++preempted[k];
            } else if (e.kind == EventKind::AccStart) {
                running[{e.accelerator, e.unit}].insert(k);
            } else if (e.kind == EventKind::AccDone) {
                REQUIRE(outstanding[k] == 1);
                --outstanding[k];
                running[{e.accelerator, e.unit}].erase(k);
                const auto& seg = c.sys.callbacks[e.callback].segments[e.segment];
                done_work[{e.accelerator, e.unit}] +=
                    seg.wcet + 2 * preempted[k] * c.sys.accelerators[e.accelerator].kappa;
            }
        }
        for (const auto& [unit, ks] : running) {
            for (const auto& k : ks) {
                const auto& seg = c.sys.callbacks[std::get<1>(k)].segments[std::get<2>(k)];
                open_work[unit] += seg.wcet + 2 * (preempted[k] + 1) * c.sys.accelerators[unit.first].kappa;
            }
        }
        for (const auto& u : r.stats.units) {
            const auto id = std::make_pair(c.sys.find_accelerator(u.accelerator), u.unit);
            CHECK(u.busy_time == u.executed_time);
            CHECK(u.busy_time >= done_work[id]);
            CHECK(u.busy_time <= done_work[id] + open_work[id]);
            if (open_work[id] == Duration::zero()) {
                CHECK(u.busy_time == done_work[id]);
                ++exact;
            }
        }
    }
    CHECK(exact > 5);
}

TEST_CASE("accelerator starts per segment respect the arrival bound") {
    for (auto& c : property_cases()) {
        const auto report = analyze(c.sys);
        const auto r = run_simulation(c.sys, c.opt);
        std::map<SegKey, std::vector<Instant>> starts;
        for (const auto& e : r.trace) {
            if (e.kind == EventKind::AccStart) starts[key(e)].push_back(e.time);
        }
        for (const auto& [k, ts] : starts) {
            const int chain = std::get<0>(k);
            if (!report.chains[chain].schedulable) continue;
            const auto period = c.sys.chains[chain].period;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                for (std::size_t j = i; j < ts.size(); ++j) {
                    const auto n = static_cast<std::int64_t>(j - i + 1);
                    CHECK(n <= arrival_bound(ts[j] - ts[i], period));
                }
            }
        }
    }
}

TEST_CASE("accelerator dispatch follows bucket and chain priority") {
    for (auto& c : property_cases()) {
        const auto r = run_simulation(c.sys, c.opt);
        struct Waiting {
            int bucket;
            int priority;
            bool preempted;
        };
        std::map<std::pair<int, int>, std::map<SegKey, Waiting>> waiting;
        for (const auto& e : r.trace) {
            auto& w = waiting[{e.accelerator, e.unit}];
            const int prio = e.chain >= 0 ? c.sys.chains[e.chain].priority : 0;
            switch (e.kind) {
                case EventKind::ReqEnqueue: w[key(e)] = {e.bucket, prio, false}; break;
                case EventKind::AccPreempt:
                    CHECK(e.preempter_bucket > e.bucket);
                    CHECK(e.preempter_chain != e.chain);
                    w[key(e)] = {e.bucket, prio, true};
                    break;
                case EventKind::AccResume: w.erase(key(e)); break;
                case EventKind::AccStart: {
                    w.erase(key(e));
                    for (const auto& [other, q] : w) {
                        CAPTURE(e.time);
                        CHECK_FALSE(q.bucket > e.bucket);
                        if (q.bucket == e.bucket) {
                            CHECK_FALSE(q.preempted);
                            CHECK_FALSE(q.priority > prio);
                        }
                    }
                    break;
                }
                default: break;
            }
        }
    }
}

TEST_CASE("each preemption is credited to a distinct higher-bucket start") {
    int preemptions = 0;
    for (auto& c : property_cases()) {
        const auto r = run_simulation(c.sys, c.opt);
        std::set<std::size_t> used;
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            const auto& p = r.trace[i];
            if (p.kind != EventKind::AccPreempt) continue;
            ++preemptions;
            bool matched = false;
            for (std::size_t j = i + 1; j < r.trace.size() && r.trace[j].time == p.time; ++j) {
                const auto& s = r.trace[j];
                if (s.kind == EventKind::AccStart && s.accelerator == p.accelerator && s.unit == p.unit &&
                    s.chain == p.preempter_chain && s.bucket == p.preempter_bucket && !used.count(j)) {
                    used.insert(j);
                    matched = true;
                    break;
                }
            }
            CHECK(matched);
        }
    }
    CHECK(preemptions > 0);
}

TEST_CASE("one executor per core at a time, never on a server core") {
    for (auto& c : property_cases()) {
        const auto r = run_simulation(c.sys, c.opt);
        std::set<int> server_cores;
        for (const auto& a : c.sys.accelerators) server_cores.insert(a.server_core);
        std::map<int, std::vector<CoreSlice>> per_core;
        for (const auto& s : r.core_timeline) {
            CHECK(s.start < s.end);
            CHECK(server_cores.count(s.core) == 0);
            CHECK(c.sys.executors[s.executor].core == s.core);
            per_core[s.core].push_back(s);
        }
        for (auto& [core, slices] : per_core) {
            std::sort(slices.begin(), slices.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
            for (std::size_t i = 1; i < slices.size(); ++i) CHECK(slices[i - 1].end <= slices[i].start);
        }
        CHECK_FALSE(r.core_timeline.empty());
    }
}

TEST_CASE("critical chains of schedulable systems stay within their bounds") {
    int checked = 0;
    for (auto& c : property_cases()) {
        const auto report = analyze(c.sys);
        if (!report.schedulable) continue;
        const auto r = run_simulation(c.sys, c.opt);
        const auto conf = check_against_bounds(r.stats, report);
        CHECK(conf.pass);
        ++checked;
    }
    CHECK(checked > 10);
}
