#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace oracle {

std::int64_t arrival_bound_by_counting(std::int64_t t, std::int64_t period) {
    std::int64_t n = 0;
    while (n * period < t) ++n;
    return n + 1;
}

std::int64_t segment_fixed_point(std::int64_t own, std::int64_t blocking, const std::vector<Interferer>& hp,
                                 std::int64_t cutoff) {
    std::int64_t h = own + blocking;
    for (;;) {
        std::int64_t next = own + blocking;
        for (const auto& i : hp) next += arrival_bound_by_counting(h, i.period) * i.wcet;
        if (next > cutoff) return -1;
        if (next == h) return h;
        h = next;
    }
}

std::int64_t cpu_only_wcrt(std::int64_t blocking, std::int64_t exec, const std::vector<Interferer>& interferers,
                           std::int64_t deadline) {
    std::int64_t r = blocking + exec;
    for (;;) {
        std::int64_t next = blocking + exec;
        for (const auto& i : interferers) next += arrival_bound_by_counting(r, i.period) * i.wcet;
        if (next > deadline) return -1;
        if (next == r) return r;
        r = next;
    }
}

std::int64_t hyperperiod(const paam::SystemConfig& sys) {
    std::int64_t h = 1;
    for (const auto& c : sys.chains) h = std::lcm(h, c.period.count());
    return h;
}

namespace {

enum class Phase { Idle, Cpu, Eps, Wait };

struct Job {
    Phase phase = Phase::Idle;
    int chain = -1;
    int cb = -1;
    int seg = -1;
    std::int64_t rem = 0;
};

struct Req {
    int exec;
    int bucket;
    int prio;
    std::int64_t rem;
    bool started;
};

struct ChainState {
    bool active = false;
    bool ready = false;
    std::int64_t release = 0;
    std::size_t next_cb = 0;
    std::deque<std::int64_t> pending;
};

}  // namespace

std::vector<std::vector<paam::InstanceRecord>> brute_force(const paam::SystemConfig& sys, Duration horizon) {
    std::int64_t g = 0;
    auto fold = [&](Duration d) {
        if (d.count() > 0) g = std::gcd(g, d.count());
    };
    for (const auto& c : sys.chains) fold(c.period);
    for (const auto& cb : sys.callbacks) {
        for (const auto& s : cb.segments) fold(s.wcet);
    }
    for (const auto& a : sys.accelerators) {
        fold(a.epsilon);
        fold(a.kappa);
    }
    fold(horizon);
    const std::int64_t end = horizon.count() / g;

    const std::size_t nx = sys.executors.size();
    std::vector<Job> jobs(nx);
    std::vector<ChainState> chains(sys.chains.size());
    std::vector<std::vector<paam::InstanceRecord>> out(sys.chains.size());
    // one request list per (accelerator, unit)
    std::vector<std::vector<std::vector<Req>>> reqs(sys.accelerators.size());
    std::vector<std::vector<int>> running(sys.accelerators.size());
    for (std::size_t a = 0; a < sys.accelerators.size(); ++a) {
        reqs[a].resize(static_cast<std::size_t>(sys.accelerators[a].units));
        running[a].assign(static_cast<std::size_t>(sys.accelerators[a].units), -1);
    }
    auto placement = [&](const Job& j) -> const paam::AccelSegment& {
        for (const auto& s : sys.accel_segments) {
            if (s.callback == j.cb && s.segment == j.seg) return s;
        }
        throw std::logic_error("segment without placement");
    };

    std::int64_t t = 0;
    auto enqueue = [&](int x) {
        auto& j = jobs[x];
        const auto& pl = placement(j);
        const auto& seg = sys.callbacks[j.cb].segments[j.seg];
        j.phase = Phase::Wait;
        reqs[pl.accelerator][pl.unit].push_back(
            {x, pl.bucket, sys.chains[j.chain].priority, seg.wcet.count() / g, false});
    };
    auto enter_segment = [&](int x) {
        auto& j = jobs[x];
        const auto& seg = sys.callbacks[j.cb].segments[j.seg];
        if (seg.kind == paam::SegmentKind::Cpu) {
            j.phase = Phase::Cpu;
            j.rem = seg.wcet.count() / g;
            return;
        }
        const auto eps = sys.accelerators[seg.accelerator].epsilon.count() / g;
        if (eps > 0) {
            j.phase = Phase::Eps;
            j.rem = eps;
        } else {
            enqueue(x);
        }
    };
    auto segment_done = [&](int x) {
        auto& j = jobs[x];
        ++j.seg;
        if (j.seg < static_cast<int>(sys.callbacks[j.cb].segments.size())) {
            enter_segment(x);
            return;
        }
        auto& cs = chains[j.chain];
        const int c = j.chain;
        j = Job{};
        ++cs.next_cb;
        if (cs.next_cb < sys.chains[c].callbacks.size()) {
            cs.ready = true;
            return;
        }
        out[c].push_back({Duration(cs.release * g), Duration(t * g)});
        if (cs.pending.empty()) {
            cs.active = false;
            return;
        }
        cs.release = cs.pending.front();
        cs.pending.pop_front();
        cs.next_cb = 0;
        cs.ready = true;
    };
    auto wants_core = [&](std::size_t x) {
        const auto& j = jobs[x];
        const bool spin = sys.executors[x].wait == paam::WaitPolicy::Spin;
        if (j.phase == Phase::Cpu) return true;
        if (j.phase == Phase::Eps || j.phase == Phase::Wait) return spin;
        for (int c : sys.executors[x].callbacks) {
            if (chains[sys.callbacks[c].chain].ready) return true;
        }
        return false;
    };

    std::vector<int> runner(static_cast<std::size_t>(sys.cores), -1);
    for (;; ++t) {
        // completions at t, until nothing changes
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t a = 0; a < reqs.size(); ++a) {
                for (std::size_t u = 0; u < reqs[a].size(); ++u) {
                    int& r = running[a][u];
                    if (r >= 0 && reqs[a][u][r].rem == 0) {
                        const int x = reqs[a][u][r].exec;
                        reqs[a][u].erase(reqs[a][u].begin() + r);
                        r = -1;
                        segment_done(x);
                        changed = true;
                    }
                }
            }
            for (std::size_t x = 0; x < nx; ++x) {
                if (jobs[x].phase == Phase::Cpu && jobs[x].rem == 0) {
                    segment_done(static_cast<int>(x));
                    changed = true;
                } else if (jobs[x].phase == Phase::Eps && jobs[x].rem == 0) {
                    enqueue(static_cast<int>(x));
                    changed = true;
                }
            }
        }
        if (t == end) break;

        for (std::size_t c = 0; c < chains.size(); ++c) {
            if (t % (sys.chains[c].period.count() / g) != 0) continue;
            auto& cs = chains[c];
            if (cs.active) {
                cs.pending.push_back(t);
            } else {
                cs.active = true;
                cs.ready = true;
                cs.release = t;
                cs.next_cb = 0;
            }
        }

        // cores: highest process priority executor that has something to do
        for (int core = 0; core < sys.cores; ++core) {
            runner[core] = -1;
            for (;;) {
                int best = -1;
                for (std::size_t x = 0; x < nx; ++x) {
                    if (sys.executors[x].core != core || !wants_core(x)) continue;
                    if (best < 0 || sys.executors[x].priority > sys.executors[best].priority) best = static_cast<int>(x);
                }
                if (best < 0 || jobs[best].phase != Phase::Idle) {
                    runner[core] = best;
                    break;
                }
                int pick = -1;
                for (int cb : sys.executors[best].callbacks) {
                    const int c = sys.callbacks[cb].chain;
                    if (chains[c].ready && (pick < 0 || sys.chains[c].priority > sys.chains[pick].priority)) pick = c;
                }
                chains[pick].ready = false;
                jobs[best] = Job{Phase::Idle, pick, sys.chains[pick].callbacks[chains[pick].next_cb], 0, 0};
                enter_segment(best);
            }
        }

        // accelerator units
        for (std::size_t a = 0; a < reqs.size(); ++a) {
            const auto kappa = sys.accelerators[a].kappa.count() / g;
            for (std::size_t u = 0; u < reqs[a].size(); ++u) {
                auto& list = reqs[a][u];
                int& r = running[a][u];
                if (list.empty()) continue;
                int top = -1;
                for (const auto& q : list) top = std::max(top, q.bucket);
                if (r >= 0 && list[r].bucket < top) {
                    list[r].rem += 2 * kappa;
                    r = -1;
                }
                if (r >= 0) continue;
                int pick = -1;
                for (std::size_t i = 0; i < list.size(); ++i) {
                    if (list[i].bucket != top) continue;
                    if (list[i].started) {
                        pick = static_cast<int>(i);
                        break;
                    }
                    if (pick < 0 || list[i].prio > list[pick].prio) pick = static_cast<int>(i);
                }
                r = pick;
                list[r].started = true;
            }
        }

        // one tick of progress
        for (int core = 0; core < sys.cores; ++core) {
            const int x = runner[core];
            if (x >= 0 && (jobs[x].phase == Phase::Cpu || jobs[x].phase == Phase::Eps)) --jobs[x].rem;
        }
        for (std::size_t x = 0; x < nx; ++x) {
            if (jobs[x].phase == Phase::Eps && sys.executors[x].wait == paam::WaitPolicy::Suspend) --jobs[x].rem;
        }
        for (std::size_t a = 0; a < reqs.size(); ++a) {
            for (std::size_t u = 0; u < reqs[a].size(); ++u) {
                if (running[a][u] >= 0) --reqs[a][u][running[a][u]].rem;
            }
        }
    }
    return out;
}

paam::SystemSpec random_small_system(std::mt19937_64& rng) {
    using paam::Duration;
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    static const int periods[] = {20, 25, 40, 50, 100, 125, 200, 250, 400, 500};

    paam::SystemSpec s;
    const int clients = pick(1, 2);
    s.cores = clients + 1;
    paam::AcceleratorSpec acc;
    acc.id = "acc";
    acc.units = pick(1, 4) == 1 ? 2 : 1;
    acc.buckets = pick(1, 3);
    acc.epsilon = Duration::ms(pick(0, 1));
    acc.kappa = Duration::ms(pick(0, 1));
    acc.server_core = clients;
    s.accelerators.push_back(acc);

    const int n = pick(1, 3);
    std::vector<int> prio(static_cast<std::size_t>(n));
    std::iota(prio.begin(), prio.end(), 1);
    for (int i = n - 1; i > 0; --i) std::swap(prio[i], prio[rng() % static_cast<std::uint64_t>(i + 1)]);

    std::vector<bool> uses_accel(static_cast<std::size_t>(n), false);
    for (int c = 0; c < n; ++c) {
        paam::ChainSpec ch;
        ch.id = "k" + std::to_string(c);
        ch.period = Duration::ms(periods[pick(0, 9)]);
        ch.deadline = ch.period;
        ch.priority = prio[c];
        const int callbacks = pick(1, 2);
        for (int i = 0; i < callbacks; ++i) {
            paam::CallbackSpec cb;
            cb.id = ch.id + "_" + std::to_string(i);
            const int shape = pick(0, 9);
            if (shape < 4) {
                cb.segments.push_back({paam::SegmentKind::Cpu, Duration::ms(pick(1, 3)), ""});
            } else if (shape < 8) {
                cb.segments.push_back({paam::SegmentKind::Cpu, Duration::ms(pick(1, 3)), ""});
                cb.segments.push_back({paam::SegmentKind::Accel, Duration::ms(pick(1, 4)), "acc"});
                cb.segments.push_back({paam::SegmentKind::Cpu, Duration::ms(pick(1, 2)), ""});
            } else {
                cb.segments.push_back({paam::SegmentKind::Accel, Duration::ms(pick(1, 4)), "acc"});
                cb.segments.push_back({paam::SegmentKind::Cpu, Duration::ms(pick(1, 2)), ""});
            }
            if (cb.segments.size() > 1) uses_accel[c] = true;
            ch.callbacks.push_back(cb.id);
            s.callbacks.push_back(std::move(cb));
        }
        s.chains.push_back(std::move(ch));
    }

    // executor of each chain; CPU-only chains may join a higher-priority one
    std::vector<int> host(static_cast<std::size_t>(n), -1);
    for (int c = 0; c < n; ++c) {
        if (uses_accel[c] || pick(0, 9) >= 3) continue;
        std::vector<int> higher;
        for (int h = 0; h < n; ++h) {
            if (prio[h] > prio[c] && (uses_accel[h] || host[h] < 0)) higher.push_back(h);
        }
        if (higher.empty()) continue;
        int h = higher[rng() % higher.size()];
        while (host[h] >= 0) h = host[h];
        host[c] = h;
    }
    for (int c = 0; c < n; ++c) {
        if (host[c] >= 0) continue;
        paam::ExecutorSpec ex;
        ex.id = "e" + std::to_string(c);
        ex.core = pick(0, clients - 1);
        ex.priority = prio[c];
        ex.wait = pick(0, 1) ? paam::WaitPolicy::Spin : paam::WaitPolicy::Suspend;
        for (int m = 0; m < n; ++m) {
            int root = m;
            while (host[root] >= 0) root = host[root];
            if (root == c) {
                for (const auto& id : s.chains[m].callbacks) ex.callbacks.push_back(id);
            }
        }
        s.executors.push_back(std::move(ex));
    }
    return s;
}

}  // namespace oracle
