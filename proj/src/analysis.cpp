#include "paam/analysis.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "paam/config_io.hpp"

namespace paam {

const ChainAnalysis* AnalysisReport::find(std::string_view chain_id) const {
    for (const auto& c : chains) {
        if (c.id == chain_id) return &c;
    }
    return nullptr;
}

InterferenceSets build_interference_sets(const SystemConfig& sys) {
    const auto n_seg = sys.accel_segments.size();
    const auto n_chain = sys.chains.size();
    InterferenceSets sets;
    sets.hps.resize(n_seg);
    sets.lps.resize(n_seg);
    sets.hp.resize(n_chain);
    sets.lp.resize(n_chain);
    sets.hpp.resize(n_chain);
    sets.chain_segments.resize(n_chain);
    sets.chain_hps.resize(n_chain);

    for (std::size_t s = 0; s < n_seg; ++s) {
        const auto& a = sys.accel_segments[s];
        sets.chain_segments[a.chain].push_back(static_cast<int>(s));
        const int prio = sys.chains[a.chain].priority;
        for (std::size_t k = 0; k < n_seg; ++k) {
            const auto& b = sys.accel_segments[k];
            if (b.accelerator != a.accelerator || b.unit != a.unit) continue;
            const int other = sys.chains[b.chain].priority;
            if (other > prio) sets.hps[s].push_back(static_cast<int>(k));
            else if (other < prio) sets.lps[s].push_back(static_cast<int>(k));
        }
    }
    for (std::size_t c = 0; c < n_chain; ++c) {
        auto& uni = sets.chain_hps[c];
        for (int s : sets.chain_segments[c]) uni.insert(uni.end(), sets.hps[s].begin(), sets.hps[s].end());
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());

        const auto& me = sys.chains[c];
        const auto& my_exec = sys.executors[me.executor];
        for (std::size_t h = 0; h < n_chain; ++h) {
            if (h == c) continue;
            const auto& other = sys.chains[h];
            if (other.executor == me.executor) {
                (other.priority > me.priority ? sets.hp : sets.lp)[c].push_back(static_cast<int>(h));
            } else {
                const auto& ex = sys.executors[other.executor];
                if (ex.core == my_exec.core && ex.priority > my_exec.priority) sets.hpp[c].push_back(static_cast<int>(h));
            }
        }
    }
    return sets;
}

std::int64_t arrival_bound(Duration t, Duration period) {
    if (period <= Duration::zero()) throw std::invalid_argument("arrival_bound: period must be > 0");
    if (t < Duration::zero()) throw std::invalid_argument("arrival_bound: window must be >= 0");
    return ceil_div(t.count(), period.count()) + 1;
}

Duration inflated_wcet(const SystemConfig& sys, int accel_segment) {
    const auto& s = sys.accel_segments[accel_segment];
    return s.wcet + 2 * sys.accelerators[s.accelerator].kappa;
}

Duration same_bucket_blocking(const SystemConfig& sys, const InterferenceSets& sets, int accel_segment) {
    const int bucket = sys.accel_segments[accel_segment].bucket;
    Duration worst;
    for (int k : sets.lps[accel_segment]) {
        if (sys.accel_segments[k].bucket == bucket) worst = std::max(worst, inflated_wcet(sys, k));
    }
    return worst;
}

namespace {

Duration hp_demand(const SystemConfig& sys, std::span<const int> interferers, Duration window) {
    Duration total;
    for (int k : interferers) {
        const auto period = sys.chains[sys.accel_segments[k].chain].period;
        total += arrival_bound(window, period) * inflated_wcet(sys, k);
    }
    return total;
}

}  // namespace

Bound segment_handling_time(const SystemConfig& sys, const InterferenceSets& sets, int accel_segment,
                            Duration cutoff) {
    const Duration base = inflated_wcet(sys, accel_segment) + same_bucket_blocking(sys, sets, accel_segment);
    Duration h = base;
    while (true) {
        Duration next = base + hp_demand(sys, sets.hps[accel_segment], h);
        if (next > cutoff) return std::nullopt;
        if (next == h) return h;
        h = next;
    }
}

Bound chain_handling_per_segment(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                 Duration cutoff) {
    Duration total;
    for (int s : sets.chain_segments[chain]) {
        auto h = segment_handling_time(sys, sets, s, cutoff);
        if (!h) return std::nullopt;
        total += *h;
    }
    return total;
}

Duration chain_handling_per_chain(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                  Duration response_candidate) {
    Duration total;
    for (int s : sets.chain_segments[chain]) {
        total += inflated_wcet(sys, s) + same_bucket_blocking(sys, sets, s);
    }
    return total + hp_demand(sys, sets.chain_hps[chain], response_candidate);
}

Duration chain_overhead(const SystemConfig& sys, const InterferenceSets& sets, int chain) {
    Duration total;
    for (int s : sets.chain_segments[chain]) total += sys.accelerators[sys.accel_segments[s].accelerator].epsilon;
    return total;
}

HandlingBounds effective_handling(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                  Duration response_candidate, Bound per_segment) {
    HandlingBounds hb;
    hb.per_segment = per_segment;
    hb.per_chain = chain_handling_per_chain(sys, sets, chain, response_candidate);
    hb.handling = per_segment ? std::min(*per_segment, *hb.per_chain) : *hb.per_chain;
    hb.handling_star = *hb.handling + chain_overhead(sys, sets, chain);
    return hb;
}

Duration blocking_term(const SystemConfig& sys, const InterferenceSets& sets, int chain) {
    Duration worst;
    for (int l : sets.lp[chain]) {
        for (int cb : sys.chains[l].callbacks) worst = std::max(worst, sys.callbacks[cb].cpu_wcet);
    }
    return worst;
}

ChainAnalysis chain_wcrt(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                         const AnalysisReport& partial) {
    const auto& me = sys.chains[chain];
    ChainAnalysis out;
    out.chain = chain;
    out.id = me.id;
    out.priority = me.priority;
    out.criticality = me.criticality;
    out.deadline = me.deadline;
    out.analyzed = true;
    out.blocking = blocking_term(sys, sets, chain);
    out.exec_sum = me.exec_sum;

    Duration per_segment_sum;
    bool per_segment_finite = true;
    for (int s : sets.chain_segments[chain]) {
        auto h = segment_handling_time(sys, sets, s, me.deadline);
        out.segment_handling.push_back(h);
        if (h) per_segment_sum += *h;
        else per_segment_finite = false;
    }
    const Bound per_segment = per_segment_finite ? Bound(per_segment_sum) : std::nullopt;
    const Duration overhead = chain_overhead(sys, sets, chain);

    auto give_up = [&](std::string note) {
        out.handling.per_segment = per_segment;
        out.handling.per_chain = std::nullopt;
        out.handling.handling = per_segment;
        out.handling.handling_star = per_segment ? Bound(*per_segment + overhead) : std::nullopt;
        out.response = std::nullopt;
        out.schedulable = false;
        out.note = std::move(note);
        return out;
    };

    // per-instance CPU demand of interfering chains
    struct Interferer {
        Duration period;
        Duration demand;
    };
    std::vector<Interferer> interferers;
    auto dependency = [&](int h) -> const ChainAnalysis& {
        const auto& ha = partial.chains.at(static_cast<std::size_t>(h));
        if (!ha.analyzed) {
            throw std::logic_error("chain '" + me.id + "' analyzed before its interferer '" + sys.chains[h].id + "'");
        }
        return ha;
    };
    for (int h : sets.hp[chain]) {
        const auto& ha = dependency(h);
        if (!ha.response) return give_up("interferer '" + ha.id + "' is unschedulable");
        interferers.push_back({sys.chains[h].period, sys.chains[h].exec_sum + *ha.handling.handling_star});
    }
    for (int h : sets.hpp[chain]) {
        const auto& ha = dependency(h);
        if (!ha.response) return give_up("interferer '" + ha.id + "' is unschedulable");
        const bool spins = sys.executors[sys.chains[h].executor].wait == WaitPolicy::Spin;
        Duration spin = spins ? *ha.handling.handling_star : chain_overhead(sys, sets, h);
        interferers.push_back({sys.chains[h].period, sys.chains[h].exec_sum + spin});
    }

    const Duration fixed = out.blocking + out.exec_sum;
    Duration r = fixed + *effective_handling(sys, sets, chain, Duration::zero(), per_segment).handling_star;
    while (true) {
        ++out.iterations;
        HandlingBounds hb = effective_handling(sys, sets, chain, r, per_segment);
        Duration next = fixed + *hb.handling_star;
        for (const auto& i : interferers) next += arrival_bound(r, i.period) * i.demand;
        if (next > me.deadline) return give_up("response exceeds deadline");
        if (next == r) {
            out.handling = hb;
            out.response = r;
            out.schedulable = true;
            return out;
        }
        r = next;
    }
}

AnalysisReport analyze(const SystemConfig& sys) {
    const auto sets = build_interference_sets(sys);
    const int n = static_cast<int>(sys.chains.size());
    AnalysisReport report;
    report.fingerprint = fingerprint(sys);
    report.chains.resize(static_cast<std::size_t>(n));

    // Dependency order over hp and hpp (acyclic: process priority strictly
    // increases along hpp edges on one core, chain priority along hp edges).
    // Among ready chains the highest chain priority goes first.
    std::vector<int> pending(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> dependents(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        for (const auto* deps : {&sets.hp[c], &sets.hpp[c]}) {
            for (int h : *deps) {
                ++pending[c];
                dependents[h].push_back(c);
            }
        }
    }
    auto lower = [&](int a, int b) { return sys.chains[a].priority < sys.chains[b].priority; };
    std::priority_queue<int, std::vector<int>, decltype(lower)> ready(lower);
    for (int c = 0; c < n; ++c) {
        if (pending[c] == 0) ready.push(c);
    }
    while (!ready.empty()) {
        int c = ready.top();
        ready.pop();
        report.chains[c] = chain_wcrt(sys, sets, c, report);
        for (int d : dependents[c]) {
            if (--pending[d] == 0) ready.push(d);
        }
    }

    // Arrival bounds presume schedulable interferers; a failure anywhere
    // upstream invalidates the chains that depend on it.
    for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < n; ++c) {
            auto& ca = report.chains[c];
            if (!ca.response) continue;
            std::vector<int> upstream = sets.hp[c];
            upstream.insert(upstream.end(), sets.hpp[c].begin(), sets.hpp[c].end());
            for (int s : sets.chain_hps[c]) upstream.push_back(sys.accel_segments[s].chain);
            for (int h : upstream) {
                const auto& other = report.chains[h];
                if (!other.response) {
                    ca.response = std::nullopt;
                    ca.schedulable = false;
                    ca.handling.per_chain = std::nullopt;
                    ca.note = "interferer '" + other.id + "' is unschedulable";
                    changed = true;
                    break;
                }
            }
        }
    }

    report.schedulable = true;
    for (const auto& ca : report.chains) {
        if (ca.criticality == Criticality::Critical && !ca.schedulable) report.schedulable = false;
    }
    for (const auto& e : sys.end_to_end) {
        EndToEndAnalysis ea;
        ea.id = e.id;
        ea.comm_cost = e.comm_cost;
        std::vector<Bound> parts;
        for (int c : e.sub_chains) {
            ea.sub_chains.push_back(sys.chains[c].id);
            parts.push_back(report.chains[c].response);
        }
        ea.response = end_to_end_wcrt(parts, e.comm_cost);
        report.end_to_end.push_back(std::move(ea));
    }
    return report;
}

Bound end_to_end_wcrt(std::span<const Bound> sub_chain_responses, Duration comm_cost) {
    if (sub_chain_responses.empty()) throw std::invalid_argument("end_to_end_wcrt: no sub-chains");
    Duration total;
    for (const auto& r : sub_chain_responses) {
        if (!r) return std::nullopt;
        total += *r;
    }
    const auto boundaries = static_cast<std::int64_t>(sub_chain_responses.size()) - 1;
    return total + boundaries * comm_cost;
}

AdmissionResult admission_test(const SystemSpec& base, const Candidate& candidate) {
    AdmissionResult result;
    SystemConfig sys;
    try {
        sys = validate_system(merge_candidate(base, candidate));
    } catch (const ValidationError& e) {
        result.reason = e.what();
        return result;
    }
    result.report = analyze(sys);
    for (int c : sys.chains_by_priority()) {
        const auto& ca = result.report.chains[c];
        if (ca.criticality == Criticality::Critical && !ca.schedulable) {
            result.failing_chain = ca.id;
            result.reason = "chain '" + ca.id + "' fails: " + ca.note;
            return result;
        }
    }
    result.accepted = true;
    result.reason = "all critical chains meet their deadlines";
    return result;
}

}  // namespace paam
