#include "paam/model.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace paam {

namespace {

std::string at(std::string_view section, std::size_t index, std::string_view field = {}) {
    std::string p = "/" + std::string(section) + "/" + std::to_string(index);
    if (!field.empty()) p += "/" + std::string(field);
    return p;
}

template <typename T>
std::unordered_map<std::string, int> index_ids(const std::vector<T>& items, std::string_view section) {
    std::unordered_map<std::string, int> ids;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].id.empty()) {
            throw ValidationError(at(section, i, "id"), "empty id in " + std::string(section));
        }
        if (!ids.emplace(items[i].id, static_cast<int>(i)).second) {
            throw ValidationError(at(section, i, "id"),
                                  "duplicate id '" + items[i].id + "' in " + std::string(section));
        }
    }
    return ids;
}

template <typename T>
int find_by_id(const std::vector<T>& items, std::string_view id) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

int SystemConfig::find_chain(std::string_view id) const { return find_by_id(chains, id); }
int SystemConfig::find_callback(std::string_view id) const { return find_by_id(callbacks, id); }
int SystemConfig::find_executor(std::string_view id) const { return find_by_id(executors, id); }
int SystemConfig::find_accelerator(std::string_view id) const { return find_by_id(accelerators, id); }

std::vector<int> SystemConfig::chains_by_priority() const {
    std::vector<int> order(chains.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return chains[a].priority > chains[b].priority; });
    return order;
}

std::vector<int> assign_buckets(std::span<const int> priorities, int buckets) {
    const int m = static_cast<int>(priorities.size());
    std::vector<int> result(priorities.size(), 0);
    if (m == 0 || buckets <= 1) return result;
    std::vector<int> order(priorities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return priorities[a] > priorities[b]; });
    const int group = static_cast<int>(ceil_div(m, buckets));
    for (int rank = 0; rank < m; ++rank) {
        result[order[rank]] = buckets - 1 - rank / group;
    }
    return result;
}

std::vector<int> assign_accelerator_units(std::span<const double> utilizations, int units) {
    std::vector<int> result(utilizations.size(), 0);
    if (units <= 1) return result;
    std::vector<int> order(utilizations.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return utilizations[a] > utilizations[b]; });
    std::vector<double> load(static_cast<std::size_t>(units), 0.0);
    for (int item : order) {
        int best = 0;
        for (int u = 1; u < units; ++u) {
            if (load[u] < load[best]) best = u;
        }
        load[best] += utilizations[item];
        result[item] = best;
    }
    return result;
}

SystemConfig validate_system(const SystemSpec& spec) {
    SystemConfig sys;
    sys.source = spec;
    if (spec.cores < 1) throw ValidationError("/cores", "cores must be >= 1");
    sys.cores = spec.cores;

    // accelerators
    auto accel_ids = index_ids(spec.accelerators, "accelerators");
    std::set<int> server_cores;
    for (std::size_t i = 0; i < spec.accelerators.size(); ++i) {
        const auto& a = spec.accelerators[i];
        if (a.units < 1) throw ValidationError(at("accelerators", i, "units"), "units must be >= 1");
        if (a.buckets < 1) throw ValidationError(at("accelerators", i, "buckets"), "buckets must be >= 1");
        if (a.epsilon < Duration::zero()) throw ValidationError(at("accelerators", i, "epsilon"), "epsilon must be >= 0");
        if (a.kappa < Duration::zero()) throw ValidationError(at("accelerators", i, "kappa"), "kappa must be >= 0");
        if (a.server_core < 0 || a.server_core >= spec.cores) {
            throw ValidationError(at("accelerators", i, "server_core"), "server_core out of range");
        }
        if (a.slowdown_permille < 1000) {
            throw ValidationError(at("accelerators", i, "slowdown_permille"), "slowdown_permille must be >= 1000");
        }
        server_cores.insert(a.server_core);
        Accelerator acc;
        acc.id = a.id;
        acc.units = a.units;
        acc.buckets = a.buckets;
        acc.bucket_preemptive = a.buckets > 1;
        acc.epsilon = a.epsilon;
        // preemption cost cannot occur without bucket preemption
        acc.kappa = acc.bucket_preemptive ? a.kappa : Duration::zero();
        acc.server_core = a.server_core;
        acc.concurrent_lowest_bucket = a.concurrent_lowest_bucket;
        acc.slowdown_permille = a.slowdown_permille;
        sys.accelerators.push_back(acc);
    }

    // callbacks
    auto cb_ids = index_ids(spec.callbacks, "callbacks");
    for (std::size_t i = 0; i < spec.callbacks.size(); ++i) {
        const auto& c = spec.callbacks[i];
        if (c.segments.empty()) throw ValidationError(at("callbacks", i, "segments"), "callback '" + c.id + "' has no segments");
        Callback cb;
        cb.id = c.id;
        for (std::size_t j = 0; j < c.segments.size(); ++j) {
            const auto& s = c.segments[j];
            std::string p = at("callbacks", i, "segments/" + std::to_string(j));
            if (s.wcet <= Duration::zero()) throw ValidationError(p, "segment wcet must be > 0");
            if (j > 0 && c.segments[j - 1].kind == s.kind) {
                throw ValidationError(p, "segments of callback '" + c.id + "' must alternate CPU/ACCEL");
            }
            Segment seg{s.kind, s.wcet, -1};
            if (s.kind == SegmentKind::Accel) {
                auto it = accel_ids.find(s.accelerator);
                if (it == accel_ids.end()) {
                    throw ValidationError(p, "ACCEL segment references undeclared accelerator '" + s.accelerator + "'");
                }
                seg.accelerator = it->second;
                cb.accel_wcet += s.wcet;
                cb.accel_segments += 1;
                cb.accelerators.push_back(it->second);
            } else {
                if (!s.accelerator.empty()) throw ValidationError(p, "CPU segment must not name an accelerator");
                cb.cpu_wcet += s.wcet;
            }
            cb.segments.push_back(seg);
        }
        std::sort(cb.accelerators.begin(), cb.accelerators.end());
        cb.accelerators.erase(std::unique(cb.accelerators.begin(), cb.accelerators.end()), cb.accelerators.end());
        sys.callbacks.push_back(std::move(cb));
    }

    // chains
    auto chain_ids = index_ids(spec.chains, "chains");
    std::map<int, int> priority_owner;
    for (std::size_t i = 0; i < spec.chains.size(); ++i) {
        const auto& c = spec.chains[i];
        if (c.callbacks.empty()) throw ValidationError(at("chains", i, "callbacks"), "chain '" + c.id + "' has no callbacks");
        if (c.period <= Duration::zero()) throw ValidationError(at("chains", i, "period"), "period must be > 0");
        if (c.deadline <= Duration::zero()) throw ValidationError(at("chains", i, "deadline"), "deadline must be > 0");
        if (c.criticality == Criticality::Critical && c.deadline > c.period) {
            throw ValidationError(at("chains", i, "deadline"), "deadline exceeds period for chain '" + c.id + "'");
        }
        if (c.priority <= 0) throw ValidationError(at("chains", i, "priority"), "chain priority must be a positive integer");
        if (!priority_owner.emplace(c.priority, static_cast<int>(i)).second) {
            throw ValidationError(at("chains", i, "priority"),
                                  "duplicate chain priority " + std::to_string(c.priority) + " ('" + c.id + "')");
        }
        Chain ch;
        ch.id = c.id;
        ch.period = c.period;
        ch.deadline = c.deadline;
        ch.priority = c.priority;
        ch.criticality = c.criticality;
        for (std::size_t j = 0; j < c.callbacks.size(); ++j) {
            auto it = cb_ids.find(c.callbacks[j]);
            std::string p = at("chains", i, "callbacks/" + std::to_string(j));
            if (it == cb_ids.end()) throw ValidationError(p, "chain '" + c.id + "' references unknown callback '" + c.callbacks[j] + "'");
            auto& cb = sys.callbacks[it->second];
            if (cb.chain != -1) {
                throw ValidationError(p, "callback '" + cb.id + "' belongs to more than one chain");
            }
            cb.chain = static_cast<int>(i);
            ch.callbacks.push_back(it->second);
            ch.accel_segments += cb.accel_segments;
            ch.exec_sum += cb.cpu_wcet;
        }
        sys.chains.push_back(std::move(ch));
    }
    for (std::size_t i = 0; i < sys.callbacks.size(); ++i) {
        if (sys.callbacks[i].chain == -1) {
            throw ValidationError(at("callbacks", i), "callback '" + sys.callbacks[i].id + "' is not part of any chain");
        }
    }
    // criticality-as-priority: every best-effort chain ranks below every critical chain
    {
        int min_critical = std::numeric_limits<int>::max();
        for (const auto& c : sys.chains) {
            if (c.criticality == Criticality::Critical) min_critical = std::min(min_critical, c.priority);
        }
        for (std::size_t i = 0; i < sys.chains.size(); ++i) {
            const auto& c = sys.chains[i];
            if (c.criticality == Criticality::BestEffort && c.priority > min_critical) {
                throw ValidationError(at("chains", i, "priority"),
                                      "best-effort chain '" + c.id + "' must have a lower priority than every critical chain");
            }
        }
    }

    // executors
    auto exec_ids = index_ids(spec.executors, "executors");
    (void)exec_ids;
    std::set<std::pair<int, int>> core_priorities;
    for (std::size_t i = 0; i < spec.executors.size(); ++i) {
        const auto& e = spec.executors[i];
        if (e.core < 0 || e.core >= spec.cores) throw ValidationError(at("executors", i, "core"), "executor core out of range");
        if (server_cores.contains(e.core)) {
            throw ValidationError(at("executors", i, "core"),
                                  "executor '" + e.id + "' shares core " + std::to_string(e.core) + " with an accelerator server");
        }
        if (!core_priorities.emplace(e.core, e.priority).second) {
            throw ValidationError(at("executors", i, "priority"),
                                  "duplicate process priority " + std::to_string(e.priority) + " on core " + std::to_string(e.core));
        }
        Executor ex;
        ex.id = e.id;
        ex.core = e.core;
        ex.priority = e.priority;
        ex.wait = e.wait;
        for (std::size_t j = 0; j < e.callbacks.size(); ++j) {
            std::string p = at("executors", i, "callbacks/" + std::to_string(j));
            auto it = cb_ids.find(e.callbacks[j]);
            if (it == cb_ids.end()) throw ValidationError(p, "executor '" + e.id + "' references unknown callback '" + e.callbacks[j] + "'");
            auto& cb = sys.callbacks[it->second];
            if (cb.executor != -1) throw ValidationError(p, "callback '" + cb.id + "' assigned to more than one executor");
            cb.executor = static_cast<int>(i);
            ex.callbacks.push_back(it->second);
        }
        sys.executors.push_back(std::move(ex));
    }
    for (std::size_t i = 0; i < sys.callbacks.size(); ++i) {
        if (sys.callbacks[i].executor == -1) {
            throw ValidationError(at("callbacks", i), "callback '" + sys.callbacks[i].id + "' is not assigned to an executor");
        }
    }
    for (std::size_t i = 0; i < sys.chains.size(); ++i) {
        auto& ch = sys.chains[i];
        ch.executor = sys.callbacks[ch.callbacks.front()].executor;
        for (int cb : ch.callbacks) {
            if (sys.callbacks[cb].executor != ch.executor) {
                throw ValidationError(at("chains", i, "callbacks"),
                                      "chain '" + ch.id + "' spans several executors; model it as sub-chains joined by an end_to_end entry");
            }
        }
    }

    // end-to-end compositions
    auto e2e_ids = index_ids(spec.end_to_end, "end_to_end");
    (void)e2e_ids;
    for (std::size_t i = 0; i < spec.end_to_end.size(); ++i) {
        const auto& e = spec.end_to_end[i];
        if (e.sub_chains.empty()) throw ValidationError(at("end_to_end", i, "sub_chains"), "end_to_end '" + e.id + "' has no sub-chains");
        if (e.comm_cost < Duration::zero()) throw ValidationError(at("end_to_end", i, "comm_cost"), "comm_cost must be >= 0");
        EndToEnd out{e.id, {}, e.comm_cost};
        for (std::size_t j = 0; j < e.sub_chains.size(); ++j) {
            auto it = chain_ids.find(e.sub_chains[j]);
            if (it == chain_ids.end()) {
                throw ValidationError(at("end_to_end", i, "sub_chains/" + std::to_string(j)), "unknown chain '" + e.sub_chains[j] + "'");
            }
            out.sub_chains.push_back(it->second);
        }
        sys.end_to_end.push_back(std::move(out));
    }

    // bucket map: downsample the priorities of the chains using each accelerator
    const int n_acc = static_cast<int>(sys.accelerators.size());
    sys.bucket_map.assign(sys.chains.size(), std::vector<int>(static_cast<std::size_t>(n_acc), -1));
    for (int a = 0; a < n_acc; ++a) {
        std::vector<int> users;
        std::vector<int> prios;
        for (std::size_t c = 0; c < sys.chains.size(); ++c) {
            bool uses = false;
            for (int cb : sys.chains[c].callbacks) {
                const auto& r = sys.callbacks[cb].accelerators;
                uses = uses || std::binary_search(r.begin(), r.end(), a);
            }
            if (uses) {
                users.push_back(static_cast<int>(c));
                prios.push_back(sys.chains[c].priority);
            }
        }
        auto buckets = assign_buckets(prios, sys.accelerators[a].buckets);
        for (std::size_t k = 0; k < users.size(); ++k) sys.bucket_map[users[k]][a] = buckets[k];
    }

    // unit map: worst-fit decreasing over callbacks (all segments of a callback share a unit)
    std::vector<std::vector<int>> callback_unit(sys.callbacks.size(), std::vector<int>(static_cast<std::size_t>(n_acc), 0));
    for (int a = 0; a < n_acc; ++a) {
        std::vector<int> items;
        std::vector<double> utils;
        for (std::size_t cb = 0; cb < sys.callbacks.size(); ++cb) {
            const auto& callback = sys.callbacks[cb];
            Duration on_a;
            for (const auto& s : callback.segments) {
                if (s.accelerator == a) on_a += s.wcet;
            }
            if (on_a == Duration::zero()) continue;
            items.push_back(static_cast<int>(cb));
            utils.push_back(static_cast<double>(on_a.count()) /
                            static_cast<double>(sys.chains[callback.chain].period.count()));
        }
        auto units = assign_accelerator_units(utils, sys.accelerators[a].units);
        for (std::size_t k = 0; k < items.size(); ++k) callback_unit[items[k]][a] = units[k];
    }

    for (std::size_t c = 0; c < sys.chains.size(); ++c) {
        for (int cb : sys.chains[c].callbacks) {
            const auto& callback = sys.callbacks[cb];
            for (std::size_t j = 0; j < callback.segments.size(); ++j) {
                const auto& s = callback.segments[j];
                if (s.kind != SegmentKind::Accel) continue;
                AccelSegment as;
                as.chain = static_cast<int>(c);
                as.callback = cb;
                as.segment = static_cast<int>(j);
                as.accelerator = s.accelerator;
                as.unit = callback_unit[cb][s.accelerator];
                as.bucket = sys.bucket_map[c][s.accelerator];
                as.wcet = s.wcet;
                sys.accel_segments.push_back(as);
            }
        }
    }
    return sys;
}

SystemSpec merge_candidate(const SystemSpec& base, const Candidate& candidate) {
    SystemSpec merged = base;
    const auto& add = candidate.additions;
    merged.accelerators.insert(merged.accelerators.end(), add.accelerators.begin(), add.accelerators.end());
    merged.executors.insert(merged.executors.end(), add.executors.begin(), add.executors.end());
    merged.callbacks.insert(merged.callbacks.end(), add.callbacks.begin(), add.callbacks.end());
    merged.chains.insert(merged.chains.end(), add.chains.begin(), add.chains.end());
    merged.end_to_end.insert(merged.end_to_end.end(), add.end_to_end.begin(), add.end_to_end.end());
    for (std::size_t i = 0; i < candidate.attachments.size(); ++i) {
        const auto& att = candidate.attachments[i];
        auto it = std::find_if(merged.executors.begin(), merged.executors.end(),
                               [&](const ExecutorSpec& e) { return e.id == att.executor; });
        if (it == merged.executors.end()) {
            throw ValidationError("/executor_assignments/" + std::to_string(i) + "/executor",
                                  "unknown executor '" + att.executor + "'");
        }
        it->callbacks.insert(it->callbacks.end(), att.callbacks.begin(), att.callbacks.end());
    }
    return merged;
}

std::string_view to_string(SegmentKind k) { return k == SegmentKind::Cpu ? "cpu" : "accel"; }
std::string_view to_string(Criticality c) { return c == Criticality::Critical ? "critical" : "best_effort"; }
std::string_view to_string(WaitPolicy w) { return w == WaitPolicy::Spin ? "spin" : "suspend"; }

}  // namespace paam
