#include "paam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "paam/config_io.hpp"

namespace paam {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::ChainRelease: return "CHAIN_RELEASE";
        case EventKind::CbStart: return "CB_START";
        case EventKind::CpuSegDone: return "CPU_SEG_DONE";
        case EventKind::ReqSubmit: return "REQ_SUBMIT";
        case EventKind::ReqEnqueue: return "REQ_ENQUEUE";
        case EventKind::AccStart: return "ACC_START";
        case EventKind::AccPreempt: return "ACC_PREEMPT";
        case EventKind::AccResume: return "ACC_RESUME";
        case EventKind::AccDone: return "ACC_DONE";
        case EventKind::CbDone: return "CB_DONE";
        case EventKind::ChainDone: return "CHAIN_DONE";
    }
    return "?";
}

std::string_view to_string(SimMode m) { return m == SimMode::Paam ? "paam" : "fifo"; }

std::optional<SimMode> parse_sim_mode(std::string_view s) {
    if (s == "paam") return SimMode::Paam;
    if (s == "fifo" || s == "fifo_direct" || s == "direct") return SimMode::FifoDirect;
    return std::nullopt;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Excluded: return "EXCLUDED";
    }
    return "?";
}

const ChainStats* SimStats::find(std::string_view chain_id) const {
    for (const auto& c : chains) {
        if (c.id == chain_id) return &c;
    }
    return nullptr;
}

namespace {

enum class ExecState { Idle, Cpu, Overhead, Waiting };

// Executors issue requests synchronously, so each has at most one outstanding.
struct Request {
    int bucket = -1;
    int priority = 0;
    Duration remaining;
    std::uint64_t seq = 0;
    bool slowed = false;
};

struct ExecRt {
    ExecState state = ExecState::Idle;
    int chain = -1;
    int callback = -1;
    int segment = -1;
    Duration remaining;
    Request req;
    bool spin = true;
    std::vector<int> chains;  // chains on this executor, highest priority first
};

struct ChainRt {
    enum class Phase { Inactive, Ready, Running } phase = Phase::Inactive;
    Instant release;
    std::size_t pos = 0;
    std::deque<Instant> backlog;
    bool superseded = false;
    Instant pending_release;
    Instant next_release;
};

struct UnitRt {
    int accelerator = 0;
    int unit = 0;
    std::vector<std::vector<int>> queue;     // per bucket, waiting executors
    std::vector<std::vector<int>> inflight;  // per bucket, started requests
    std::deque<int> fifo;
    std::vector<int> running;
    std::size_t stats = 0;
};

class Engine {
public:
    Engine(const SystemConfig& sys, const SimOptions& opt) : sys_(sys), opt_(opt), rng_(opt.seed) {
        if (opt.duration <= Duration::zero()) throw std::invalid_argument("simulation duration must be > 0");
        if (opt.jitter_permille < 0 || opt.jitter_permille >= 1000) {
            throw std::invalid_argument("jitter_permille must be in [0, 1000)");
        }
        for (const auto& [id, phase] : opt.phases) {
            if (sys.find_chain(id) < 0) throw std::invalid_argument("phase given for unknown chain '" + id + "'");
            if (phase < Duration::zero()) throw std::invalid_argument("negative phase for chain '" + id + "'");
        }

        seg_index_.resize(sys.callbacks.size());
        for (std::size_t cb = 0; cb < sys.callbacks.size(); ++cb) {
            seg_index_[cb].assign(sys.callbacks[cb].segments.size(), -1);
        }
        for (std::size_t k = 0; k < sys.accel_segments.size(); ++k) {
            const auto& a = sys.accel_segments[k];
            seg_index_[a.callback][a.segment] = static_cast<int>(k);
        }

        execs_.resize(sys.executors.size());
        core_execs_.resize(static_cast<std::size_t>(sys.cores));
        for (std::size_t x = 0; x < sys.executors.size(); ++x) {
            execs_[x].spin = sys.executors[x].wait == WaitPolicy::Spin;
            core_execs_.at(sys.executors[x].core).push_back(static_cast<int>(x));
        }
        for (auto& list : core_execs_) {
            std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
                return sys.executors[a].priority > sys.executors[b].priority;
            });
        }
        for (int c : sys.chains_by_priority()) execs_[sys.chains[c].executor].chains.push_back(c);
        on_core_.assign(core_execs_.size(), -1);
        slice_start_.assign(core_execs_.size(), Duration::zero());

        chains_.resize(sys.chains.size());
        for (std::size_t c = 0; c < sys.chains.size(); ++c) {
            auto it = opt.phases.find(sys.chains[c].id);
            chains_[c].next_release = it == opt.phases.end() ? Duration::zero() : it->second;
        }

        result_.stats.fingerprint = fingerprint(sys);
        result_.stats.mode = opt.mode;
        result_.stats.duration = opt.duration;
        for (const auto& ch : sys.chains) {
            ChainStats cs;
            cs.id = ch.id;
            cs.criticality = ch.criticality;
            cs.period = ch.period;
            cs.deadline = ch.deadline;
            result_.stats.chains.push_back(std::move(cs));
        }
        unit_of_.resize(sys.accelerators.size());
        for (std::size_t a = 0; a < sys.accelerators.size(); ++a) {
            const auto& acc = sys.accelerators[a];
            for (int u = 0; u < acc.units; ++u) {
                UnitRt rt;
                rt.accelerator = static_cast<int>(a);
                rt.unit = u;
                rt.queue.resize(static_cast<std::size_t>(acc.buckets));
                rt.inflight.resize(static_cast<std::size_t>(acc.buckets));
                rt.stats = result_.stats.units.size();
                unit_of_[a].push_back(static_cast<int>(units_.size()));
                units_.push_back(std::move(rt));
                UnitStats us;
                us.accelerator = acc.id;
                us.unit = u;
                result_.stats.units.push_back(us);
            }
        }
    }

    SimResult run() {
        if (opt_.trace_stream) write_trace_header(*opt_.trace_stream);
        process_releases();
        dispatch();
        while (now_ < opt_.duration) {
            const Duration dt = next_step();
            advance(dt);
            now_ += dt;
            complete_accelerators();
            complete_cpu();
            complete_overheads();
            if (now_ >= opt_.duration) break;
            process_releases();
            dispatch();
        }
        finish();
        return std::move(result_);
    }

private:
    const SystemConfig& sys_;
    const SimOptions& opt_;
    std::mt19937_64 rng_;
    Instant now_;
    std::uint64_t seq_ = 0;
    std::vector<std::vector<int>> seg_index_;
    std::vector<ExecRt> execs_;
    std::vector<std::vector<int>> core_execs_;
    std::vector<int> on_core_;
    std::vector<Instant> slice_start_;
    std::vector<ChainRt> chains_;
    std::vector<UnitRt> units_;
    std::vector<std::vector<int>> unit_of_;
    SimResult result_;

    bool paam() const { return opt_.mode == SimMode::Paam; }

    void emit(EventKind kind, int chain, int callback = -1, int segment = -1, int accelerator = -1, int unit = -1,
              int bucket = -1, int preempter_bucket = -1, int preempter_chain = -1) {
        if (!opt_.record_trace && !opt_.trace_stream) return;
        SimEvent e{now_, kind, chain, callback, segment, accelerator, unit, bucket, preempter_bucket, preempter_chain};
        if (opt_.trace_stream) write_trace_line(*opt_.trace_stream, sys_, e);
        if (opt_.record_trace) result_.trace.push_back(e);
    }

    void emit_request(EventKind kind, int x, int preempter_bucket = -1, int preempter_chain = -1) {
        const auto& ex = execs_[x];
        const auto& a = sys_.accel_segments[seg_index_[ex.callback][ex.segment]];
        emit(kind, ex.chain, ex.callback, ex.segment, a.accelerator, a.unit, ex.req.bucket, preempter_bucket,
             preempter_chain);
    }

    Duration actual(Duration wcet) {
        if (opt_.jitter_permille == 0) return wcet;
        const std::int64_t max_cut = wcet.count() * opt_.jitter_permille / 1000;
        const auto cut = static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(max_cut + 1));
        return Duration(std::max<std::int64_t>(1, wcet.count() - cut));
    }

    UnitRt& unit_for(int x) {
        const auto& ex = execs_[x];
        const auto& a = sys_.accel_segments[seg_index_[ex.callback][ex.segment]];
        return units_[unit_of_[a.accelerator][a.unit]];
    }

    // ---- executor progression --------------------------------------------

    void begin_segment(int x) {
        auto& ex = execs_[x];
        const auto& seg = sys_.callbacks[ex.callback].segments[ex.segment];
        if (seg.kind == SegmentKind::Cpu) {
            ex.state = ExecState::Cpu;
            ex.remaining = actual(seg.wcet);
            return;
        }
        const auto& a = sys_.accel_segments[seg_index_[ex.callback][ex.segment]];
        ex.req = Request{};
        ex.req.bucket = paam() ? a.bucket : -1;
        ex.req.priority = sys_.chains[ex.chain].priority;
        ex.req.remaining = actual(seg.wcet);
        emit_request(EventKind::ReqSubmit, x);
        const Duration eps = sys_.accelerators[a.accelerator].epsilon;
        if (paam() && eps > Duration::zero()) {
            ex.state = ExecState::Overhead;
            ex.remaining = eps;
        } else {
            enqueue(x);
        }
    }

    void enqueue(int x) {
        auto& ex = execs_[x];
        ex.state = ExecState::Waiting;
        ex.req.seq = seq_++;
        emit_request(EventKind::ReqEnqueue, x);
        auto& u = unit_for(x);
        if (paam()) u.queue[ex.req.bucket].push_back(x);
        else u.fifo.push_back(x);
    }

    void finish_segment(int x) {
        auto& ex = execs_[x];
        ++ex.segment;
        if (static_cast<std::size_t>(ex.segment) < sys_.callbacks[ex.callback].segments.size()) {
            begin_segment(x);
            return;
        }
        emit(EventKind::CbDone, ex.chain, ex.callback);
        const int c = ex.chain;
        ex.state = ExecState::Idle;
        ex.chain = ex.callback = ex.segment = -1;
        advance_chain(c);
    }

    void start_instance(int c, Instant release) {
        auto& ch = chains_[c];
        ch.release = release;
        ch.pos = 0;
        ch.phase = ChainRt::Phase::Ready;
    }

    void advance_chain(int c) {
        auto& ch = chains_[c];
        auto& cs = result_.stats.chains[c];
        ++ch.pos;
        if (ch.pos == sys_.chains[c].callbacks.size()) {
            emit(EventKind::ChainDone, c);
            cs.instances.push_back({ch.release, now_});
            ++cs.completed;
            if (now_ - ch.release > sys_.chains[c].deadline) ++cs.deadline_misses;
            if (ch.superseded) {
                ch.superseded = false;
                start_instance(c, ch.pending_release);
            } else if (!ch.backlog.empty()) {
                start_instance(c, ch.backlog.front());
                ch.backlog.pop_front();
            } else {
                ch.phase = ChainRt::Phase::Inactive;
            }
            return;
        }
        if (ch.superseded) {
            ++cs.dropped;
            ch.superseded = false;
            start_instance(c, ch.pending_release);
            return;
        }
        ch.phase = ChainRt::Phase::Ready;
    }

    void release(int c) {
        auto& ch = chains_[c];
        auto& cs = result_.stats.chains[c];
        ++cs.released;
        ch.next_release += sys_.chains[c].period;
        emit(EventKind::ChainRelease, c);
        if (ch.phase == ChainRt::Phase::Inactive) {
            start_instance(c, now_);
            return;
        }
        const auto policy =
            sys_.chains[c].criticality == Criticality::Critical ? opt_.critical_overrun : opt_.best_effort_overrun;
        if (policy == OverrunPolicy::Queue) {
            ch.backlog.push_back(now_);
        } else if (ch.phase == ChainRt::Phase::Ready) {
            ++cs.dropped;
            start_instance(c, now_);
        } else {
            if (ch.superseded) ++cs.dropped;
            ch.superseded = true;
            ch.pending_release = now_;
        }
    }

    void process_releases() {
        for (std::size_t c = 0; c < chains_.size(); ++c) {
            if (chains_[c].next_release == now_ && now_ < opt_.duration) release(static_cast<int>(c));
        }
    }

    // ---- dispatch ----------------------------------------------------------

    int ready_chain(int x) const {
        for (int c : execs_[x].chains) {
            if (chains_[c].phase == ChainRt::Phase::Ready) return c;
        }
        return -1;
    }

    bool wants_core(int x) const {
        const auto& ex = execs_[x];
        switch (ex.state) {
            case ExecState::Cpu: return true;
            case ExecState::Overhead:
            case ExecState::Waiting: return ex.spin;
            case ExecState::Idle: return ready_chain(x) >= 0;
        }
        return false;
    }

    void start_callback(int x) {
        auto& ex = execs_[x];
        const int c = ready_chain(x);
        auto& ch = chains_[c];
        ch.phase = ChainRt::Phase::Running;
        ex.chain = c;
        ex.callback = sys_.chains[c].callbacks[ch.pos];
        ex.segment = 0;
        emit(EventKind::CbStart, c, ex.callback);
        begin_segment(x);
    }

    void dispatch() {
        for (std::size_t core = 0; core < core_execs_.size(); ++core) {
            int chosen = -1;
            while (true) {
                chosen = -1;
                for (int x : core_execs_[core]) {
                    if (wants_core(x)) {
                        chosen = x;
                        break;
                    }
                }
                if (chosen < 0 || execs_[chosen].state != ExecState::Idle) break;
                start_callback(chosen);
            }
            if (chosen != on_core_[core]) {
                close_slice(static_cast<int>(core));
                on_core_[core] = chosen;
                slice_start_[core] = now_;
            }
        }
        for (auto& u : units_) dispatch_unit(u);
    }

    void close_slice(int core) {
        const int x = on_core_[core];
        if (x >= 0 && opt_.record_core_timeline && now_ > slice_start_[core]) {
            auto& tl = result_.core_timeline;
            if (!tl.empty() && tl.back().core == core && tl.back().executor == x && tl.back().end == slice_start_[core]) {
                tl.back().end = now_;
            } else {
                tl.push_back({core, x, slice_start_[core], now_});
            }
        }
    }

    bool queued_before(int a, int b) const {
        const auto& ra = execs_[a].req;
        const auto& rb = execs_[b].req;
        if (ra.priority != rb.priority) return ra.priority > rb.priority;
        return ra.seq < rb.seq;
    }

    int best_queued(const std::vector<int>& q) const {
        int best = -1;
        for (int x : q) {
            if (best < 0 || queued_before(x, best)) best = x;
        }
        return best;
    }

    void dispatch_unit(UnitRt& u) {
        if (!paam()) {
            if (u.running.empty() && !u.fifo.empty()) {
                const int x = u.fifo.front();
                u.fifo.pop_front();
                u.running.push_back(x);
                emit_request(EventKind::AccStart, x);
            }
            return;
        }
        const auto& acc = sys_.accelerators[u.accelerator];
        int top = -1;
        for (int b = acc.buckets - 1; b >= 0; --b) {
            if (!u.queue[b].empty() || !u.inflight[b].empty()) {
                top = b;
                break;
            }
        }
        if (top < 0) return;
        const bool co_run = acc.concurrent_lowest_bucket && top == 0;
        if (!u.running.empty()) {
            const int running_bucket = execs_[u.running.front()].req.bucket;
            if (top > running_bucket) {
                const int next = u.inflight[top].empty() ? best_queued(u.queue[top]) : u.inflight[top].front();
                for (int x : u.running) {
                    emit_request(EventKind::AccPreempt, x, top, execs_[next].chain);
                    execs_[x].req.remaining += 2 * acc.kappa;
                    ++result_.stats.units[u.stats].preemptions;
                }
                u.running.clear();
            } else if (!co_run) {
                return;
            }
        }
        if (!co_run) {
            if (!u.inflight[top].empty()) {
                const int x = u.inflight[top].front();
                u.running.push_back(x);
                emit_request(EventKind::AccResume, x);
            } else {
                start_from_queue(u, top);
            }
            return;
        }
        for (int x : u.inflight[0]) {
            if (std::find(u.running.begin(), u.running.end(), x) == u.running.end()) {
                u.running.push_back(x);
                emit_request(EventKind::AccResume, x);
            }
        }
        while (!u.queue[0].empty()) start_from_queue(u, 0);
        if (u.running.size() >= 2) {
            for (int x : u.running) {
                auto& r = execs_[x].req;
                if (r.slowed) continue;
                r.slowed = true;
                r.remaining = Duration(ceil_div(r.remaining.count() * acc.slowdown_permille, 1000));
            }
        }
    }

    void start_from_queue(UnitRt& u, int bucket) {
        auto& q = u.queue[bucket];
        const int x = best_queued(q);
        q.erase(std::find(q.begin(), q.end(), x));
        u.inflight[bucket].push_back(x);
        u.running.push_back(x);
        emit_request(EventKind::AccStart, x);
    }

    // ---- time advance ------------------------------------------------------

    Duration next_step() const {
        Duration dt = opt_.duration - now_;
        for (const auto& ch : chains_) {
            if (ch.next_release < opt_.duration) dt = std::min(dt, ch.next_release - now_);
        }
        for (int x : on_core_) {
            if (x < 0) continue;
            const auto& ex = execs_[x];
            if (ex.state == ExecState::Cpu || ex.state == ExecState::Overhead) dt = std::min(dt, ex.remaining);
        }
        for (const auto& ex : execs_) {
            if (ex.state == ExecState::Overhead && !ex.spin) dt = std::min(dt, ex.remaining);
        }
        for (const auto& u : units_) {
            for (int x : u.running) dt = std::min(dt, execs_[x].req.remaining);
        }
        return dt;
    }

    void advance(Duration dt) {
        for (int x : on_core_) {
            if (x < 0) continue;
            auto& ex = execs_[x];
            if (ex.state == ExecState::Cpu || ex.state == ExecState::Overhead) ex.remaining -= dt;
        }
        for (auto& ex : execs_) {
            if (ex.state == ExecState::Overhead && !ex.spin) ex.remaining -= dt;
        }
        for (auto& u : units_) {
            if (u.running.empty()) continue;
            auto& us = result_.stats.units[u.stats];
            us.busy_time += dt;
            for (int x : u.running) {
                execs_[x].req.remaining -= dt;
                us.executed_time += dt;
            }
        }
    }

    void complete_accelerators() {
        for (auto& u : units_) {
            std::vector<int> done;
            for (int x : u.running) {
                if (execs_[x].req.remaining == Duration::zero()) done.push_back(x);
            }
            for (int x : done) {
                u.running.erase(std::find(u.running.begin(), u.running.end(), x));
                if (paam()) {
                    auto& fl = u.inflight[execs_[x].req.bucket];
                    fl.erase(std::find(fl.begin(), fl.end(), x));
                }
                ++result_.stats.units[u.stats].completed_requests;
                emit_request(EventKind::AccDone, x);
                finish_segment(x);
            }
        }
    }

    void complete_cpu() {
        for (int x : on_core_) {
            if (x < 0) continue;
            auto& ex = execs_[x];
            if (ex.state == ExecState::Cpu && ex.remaining == Duration::zero()) {
                emit(EventKind::CpuSegDone, ex.chain, ex.callback, ex.segment);
                finish_segment(x);
            }
        }
    }

    void complete_overheads() {
        for (std::size_t x = 0; x < execs_.size(); ++x) {
            auto& ex = execs_[x];
            if (ex.state == ExecState::Overhead && ex.remaining == Duration::zero()) enqueue(static_cast<int>(x));
        }
    }

    void finish() {
        for (std::size_t core = 0; core < on_core_.size(); ++core) close_slice(static_cast<int>(core));
        auto& st = result_.stats;
        for (auto& u : st.units) {
            u.busy_fraction = static_cast<double>(u.busy_time.count()) / static_cast<double>(st.duration.count());
        }
        for (auto& cs : st.chains) {
            if (cs.instances.empty()) continue;
            std::vector<Duration> r;
            r.reserve(cs.instances.size());
            double sum = 0.0;
            for (const auto& i : cs.instances) {
                r.push_back(i.response());
                sum += static_cast<double>(i.response().count());
            }
            std::sort(r.begin(), r.end());
            auto rank = [&](double p) {
                auto k = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(r.size())));
                return r[std::max<std::size_t>(k, 1) - 1];
            };
            cs.min_response = r.front();
            cs.max_response = r.back();
            cs.mean_response_ns = sum / static_cast<double>(r.size());
            cs.p50 = rank(50);
            cs.p90 = rank(90);
            cs.p99 = rank(99);
        }
    }
};

std::string opt_ns(const std::optional<Duration>& d) { return d ? std::to_string(d->count()) : std::string(); }

}  // namespace

SimResult run_simulation(const SystemConfig& sys, const SimOptions& options) {
    return Engine(sys, options).run();
}

ConformanceReport check_against_bounds(const SimStats& stats, const AnalysisReport& report) {
    if (stats.fingerprint != report.fingerprint) {
        throw std::invalid_argument("simulation and analysis were produced from different systems (fingerprint " +
                                    stats.fingerprint + " vs " + report.fingerprint + ")");
    }
    ConformanceReport out;
    for (const auto& cs : stats.chains) {
        const auto* ca = report.find(cs.id);
        if (!ca) throw std::invalid_argument("chain '" + cs.id + "' missing from analysis report");
        ConformanceRow row;
        row.chain = cs.id;
        row.criticality = cs.criticality;
        row.observed_max = cs.max_response;
        row.bound = ca->response;
        if (row.bound && row.observed_max) row.margin = *row.bound - *row.observed_max;
        if (cs.criticality == Criticality::BestEffort) {
            row.verdict = Verdict::Excluded;
        } else if (row.margin && *row.margin < Duration::zero()) {
            row.verdict = Verdict::Fail;
            out.pass = false;
        } else {
            row.verdict = Verdict::Pass;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_trace_header(std::ostream& os) {
    os << "# paam-trace v" << kTraceSchemaVersion << '\n'
       << "time_ns\tkind\tchain\tcallback\tsegment\taccel\tunit\tbucket\n";
}

void write_trace_line(std::ostream& os, const SystemConfig& sys, const SimEvent& e) {
    auto num = [](int v) { return v < 0 ? std::string("-") : std::to_string(v); };
    os << e.time.count() << '\t' << to_string(e.kind) << '\t' << (e.chain < 0 ? "-" : sys.chains[e.chain].id) << '\t'
       << (e.callback < 0 ? "-" : sys.callbacks[e.callback].id) << '\t' << num(e.segment) << '\t'
       << (e.accelerator < 0 ? "-" : sys.accelerators[e.accelerator].id) << '\t' << num(e.unit) << '\t'
       << num(e.bucket) << '\n';
}

std::string trace_to_string(const SystemConfig& sys, std::span<const SimEvent> trace) {
    std::ostringstream os;
    write_trace_header(os);
    for (const auto& e : trace) write_trace_line(os, sys, e);
    return os.str();
}

std::string stats_to_csv(const SimStats& stats) {
    std::ostringstream os;
    os << "# paam-stats-csv v" << kStatsSchemaVersion << '\n'
       << "chain,criticality,released,completed,dropped,deadline_misses,min_ns,mean_ns,p50_ns,p90_ns,p99_ns,max_ns\n";
    for (const auto& c : stats.chains) {
        os << c.id << ',' << to_string(c.criticality) << ',' << c.released << ',' << c.completed << ',' << c.dropped
           << ',' << c.deadline_misses << ',' << opt_ns(c.min_response) << ','
           << (c.instances.empty() ? std::string() : std::to_string(std::llround(c.mean_response_ns))) << ','
           << opt_ns(c.p50) << ',' << opt_ns(c.p90) << ',' << opt_ns(c.p99) << ',' << opt_ns(c.max_response) << '\n';
    }
    return os.str();
}

std::string unit_stats_to_csv(const SimStats& stats) {
    std::ostringstream os;
    os << "# paam-unit-stats-csv v" << kStatsSchemaVersion << '\n'
       << "accelerator,unit,busy_ns,executed_ns,busy_fraction,preemptions,completed_requests\n";
    for (const auto& u : stats.units) {
        os << u.accelerator << ',' << u.unit << ',' << u.busy_time.count() << ',' << u.executed_time.count() << ','
           << std::fixed << std::setprecision(6) << u.busy_fraction << ',' << u.preemptions << ','
           << u.completed_requests << '\n';
    }
    return os.str();
}

std::string stats_to_text(const SimStats& stats) {
    std::ostringstream os;
    auto show = [](const std::optional<Duration>& d) { return d ? format_duration(*d) : std::string("-"); };
    os << "mode " << to_string(stats.mode) << ", duration " << format_duration(stats.duration) << '\n';
    os << std::left << std::setw(16) << "chain" << std::setw(12) << "class" << std::setw(10) << "released"
       << std::setw(10) << "done" << std::setw(9) << "dropped" << std::setw(8) << "misses" << std::setw(14) << "mean"
       << std::setw(14) << "p99" << "max\n";
    for (const auto& c : stats.chains) {
        os << std::setw(15) << c.id << ' ' << std::setw(12) << to_string(c.criticality) << std::setw(10) << c.released
           << std::setw(10) << c.completed << std::setw(9) << c.dropped << std::setw(8) << c.deadline_misses
           << std::setw(14)
           << (c.instances.empty() ? std::string("-")
                                   : format_duration(Duration(std::llround(c.mean_response_ns))))
           << std::setw(14) << show(c.p99) << show(c.max_response) << '\n';
    }
    for (const auto& u : stats.units) {
        os << "unit " << u.accelerator << '/' << u.unit << ": busy " << std::fixed << std::setprecision(1)
           << 100.0 * u.busy_fraction << "%, " << u.preemptions << " preemptions, " << u.completed_requests
           << " requests\n";
    }
    return os.str();
}

std::string conformance_to_text(const ConformanceReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "chain" << std::setw(12) << "class" << std::setw(14) << "observed"
       << std::setw(16) << "bound" << std::setw(14) << "margin" << "verdict\n";
    for (const auto& r : report.rows) {
        os << std::setw(15) << r.chain << ' ' << std::setw(12) << to_string(r.criticality) << std::setw(14)
           << (r.observed_max ? format_duration(*r.observed_max) : std::string("-")) << std::setw(16)
           << format_bound(r.bound, "UNSCHEDULABLE") << std::setw(14)
           << (r.margin ? (*r.margin < Duration::zero() ? "-" + format_duration(Duration::zero() - *r.margin)
                                                          : format_duration(*r.margin))
                        : std::string("-"))
           << to_string(r.verdict) << '\n';
    }
    os << "conformance: " << (report.pass ? "PASS" : "FAIL") << '\n';
    return os.str();
}

}  // namespace paam
