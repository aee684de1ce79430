#include "paam/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace paam {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw ValidationError(path, what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) schema_error(path + "/" + key, "unknown key '" + key + "'");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing required key '") + key + "'");
    return *it;
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_error(path, "expected a string");
    return v.get<std::string>();
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
    if (!v.is_array()) schema_error(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_string(v[i], path + "/" + std::to_string(i)));
    return out;
}

const json& get_array(const json& v, const std::string& path) {
    if (!v.is_array()) schema_error(path, "expected an array");
    return v;
}

TimeUnit read_unit(const json& doc) {
    auto it = doc.find("time_unit");
    if (it == doc.end()) return TimeUnit::Ns;
    auto u = parse_time_unit(get_string(*it, "/time_unit"));
    if (!u) schema_error("/time_unit", "time_unit must be one of ns, us, ms, s");
    return *u;
}

AcceleratorSpec read_accelerator(const json& j, const std::string& p, TimeUnit unit) {
    check_keys(j, p, {"id", "units", "buckets", "epsilon", "kappa", "server_core",
                      "concurrent_lowest_bucket", "slowdown_permille"});
    AcceleratorSpec a;
    a.id = get_string(require(j, p, "id"), p + "/id");
    if (j.contains("units")) a.units = get_int(j["units"], p + "/units");
    if (j.contains("buckets")) a.buckets = get_int(j["buckets"], p + "/buckets");
    if (j.contains("epsilon")) a.epsilon = duration_from_json(j["epsilon"], unit, p + "/epsilon");
    if (j.contains("kappa")) a.kappa = duration_from_json(j["kappa"], unit, p + "/kappa");
    a.server_core = get_int(require(j, p, "server_core"), p + "/server_core");
    if (j.contains("concurrent_lowest_bucket")) {
        if (!j["concurrent_lowest_bucket"].is_boolean()) schema_error(p + "/concurrent_lowest_bucket", "expected a boolean");
        a.concurrent_lowest_bucket = j["concurrent_lowest_bucket"].get<bool>();
    }
    if (j.contains("slowdown_permille")) a.slowdown_permille = get_int(j["slowdown_permille"], p + "/slowdown_permille");
    return a;
}

ExecutorSpec read_executor(const json& j, const std::string& p) {
    check_keys(j, p, {"id", "core", "priority", "wait", "callbacks"});
    ExecutorSpec e;
    e.id = get_string(require(j, p, "id"), p + "/id");
    e.core = get_int(require(j, p, "core"), p + "/core");
    e.priority = get_int(require(j, p, "priority"), p + "/priority");
    if (j.contains("wait")) {
        auto w = get_string(j["wait"], p + "/wait");
        if (w == "spin") e.wait = WaitPolicy::Spin;
        else if (w == "suspend") e.wait = WaitPolicy::Suspend;
        else schema_error(p + "/wait", "wait must be 'spin' or 'suspend'");
    }
    e.callbacks = get_string_list(require(j, p, "callbacks"), p + "/callbacks");
    return e;
}

CallbackSpec read_callback(const json& j, const std::string& p, TimeUnit unit) {
    check_keys(j, p, {"id", "segments"});
    CallbackSpec c;
    c.id = get_string(require(j, p, "id"), p + "/id");
    const auto& segs = get_array(require(j, p, "segments"), p + "/segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        std::string sp = p + "/segments/" + std::to_string(i);
        check_keys(segs[i], sp, {"kind", "wcet", "accelerator"});
        SegmentSpec s;
        auto kind = get_string(require(segs[i], sp, "kind"), sp + "/kind");
        if (kind == "cpu") s.kind = SegmentKind::Cpu;
        else if (kind == "accel") s.kind = SegmentKind::Accel;
        else schema_error(sp + "/kind", "kind must be 'cpu' or 'accel'");
        s.wcet = duration_from_json(require(segs[i], sp, "wcet"), unit, sp + "/wcet");
        if (segs[i].contains("accelerator")) s.accelerator = get_string(segs[i]["accelerator"], sp + "/accelerator");
        if (s.kind == SegmentKind::Accel && s.accelerator.empty()) {
            schema_error(sp, "accel segment requires an 'accelerator'");
        }
        c.segments.push_back(s);
    }
    return c;
}

ChainSpec read_chain(const json& j, const std::string& p, TimeUnit unit) {
    check_keys(j, p, {"id", "callbacks", "period", "deadline", "priority", "criticality"});
    ChainSpec c;
    c.id = get_string(require(j, p, "id"), p + "/id");
    c.callbacks = get_string_list(require(j, p, "callbacks"), p + "/callbacks");
    c.period = duration_from_json(require(j, p, "period"), unit, p + "/period");
    c.deadline = j.contains("deadline") ? duration_from_json(j["deadline"], unit, p + "/deadline") : c.period;
    c.priority = get_int(require(j, p, "priority"), p + "/priority");
    if (j.contains("criticality")) {
        auto s = get_string(j["criticality"], p + "/criticality");
        if (s == "critical") c.criticality = Criticality::Critical;
        else if (s == "best_effort") c.criticality = Criticality::BestEffort;
        else schema_error(p + "/criticality", "criticality must be 'critical' or 'best_effort'");
    }
    return c;
}

EndToEndSpec read_end_to_end(const json& j, const std::string& p, TimeUnit unit) {
    check_keys(j, p, {"id", "sub_chains", "comm_cost"});
    EndToEndSpec e;
    e.id = get_string(require(j, p, "id"), p + "/id");
    e.sub_chains = get_string_list(require(j, p, "sub_chains"), p + "/sub_chains");
    if (j.contains("comm_cost")) e.comm_cost = duration_from_json(j["comm_cost"], unit, p + "/comm_cost");
    return e;
}

template <typename T, typename F>
void read_list(const json& doc, const char* key, std::vector<T>& out, F&& read) {
    if (!doc.contains(key)) return;
    std::string p = std::string("/") + key;
    const auto& arr = get_array(doc[key], p);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read(arr[i], p + "/" + std::to_string(i)));
}

json parse_json_or_throw(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte offset -> line/column
        int line = 1;
        int col = 1;
        std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError("malformed JSON: " + msg, "", line, col);
    }
}

[[noreturn]] void rethrow_located(const ValidationError& e, std::string_view text) {
    auto loc = locate_json_pointer(text, e.path());
    throw ConfigError(e.what(), e.path(), loc ? loc->first : 0, loc ? loc->second : 0);
}

void append_fragment(SystemSpec& spec, const json& doc) {
    TimeUnit unit = read_unit(doc);
    read_list(doc, "accelerators", spec.accelerators, [&](const json& j, const std::string& p) { return read_accelerator(j, p, unit); });
    read_list(doc, "executors", spec.executors, [&](const json& j, const std::string& p) { return read_executor(j, p); });
    read_list(doc, "callbacks", spec.callbacks, [&](const json& j, const std::string& p) { return read_callback(j, p, unit); });
    read_list(doc, "chains", spec.chains, [&](const json& j, const std::string& p) { return read_chain(j, p, unit); });
    read_list(doc, "end_to_end", spec.end_to_end, [&](const json& j, const std::string& p) { return read_end_to_end(j, p, unit); });
}

}  // namespace

std::string ConfigError::describe(std::string_view source_name) const {
    std::ostringstream os;
    os << source_name;
    if (line_ > 0) os << ":" << line_ << ":" << column_;
    os << ": " << what();
    if (!path_.empty()) os << " (at " << path_ << ")";
    return os.str();
}

Duration duration_from_json(const json& v, TimeUnit unit, const std::string& path) {
    if (v.is_number_integer()) {
        auto n = v.get<std::int64_t>();
        if (n < 0) schema_error(path, "duration must be non-negative");
        return Duration(n * unit_scale(unit));
    }
    if (v.is_string()) {
        try {
            return parse_duration(v.get<std::string>(), unit);
        } catch (const std::invalid_argument& e) {
            schema_error(path, e.what());
        }
    }
    schema_error(path, "expected a duration (integer in time_unit, or string such as \"391us\")");
}

SystemSpec parse_system_spec(std::string_view text) {
    json doc = parse_json_or_throw(text);
    try {
        check_keys(doc, "", {"schema_version", "time_unit", "cores", "accelerators", "executors",
                             "callbacks", "chains", "end_to_end"});
        if (doc.contains("schema_version") && get_int(doc["schema_version"], "/schema_version") != kConfigSchemaVersion) {
            schema_error("/schema_version", "unsupported schema_version");
        }
        SystemSpec spec;
        spec.cores = get_int(require(doc, "", "cores"), "/cores");
        for (const char* key : {"accelerators", "executors", "callbacks", "chains"}) require(doc, "", key);
        append_fragment(spec, doc);
        return spec;
    } catch (const ValidationError& e) {
        rethrow_located(e, text);
    }
}

SystemConfig parse_system(std::string_view text) {
    SystemSpec spec = parse_system_spec(text);
    try {
        return validate_system(spec);
    } catch (const ValidationError& e) {
        rethrow_located(e, text);
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'", "", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SystemConfig load_system(const std::filesystem::path& path) { return parse_system(read_text_file(path)); }

nlohmann::ordered_json to_json(const SystemSpec& spec) {
    using oj = nlohmann::ordered_json;
    oj doc;
    doc["schema_version"] = kConfigSchemaVersion;
    doc["time_unit"] = "ns";
    doc["cores"] = spec.cores;
    doc["accelerators"] = oj::array();
    for (const auto& a : spec.accelerators) {
        oj j;
        j["id"] = a.id;
        j["units"] = a.units;
        j["buckets"] = a.buckets;
        j["epsilon"] = a.epsilon.count();
        j["kappa"] = a.kappa.count();
        j["server_core"] = a.server_core;
        if (a.concurrent_lowest_bucket) {
            j["concurrent_lowest_bucket"] = true;
            j["slowdown_permille"] = a.slowdown_permille;
        }
        doc["accelerators"].push_back(j);
    }
    doc["executors"] = oj::array();
    for (const auto& e : spec.executors) {
        doc["executors"].push_back(oj{{"id", e.id}, {"core", e.core}, {"priority", e.priority},
                                      {"wait", std::string(to_string(e.wait))}, {"callbacks", e.callbacks}});
    }
    doc["callbacks"] = oj::array();
    for (const auto& c : spec.callbacks) {
        oj segs = oj::array();
        for (const auto& s : c.segments) {
            oj sj{{"kind", std::string(to_string(s.kind))}, {"wcet", s.wcet.count()}};
            if (s.kind == SegmentKind::Accel) sj["accelerator"] = s.accelerator;
            segs.push_back(sj);
        }
        doc["callbacks"].push_back(oj{{"id", c.id}, {"segments", segs}});
    }
    doc["chains"] = oj::array();
    for (const auto& c : spec.chains) {
        doc["chains"].push_back(oj{{"id", c.id}, {"callbacks", c.callbacks}, {"period", c.period.count()},
                                   {"deadline", c.deadline.count()}, {"priority", c.priority},
                                   {"criticality", std::string(to_string(c.criticality))}});
    }
    if (!spec.end_to_end.empty()) {
        doc["end_to_end"] = oj::array();
        for (const auto& e : spec.end_to_end) {
            doc["end_to_end"].push_back(oj{{"id", e.id}, {"sub_chains", e.sub_chains}, {"comm_cost", e.comm_cost.count()}});
        }
    }
    return doc;
}

std::string dump_system_spec(const SystemSpec& spec) { return to_json(spec).dump(2) + "\n"; }

std::string fingerprint(const SystemConfig& sys) {
    std::string canon = to_json(sys.source).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Candidate parse_candidate(std::string_view text) {
    json doc = parse_json_or_throw(text);
    try {
        check_keys(doc, "", {"time_unit", "accelerators", "executors", "callbacks", "chains", "end_to_end",
                             "executor_assignments"});
        Candidate cand;
        append_fragment(cand.additions, doc);
        if (doc.contains("executor_assignments")) {
            const auto& arr = get_array(doc["executor_assignments"], "/executor_assignments");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                std::string p = "/executor_assignments/" + std::to_string(i);
                check_keys(arr[i], p, {"executor", "callbacks"});
                cand.attachments.push_back({get_string(require(arr[i], p, "executor"), p + "/executor"),
                                            get_string_list(require(arr[i], p, "callbacks"), p + "/callbacks")});
            }
        }
        return cand;
    } catch (const ValidationError& e) {
        rethrow_located(e, text);
    }
}

// ---------------------------------------------------------------------------
// JSON pointer -> source position. A small structural scanner; the document is
// assumed to be valid JSON (callers only use it after a successful parse).
// ---------------------------------------------------------------------------
namespace {

class PointerLocator {
public:
    PointerLocator(std::string_view text, std::string_view target) : text_(text), target_(target) {}

    std::optional<std::pair<int, int>> run() {
        skip_ws();
        if (!value("")) return std::nullopt;
        if (best_) return best_;
        return std::nullopt;
    }

private:
    std::string_view text_;
    std::string_view target_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::size_t best_len_ = 0;
    std::optional<std::pair<int, int>> best_;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\n' || peek() == '\r' || peek() == '\t')) advance();
    }

    void note(const std::string& path) {
        bool prefix = target_.substr(0, path.size()) == path &&
                      (path.size() == target_.size() || target_[path.size()] == '/');
        if (prefix && (path.size() > best_len_ || !best_)) {
            best_len_ = path.size();
            best_ = std::make_pair(line_, col_);
        }
    }

    bool string(std::string* out) {
        if (eof() || peek() != '"') return false;
        advance();
        while (!eof() && peek() != '"') {
            if (peek() == '\\') {
                advance();
                if (eof()) return false;
            }
            if (out) out->push_back(peek());
            advance();
        }
        if (eof()) return false;
        advance();
        return true;
    }

    bool value(const std::string& path) {
        note(path);
        if (eof()) return false;
        char c = peek();
        if (c == '{') {
            advance();
            skip_ws();
            if (!eof() && peek() == '}') { advance(); return true; }
            while (true) {
                skip_ws();
                std::string key;
                if (!string(&key)) return false;
                skip_ws();
                if (eof() || peek() != ':') return false;
                advance();
                skip_ws();
                if (!value(path + "/" + key)) return false;
                skip_ws();
                if (eof()) return false;
                if (peek() == ',') { advance(); continue; }
                if (peek() == '}') { advance(); return true; }
                return false;
            }
        }
        if (c == '[') {
            advance();
            skip_ws();
            if (!eof() && peek() == ']') { advance(); return true; }
            for (std::size_t i = 0;; ++i) {
                skip_ws();
                if (!value(path + "/" + std::to_string(i))) return false;
                skip_ws();
                if (eof()) return false;
                if (peek() == ',') { advance(); continue; }
                if (peek() == ']') { advance(); return true; }
                return false;
            }
        }
        if (c == '"') return string(nullptr);
        // number / literal
        std::size_t start = pos_;
        while (!eof() && peek() != ',' && peek() != '}' && peek() != ']' && peek() != ' ' && peek() != '\n' &&
               peek() != '\r' && peek() != '\t') {
            advance();
        }
        return pos_ > start;
    }
};

}  // namespace

std::optional<std::pair<int, int>> locate_json_pointer(std::string_view text, std::string_view pointer) {
    return PointerLocator(text, pointer).run();
}

}  // namespace paam
