#include "paam/report_io.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace paam {

namespace {

nlohmann::ordered_json bound_json(const Bound& b) {
    return b ? nlohmann::ordered_json(b->count()) : nlohmann::ordered_json(nullptr);
}

Bound bound_from(const nlohmann::json& v) {
    if (v.is_null()) return std::nullopt;
    return Duration(v.get<std::int64_t>());
}

std::string csv_bound(const Bound& b, const char* infinite) {
    return b ? std::to_string(b->count()) : std::string(infinite);
}

}  // namespace

nlohmann::ordered_json to_json(const AnalysisReport& report) {
    using oj = nlohmann::ordered_json;
    oj doc;
    doc["format"] = "paam-report";
    doc["version"] = kReportSchemaVersion;
    doc["fingerprint"] = report.fingerprint;
    doc["schedulable"] = report.schedulable;
    doc["chains"] = oj::array();
    for (const auto& c : report.chains) {
        oj j;
        j["id"] = c.id;
        j["priority"] = c.priority;
        j["criticality"] = std::string(to_string(c.criticality));
        j["blocking_ns"] = c.blocking.count();
        j["exec_sum_ns"] = c.exec_sum.count();
        j["h_per_segment_ns"] = bound_json(c.handling.per_segment);
        j["h_per_chain_ns"] = bound_json(c.handling.per_chain);
        j["h_ns"] = bound_json(c.handling.handling);
        j["h_star_ns"] = bound_json(c.handling.handling_star);
        oj segs = oj::array();
        for (const auto& s : c.segment_handling) segs.push_back(bound_json(s));
        j["segment_handling_ns"] = segs;
        j["response_ns"] = bound_json(c.response);
        j["deadline_ns"] = c.deadline.count();
        j["iterations"] = c.iterations;
        j["schedulable"] = c.schedulable;
        j["note"] = c.note;
        doc["chains"].push_back(j);
    }
    doc["end_to_end"] = oj::array();
    for (const auto& e : report.end_to_end) {
        doc["end_to_end"].push_back(oj{{"id", e.id}, {"sub_chains", e.sub_chains}, {"comm_cost_ns", e.comm_cost.count()},
                                       {"response_ns", bound_json(e.response)}});
    }
    return doc;
}

AnalysisReport report_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "paam-report") {
        throw std::runtime_error("not an analysis report document");
    }
    if (doc.value("version", 0) != kReportSchemaVersion) throw std::runtime_error("unsupported report version");
    AnalysisReport r;
    r.fingerprint = doc.at("fingerprint").get<std::string>();
    r.schedulable = doc.at("schedulable").get<bool>();
    int index = 0;
    for (const auto& j : doc.at("chains")) {
        ChainAnalysis c;
        c.chain = index++;
        c.id = j.at("id").get<std::string>();
        c.priority = j.at("priority").get<int>();
        c.criticality = j.at("criticality").get<std::string>() == "critical" ? Criticality::Critical : Criticality::BestEffort;
        c.blocking = Duration(j.at("blocking_ns").get<std::int64_t>());
        c.exec_sum = Duration(j.at("exec_sum_ns").get<std::int64_t>());
        c.handling.per_segment = bound_from(j.at("h_per_segment_ns"));
        c.handling.per_chain = bound_from(j.at("h_per_chain_ns"));
        c.handling.handling = bound_from(j.at("h_ns"));
        c.handling.handling_star = bound_from(j.at("h_star_ns"));
        for (const auto& s : j.at("segment_handling_ns")) c.segment_handling.push_back(bound_from(s));
        c.response = bound_from(j.at("response_ns"));
        c.deadline = Duration(j.at("deadline_ns").get<std::int64_t>());
        c.iterations = j.at("iterations").get<int>();
        c.schedulable = j.at("schedulable").get<bool>();
        c.note = j.at("note").get<std::string>();
        c.analyzed = true;
        r.chains.push_back(std::move(c));
    }
    if (doc.contains("end_to_end")) {
        for (const auto& j : doc.at("end_to_end")) {
            EndToEndAnalysis e;
            e.id = j.at("id").get<std::string>();
            e.sub_chains = j.at("sub_chains").get<std::vector<std::string>>();
            e.comm_cost = Duration(j.at("comm_cost_ns").get<std::int64_t>());
            e.response = bound_from(j.at("response_ns"));
            r.end_to_end.push_back(std::move(e));
        }
    }
    return r;
}

std::string report_to_csv(const AnalysisReport& report) {
    std::ostringstream os;
    os << "# paam-report-csv v" << kReportSchemaVersion << "\n";
    os << "id,priority,B_c,E_c,H_per_segment,H_per_chain,H_star,R_c,D_c,schedulable\n";
    for (const auto& c : report.chains) {
        os << c.id << ',' << c.priority << ',' << c.blocking.count() << ',' << c.exec_sum.count() << ','
           << csv_bound(c.handling.per_segment, "UNBOUNDED") << ',' << csv_bound(c.handling.per_chain, "UNBOUNDED") << ','
           << csv_bound(c.handling.handling_star, "UNBOUNDED") << ',' << csv_bound(c.response, "UNSCHEDULABLE") << ','
           << c.deadline.count() << ',' << (c.schedulable ? "true" : "false") << '\n';
    }
    return os.str();
}

std::string report_to_text(const AnalysisReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "chain" << std::setw(6) << "prio" << std::setw(12) << "class"
       << std::setw(12) << "B" << std::setw(12) << "E" << std::setw(14) << "H*" << std::setw(16) << "R"
       << std::setw(12) << "D" << "verdict\n";
    for (const auto& c : report.chains) {
        os << std::setw(15) << c.id << ' ' << std::setw(6) << c.priority << std::setw(12) << to_string(c.criticality)
           << std::setw(12) << format_duration(c.blocking) << std::setw(12) << format_duration(c.exec_sum)
           << std::setw(14) << format_bound(c.handling.handling_star) << std::setw(16)
           << format_bound(c.response, "UNSCHEDULABLE") << std::setw(12) << format_duration(c.deadline)
           << (c.schedulable ? "schedulable" : "unschedulable");
        if (!c.note.empty() && !c.schedulable) os << " (" << c.note << ")";
        os << '\n';
    }
    for (const auto& e : report.end_to_end) {
        os << "end-to-end " << e.id << ": R* = " << format_bound(e.response, "UNSCHEDULABLE") << '\n';
    }
    os << "system: " << (report.schedulable ? "SCHEDULABLE" : "UNSCHEDULABLE") << '\n';
    return os.str();
}

}  // namespace paam
