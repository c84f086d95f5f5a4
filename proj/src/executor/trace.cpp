#include "one4all/executor/trace.hpp"

#include <fstream>
#include <sstream>

namespace one4all::exec {

namespace {

using nlohmann::json;

json entry_json(const TraceEntry& e) {
    return json{{"record", "entry"},
                {"seq", e.seq},
                {"path", e.path},
                {"task_id", e.outcome.task_id},
                {"action", e.action},
                {"params", e.params},
                {"outcome", {{"label", e.outcome.label}, {"value", e.outcome.value}, {"duration", e.outcome.duration}}},
                {"state", e.state},
                {"t", e.timestamp}};
}

template <typename T>
T field(const json& record, const char* key) {
    try {
        return record.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw TraceFormatError(std::string("trace record field '") + key + "': " + ex.what());
    }
}

}  // namespace

std::string to_ndjson(const ExecutionTrace& trace) {
    std::string out;
    out += json{{"record", "header"}, {"mission_id", trace.mission_id}, {"robot_id", trace.robot_id}, {"seed", trace.seed}}
               .dump();
    out += '\n';
    for (const auto& e : trace.entries) {
        out += entry_json(e).dump();
        out += '\n';
    }
    json branches = json::array();
    for (const auto& b : trace.branches) {
        branches.push_back({{"path", b.path}, {"on", b.on}, {"observed", b.observed}, {"taken", b.taken}});
    }
    json status{{"record", "status"},
                {"final_status", std::string(to_string(trace.final_status))},
                {"dispatched", trace.entries.size()},
                {"branches", branches}};
    if (trace.fault) status["fault"] = *trace.fault;
    out += status.dump();
    out += '\n';
    return out;
}

ExecutionTrace from_ndjson(std::string_view text) {
    ExecutionTrace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false, status = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (status) throw TraceFormatError("records after the status record");
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceFormatError(std::string("bad trace line: ") + e.what());
        }
        const auto kind = field<std::string>(record, "record");
        if (kind == "header") {
            if (header) throw TraceFormatError("duplicate header record");
            header = true;
            trace.mission_id = field<std::string>(record, "mission_id");
            trace.robot_id = field<std::string>(record, "robot_id");
            trace.seed = field<std::uint64_t>(record, "seed");
        } else if (kind == "entry") {
            if (!header) throw TraceFormatError("entry before header");
            TraceEntry e;
            e.seq = field<std::size_t>(record, "seq");
            e.path = field<std::string>(record, "path");
            e.action = field<std::string>(record, "action");
            e.params = field<plan::ParamMap>(record, "params");
            const auto outcome = field<json>(record, "outcome");
            e.outcome.task_id = field<std::string>(record, "task_id");
            e.outcome.label = field<std::string>(outcome, "label");
            e.outcome.value = outcome.contains("value") ? outcome["value"] : json();
            e.outcome.duration = field<double>(outcome, "duration");
            e.state = record.contains("state") ? record["state"] : json();
            e.timestamp = field<double>(record, "t");
            trace.entries.push_back(std::move(e));
        } else if (kind == "status") {
            if (!header) throw TraceFormatError("status before header");
            status = true;
            const auto final_status = field<std::string>(record, "final_status");
            if (final_status == "completed") trace.final_status = FinalStatus::Completed;
            else if (final_status == "failed") trace.final_status = FinalStatus::Failed;
            else throw TraceFormatError("unknown final status '" + final_status + "'");
            for (const auto& b : field<json>(record, "branches")) {
                trace.branches.push_back({field<std::string>(b, "path"), field<std::string>(b, "on"),
                                          field<std::string>(b, "observed"), field<std::string>(b, "taken")});
            }
            if (record.contains("fault")) trace.fault = field<std::string>(record, "fault");
        } else {
            throw TraceFormatError("unknown record kind '" + kind + "'");
        }
    }
    if (!header || !status) throw TraceFormatError("trace needs a header and a status record");
    return trace;
}

std::filesystem::path write_trace(const ExecutionTrace& trace, const std::filesystem::path& dir) {
    const auto traces = dir / "traces";
    std::filesystem::create_directories(traces);
    const auto path = traces / (trace.mission_id + ".ndjson");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_ndjson(trace);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    return path;
}

std::string summarize(const ExecutionTrace& trace) {
    std::ostringstream out;
    out << "mission " << trace.mission_id << " on " << trace.robot_id << " (seed " << trace.seed << ")\n";
    out << "tasks run: " << trace.entries.size() << "\n";
    for (const auto& e : trace.entries) {
        out << "  " << e.seq << ". " << e.outcome.task_id << " [" << e.action << "] -> " << e.outcome.label << "\n";
    }
    out << "branches taken: " << trace.branches.size() << "\n";
    for (const auto& b : trace.branches) {
        out << "  " << b.on << " = " << b.observed << " -> " << b.taken << "\n";
    }
    out << "final status: " << to_string(trace.final_status) << "\n";
    if (trace.fault) out << "fault: " << *trace.fault << "\n";
    return out.str();
}

}  // namespace one4all::exec
