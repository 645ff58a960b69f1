#include "vlmpipe/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vlmpipe/errors.hpp"

namespace vlmpipe {

double makespan(const ExecutionTrace& trace) {
    if (trace.events.empty()) {
        raise(Errc::EmptyTrace, "trace has no events");
    }
    double lo = trace.events.front().t_start_s;
    double hi = trace.events.front().t_end_s;
    for (const TraceEvent& e : trace.events) {
        lo = std::min(lo, e.t_start_s);
        hi = std::max(hi, e.t_end_s);
    }
    return hi - lo;
}

namespace {

std::string format_seconds(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", t);
    return buf;
}

} // namespace

void write_trace(std::ostream& out, const ExecutionTrace& trace) {
    for (const TraceEvent& e : trace.events) {
        nlohmann::ordered_json line;
        line["kind"] = e.kind == EventKind::Load ? "load" : "exec";
        line["stage"] = e.stage;
        line["module_id"] = e.module_id;
        if (e.item_id) {
            line["item_id"] = *e.item_id;
        } else {
            line["item_id"] = nullptr;
        }
        // Emit times as raw fixed-point literals so the file keeps >= 6
        // fractional digits regardless of the JSON library's float printing.
        std::string s = line.dump();
        s.pop_back(); // trailing '}'
        s += ",\"t_start_s\":" + format_seconds(e.t_start_s);
        s += ",\"t_end_s\":" + format_seconds(e.t_end_s) + "}";
        out << s << "\n";
    }
}

void write_trace_file(const std::string& path, const ExecutionTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        raise(Errc::ParseError, "cannot open trace file for writing: " + path);
    }
    write_trace(out, trace);
}

std::vector<TraceEvent> read_trace_events(std::istream& in) {
    std::vector<TraceEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            raise(Errc::ParseError, "trace line " + std::to_string(lineno) + ": " + ex.what());
        }
        TraceEvent e;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "load") {
            e.kind = EventKind::Load;
        } else if (kind == "exec") {
            e.kind = EventKind::Exec;
        } else {
            raise(Errc::ParseError, "trace line " + std::to_string(lineno) + ": bad kind '" + kind + "'");
        }
        e.stage = j.at("stage").get<std::string>();
        e.module_id = j.at("module_id").get<std::string>();
        if (j.contains("item_id") && !j.at("item_id").is_null()) {
            e.item_id = j.at("item_id").get<std::string>();
        }
        e.t_start_s = j.at("t_start_s").get<double>();
        e.t_end_s = j.at("t_end_s").get<double>();
        if (e.t_end_s < e.t_start_s) {
            raise(Errc::ParseError, "trace line " + std::to_string(lineno) + ": t_end_s < t_start_s");
        }
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<TraceEvent> read_trace_events_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::ParseError, "cannot open trace file: " + path);
    }
    return read_trace_events(in);
}

} // namespace vlmpipe
