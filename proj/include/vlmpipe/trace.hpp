#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vlmpipe/registry.hpp"

namespace vlmpipe {

enum class EventKind { Load, Exec };

/// One timestamped occurrence on the run clock: a module load or a stage
/// execution. Load events carry stage == "load" and no item id; aggregate
/// stage events carry no item id either.
struct TraceEvent {
    EventKind kind = EventKind::Exec;
    std::string stage;
    std::string module_id;
    std::optional<std::string> item_id;
    double t_start_s = 0.0;
    double t_end_s = 0.0;
};

struct FailureInfo {
    std::string stage;
    std::string item_id;
    std::string message;
};

struct ExecutionTrace {
    ExecutionMode mode = ExecutionMode::ReuseParallel;
    std::vector<TraceEvent> events;
    double makespan_s = 0.0;
    bool failed = false;
    std::optional<FailureInfo> failure;
};

/// max(t_end) - min(t_start) over all events. Throws EmptyTrace.
double makespan(const ExecutionTrace& trace);

/// One event per line as a JSON object with fields
/// (kind, stage, module_id, item_id, t_start_s, t_end_s); times are printed
/// as fixed-point decimal seconds with 9 fractional digits.
void write_trace(std::ostream& out, const ExecutionTrace& trace);
void write_trace_file(const std::string& path, const ExecutionTrace& trace);

std::vector<TraceEvent> read_trace_events(std::istream& in);
std::vector<TraceEvent> read_trace_events_file(const std::string& path);

} // namespace vlmpipe
