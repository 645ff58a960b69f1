#pragma once

#include <any>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vlmpipe/clock.hpp"
#include "vlmpipe/registry.hpp"
#include "vlmpipe/trace.hpp"

namespace vlmpipe {

enum class StageKind { PerItem, Aggregate };

enum class TaskKind { Retrieval, Assembly };

const char* to_string(TaskKind task);
TaskKind task_from_string(const std::string& s);

/// One stage of the pipeline, bound to the module that executes it.
/// PerItem stages form a single linear chain ordered by `order`; at most one
/// Aggregate stage exists and it consumes every per-item result.
struct StageSpec {
    std::string name;
    std::string module_id;
    StageKind kind = StageKind::PerItem;
    int order = 0;
};

struct PipelineSpec {
    TaskKind task = TaskKind::Retrieval;
    std::vector<StageSpec> stages;

    /// PerItem stages sorted by order.
    std::vector<StageSpec> per_item_chain() const;
    /// The aggregate stage, or nullptr.
    const StageSpec* aggregate() const;
};

using Payload = std::any;

struct WorkItem {
    std::string item_id;
    Payload payload;
};

/// Executor wiring for one stage. `run` transforms a per-item payload,
/// `reduce` folds all per-item results (aggregate stages only); either may be
/// left empty for latency-only runs. Under a virtual clock a stage instance
/// takes `virtual_duration_s`; under a wall clock the callable's own runtime
/// is what gets measured.
struct StageBinding {
    std::function<Payload(const WorkItem&, Payload)> run;
    std::function<Payload(std::vector<Payload>)> reduce;
    double virtual_duration_s = 0.0;
};

using StageBindings = std::map<std::string, StageBinding>;

/// Structural checks: unknown module ids, duplicate stage names, multiple
/// aggregate stages, broken per-item chain. Violations are data, not errors.
std::vector<std::string> validate_spec(const PipelineSpec& spec, const Registry& registry);

/// Runs the pipeline over `items` and returns a timestamped trace.
///
/// Guarantees, checkable with verify_trace:
///  (a) stage k+1 of an item starts only after stage k of that item ends; the
///      aggregate starts only after every per-item stage instance ends;
///  (b) two executions on the same module never overlap;
///  (c) SequentialNoReuse fully serializes all stage executions and swaps
///      module groups at the per-item/aggregate boundary (released and
///      reloaded), while ReuseParallel loads every module exactly once up
///      front and lets distinct modules overlap.
///
/// Items enter the first stage in input order; downstream stages consume
/// completions in completion order with FIFO tie-breaking. An executor
/// exception aborts the run and yields a partial trace flagged failed.
ExecutionTrace execute(const PipelineSpec& spec,
                       const std::vector<WorkItem>& items,
                       ExecutionMode mode,
                       const StageBindings& bindings,
                       Registry& registry,
                       Clock& clock);

/// Re-derives the execute() postconditions from event timestamps alone.
/// Empty result == valid trace.
std::vector<std::string> verify_trace(const ExecutionTrace& trace,
                                      const PipelineSpec& spec,
                                      ExecutionMode mode);

} // namespace vlmpipe
