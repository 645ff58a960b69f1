#include "vlmpipe/pipeline.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "vlmpipe/errors.hpp"

namespace vlmpipe {

const char* to_string(TaskKind task) {
    return task == TaskKind::Retrieval ? "retrieval" : "assembly";
}

TaskKind task_from_string(const std::string& s) {
    if (s == "retrieval") return TaskKind::Retrieval;
    if (s == "assembly") return TaskKind::Assembly;
    raise(Errc::ParseError, "unknown task '" + s + "'");
}

std::vector<StageSpec> PipelineSpec::per_item_chain() const {
    std::vector<StageSpec> chain;
    for (const StageSpec& s : stages) {
        if (s.kind == StageKind::PerItem) chain.push_back(s);
    }
    std::stable_sort(chain.begin(), chain.end(),
                     [](const StageSpec& a, const StageSpec& b) { return a.order < b.order; });
    return chain;
}

const StageSpec* PipelineSpec::aggregate() const {
    for (const StageSpec& s : stages) {
        if (s.kind == StageKind::Aggregate) return &s;
    }
    return nullptr;
}

std::vector<std::string> validate_spec(const PipelineSpec& spec, const Registry& registry) {
    std::vector<std::string> violations;
    std::set<std::string> names;
    std::size_t aggregates = 0;
    for (const StageSpec& s : spec.stages) {
        if (!names.insert(s.name).second) {
            violations.push_back("duplicate stage name '" + s.name + "'");
        }
        if (!registry.is_registered(s.module_id)) {
            violations.push_back("stage '" + s.name + "' references unregistered module '" +
                                 s.module_id + "'");
        }
        if (s.kind == StageKind::Aggregate) ++aggregates;
    }
    if (aggregates > 1) {
        violations.push_back("spec has " + std::to_string(aggregates) +
                             " aggregate stages (at most one allowed)");
    }
    auto chain = spec.per_item_chain();
    if (chain.empty()) {
        violations.push_back("per-item chain is empty");
    }
    std::set<int> orders;
    for (const StageSpec& s : chain) {
        if (!orders.insert(s.order).second) {
            violations.push_back("per-item chain is not linear: duplicate order " +
                                 std::to_string(s.order));
        }
    }
    return violations;
}

namespace {

constexpr std::size_t kNoReq = static_cast<std::size_t>(-1);

struct Completion {
    std::size_t req = kNoReq;
    double t_start = 0.0;
    double t_end = 0.0;
    std::exception_ptr error;
};

/// Launch-and-wait strategy. The scheduling policy above it is identical for
/// simulated and wall-clock runs; only how work executes and how time passes
/// differs between the two contexts.
class ExecContext {
public:
    virtual ~ExecContext() = default;
    virtual void launch(std::size_t req, double duration_s, std::function<void()> fn) = 0;
    virtual Completion wait_next() = 0;
};

/// Event-driven virtual time: callables run inline at dispatch, completions
/// pop in (end time, launch order) order and move the clock to the event end.
/// All timestamps are plain sums start + duration, so runs are deterministic
/// and reproduce closed-form makespans exactly.
class VirtualContext final : public ExecContext {
public:
    explicit VirtualContext(VirtualClock& clock) : clock_(clock) {}

    void launch(std::size_t req, double duration_s, std::function<void()> fn) override {
        Pending p;
        p.c.req = req;
        p.c.t_start = clock_.now_s();
        p.c.t_end = p.c.t_start + duration_s;
        p.seq = seq_++;
        try {
            if (fn) fn();
        } catch (...) {
            p.c.error = std::current_exception();
        }
        heap_.push(std::move(p));
    }

    Completion wait_next() override {
        Pending p = heap_.top();
        heap_.pop();
        clock_.jump_to_s(p.c.t_end);
        return p.c;
    }

private:
    struct Pending {
        Completion c;
        std::uint64_t seq = 0;
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.c.t_end != b.c.t_end) return a.c.t_end > b.c.t_end;
            return a.seq > b.seq;
        }
    };

    VirtualClock& clock_;
    std::priority_queue<Pending, std::vector<Pending>, Later> heap_;
    std::uint64_t seq_ = 0;
};

/// Wall-clock execution: each dispatched stage instance runs on its own
/// thread and reports completion through a synchronized queue. The scheduler
/// never runs two instances on one module concurrently, so the thread count
/// stays bounded by the module count.
class ThreadedContext final : public ExecContext {
public:
    explicit ThreadedContext(Clock& clock) : clock_(clock) {}

    ~ThreadedContext() override {
        for (std::thread& t : threads_) {
            if (t.joinable()) t.join();
        }
    }

    void launch(std::size_t req, double /*duration_s*/, std::function<void()> fn) override {
        threads_.emplace_back([this, req, fn = std::move(fn)] {
            Completion c;
            c.req = req;
            c.t_start = clock_.now_s();
            try {
                if (fn) fn();
            } catch (...) {
                c.error = std::current_exception();
            }
            c.t_end = clock_.now_s();
            {
                std::lock_guard<std::mutex> lock(mu_);
                done_.push_back(std::move(c));
            }
            cv_.notify_one();
        });
    }

    Completion wait_next() override {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return !done_.empty(); });
        Completion c = std::move(done_.front());
        done_.pop_front();
        return c;
    }

private:
    Clock& clock_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Completion> done_;
    std::vector<std::thread> threads_;
};

std::string join(const std::vector<std::string>& parts) {
    std::ostringstream out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out << "; ";
        out << parts[i];
    }
    return out.str();
}

std::string what(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown executor error";
    }
}

/// Module ids in first-use order, without duplicates.
std::vector<std::string> modules_of(const std::vector<StageSpec>& stages) {
    std::vector<std::string> out;
    for (const StageSpec& s : stages) {
        if (std::find(out.begin(), out.end(), s.module_id) == out.end()) {
            out.push_back(s.module_id);
        }
    }
    return out;
}

} // namespace

ExecutionTrace execute(const PipelineSpec& spec,
                       const std::vector<WorkItem>& items,
                       ExecutionMode mode,
                       const StageBindings& bindings,
                       Registry& registry,
                       Clock& clock) {
    auto violations = validate_spec(spec, registry);
    if (!violations.empty()) {
        raise(Errc::InvalidSpec, join(violations));
    }
    if (items.empty()) {
        raise(Errc::InvalidSpec, "at least one work item is required");
    }
    {
        std::set<std::string> ids;
        for (const WorkItem& it : items) {
            if (!ids.insert(it.item_id).second) {
                raise(Errc::InvalidSpec, "duplicate item_id '" + it.item_id + "'");
            }
        }
    }
    for (const StageSpec& s : spec.stages) {
        if (!bindings.count(s.name)) {
            raise(Errc::InvalidSpec, "no executor bound for stage '" + s.name + "'");
        }
    }

    const std::vector<StageSpec> chain = spec.per_item_chain();
    const StageSpec* agg = spec.aggregate();
    const std::size_t n_items = items.size();

    const std::vector<std::string> per_item_modules = modules_of(chain);
    std::vector<std::string> agg_modules;
    if (agg) agg_modules = modules_of({*agg});

    ExecutionTrace trace;
    trace.mode = mode;

    auto record_load = [&](const std::string& module_id, const AcquireOutcome& out) {
        if (out.loaded_now) {
            trace.events.push_back(
                TraceEvent{EventKind::Load, "load", module_id, std::nullopt, out.start_s, out.end_s});
        }
    };

    // Load phase. Reuse: everything the pipeline touches, loaded once up
    // front. No-reuse: only the per-item group now; the aggregate group is
    // swapped in at the stage-group boundary below.
    if (mode == ExecutionMode::ReuseParallel) {
        std::vector<std::string> all = per_item_modules;
        for (const std::string& m : agg_modules) {
            if (std::find(all.begin(), all.end(), m) == all.end()) all.push_back(m);
        }
        for (const std::string& m : all) record_load(m, registry.acquire(m, mode, clock));
    } else {
        for (const std::string& m : per_item_modules) record_load(m, registry.acquire(m, mode, clock));
    }

    std::unique_ptr<ExecContext> ctx;
    if (auto* vc = dynamic_cast<VirtualClock*>(&clock)) {
        ctx = std::make_unique<VirtualContext>(*vc);
    } else {
        ctx = std::make_unique<ThreadedContext>(clock);
    }

    struct ReqInfo {
        std::size_t item = kNoReq;
        std::size_t pos = kNoReq; // chain position; kNoReq == aggregate
    };
    std::vector<ReqInfo> reqs;
    std::vector<Payload> slots(n_items);
    for (std::size_t i = 0; i < n_items; ++i) slots[i] = items[i].payload;

    std::vector<std::deque<std::size_t>> ready(chain.size());
    for (std::size_t i = 0; i < n_items; ++i) ready[0].push_back(i);
    std::map<std::string, bool> busy;
    for (const std::string& m : per_item_modules) busy[m] = false;

    std::size_t remaining = n_items * chain.size();
    std::size_t inflight = 0;
    std::size_t seq_item = 0, seq_pos = 0; // SequentialNoReuse cursor
    bool aborted = false;

    auto fail_with = [&](const ReqInfo& r, const Completion& c) {
        if (trace.failed) return;
        trace.failed = true;
        FailureInfo info;
        info.stage = r.pos == kNoReq ? (agg ? agg->name : std::string()) : chain[r.pos].name;
        info.item_id = r.item == kNoReq ? std::string() : items[r.item].item_id;
        info.message = what(c.error);
        trace.failure = info;
    };

    auto dispatch = [&](std::size_t item, std::size_t pos) {
        busy[chain[pos].module_id] = true;
        ++inflight;
        std::size_t req = reqs.size();
        reqs.push_back(ReqInfo{item, pos});
        const StageBinding& b = bindings.at(chain[pos].name);
        const StageBinding* bp = &b;
        ctx->launch(req, b.virtual_duration_s, [&items, &slots, bp, item] {
            if (bp->run) slots[item] = bp->run(items[item], std::move(slots[item]));
        });
    };

    // One dispatch attempt. Reuse mode drains later stages first so a freed
    // module always picks up the oldest ready input for its furthest stage;
    // no-reuse mode admits exactly the next (item, stage) in strict order.
    auto try_dispatch = [&]() -> bool {
        if (aborted) return false;
        if (mode == ExecutionMode::SequentialNoReuse) {
            if (inflight > 0 || seq_item >= n_items) return false;
            std::size_t item = seq_item, pos = seq_pos;
            if (seq_pos + 1 == chain.size()) {
                seq_pos = 0;
                ++seq_item;
            } else {
                ++seq_pos;
            }
            dispatch(item, pos);
            return true;
        }
        for (std::size_t pos = chain.size(); pos-- > 0;) {
            if (ready[pos].empty()) continue;
            if (busy[chain[pos].module_id]) continue;
            std::size_t item = ready[pos].front();
            ready[pos].pop_front();
            dispatch(item, pos);
            return true;
        }
        return false;
    };

    auto consume = [&](const Completion& c) {
        --inflight;
        --remaining;
        const ReqInfo& r = reqs[c.req];
        trace.events.push_back(TraceEvent{EventKind::Exec, chain[r.pos].name,
                                          chain[r.pos].module_id, items[r.item].item_id,
                                          c.t_start, c.t_end});
        busy[chain[r.pos].module_id] = false;
        if (c.error) {
            aborted = true;
            fail_with(r, c);
        } else if (r.pos + 1 < chain.size()) {
            ready[r.pos + 1].push_back(r.item);
        }
    };

    while (remaining > 0 && !aborted) {
        while (try_dispatch()) {
        }
        if (inflight == 0) break; // nothing runnable: only possible when done
        consume(ctx->wait_next());
    }
    while (inflight > 0) {
        consume(ctx->wait_next()); // drain, recording stragglers after an abort
    }

    if (!aborted && agg) {
        if (mode == ExecutionMode::SequentialNoReuse) {
            // Stage-group boundary: the per-item models leave memory and the
            // aggregate-stage models get their own fresh load.
            for (const std::string& m : per_item_modules) registry.release(m, mode);
            for (const std::string& m : agg_modules) {
                record_load(m, registry.acquire(m, mode, clock));
            }
        }
        const StageBinding& b = bindings.at(agg->name);
        std::size_t req = reqs.size();
        reqs.push_back(ReqInfo{});
        // The reduce callable sees one result per item, in item input order,
        // regardless of completion order. Its return value reaches callers
        // through whatever the closure captured.
        ctx->launch(req, b.virtual_duration_s, [&] {
            std::vector<Payload> inputs;
            inputs.reserve(n_items);
            for (std::size_t i = 0; i < n_items; ++i) inputs.push_back(std::move(slots[i]));
            if (b.reduce) b.reduce(std::move(inputs));
        });
        Completion c = ctx->wait_next();
        trace.events.push_back(TraceEvent{EventKind::Exec, agg->name, agg->module_id,
                                          std::nullopt, c.t_start, c.t_end});
        if (c.error) {
            fail_with(reqs[c.req], c);
        }
    }

    if (mode == ExecutionMode::SequentialNoReuse && !trace.failed) {
        // Run teardown: nothing stays resident between no-reuse runs.
        for (const std::string& m : registry.ids()) {
            if (registry.state(m).state == Residency::Resident) registry.release(m, mode);
        }
    }

    if (!trace.events.empty()) {
        trace.makespan_s = makespan(trace);
    }
    return trace;
}

namespace {

struct Interval {
    double start, end;
    const TraceEvent* event;
};

bool overlaps(const Interval& a, const Interval& b) {
    return a.start < b.end && b.start < a.end;
}

} // namespace

std::vector<std::string> verify_trace(const ExecutionTrace& trace,
                                      const PipelineSpec& spec,
                                      ExecutionMode mode) {
    std::vector<std::string> v;
    const std::vector<StageSpec> chain = spec.per_item_chain();
    const StageSpec* agg = spec.aggregate();

    std::map<std::string, std::size_t> chain_pos;
    for (std::size_t i = 0; i < chain.size(); ++i) chain_pos[chain[i].name] = i;

    // Structural checks plus bucketing for the timing checks below.
    std::map<std::string, std::vector<Interval>> by_module;      // exec only
    std::map<std::string, std::map<std::size_t, Interval>> by_item;
    std::vector<Interval> execs;
    std::vector<Interval> agg_events;
    double max_per_item_end = 0.0;
    bool any_per_item = false;

    for (const TraceEvent& e : trace.events) {
        if (e.t_end_s < e.t_start_s) {
            v.push_back("event '" + e.stage + "' ends before it starts");
        }
        if (e.kind == EventKind::Load) continue;
        Interval iv{e.t_start_s, e.t_end_s, &e};
        execs.push_back(iv);
        by_module[e.module_id].push_back(iv);
        if (agg && e.stage == agg->name) {
            if (e.module_id != agg->module_id) {
                v.push_back("aggregate event uses module '" + e.module_id + "', spec says '" +
                            agg->module_id + "'");
            }
            agg_events.push_back(iv);
            continue;
        }
        auto it = chain_pos.find(e.stage);
        if (it == chain_pos.end()) {
            v.push_back("exec event references unknown stage '" + e.stage + "'");
            continue;
        }
        if (e.module_id != chain[it->second].module_id) {
            v.push_back("stage '" + e.stage + "' event uses module '" + e.module_id +
                        "', spec says '" + chain[it->second].module_id + "'");
        }
        if (!e.item_id) {
            v.push_back("per-item stage '" + e.stage + "' event has no item_id");
            continue;
        }
        any_per_item = true;
        max_per_item_end = std::max(max_per_item_end, e.t_end_s);
        auto [slot, inserted] = by_item[*e.item_id].emplace(it->second, iv);
        if (!inserted) {
            v.push_back("item '" + *e.item_id + "' runs stage '" + e.stage + "' twice");
        }
    }

    // (a) per-item chain order and aggregate barrier.
    for (const auto& [item, stages] : by_item) {
        for (auto it = stages.begin(); it != stages.end(); ++it) {
            auto next = std::next(it);
            if (next == stages.end()) break;
            if (next->first == it->first + 1 && next->second.start < it->second.end) {
                v.push_back("item '" + item + "': stage '" + chain[next->first].name +
                            "' starts before '" + chain[it->first].name + "' ends");
            }
        }
    }
    for (const Interval& a : agg_events) {
        if (any_per_item && a.start < max_per_item_end) {
            v.push_back("aggregate stage starts before all per-item work ends");
        }
    }

    // (b) per-module serialization.
    for (auto& [module, ivs] : by_module) {
        std::sort(ivs.begin(), ivs.end(),
                  [](const Interval& a, const Interval& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < ivs.size(); ++i) {
            if (overlaps(ivs[i - 1], ivs[i])) {
                v.push_back("module '" + module + "' has overlapping executions");
            }
        }
    }

    // (c) mode semantics.
    if (mode == ExecutionMode::SequentialNoReuse) {
        std::sort(execs.begin(), execs.end(),
                  [](const Interval& a, const Interval& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < execs.size(); ++i) {
            if (overlaps(execs[i - 1], execs[i])) {
                v.push_back("sequential run has overlapping executions ('" +
                            execs[i - 1].event->stage + "' and '" + execs[i].event->stage + "')");
            }
        }
    } else {
        std::map<std::string, std::size_t> load_counts;
        std::map<std::string, double> load_end;
        for (const TraceEvent& e : trace.events) {
            if (e.kind != EventKind::Load) continue;
            load_counts[e.module_id] += 1;
            load_end[e.module_id] = std::max(load_end[e.module_id], e.t_end_s);
        }
        for (const auto& [module, count] : load_counts) {
            if (count > 1) {
                v.push_back("reuse run loads module '" + module + "' " + std::to_string(count) +
                            " times");
            }
        }
        for (const auto& [module, ivs] : by_module) {
            auto it = load_end.find(module);
            if (it == load_end.end()) continue;
            for (const Interval& iv : ivs) {
                if (iv.start < it->second) {
                    v.push_back("module '" + module + "' executes before its load completes");
                    break;
                }
            }
        }
    }

    if (!trace.events.empty()) {
        double expect = makespan(trace);
        if (trace.makespan_s != expect) {
            v.push_back("trace makespan_s does not equal max(t_end) - min(t_start)");
        }
    }
    return v;
}

} // namespace vlmpipe
