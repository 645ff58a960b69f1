#include "vlmpipe/registry.hpp"

namespace vlmpipe {

const char* to_string(ExecutionMode mode) {
    return mode == ExecutionMode::SequentialNoReuse ? "sequential" : "reuse";
}

ExecutionMode execution_mode_from_string(const std::string& s) {
    if (s == "sequential" || s == "no-reuse") return ExecutionMode::SequentialNoReuse;
    if (s == "reuse" || s == "reuse-parallel" || s == "parallel") return ExecutionMode::ReuseParallel;
    raise(Errc::ParseError, "unknown execution mode '" + s + "'");
}

void Registry::register_module(ModuleDescriptor desc) {
    if (desc.id.empty()) {
        raise(Errc::InvalidSpec, "module id must be nonempty");
    }
    if (desc.weight_size_mb < 0 || desc.load_latency_s < 0 || desc.activation_peak_gb < 0 ||
        desc.load_temp_gb < 0) {
        raise(Errc::InvalidSpec, "module '" + desc.id + "' has a negative figure");
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (index_.count(desc.id)) {
        raise(Errc::DuplicateId, "module '" + desc.id + "' already registered");
    }
    index_.emplace(desc.id, entries_.size());
    entries_.push_back(Entry{std::move(desc), ResidencyState{}});
}

std::size_t Registry::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        raise(Errc::UnknownId, "module '" + id + "' not registered");
    }
    return it->second;
}

AcquireOutcome Registry::acquire(const std::string& id, ExecutionMode, Clock& clock) {
    std::unique_lock<std::mutex> lock(mu_);
    std::size_t idx = index_of(id);
    Entry* e = &entries_[idx];
    load_done_.wait(lock, [&] { return e->res.state != Residency::Loading; });
    if (e->res.state == Residency::Resident) {
        double t = clock.now_s();
        return AcquireOutcome{false, 0.0, t, t};
    }

    e->res.state = Residency::Loading;
    double start = clock.now_s();
    double latency = e->desc.load_latency_s;
    e->res.last_load_start_s = start;
    lock.unlock();

    // The load itself runs without the registry lock so state queries and
    // unrelated acquires stay responsive while a wall clock sleeps here.
    clock.advance_s(latency);

    lock.lock();
    double end = clock.now_s();
    e->res.state = Residency::Resident;
    e->res.load_count += 1;
    e->res.last_load_end_s = end;
    load_done_.notify_all();
    return AcquireOutcome{true, latency, start, end};
}

void Registry::release(const std::string& id, ExecutionMode mode) {
    std::unique_lock<std::mutex> lock(mu_);
    std::size_t idx = index_of(id);
    Entry& e = entries_[idx];
    load_done_.wait(lock, [&] { return e.res.state != Residency::Loading; });
    if (e.res.state != Residency::Resident) {
        raise(Errc::NotResident, "module '" + id + "' is not resident");
    }
    if (mode == ExecutionMode::SequentialNoReuse) {
        e.res.state = Residency::Unloaded;
    }
    // ReuseParallel keeps the module resident.
}

ResidencyState Registry::state(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_[index_of(id)].res;
}

ModuleDescriptor Registry::descriptor(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_[index_of(id)].desc;
}

bool Registry::is_registered(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return index_.count(id) > 0;
}

double Registry::resident_weights_gb() const {
    std::lock_guard<std::mutex> lock(mu_);
    double total_mb = 0.0;
    for (const Entry& e : entries_) {
        if (e.res.state == Residency::Resident) {
            total_mb += e.desc.weight_size_mb;
        }
    }
    return total_mb / 1024.0;
}

std::vector<std::string> Registry::ids() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back(e.desc.id);
    return out;
}

} // namespace vlmpipe
