#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vlmpipe/clock.hpp"
#include "vlmpipe/errors.hpp"

namespace vlmpipe {

/// How a run treats module lifetime.
///  - SequentialNoReuse: stages run strictly one after another and each stage
///    group loads its own models; released modules leave memory and a later
///    acquire pays the full load cost again.
///  - ReuseParallel: modules are loaded once, stay resident for the lifetime
///    of the registry, and independent modules may execute concurrently.
enum class ExecutionMode { SequentialNoReuse, ReuseParallel };

const char* to_string(ExecutionMode mode);
ExecutionMode execution_mode_from_string(const std::string& s);

enum class ModuleRole { VideoEncoder, TextDecoder, Embedder, Aggregate };

/// A loadable pipeline module: weights plus the latency/memory figures its
/// load and execution cost on the target device.
struct ModuleDescriptor {
    std::string id;
    ModuleRole role = ModuleRole::Aggregate;
    double weight_size_mb = 0.0;
    double load_latency_s = 0.0;     // injected from a device profile
    double activation_peak_gb = 0.0;
    double load_temp_gb = 0.0;       // transient buffers alive only while loading
};

enum class Residency { Unloaded, Loading, Resident };

struct ResidencyState {
    Residency state = Residency::Unloaded;
    std::uint64_t load_count = 0;
    std::optional<double> last_load_start_s;
    std::optional<double> last_load_end_s;
};

/// Result of Registry::acquire.
struct AcquireOutcome {
    bool loaded_now = false;   // false: module was already resident
    double duration_s = 0.0;
    double start_s = 0.0;
    double end_s = 0.0;
};

/// Tracks module lifecycle (unloaded -> loading -> resident) and accounts for
/// load latency. acquire/release are atomic with respect to each other; state
/// queries may run while stages execute on other threads.
class Registry {
public:
    /// Throws DuplicateId if the id is taken; validates nonnegative figures.
    void register_module(ModuleDescriptor desc);

    /// Makes the module resident. If it already is, reports AlreadyResident
    /// with zero added latency and no counter change. Otherwise charges the
    /// descriptor's full load latency on `clock` (atomically: a concurrent
    /// acquire of the same id waits for the in-flight load).
    AcquireOutcome acquire(const std::string& id, ExecutionMode mode, Clock& clock);

    /// SequentialNoReuse: the module leaves the resident set.
    /// ReuseParallel: no-op, the module stays resident for the app lifetime.
    /// Throws NotResident when the module is not resident in either mode.
    void release(const std::string& id, ExecutionMode mode);

    ResidencyState state(const std::string& id) const;
    ModuleDescriptor descriptor(const std::string& id) const;
    bool is_registered(const std::string& id) const;

    /// Sum of resident modules' weight sizes, in GB (1 GB = 1024 MB).
    double resident_weights_gb() const;

    /// Registered ids in registration order.
    std::vector<std::string> ids() const;

private:
    struct Entry {
        ModuleDescriptor desc;
        ResidencyState res;
    };

    std::size_t index_of(const std::string& id) const; // caller holds mu_

    mutable std::mutex mu_;
    std::condition_variable load_done_;
    std::deque<Entry> entries_; // deque: stable references across register_module
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace vlmpipe
