#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlmpipe/costmodel.hpp"

namespace vlmpipe {

/// Per-load-point figures for one device. `baseline_s` is the measured cost
/// of one model load in the no-reuse configuration; that configuration pays
/// it at every stage-group swap (two swap points in these pipelines), scaled
/// by `baseline_split` so unequal swap costs can be calibrated in. `reuse_s`
/// covers loading every module exactly once.
struct LoadFigures {
    double baseline_s = 0.0;
    double reuse_s = 0.0;
    std::vector<double> baseline_split = {1.0, 1.0};
};

/// Per-stage latencies in seconds; the per-item stages are per input, the
/// aggregate stages are per run (see SimConfig::aggregate_scaling).
struct StageLatencies {
    double video_encode_s = 0.0;
    double caption_decode_s = 0.0;
    double indexing_s = 0.0;
    double script_generation_s = 0.0;
};

struct ReportedPair {
    double baseline_s = 0.0;
    double reuse_s = 0.0;
};

/// Reference "time scales with latency / power with footprint" inputs for the
/// energy estimate, together with the published result they came with.
struct EnergyReference {
    double t_orig_s = 0.0;
    double latency_reduction_frac = 0.0;
    double mem_reduction_frac = 0.0;
    double t_new_s = 0.0;
    std::optional<double> published_new_j;
    std::optional<double> published_savings_pct;
};

/// Everything measured about one device: component latencies, published
/// end-to-end numbers, the memory ledger components, and power draws.
struct DeviceProfile {
    std::string name;
    LoadFigures load;
    StageLatencies stage;
    std::optional<ReportedPair> reported_retrieval;
    std::optional<ReportedPair> reported_assembly;
    std::optional<MemoryComponents> memory_baseline;
    std::optional<MemoryComponents> memory_reuse;
    std::optional<PowerProfile> power;
    std::optional<EnergyReference> energy;
};

/// Throws InvalidProfile on negative figures or reuse load > baseline load,
/// naming the offending field.
void validate_profile(const DeviceProfile& profile);

DeviceProfile profile_from_json(const std::string& text);
DeviceProfile load_profile_file(const std::string& path);
std::string profile_to_json(const DeviceProfile& profile);

} // namespace vlmpipe
