#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace vlmpipe {

/// Peak-memory ledger components for one pipeline run, in GB. Activations are
/// the concurrent maximum across modules and misc_load the live maximum of
/// transient load buffers; both are mode-dependent figures supplied by the
/// caller (or a device profile).
struct MemoryComponents {
    double weights_gb = 0.0;
    double inputs_gb = 0.0;
    double activations_gb = 0.0;
    double misc_load_gb = 0.0;
};

/// weights + inputs + activations + misc.
double peak_memory_gb(const MemoryComponents& c);

/// 100 * (reuse - baseline) / baseline. Throws ZeroBaseline.
double memory_delta_pct(double baseline_gb, double reuse_gb);

/// One row of a per-layer-kind parameter table. size_mb is authoritative for
/// share-of-total reporting; param_count drives quantized-size projection.
/// When bytes_per_param is absent it is derived as size / params (MB = 2^20
/// bytes), which keeps non-quantized rows' projected size equal to size_mb.
struct LayerRow {
    std::string layer_kind;
    std::optional<std::uint64_t> param_count;
    double size_mb = 0.0;
    std::optional<double> bytes_per_param;
};

/// (layer_kind, 100 * size / total_size) per row; sums to 100.
/// Throws EmptyTable when the total size is zero.
std::vector<std::pair<std::string, double>> layer_percentages(const std::vector<LayerRow>& rows);

struct QuantPolicy {
    std::set<std::string> quantized_kinds;
    double quantized_bytes_per_param = 1.0; // int8
    double default_bytes_per_param = 4.0;   // float32
};

struct QuantizedSizing {
    double total_mb = 0.0;
    double covered_pct = 0.0; // size share of the quantized kinds
};

/// Projects the table size under the policy: quantized rows shrink to
/// param_count * quantized bytes, other rows keep their stated size.
/// Throws MissingParamCounts when a quantized row lacks a parameter count.
QuantizedSizing quantized_total_mb(const std::vector<LayerRow>& rows, const QuantPolicy& policy);

double storage_total_mb(const std::vector<std::pair<std::string, double>>& artifacts);

struct PowerProfile {
    double cpu_w = 0.0;
    double dram_w = 0.0;
};

struct EnergyEstimate {
    double orig_j = 0.0;
    double new_j = 0.0;
    double savings_pct = 0.0;
    double adjusted_cpu_w = 0.0;
    double adjusted_dram_w = 0.0;
};

/// Energy before/after model: original power runs for t_orig_s; afterwards
/// CPU power scales down by the latency reduction, DRAM power by the memory
/// reduction, and the shortened runtime t_new_s is supplied by the caller
/// rather than derived. Fractions must lie in [0, 1).
EnergyEstimate energy_estimate(const PowerProfile& power,
                               double t_orig_s,
                               double latency_reduction_frac,
                               double mem_reduction_frac,
                               double t_new_s);

/// Tab-separated rows: layer_kind, param_count, size_mb[, bytes_per_param].
std::vector<LayerRow> read_layer_table(std::istream& in);
std::vector<LayerRow> read_layer_table_file(const std::string& path);

/// Tab-separated rows: name, size_mb.
std::vector<std::pair<std::string, double>> read_storage_table(std::istream& in);
std::vector<std::pair<std::string, double>> read_storage_table_file(const std::string& path);

} // namespace vlmpipe
