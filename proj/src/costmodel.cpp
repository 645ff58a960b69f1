#include "vlmpipe/costmodel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vlmpipe/errors.hpp"

namespace vlmpipe {

namespace {

constexpr double kBytesPerMb = 1024.0 * 1024.0;

double row_bytes_per_param(const LayerRow& row) {
    if (row.bytes_per_param) return *row.bytes_per_param;
    if (row.param_count && *row.param_count > 0) {
        return row.size_mb * kBytesPerMb / static_cast<double>(*row.param_count);
    }
    return 0.0;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == '\t') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool skip_line(const std::string& line) {
    return line.empty() || line[0] == '#';
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        double value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        raise(Errc::ParseError, context + ": bad number '" + s + "'");
    }
}

} // namespace

double peak_memory_gb(const MemoryComponents& c) {
    return c.weights_gb + c.inputs_gb + c.activations_gb + c.misc_load_gb;
}

double memory_delta_pct(double baseline_gb, double reuse_gb) {
    if (baseline_gb <= 0.0) {
        raise(Errc::ZeroBaseline, "baseline memory must be positive");
    }
    return 100.0 * (reuse_gb - baseline_gb) / baseline_gb;
}

std::vector<std::pair<std::string, double>> layer_percentages(const std::vector<LayerRow>& rows) {
    double total = 0.0;
    for (const LayerRow& r : rows) total += r.size_mb;
    if (rows.empty() || total <= 0.0) {
        raise(Errc::EmptyTable, "layer table has no size to break down");
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(rows.size());
    for (const LayerRow& r : rows) {
        out.emplace_back(r.layer_kind, 100.0 * r.size_mb / total);
    }
    return out;
}

QuantizedSizing quantized_total_mb(const std::vector<LayerRow>& rows, const QuantPolicy& policy) {
    QuantizedSizing result;
    double total_size = 0.0;
    double covered_size = 0.0;
    for (const LayerRow& r : rows) {
        total_size += r.size_mb;
        if (policy.quantized_kinds.count(r.layer_kind)) {
            if (!r.param_count) {
                raise(Errc::MissingParamCounts,
                      "quantized layer kind '" + r.layer_kind + "' has no parameter count");
            }
            covered_size += r.size_mb;
            result.total_mb += static_cast<double>(*r.param_count) *
                               policy.quantized_bytes_per_param / kBytesPerMb;
        } else if (r.param_count) {
            double bpp = row_bytes_per_param(r);
            if (bpp <= 0.0) bpp = policy.default_bytes_per_param;
            result.total_mb += static_cast<double>(*r.param_count) * bpp / kBytesPerMb;
        } else {
            result.total_mb += r.size_mb;
        }
    }
    result.covered_pct = total_size > 0.0 ? 100.0 * covered_size / total_size : 0.0;
    return result;
}

double storage_total_mb(const std::vector<std::pair<std::string, double>>& artifacts) {
    double total = 0.0;
    for (const auto& [name, mb] : artifacts) total += mb;
    return total;
}

EnergyEstimate energy_estimate(const PowerProfile& power,
                               double t_orig_s,
                               double latency_reduction_frac,
                               double mem_reduction_frac,
                               double t_new_s) {
    if (latency_reduction_frac < 0.0 || latency_reduction_frac >= 1.0 ||
        mem_reduction_frac < 0.0 || mem_reduction_frac >= 1.0) {
        raise(Errc::InvalidFraction, "reduction fractions must lie in [0, 1)");
    }
    if (t_orig_s <= 0.0 || t_new_s < 0.0) {
        raise(Errc::InvalidFraction, "runtimes must be positive");
    }
    EnergyEstimate e;
    e.adjusted_cpu_w = power.cpu_w * (1.0 - latency_reduction_frac);
    e.adjusted_dram_w = power.dram_w * (1.0 - mem_reduction_frac);
    e.orig_j = (power.cpu_w + power.dram_w) * t_orig_s;
    e.new_j = (e.adjusted_cpu_w + e.adjusted_dram_w) * t_new_s;
    e.savings_pct = e.orig_j > 0.0 ? 100.0 * (e.orig_j - e.new_j) / e.orig_j : 0.0;
    return e;
}

std::vector<LayerRow> read_layer_table(std::istream& in) {
    std::vector<LayerRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        auto fields = split_tabs(line);
        if (fields.size() < 3) {
            raise(Errc::ParseError,
                  "layer table line " + std::to_string(lineno) + ": expected at least 3 columns");
        }
        LayerRow row;
        row.layer_kind = fields[0];
        std::string ctx = "layer table line " + std::to_string(lineno);
        if (fields[1] != "-") {
            row.param_count = static_cast<std::uint64_t>(parse_number(fields[1], ctx));
        }
        row.size_mb = parse_number(fields[2], ctx);
        if (fields.size() > 3 && !fields[3].empty() && fields[3] != "-") {
            row.bytes_per_param = parse_number(fields[3], ctx);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LayerRow> read_layer_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ParseError, "cannot open layer table: " + path);
    return read_layer_table(in);
}

std::vector<std::pair<std::string, double>> read_storage_table(std::istream& in) {
    std::vector<std::pair<std::string, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 2) {
            raise(Errc::ParseError,
                  "storage table line " + std::to_string(lineno) + ": expected 2 columns");
        }
        rows.emplace_back(fields[0],
                          parse_number(fields[1], "storage table line " + std::to_string(lineno)));
    }
    return rows;
}

std::vector<std::pair<std::string, double>> read_storage_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ParseError, "cannot open storage table: " + path);
    return read_storage_table(in);
}

} // namespace vlmpipe
