#pragma once

// Bundled real data sets, the plain-text dataset format, failure-time binning
// and stress normalization.
//
// Dataset text format: optional '#' comment lines, then `key = value` header
// lines, a line containing only `---`, then one value per line (failure times
// or per-interval counts depending on `kind`). Keys:
//   name, time_units, stress_units, n_total, stress_levels, change_times,
//   inspection_times, normalization (`minmax` or `anchors: p1 -> v1, p2 -> v2`),
//   x0, mission_time, quantile_level, report_scale, report_units,
//   kind (`failure_times` or `counts`), censored (`kept` or `removed`),
//   correct (`printed -> used`, may repeat).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robalt/ce_model.hpp"

namespace robalt {

/// Malformed dataset text or inconsistent contents.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Affine map sending physical stress p_lo to v_lo and p_hi to v_hi.
struct NormalizationMap {
    double p_lo = 0.0;
    double v_lo = 0.0;
    double p_hi = 1.0;
    double v_hi = 1.0;

    static NormalizationMap min_max(const std::vector<double>& levels);
    double operator()(double physical) const;
};

struct RawLifetimeData {
    std::vector<double> failure_times;
    std::int64_t n_total = 0;
    StressPlan plan_raw{{0.0}, {1.0}, {1.0}};
    std::string censored_note;
};

/// counts_j = #{failures in (t_{j-1}, t_j]}; the last entry is n_total minus
/// the failures counted. Failures after t_L count as survivors; `warnings`
/// (if given) receives a note for each.
IntervalData bin_failures(const RawLifetimeData& raw, const std::vector<double>& inspection_times,
                          std::vector<std::string>* warnings = nullptr);

/// Drops the survivor cell (sets it to zero and shrinks the total).
IntervalData remove_survivors(const IntervalData& data);

/// Min-max normalization over the plan's stress levels; x0 goes through the same map.
std::pair<StressPlan, double> normalize_stress(const StressPlan& plan_raw, double x0_physical);
std::pair<StressPlan, double> normalize_stress(const StressPlan& plan_raw, double x0_physical,
                                               const NormalizationMap& map);

struct Dataset {
    std::string name;
    std::string time_units;
    std::string stress_units;
    StressPlan plan_raw{{0.0}, {1.0}, {1.0}};
    StressPlan plan{{0.0}, {1.0}, {1.0}};
    NormalizationMap map;
    IntervalData data;
    std::int64_t n_total_raw = 0;
    bool survivors_removed = false;
    double x0_physical = 0.0;
    double x0 = 0.0;
    double mission_time = 0.0;
    double quantile_level = 0.95;
    /// Reported times are divided by this (e.g. 8760 turns hours into years).
    double report_scale = 1.0;
    std::string report_units;
    std::vector<std::string> notes;
    /// FNV-1a of the source text, hex.
    std::string hash;
};

Dataset parse_dataset(const std::string& text);
Dataset load_dataset_file(const std::string& path);

std::vector<std::string> builtin_dataset_names();
const std::string& builtin_dataset_text(const std::string& name);
Dataset builtin_dataset(const std::string& name);
/// A builtin name, or otherwise a path to a dataset file.
Dataset load_dataset(const std::string& name_or_path);

std::string fnv1a_hex(const std::string& text);

}  // namespace robalt
