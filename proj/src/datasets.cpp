#include "robalt/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace robalt {

NormalizationMap NormalizationMap::min_max(const std::vector<double>& levels) {
    if (levels.size() < 2) throw DataError("min-max normalization needs at least two stress levels");
    const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
    if (!(*hi > *lo)) throw DataError("min-max normalization needs distinct stress levels");
    return {*lo, 0.0, *hi, 1.0};
}

double NormalizationMap::operator()(double physical) const {
    return v_lo + (physical - p_lo) * (v_hi - v_lo) / (p_hi - p_lo);
}

IntervalData bin_failures(const RawLifetimeData& raw, const std::vector<double>& inspection_times,
                          std::vector<std::string>* warnings) {
    if (inspection_times.empty()) throw DataError("bin_failures: no inspection times");
    if (static_cast<std::int64_t>(raw.failure_times.size()) > raw.n_total)
        throw DataError("bin_failures: more failure times than devices");
    IntervalData d;
    d.counts.assign(inspection_times.size() + 1, 0);
    d.total = raw.n_total;
    std::int64_t failed = 0;
    for (double t : raw.failure_times) {
        const auto it = std::lower_bound(inspection_times.begin(), inspection_times.end(), t);
        if (it == inspection_times.end()) {
            if (warnings) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "failure time %g is after the last inspection; counted as a survivor", t);
                warnings->push_back(buf);
            }
            continue;
        }
        ++d.counts[static_cast<std::size_t>(it - inspection_times.begin())];
        ++failed;
    }
    d.counts.back() = raw.n_total - failed;
    return d;
}

IntervalData remove_survivors(const IntervalData& data) {
    IntervalData d = data;
    d.total -= d.counts.back();
    d.counts.back() = 0;
    return d;
}

std::pair<StressPlan, double> normalize_stress(const StressPlan& plan_raw, double x0_physical,
                                               const NormalizationMap& map) {
    std::vector<double> levels = plan_raw.stress_levels();
    for (double& x : levels) x = map(x);
    return {StressPlan(levels, plan_raw.change_times(), plan_raw.inspection_times()), map(x0_physical)};
}

std::pair<StressPlan, double> normalize_stress(const StressPlan& plan_raw, double x0_physical) {
    return normalize_stress(plan_raw, x0_physical, NormalizationMap::min_max(plan_raw.stress_levels()));
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw DataError("dataset: cannot read '" + t + "' as a number (" + what + ")");
    }
}

std::vector<double> number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(item, what));
    return out;
}

// "a -> b"
std::pair<double, double> arrow_pair(const std::string& s, const std::string& what) {
    const auto pos = s.find("->");
    if (pos == std::string::npos) throw DataError("dataset: expected 'a -> b' in " + what + ", got '" + s + "'");
    return {to_number(s.substr(0, pos), what), to_number(s.substr(pos + 2), what)};
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> header;
    std::vector<std::pair<double, double>> corrections;
    bool in_body = false;
    std::vector<double> values;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!in_body) {
            if (t == "---") {
                in_body = true;
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw DataError("dataset line " + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key == "correct") {
                corrections.push_back(arrow_pair(value, "correct"));
            } else {
                if (header.count(key)) throw DataError("dataset: duplicate key '" + key + "'");
                header[key] = value;
            }
        } else {
            values.push_back(to_number(t, "value on line " + std::to_string(lineno)));
        }
    }
    if (!in_body) throw DataError("dataset: missing '---' separator before the values");

    auto need = [&](const std::string& key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) throw DataError("dataset: missing required key '" + key + "'");
        return it->second;
    };
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = header.find(key);
        return it == header.end() ? fallback : it->second;
    };

    Dataset ds;
    ds.hash = fnv1a_hex(text);
    ds.name = need("name");
    ds.time_units = get("time_units", "");
    ds.stress_units = get("stress_units", "");
    const double n_total = to_number(need("n_total"), "n_total");
    if (!(n_total >= 1.0) || n_total != std::floor(n_total)) throw DataError("dataset: n_total must be a positive integer");
    ds.n_total_raw = static_cast<std::int64_t>(n_total);
    try {
        ds.plan_raw = StressPlan(number_list(need("stress_levels"), "stress_levels"),
                                 number_list(need("change_times"), "change_times"),
                                 number_list(need("inspection_times"), "inspection_times"));
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("dataset: ") + e.what());
    }

    const std::string norm = get("normalization", "minmax");
    if (norm == "minmax") {
        ds.map = NormalizationMap::min_max(ds.plan_raw.stress_levels());
    } else if (norm.rfind("anchors:", 0) == 0) {
        const std::string rest = norm.substr(8);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) throw DataError("dataset: anchors need two 'p -> v' pairs");
        const auto a = arrow_pair(rest.substr(0, comma), "normalization");
        const auto b = arrow_pair(rest.substr(comma + 1), "normalization");
        if (a.first == b.first) throw DataError("dataset: normalization anchors must differ");
        ds.map = {a.first, a.second, b.first, b.second};
        ds.notes.push_back("stress normalized by anchors " + rest);
    } else {
        throw DataError("dataset: unknown normalization '" + norm + "'");
    }
    ds.x0_physical = to_number(get("x0", std::to_string(ds.plan_raw.stress_levels().front())), "x0");
    try {
        auto [plan, x0] = normalize_stress(ds.plan_raw, ds.x0_physical, ds.map);
        ds.plan = std::move(plan);
        ds.x0 = x0;
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("dataset: ") + e.what());
    }
    ds.mission_time = to_number(get("mission_time", std::to_string(ds.plan.termination())), "mission_time");
    ds.quantile_level = to_number(get("quantile_level", "0.95"), "quantile_level");
    ds.report_scale = to_number(get("report_scale", "1"), "report_scale");
    if (!(ds.report_scale > 0.0)) throw DataError("dataset: report_scale must be positive");
    ds.report_units = get("report_units", ds.time_units);

    for (const auto& [printed, used] : corrections) {
        auto it = std::find(values.begin(), values.end(), printed);
        if (it == values.end()) throw DataError("dataset: correction target not found among the values");
        *it = used;
        char buf[128];
        std::snprintf(buf, sizeof buf, "value printed as %g read as %g", printed, used);
        ds.notes.push_back(buf);
    }

    const std::string kind = get("kind", "failure_times");
    const auto& times = ds.plan.inspection_times();
    if (kind == "failure_times") {
        RawLifetimeData raw;
        raw.failure_times = values;
        std::sort(raw.failure_times.begin(), raw.failure_times.end());
        raw.n_total = ds.n_total_raw;
        raw.plan_raw = ds.plan_raw;
        ds.data = bin_failures(raw, times, &ds.notes);
    } else if (kind == "counts") {
        if (values.size() != times.size())
            throw DataError("dataset: expected " + std::to_string(times.size()) + " counts, got " +
                            std::to_string(values.size()));
        std::int64_t failed = 0;
        for (double v : values) {
            if (v < 0.0 || v != std::floor(v)) throw DataError("dataset: counts must be non-negative integers");
            ds.data.counts.push_back(static_cast<std::int64_t>(v));
            failed += static_cast<std::int64_t>(v);
        }
        if (failed > ds.n_total_raw) throw DataError("dataset: counts exceed n_total");
        ds.data.counts.push_back(ds.n_total_raw - failed);
        ds.data.total = ds.n_total_raw;
    } else {
        throw DataError("dataset: unknown kind '" + kind + "'");
    }

    const std::string censored = get("censored", "kept");
    if (censored == "removed") {
        const auto dropped = ds.data.counts.back();
        ds.data = remove_survivors(ds.data);
        ds.survivors_removed = true;
        ds.notes.push_back(std::to_string(dropped) + " devices surviving the test were removed before fitting");
    } else if (censored != "kept") {
        throw DataError("dataset: censored must be 'kept' or 'removed'");
    }
    ds.data.check_against(ds.plan);
    return ds;
}

Dataset load_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

Dataset builtin_dataset(const std::string& name) { return parse_dataset(builtin_dataset_text(name)); }

Dataset load_dataset(const std::string& name_or_path) {
    const auto names = builtin_dataset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_dataset(name_or_path);
    return load_dataset_file(name_or_path);
}

}  // namespace robalt
