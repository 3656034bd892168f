#include "robalt/scenario_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace robalt {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"scenario", {"name", "replications", "seed", "n_devices", "beta_grid", "include_optimal", "threads",
                      "multistart"}},
        {"plan", {"stress_levels", "change_times", "inspection_times"}},
        {"truth", {"a0", "a1", "eta"}},
        {"alternative", {"a0", "a1", "eta"}},
        {"contamination", {"parameter", "values", "cell"}},
        {"evaluation", {"x0", "t", "conf", "test_a1", "test_alpha"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::vector<std::string>& problems() { return problems_; }

    bool has(const std::string& path) const { return static_cast<bool>(tree_.get_optional<std::string>(path)); }

    template <class T>
    void read(const std::string& path, T& target) {
        auto raw = tree_.get_optional<std::string>(path);
        if (!raw) return;
        std::istringstream in(*raw);
        T v{};
        in >> v;
        if (in.fail() || !(in >> std::ws).eof()) {
            problems_.push_back(path + ": cannot parse '" + *raw + "'");
            return;
        }
        target = v;
    }

    void read_bool(const std::string& path, bool& target) {
        auto raw = tree_.get_optional<std::string>(path);
        if (!raw) return;
        if (*raw == "true" || *raw == "1" || *raw == "yes") {
            target = true;
        } else if (*raw == "false" || *raw == "0" || *raw == "no") {
            target = false;
        } else {
            problems_.push_back(path + ": expected true or false, got '" + *raw + "'");
        }
    }

    void read_list(const std::string& path, std::vector<double>& target) {
        auto raw = tree_.get_optional<std::string>(path);
        if (!raw) return;
        std::vector<double> out;
        std::stringstream ss(*raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::istringstream in(item);
            double v;
            in >> v;
            if (in.fail() || !(in >> std::ws).eof()) {
                problems_.push_back(path + ": cannot parse list item '" + item + "'");
                return;
            }
            out.push_back(v);
        }
        target = out;
    }

private:
    const pt::ptree& tree_;
    std::vector<std::string> problems_;
};

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ScenarioError(std::string("scenario file: ") + e.what());
    }

    Reader r(tree);
    for (const auto& [section, body] : tree) {
        auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            r.problems().push_back("unknown section [" + section + "]");
            continue;
        }
        for (const auto& kv : body)
            if (!it->second.count(kv.first)) r.problems().push_back(section + "." + kv.first + ": unknown key");
    }

    ScenarioSpec spec;
    r.read("scenario.name", spec.name);
    r.read("scenario.replications", spec.replications);
    r.read("scenario.seed", spec.seed);
    r.read("scenario.n_devices", spec.n_devices);
    r.read_list("scenario.beta_grid", spec.beta_grid);
    r.read_bool("scenario.include_optimal", spec.include_optimal);
    r.read("scenario.threads", spec.threads);
    r.read("scenario.multistart", spec.fit_multistart);

    std::vector<double> levels = spec.plan.stress_levels();
    std::vector<double> taus = spec.plan.change_times();
    std::vector<double> times = spec.plan.inspection_times();
    r.read_list("plan.stress_levels", levels);
    r.read_list("plan.change_times", taus);
    r.read_list("plan.inspection_times", times);

    r.read("truth.a0", spec.theta_true.a0);
    r.read("truth.a1", spec.theta_true.a1);
    r.read("truth.eta", spec.theta_true.eta);
    if (tree.get_child_optional("alternative")) {
        ModelParams alt = spec.theta_true;
        r.read("alternative.a0", alt.a0);
        r.read("alternative.a1", alt.a1);
        r.read("alternative.eta", alt.eta);
        spec.theta_alternative = alt;
    }

    std::string param = "none";
    r.read("contamination.parameter", param);
    try {
        spec.contaminated_param = parse_contaminated_param(param);
    } catch (const std::invalid_argument& e) {
        r.problems().push_back(std::string("contamination.parameter: ") + e.what());
    }
    r.read_list("contamination.values", spec.contamination_values);
    r.read("contamination.cell", spec.contaminated_cell);

    r.read("evaluation.x0", spec.eval_x0);
    r.read("evaluation.t", spec.eval_t);
    r.read("evaluation.conf", spec.conf);
    r.read("evaluation.test_a1", spec.test_a1);
    r.read("evaluation.test_alpha", spec.test_alpha);

    if (spec.replications < 1) r.problems().push_back("scenario.replications: must be at least 1");
    if (spec.n_devices < 1) r.problems().push_back("scenario.n_devices: must be at least 1");
    if (spec.beta_grid.empty()) r.problems().push_back("scenario.beta_grid: must not be empty");
    for (double b : spec.beta_grid)
        if (!(b >= 0.0)) r.problems().push_back("scenario.beta_grid: values must be >= 0");
    if (spec.include_optimal)
        for (double b : spec.beta_grid)
            if (b > 1.0) r.problems().push_back("scenario.beta_grid: data-driven row needs values in [0, 1]");
    if (!(spec.theta_true.eta > 0.0)) r.problems().push_back("truth.eta: must be positive");
    if (spec.contaminated_param != ContaminatedParam::none && spec.contamination_values.empty())
        r.problems().push_back("contamination.values: required when a parameter is contaminated");
    if (!(spec.conf > 0.0 && spec.conf < 1.0)) r.problems().push_back("evaluation.conf: must lie in (0, 1)");
    if (!(spec.test_alpha > 0.0 && spec.test_alpha < 1.0))
        r.problems().push_back("evaluation.test_alpha: must lie in (0, 1)");
    try {
        spec.plan = StressPlan(levels, taus, times);
        if (spec.contaminated_cell < 1 || spec.contaminated_cell > spec.plan.num_cells())
            r.problems().push_back("contamination.cell: out of range");
    } catch (const std::invalid_argument& e) {
        r.problems().push_back(std::string("plan: ") + e.what());
    }

    if (!r.problems().empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& p : r.problems()) msg += "\n  " + p;
        throw ScenarioError(msg);
    }
    return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace robalt
