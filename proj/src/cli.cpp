#include "robalt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "robalt/datasets.hpp"
#include "robalt/influence.hpp"
#include "robalt/lifetime.hpp"
#include "robalt/montecarlo.hpp"
#include "robalt/scenario_config.hpp"
#include "robalt/tuning.hpp"

namespace robalt {

namespace {

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string full(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed3(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string cell_text(const Cell& c, bool pretty) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return pretty ? fixed3(*d) : full(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<bool>(c) ? "true" : "false";
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_table(std::ostream& os, const Table& t, const std::string& format) {
    if (format == "json") {
        nlohmann::ordered_json j;
        j["metadata"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : t.meta) j["metadata"][k] = v;
        j["columns"] = t.columns;
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json r;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const Cell& c = row[i];
                auto& slot = r[t.columns[i]];
                if (const auto* s = std::get_if<std::string>(&c)) slot = *s;
                else if (const auto* d = std::get_if<double>(&c)) slot = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nullptr;
                else if (const auto* n = std::get_if<long long>(&c)) slot = *n;
                else slot = std::get<bool>(c);
            }
            j["rows"].push_back(std::move(r));
        }
        os << j.dump(2) << "\n";
        return;
    }
    for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
    if (format == "csv") {
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
        os << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i], false));
            os << "\n";
        }
        return;
    }
    std::vector<std::size_t> width(t.columns.size());
    std::vector<std::vector<std::string>> text;
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line.push_back(cell_text(row[i], true));
            width[i] = std::max(width[i], line.back().size());
        }
        text.push_back(std::move(line));
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) os << "  ";
            os << std::string(width[i] - line[i].size(), ' ') << line[i];
        }
        os << "\n";
    };
    emit(t.columns);
    for (const auto& line : text) emit(line);
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "cannot read '" + item + "' as a number");
        }
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v[i]);
        s += (i ? "," : "") + std::string(buf);
    }
    return s;
}

Constraint parse_constraint(const std::string& s) {
    const auto v = parse_list(s, "--constraint");
    if (v.size() != 4) throw CLI::ValidationError("--constraint", "expected 'c0,c1,c2,d', got '" + s + "'");
    return linear_constraint({v[0], v[1], v[2]}, v[3]);
}

Constraint parse_constraints(const std::vector<std::string>& specs) {
    if (specs.size() == 1) return parse_constraint(specs.front());
    std::vector<Vec3> rows;
    std::vector<double> d;
    for (const auto& s : specs) {
        const auto v = parse_list(s, "--constraint");
        if (v.size() != 4) throw CLI::ValidationError("--constraint", "expected 'c0,c1,c2,d', got '" + s + "'");
        rows.push_back({v[0], v[1], v[2]});
        d.push_back(v[3]);
    }
    return linear_constraints(rows, d);
}

struct Output {
    std::string format = "pretty";
    std::string path;
};

void add_output(CLI::App* sub, Output& o) {
    sub->add_option("--format", o.format, "csv, json or pretty")->check(CLI::IsMember({"csv", "json", "pretty"}));
    sub->add_option("-o,--output", o.path, "write the table to this file instead of stdout");
}

void emit(const Table& t, const Output& o, std::ostream& out) {
    if (o.path.empty()) {
        write_table(out, t, o.format);
        return;
    }
    std::ofstream f(o.path);
    if (!f) throw DataError("cannot open output file '" + o.path + "'");
    write_table(f, t, o.format);
}

void base_meta(Table& t, const std::string& command) {
    t.meta.emplace_back("tool", std::string("robalt ") + kVersion);
    t.meta.emplace_back("command", command);
}

void dataset_meta(Table& t, const Dataset& ds) {
    t.meta.emplace_back("dataset", ds.name);
    t.meta.emplace_back("dataset_hash", ds.hash);
    t.meta.emplace_back("seed", "none");
    for (const auto& n : ds.notes) t.meta.emplace_back("note", n);
}

// One fitted row per requested beta; an empty list runs the tuning procedure.
struct LabelledFit {
    std::string label;
    FitResult fit;
};

std::vector<LabelledFit> fits_for(const Dataset& ds, const std::vector<double>& betas, int multistart, unsigned threads,
                                  std::vector<std::string>& warnings) {
    std::vector<LabelledFit> out;
    FitConfig cfg;
    cfg.multistart = multistart;
    if (betas.empty()) {
        TuningConfig tc;
        tc.fit = cfg;
        tc.threads = threads;
        auto tr = select_beta(ds.plan, ds.data, tc);
        for (auto& w : tr.warnings) warnings.push_back(w);
        out.push_back({"Optimal", std::move(tr.fit_opt)});
    } else {
        for (double b : betas) {
            cfg.beta = b;
            out.push_back({beta_label(b), fit(ds.plan, ds.data, cfg)});
        }
    }
    for (const auto& lf : out) {
        for (const auto& w : lf.fit.warnings) warnings.push_back("beta " + lf.label + ": " + w);
        if (!lf.fit.converged)
            throw EstimationError("fit at beta " + lf.label + " did not converge (gradient norm " + full(lf.fit.grad_norm) +
                                  ")");
    }
    return out;
}

struct ReportOptions {
    std::optional<double> x0_physical;
    std::optional<double> t_report;
    std::optional<double> qrel;
    double conf = 0.95;
};

void add_report_options(CLI::App* sub, ReportOptions& r) {
    sub->add_option("--x0", r.x0_physical, "operating stress in physical units (default from the dataset)");
    sub->add_option("--t", r.t_report, "mission time in reporting units (default from the dataset)");
    sub->add_option("--qrel", r.qrel, "reliability level for the quantile (default from the dataset)")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--conf", r.conf, "confidence level")->check(CLI::Range(0.0, 1.0));
}

struct Resolved {
    double x0;
    double t;  // model time units
    double qrel;
};

Resolved resolve(const Dataset& ds, const ReportOptions& r) {
    return {r.x0_physical ? ds.map(*r.x0_physical) : ds.x0,
            r.t_report ? *r.t_report * ds.report_scale : ds.mission_time, r.qrel ? *r.qrel : ds.quantile_level};
}

void report_meta(Table& t, const Dataset& ds, const Resolved& rv, const ReportOptions& r) {
    t.meta.emplace_back("x0_physical", full(r.x0_physical ? *r.x0_physical : ds.x0_physical));
    t.meta.emplace_back("x0", full(rv.x0));
    t.meta.emplace_back("mission_time", full(rv.t / ds.report_scale) + " " + ds.report_units);
    t.meta.emplace_back("quantile_level", full(rv.qrel));
    t.meta.emplace_back("confidence", full(r.conf));
    t.meta.emplace_back("time_units", ds.report_units);
}

// Converts a characteristic estimate into reporting units (time quantities only).
void push_estimate(std::vector<Cell>& row, const CharacteristicEstimate& e, double scale) {
    const double s = e.spec.kind == Characteristic::reliability ? 1.0 : scale;
    row.insert(row.end(), {e.value / s, e.std_error / s, e.ci_direct.lo / s, e.ci_direct.hi / s, e.ci_transformed.lo / s,
                           e.ci_transformed.hi / s});
}

std::vector<std::string> estimate_columns(const std::string& p) {
    return {p, p + "_se", p + "_direct_lo", p + "_direct_hi", p + "_transformed_lo", p + "_transformed_hi"};
}

void flush_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << "\n";
}

// ---- subcommands -----------------------------------------------------------

struct FitArgs {
    std::string data;
    std::string betas;
    ReportOptions report;
    int multistart = 5;
    unsigned threads = 1;
    Output out;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.data);
    const auto betas = parse_list(a.betas, "--beta");
    std::vector<std::string> warnings;
    const auto fits = fits_for(ds, betas, a.multistart, a.threads, warnings);
    const Resolved rv = resolve(ds, a.report);

    Table t;
    base_meta(t, "fit");
    dataset_meta(t, ds);
    t.meta.emplace_back("beta_grid", betas.empty() ? "tuned over " + join(default_beta_grid()) : join(betas));
    report_meta(t, ds, rv, a.report);
    t.columns = {"label", "beta", "n_devices", "a0", "a0_lo", "a0_hi", "a1", "a1_lo", "a1_hi", "eta", "eta_lo", "eta_hi"};
    for (const char* p : {"mean", "reliability", "quantile"})
        for (auto& c : estimate_columns(p)) t.columns.push_back(c);
    t.columns.insert(t.columns.end(), {"extrapolated", "converged", "wide_ci"});

    for (const auto& lf : fits) {
        const FitResult& f = lf.fit;
        const auto ci = param_ci(f, a.report.conf);
        std::vector<Cell> row{lf.label, f.beta, static_cast<long long>(f.n_devices)};
        const Vec3 th = f.params.as_vector();
        for (std::size_t i = 0; i < 3; ++i) row.insert(row.end(), {th[i], ci[i].lo, ci[i].hi});
        const auto mean = characteristic_ci(f, ds.plan, {Characteristic::mean, rv.x0, 0.0}, a.report.conf);
        const auto rel = characteristic_ci(f, ds.plan, {Characteristic::reliability, rv.x0, rv.t}, a.report.conf);
        const auto qu = characteristic_ci(f, ds.plan, {Characteristic::quantile, rv.x0, rv.qrel}, a.report.conf);
        push_estimate(row, mean, ds.report_scale);
        push_estimate(row, rel, ds.report_scale);
        push_estimate(row, qu, ds.report_scale);
        const bool wide = wide_intervals(f, a.report.conf);
        if (wide) warnings.push_back("beta " + lf.label + ": parameter intervals wider than the estimates themselves");
        row.insert(row.end(), {mean.extrapolated, f.converged, wide});
        t.rows.push_back(std::move(row));
    }
    flush_warnings(warnings, err);
    emit(t, a.out, out);
    return kExitOk;
}

struct CiArgs {
    std::string data;
    std::string betas = "0";
    std::string kind = "reliability";
    ReportOptions report;
    int multistart = 5;
    Output out;
};

int cmd_ci(const CiArgs& a, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.data);
    const auto betas = parse_list(a.betas, "--beta");
    std::vector<std::string> warnings;
    const auto fits = fits_for(ds, betas, a.multistart, 1, warnings);
    const Resolved rv = resolve(ds, a.report);
    Characteristic kind = Characteristic::reliability;
    if (a.kind == "quantile") kind = Characteristic::quantile;
    if (a.kind == "mean") kind = Characteristic::mean;
    const double extra = kind == Characteristic::reliability ? rv.t : kind == Characteristic::quantile ? rv.qrel : 0.0;

    Table t;
    base_meta(t, "ci");
    dataset_meta(t, ds);
    t.meta.emplace_back("beta_grid", betas.empty() ? "tuned over " + join(default_beta_grid()) : join(betas));
    report_meta(t, ds, rv, a.report);
    t.columns = {"label", "beta", "kind"};
    for (auto& c : estimate_columns("value")) t.columns.push_back(c);
    t.columns.push_back("extrapolated");
    for (const auto& lf : fits) {
        const auto e = characteristic_ci(lf.fit, ds.plan, {kind, rv.x0, extra}, a.report.conf);
        std::vector<Cell> row{lf.label, lf.fit.beta, to_string(kind)};
        push_estimate(row, e, ds.report_scale);
        row.push_back(e.extrapolated);
        t.rows.push_back(std::move(row));
    }
    flush_warnings(warnings, err);
    emit(t, a.out, out);
    return kExitOk;
}

struct TestArgs {
    std::string data;
    std::string betas = "0";
    std::vector<std::string> constraints;
    double alpha = 0.05;
    int multistart = 5;
    Output out;
};

int cmd_test(const TestArgs& a, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.data);
    const auto betas = parse_list(a.betas, "--beta");
    const Constraint con = parse_constraints(a.constraints);
    std::vector<std::string> warnings;
    const auto fits = fits_for(ds, betas, a.multistart, 1, warnings);

    Table t;
    base_meta(t, "test");
    dataset_meta(t, ds);
    t.meta.emplace_back("beta_grid", betas.empty() ? "tuned over " + join(default_beta_grid()) : join(betas));
    t.meta.emplace_back("constraint", con.label);
    t.columns = {"label", "beta", "statistic", "df", "p_value", "reject_0.05", "alpha", "reject_alpha", "pseudo_inverse"};
    for (const auto& lf : fits) {
        TestResult r;
        try {
            r = wald_statistic(lf.fit, con, {0.05, a.alpha});
        } catch (const std::invalid_argument& e) {
            throw DomainError(std::string("test: ") + e.what());
        }
        if (r.pseudo_inverse) warnings.push_back("beta " + lf.label + ": constraint covariance inverted by pseudo-inverse");
        t.rows.push_back({lf.label, lf.fit.beta, r.statistic, static_cast<long long>(r.df), r.p_value,
                          r.reject_at[0].reject, a.alpha, r.reject_at[1].reject, r.pseudo_inverse});
    }
    flush_warnings(warnings, err);
    emit(t, a.out, out);
    return kExitOk;
}

struct TuneArgs {
    std::string data;
    std::string grid;
    double epsilon = 1e-4;
    int max_rounds = 20;
    std::string pilot;
    int multistart = 5;
    unsigned threads = 1;
    Output out;
};

int cmd_tune(const TuneArgs& a, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.data);
    TuningConfig tc;
    if (!a.grid.empty()) tc.beta_grid = parse_list(a.grid, "--grid");
    tc.epsilon = a.epsilon;
    tc.max_rounds = a.max_rounds;
    tc.threads = a.threads;
    tc.fit.multistart = a.multistart;
    if (!a.pilot.empty()) {
        const auto p = parse_list(a.pilot, "--pilot");
        if (p.size() != 3) throw CLI::ValidationError("--pilot", "expected 'a0,a1,eta'");
        tc.pilot = ModelParams{p[0], p[1], p[2]};
    }
    const TuningResult r = select_beta(ds.plan, ds.data, tc);

    Table t;
    base_meta(t, "tune");
    dataset_meta(t, ds);
    t.meta.emplace_back("beta_grid", join(tc.beta_grid));
    t.meta.emplace_back("beta_opt", full(r.beta_opt));
    t.meta.emplace_back("theta_opt", full(r.theta_opt.a0) + "," + full(r.theta_opt.a1) + "," + full(r.theta_opt.eta));
    t.meta.emplace_back("initial_pilot",
                        full(r.initial_pilot.a0) + "," + full(r.initial_pilot.a1) + "," + full(r.initial_pilot.eta));
    t.meta.emplace_back("rounds", std::to_string(r.rounds));
    t.meta.emplace_back("pilot_converged", r.pilot_converged ? "true" : "false");
    t.columns = {"beta", "mse", "variance", "bias_squared", "used", "selected"};
    for (const auto& p : r.mse_curve)
        t.rows.push_back({p.beta, p.mse, p.variance, p.mse - p.variance, p.used, p.used && p.beta == r.beta_opt});
    flush_warnings(r.warnings, err);
    emit(t, a.out, out);
    return kExitOk;
}

struct InfluenceArgs {
    std::string data;
    std::string theta;
    double beta = 0.0;
    std::vector<std::size_t> cells;
    std::string constraint;
    std::optional<double> n;
    std::string probe;
    std::string grid;
    std::string levels = "30,40";
    std::string changes = "18,52";
    std::string times = "6,10,14,18,20,24,28,32,36,40,44,48,52";
    int multistart = 5;
    Output out;
};

int cmd_influence(const InfluenceArgs& a, std::ostream& out, std::ostream& err) {
    Table t;
    base_meta(t, "influence");
    std::optional<StressPlan> plan;
    ModelParams point;
    double n = 200.0;
    if (!a.data.empty()) {
        const Dataset ds = load_dataset(a.data);
        dataset_meta(t, ds);
        std::vector<std::string> warnings;
        const auto fits = fits_for(ds, {a.beta}, a.multistart, 1, warnings);
        flush_warnings(warnings, err);
        plan = ds.plan;
        point = fits.front().fit.params;
        n = static_cast<double>(ds.data.total);
    } else {
        if (a.theta.empty()) throw CLI::ValidationError("--theta", "either --data or --theta is required");
        const auto p = parse_list(a.theta, "--theta");
        if (p.size() != 3) throw CLI::ValidationError("--theta", "expected 'a0,a1,eta'");
        point = {p[0], p[1], p[2]};
        try {
            plan = StressPlan(parse_list(a.levels, "--levels"), parse_list(a.changes, "--changes"),
                              parse_list(a.times, "--times"));
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("influence: ") + e.what());
        }
        t.meta.emplace_back("dataset", "none");
        t.meta.emplace_back("seed", "none");
    }
    if (a.n) n = *a.n;
    t.meta.emplace_back("beta_grid", join({a.beta}));
    t.meta.emplace_back("theta", full(point.a0) + "," + full(point.a1) + "," + full(point.eta));

    if (!a.probe.empty()) {
        if (a.grid.empty()) throw CLI::ValidationError("--grid", "--probe needs --grid");
        const ProbeMode mode = a.probe == "inspection_time" ? ProbeMode::inspection_time : ProbeMode::stress_level;
        const auto pts = leverage_probe(point, *plan, a.beta, mode, parse_list(a.grid, "--grid"));
        t.meta.emplace_back("probe", a.probe);
        t.columns = {"value", "if_norm"};
        for (const auto& p : pts) t.rows.push_back({p.value, p.norm});
        emit(t, a.out, out);
        return kExitOk;
    }

    const Constraint con =
        a.constraint.empty() ? linear_constraint({0.0, 1.0, 0.0}, point.a1) : parse_constraint(a.constraint);
    t.meta.emplace_back("constraint", con.label);
    t.meta.emplace_back("n", full(n));
    std::vector<std::size_t> cells = a.cells;
    if (cells.empty())
        for (std::size_t c = 1; c <= plan->num_cells(); ++c) cells.push_back(c);
    t.columns = {"cell", "if_a0", "if_a1", "if_eta", "if_norm", "if_wald_second_order", "pseudo_inverse"};
    for (std::size_t c : cells) {
        if (c < 1 || c > plan->num_cells())
            throw CLI::ValidationError("--cell", "cell " + std::to_string(c) + " outside 1.." +
                                                     std::to_string(plan->num_cells()));
        const IFReport r = influence_report(point, *plan, a.beta, con, c, n);
        t.rows.push_back({static_cast<long long>(c), r.if_vector[0], r.if_vector[1], r.if_vector[2], norm(r.if_vector),
                          r.if_wald_second_order, r.pseudo_inverse});
    }
    emit(t, a.out, out);
    return kExitOk;
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<unsigned> threads;
    Output out{"csv", ""};
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    ScenarioSpec spec = load_scenario_file(a.config);
    if (a.seed) spec.seed = *a.seed;
    if (a.replications) spec.replications = *a.replications;
    if (a.threads) spec.threads = *a.threads;
    const MetricsTable mt = run_scenario(spec);

    Table t;
    base_meta(t, "simulate");
    t.meta.emplace_back("scenario", spec.name);
    t.meta.emplace_back("dataset", "simulated");
    {
        std::ifstream f(a.config, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        t.meta.emplace_back("config_hash", fnv1a_hex(ss.str()));
    }
    t.meta.emplace_back("seed", std::to_string(spec.seed));
    t.meta.emplace_back("replications", std::to_string(spec.replications));
    t.meta.emplace_back("beta_grid", join(spec.beta_grid) + (spec.include_optimal ? ",Optimal" : ""));
    t.columns = MetricsTable::columns();
    for (const auto& r : mt.rows) {
        t.rows.push_back({r.scenario, r.contaminated_param, r.contamination_value, r.beta_label, r.beta,
                          static_cast<long long>(r.replications), static_cast<long long>(r.failures), r.failure_rate,
                          static_cast<long long>(r.unreliable), r.rmse_theta, r.rmse_theta_se, r.rmse_a0, r.rmse_a1,
                          r.rmse_eta, r.mse_reliability, r.mse_reliability_se, r.mse_mean, r.mse_mean_se,
                          r.cov_direct_rel, r.cov_direct_rel_se, r.cov_transformed_rel, r.cov_transformed_rel_se,
                          r.cov_direct_mean, r.cov_direct_mean_se, r.cov_transformed_mean, r.cov_transformed_mean_se,
                          r.level, r.level_se, r.power, r.power_se, r.mean_selected_beta});
        if (r.unreliable)
            err << "warning: " << r.beta_label << " at contamination " << full(r.contamination_value) << ": "
                << r.failures << " of " << r.replications << " fits failed\n";
    }
    if (t.rows.size() && t.rows.front().size() != t.columns.size())
        throw std::logic_error("simulate: metric row does not match the column list");
    emit(t, a.out, out);
    return kExitOk;
}

struct DatasetsArgs {
    std::string name;
    bool raw = false;
    Output out;
};

int cmd_datasets(const DatasetsArgs& a, std::ostream& out) {
    if (!a.name.empty() && a.raw) {
        out << builtin_dataset_text(a.name);
        return kExitOk;
    }
    Table t;
    base_meta(t, "datasets");
    if (a.name.empty()) {
        t.meta.emplace_back("seed", "none");
        t.meta.emplace_back("beta_grid", "none");
        t.columns = {"name", "n_total", "n_used", "levels", "inspections", "x0_physical", "x0", "time_units", "hash"};
        for (const auto& nm : builtin_dataset_names()) {
            const Dataset ds = builtin_dataset(nm);
            t.rows.push_back({ds.name, static_cast<long long>(ds.n_total_raw), static_cast<long long>(ds.data.total),
                              static_cast<long long>(ds.plan.num_levels()),
                              static_cast<long long>(ds.plan.num_inspections()), ds.x0_physical, ds.x0, ds.time_units,
                              ds.hash});
        }
    } else {
        const Dataset ds = load_dataset(a.name);
        dataset_meta(t, ds);
        t.meta.emplace_back("beta_grid", "none");
        t.columns = {"cell", "from", "to", "stress", "count"};
        const auto& it = ds.plan_raw.inspection_times();
        for (std::size_t j = 0; j < ds.plan.num_cells(); ++j) {
            const double lo = j == 0 ? 0.0 : it[j - 1];
            const double hi = j < it.size() ? it[j] : INFINITY;
            const double stress = ds.plan_raw.stress_levels()[ds.plan_raw.segment_of(j < it.size() ? hi : lo)];
            t.rows.push_back({static_cast<long long>(j + 1), lo, hi, stress, static_cast<long long>(ds.data.counts[j])});
        }
    }
    emit(t, a.out, out);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust density-power-divergence inference for step-stress tests on one-shot devices", "robalt"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "fit the model at one or more beta values");
    fit_cmd->add_option("--data", fa.data, "builtin dataset name or dataset file")->required();
    fit_cmd->add_option("--beta", fa.betas, "comma-separated beta values; omit to select beta by estimated MSE");
    add_report_options(fit_cmd, fa.report);
    fit_cmd->add_option("--multistart", fa.multistart, "extra starting points per fit")->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--threads", fa.threads, "worker threads for beta selection")->check(CLI::PositiveNumber);
    add_output(fit_cmd, fa.out);

    CiArgs ca;
    auto* ci_cmd = app.add_subcommand("ci", "interval estimates for one lifetime characteristic");
    ci_cmd->add_option("--data", ca.data, "builtin dataset name or dataset file")->required();
    ci_cmd->add_option("--beta", ca.betas, "comma-separated beta values; empty selects beta by estimated MSE");
    ci_cmd->add_option("--kind", ca.kind, "reliability, quantile or mean")
        ->check(CLI::IsMember({"reliability", "quantile", "mean"}));
    add_report_options(ci_cmd, ca.report);
    ci_cmd->add_option("--multistart", ca.multistart, "extra starting points per fit")->check(CLI::NonNegativeNumber);
    add_output(ci_cmd, ca.out);

    TestArgs ta;
    auto* test_cmd = app.add_subcommand("test", "Wald-type test of linear constraints c.theta = d");
    test_cmd->add_option("--data", ta.data, "builtin dataset name or dataset file")->required();
    test_cmd->add_option("--constraint", ta.constraints, "c0,c1,c2,d (repeat for several rows)")->required();
    test_cmd->add_option("--beta", ta.betas, "comma-separated beta values");
    test_cmd->add_option("--alpha", ta.alpha, "additional significance level")->check(CLI::Range(0.0, 1.0));
    test_cmd->add_option("--multistart", ta.multistart, "extra starting points per fit")->check(CLI::NonNegativeNumber);
    add_output(test_cmd, ta.out);

    TuneArgs tu;
    auto* tune_cmd = app.add_subcommand("tune", "select beta by minimizing estimated MSE");
    tune_cmd->add_option("--data", tu.data, "builtin dataset name or dataset file")->required();
    tune_cmd->add_option("--grid", tu.grid, "comma-separated candidate beta values (default 0,0.1,...,1)");
    tune_cmd->add_option("--epsilon", tu.epsilon, "pilot convergence tolerance")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--max-rounds", tu.max_rounds, "pilot update rounds")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--pilot", tu.pilot, "initial pilot a0,a1,eta (default mean of the grid fits)");
    tune_cmd->add_option("--multistart", tu.multistart, "extra starting points per fit")->check(CLI::NonNegativeNumber);
    tune_cmd->add_option("--threads", tu.threads, "worker threads for the grid fits")->check(CLI::PositiveNumber);
    add_output(tune_cmd, tu.out);

    InfluenceArgs ia;
    auto* inf_cmd = app.add_subcommand("influence", "influence functions of the estimator and the Wald statistic");
    auto* inf_data = inf_cmd->add_option("--data", ia.data, "evaluate at the fit to this dataset");
    auto* inf_theta = inf_cmd->add_option("--theta", ia.theta, "evaluate at a0,a1,eta on the plan given below");
    inf_data->excludes(inf_theta);
    inf_cmd->add_option("--beta", ia.beta, "tuning parameter")->check(CLI::Range(0.0, 1.0));
    auto* inf_cell = inf_cmd->add_option("--cell", ia.cells, "1-based cell index (repeatable; default all cells)");
    inf_cmd->add_option("--constraint", ia.constraint, "c0,c1,c2,d for the Wald influence (default a1 held at its value)");
    inf_cmd->add_option("--n", ia.n, "sample size in the Wald influence (default the dataset size, or 200)");
    auto* inf_probe = inf_cmd->add_option("--probe", ia.probe, "sweep the last inspection time or the last stress level")
                          ->check(CLI::IsMember({"inspection_time", "stress_level"}));
    inf_probe->excludes(inf_cell);
    inf_cmd->add_option("--grid", ia.grid, "comma-separated values for --probe");
    inf_cmd->add_option("--levels", ia.levels, "stress levels when --theta is given");
    inf_cmd->add_option("--changes", ia.changes, "stress change times when --theta is given");
    inf_cmd->add_option("--times", ia.times, "inspection times when --theta is given");
    add_output(inf_cmd, ia.out);

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study described by a scenario file");
    sim_cmd->add_option("--config", sa.config, "scenario file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--seed", sa.seed, "override the scenario seed");
    sim_cmd->add_option("--replications", sa.replications, "override the replication count")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--threads", sa.threads, "worker threads")->check(CLI::PositiveNumber);
    add_output(sim_cmd, sa.out);

    DatasetsArgs da;
    auto* ds_cmd = app.add_subcommand("datasets", "list builtin datasets or show one as interval counts");
    ds_cmd->add_option("--name", da.name, "dataset to show");
    ds_cmd->add_flag("--raw", da.raw, "print the builtin dataset file verbatim");
    add_output(ds_cmd, da.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*fit_cmd) return cmd_fit(fa, out, err);
        if (*ci_cmd) return cmd_ci(ca, out, err);
        if (*test_cmd) return cmd_test(ta, out, err);
        if (*tune_cmd) return cmd_tune(tu, out, err);
        if (*inf_cmd) return cmd_influence(ia, out, err);
        if (*sim_cmd) return cmd_simulate(sa, out, err);
        if (*ds_cmd) return cmd_datasets(da, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const DomainError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitParse;
}

}  // namespace robalt
