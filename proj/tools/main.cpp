#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "geobias/core.hpp"
#include "geobias/errors.hpp"
#include "geobias/io.hpp"
#include "geobias/pipeline.hpp"
#include "geobias/report.hpp"
#include "geobias/version.hpp"

namespace {

using geobias::Error;
using geobias::IoError;
using geobias::ParameterError;
using geobias::SchemaError;
using nlohmann::json;

struct GlobalArgs {
    std::string out = "out";
    std::string config_path;
    std::uint64_t seed = 0;
    bool no_timestamp = false;
    bool fail_on_finding = false;
    bool json_logs = false;
    int threads = 1;
    CLI::Option* seed_opt = nullptr;

    bool seed_given() const { return seed_opt != nullptr && seed_opt->count() > 0; }
};

// One config-file key bound to one CLI option; the config value applies only
// when the flag was not given (flags win).
struct CfgBinding {
    std::string key;
    CLI::Option* opt = nullptr;
    std::function<void(const json&)> apply;
};

double as_double(const json& v, const std::string& key) {
    if (!v.is_number()) throw SchemaError("config: key '" + key + "' must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw SchemaError("config: key '" + key + "' must be an integer");
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
        throw SchemaError("config: key '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw SchemaError("config: key '" + key + "' must be a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw SchemaError("config: key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
    if (!v.is_array()) throw SchemaError("config: key '" + key + "' must be an array of integers");
    std::vector<int> out;
    for (const json& e : v) out.push_back(as_int(e, key));
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("config: top level must be a JSON object");
    return j;
}

void apply_config(const json& cfg, const std::vector<CfgBinding>& bindings) {
    for (const auto& [key, value] : cfg.items()) {
        const auto it = std::find_if(bindings.begin(), bindings.end(),
                                     [&](const CfgBinding& b) { return b.key == key; });
        if (it == bindings.end())
            throw SchemaError("config: unknown key '" + key + "' for this command");
        if (it->opt->count() == 0) it->apply(value);
    }
}

void log_error(const std::string& message, bool json_logs) {
    if (json_logs)
        std::cerr << json{{"event", "error"}, {"message", message}}.dump() << "\n";
    else
        std::cerr << "error: " << message << "\n";
}

int finish(const geobias::report::AuditReport& rep, const GlobalArgs& g) {
    for (const auto& f : rep.findings) {
        if (g.json_logs) {
            std::cout << json{{"event", "finding"},
                              {"id", f.id},
                              {"kind", f.kind},
                              {"level", geobias::report::to_string(f.level)},
                              {"severity", geobias::to_string(f.severity)},
                              {"metrics", f.metrics}}
                             .dump()
                      << "\n";
        } else {
            std::cout << "[" << geobias::to_string(f.severity) << "] " << f.id << " (" << f.kind
                      << ")\n";
            for (const auto& [name, value] : f.metrics)
                std::cout << "  " << name << " = " << value << "\n";
            for (const auto& note : f.notes) std::cout << "  note: " << note << "\n";
        }
    }
    const std::string path = g.out + "/report.json";
    if (g.json_logs)
        std::cout << json{{"event", "report"}, {"path", path}}.dump() << "\n";
    else
        std::cout << "report: " << path << "\n";

    if (g.fail_on_finding)
        for (const auto& f : rep.findings)
            if (f.severity != geobias::Severity::info) return 3;
    return 0;
}

geobias::pipeline::RunContext make_context(const GlobalArgs& g, json config) {
    geobias::pipeline::RunContext ctx;
    ctx.out_dir = g.out;
    if (g.seed_given()) ctx.seed = g.seed;
    ctx.timestamp = !g.no_timestamp;
    ctx.config = std::move(config);
    return ctx;
}

geobias::PointDataset load_points(const std::string& path, const geobias::CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file " + path);
    return geobias::load_points_csv(in, schema);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"endogenous-bias auditor for spatial analysis workflows"};
    app.set_version_flag("--version", std::string("geobias ") + geobias::kToolVersion);
    app.require_subcommand(0, 1);

    GlobalArgs g;
    std::vector<CfgBinding> global_bindings;
    auto* out_opt = app.add_option("--out", g.out, "output directory (default: out)");
    app.add_option("--config", g.config_path, "JSON config file; flags win over config values");
    g.seed_opt = app.add_option("--seed", g.seed, "RNG seed, echoed into the report");
    auto* nots_opt =
        app.add_flag("--no-timestamp", g.no_timestamp, "omit created_at from the report");
    auto* fof_opt = app.add_flag("--fail-on-finding", g.fail_on_finding,
                                 "exit 3 when any warning or critical finding exists");
    auto* jl_opt = app.add_flag("--json-logs", g.json_logs, "machine-readable JSON log lines");
    auto* thr_opt = app.add_option("--threads", g.threads,
                                   "worker thread cap (current build is single-threaded; "
                                   "output never depends on this)");
    global_bindings.push_back({"out", out_opt, [&](const json& v) { g.out = as_string(v, "out"); }});
    global_bindings.push_back(
        {"seed", g.seed_opt, [&](const json& v) { g.seed = as_u64(v, "seed"); }});
    global_bindings.push_back(
        {"no-timestamp", nots_opt, [&](const json& v) { g.no_timestamp = as_bool(v, "no-timestamp"); }});
    global_bindings.push_back(
        {"fail-on-finding", fof_opt,
         [&](const json& v) { g.fail_on_finding = as_bool(v, "fail-on-finding"); }});
    global_bindings.push_back(
        {"json-logs", jl_opt, [&](const json& v) { g.json_logs = as_bool(v, "json-logs"); }});
    global_bindings.push_back(
        {"threads", thr_opt, [&](const json& v) { g.threads = as_int(v, "threads"); }});

    // simpson
    struct {
        std::string input, x, y, group;
        double alpha = 0.05;
    } sa;
    std::vector<CfgBinding> simpson_bindings;
    CLI::App* cmd_simpson = app.add_subcommand("simpson", "pooled-vs-grouped trend reversal audit");
    cmd_simpson->fallthrough();
    {
        auto* o_in = cmd_simpson->add_option("--input", sa.input, "points CSV")->required();
        auto* o_x = cmd_simpson->add_option("--x", sa.x, "explanatory attribute column")->required();
        auto* o_y = cmd_simpson->add_option("--y", sa.y, "response attribute column")->required();
        auto* o_g = cmd_simpson->add_option("--group", sa.group, "group column")->required();
        auto* o_a = cmd_simpson->add_option("--alpha", sa.alpha, "significance level (default 0.05)");
        simpson_bindings = {
            {"input", o_in, [&](const json& v) { sa.input = as_string(v, "input"); }},
            {"x", o_x, [&](const json& v) { sa.x = as_string(v, "x"); }},
            {"y", o_y, [&](const json& v) { sa.y = as_string(v, "y"); }},
            {"group", o_g, [&](const json& v) { sa.group = as_string(v, "group"); }},
            {"alpha", o_a, [&](const json& v) { sa.alpha = as_double(v, "alpha"); }},
        };
    }

    // gwr
    struct {
        std::string input, x1, y;
        double bandwidth = 0.0, bw_lo = 0.0, bw_hi = 0.0, quantile = 0.95;
        int grid_side = 32;
    } ga;
    std::vector<CfgBinding> gwr_bindings;
    CLI::App* cmd_gwr = app.add_subcommand("gwr", "local-coefficient discontinuity audit");
    cmd_gwr->fallthrough();
    {
        auto* o_in = cmd_gwr->add_option("--input", ga.input, "points CSV")->required();
        auto* o_x1 = cmd_gwr->add_option("--x1", ga.x1, "explanatory attribute column")->required();
        auto* o_y = cmd_gwr->add_option("--y", ga.y, "response attribute column")->required();
        auto* o_bw = cmd_gwr->add_option("--bandwidth", ga.bandwidth,
                                         "kernel bandwidth; 0 = select by leave-one-out CV");
        auto* o_lo = cmd_gwr->add_option("--bw-lo", ga.bw_lo, "CV search lower bound (0 = auto)");
        auto* o_hi = cmd_gwr->add_option("--bw-hi", ga.bw_hi, "CV search upper bound (0 = auto)");
        auto* o_gs = cmd_gwr->add_option("--grid-side", ga.grid_side, "evaluation grid side");
        auto* o_q = cmd_gwr->add_option("--quantile", ga.quantile,
                                        "discontinuity flag quantile (default 0.95)");
        gwr_bindings = {
            {"input", o_in, [&](const json& v) { ga.input = as_string(v, "input"); }},
            {"x1", o_x1, [&](const json& v) { ga.x1 = as_string(v, "x1"); }},
            {"y", o_y, [&](const json& v) { ga.y = as_string(v, "y"); }},
            {"bandwidth", o_bw, [&](const json& v) { ga.bandwidth = as_double(v, "bandwidth"); }},
            {"bw-lo", o_lo, [&](const json& v) { ga.bw_lo = as_double(v, "bw-lo"); }},
            {"bw-hi", o_hi, [&](const json& v) { ga.bw_hi = as_double(v, "bw-hi"); }},
            {"grid-side", o_gs, [&](const json& v) { ga.grid_side = as_int(v, "grid-side"); }},
            {"quantile", o_q, [&](const json& v) { ga.quantile = as_double(v, "quantile"); }},
        };
    }

    // kde (bandwidth sweep / false-center audit)
    struct {
        std::string input;
        double h_lo = 0.0, h_hi = 0.0, radius_factor = 2.0;
        int steps = 8, grid_side = 128;
    } ka;
    std::vector<CfgBinding> kde_bindings;
    CLI::App* cmd_kde = app.add_subcommand("kde", "bandwidth-sweep false-center audit");
    cmd_kde->fallthrough();
    {
        auto* o_in = cmd_kde->add_option("--input", ka.input, "points CSV")->required();
        auto* o_lo = cmd_kde->add_option("--h-lo", ka.h_lo,
                                         "smallest bandwidth (0 = quarter Silverman)");
        auto* o_hi = cmd_kde->add_option("--h-hi", ka.h_hi,
                                         "largest bandwidth (0 = half the bounding-box span)");
        auto* o_st = cmd_kde->add_option("--steps", ka.steps, "sweep steps (default 8)");
        auto* o_gs = cmd_kde->add_option("--grid-side", ka.grid_side, "density grid side");
        auto* o_rf = cmd_kde->add_option("--radius-factor", ka.radius_factor,
                                         "false-center distance factor (default 2.0)");
        kde_bindings = {
            {"input", o_in, [&](const json& v) { ka.input = as_string(v, "input"); }},
            {"h-lo", o_lo, [&](const json& v) { ka.h_lo = as_double(v, "h-lo"); }},
            {"h-hi", o_hi, [&](const json& v) { ka.h_hi = as_double(v, "h-hi"); }},
            {"steps", o_st, [&](const json& v) { ka.steps = as_int(v, "steps"); }},
            {"grid-side", o_gs, [&](const json& v) { ka.grid_side = as_int(v, "grid-side"); }},
            {"radius-factor", o_rf,
             [&](const json& v) { ka.radius_factor = as_double(v, "radius-factor"); }},
        };
    }

    // maup
    struct {
        std::string input, value;
        std::vector<int> block_sides = {5, 10, 20, 25};
        double q = 0.25, ref_side = 10.0;
        int grid_side = 100, offset_x = 0, offset_y = 0;
    } ma;
    std::vector<CfgBinding> maup_bindings;
    CLI::App* cmd_maup = app.add_subcommand("maup", "zoning-consistency audit");
    cmd_maup->fallthrough();
    {
        auto* o_in = cmd_maup->add_option("--input", ma.input, "points CSV")->required();
        auto* o_val =
            cmd_maup->add_option("--value", ma.value, "value attribute column")->required();
        auto* o_gs = cmd_maup->add_option("--grid-side", ma.grid_side,
                                          "rasterization grid side (default 100)");
        auto* o_bs = cmd_maup->add_option("--block-sides", ma.block_sides,
                                          "block sides of the zone groupings (>= 2 values)");
        auto* o_q = cmd_maup->add_option("--q", ma.q, "top-quantile share (default 0.25)");
        auto* o_rs = cmd_maup->add_option("--ref-side", ma.ref_side,
                                          "reference cell side in world units (default 10)");
        auto* o_ox = cmd_maup->add_option("--offset-x", ma.offset_x, "block anchor x offset");
        auto* o_oy = cmd_maup->add_option("--offset-y", ma.offset_y, "block anchor y offset");
        maup_bindings = {
            {"input", o_in, [&](const json& v) { ma.input = as_string(v, "input"); }},
            {"value", o_val, [&](const json& v) { ma.value = as_string(v, "value"); }},
            {"grid-side", o_gs, [&](const json& v) { ma.grid_side = as_int(v, "grid-side"); }},
            {"block-sides", o_bs,
             [&](const json& v) { ma.block_sides = as_int_list(v, "block-sides"); }},
            {"q", o_q, [&](const json& v) { ma.q = as_double(v, "q"); }},
            {"ref-side", o_rs, [&](const json& v) { ma.ref_side = as_double(v, "ref-side"); }},
            {"offset-x", o_ox, [&](const json& v) { ma.offset_x = as_int(v, "offset-x"); }},
            {"offset-y", o_oy, [&](const json& v) { ma.offset_y = as_int(v, "offset-y"); }},
        };
    }

    // access
    struct {
        std::string demand, facilities;
        double d0 = 10.0, w_at_d0 = 0.01, threshold_ratio = 0.95;
        int grid_side = 32;
    } aa;
    std::vector<CfgBinding> access_bindings;
    CLI::App* cmd_access = app.add_subcommand("access", "accessibility disparity audit");
    cmd_access->fallthrough();
    {
        auto* o_d = cmd_access->add_option("--demand", aa.demand, "demand CSV")->required();
        auto* o_f =
            cmd_access->add_option("--facilities", aa.facilities, "facilities CSV")->required();
        auto* o_d0 = cmd_access->add_option("--d0", aa.d0, "catchment radius (default 10)");
        auto* o_w = cmd_access->add_option("--w-at-d0", aa.w_at_d0,
                                           "decay weight at the catchment edge (default 0.01)");
        auto* o_tr = cmd_access->add_option("--threshold-ratio", aa.threshold_ratio,
                                            "disparity flag ratio (default 0.95)");
        auto* o_gs = cmd_access->add_option("--grid-side", aa.grid_side, "map grid side");
        access_bindings = {
            {"demand", o_d, [&](const json& v) { aa.demand = as_string(v, "demand"); }},
            {"facilities", o_f, [&](const json& v) { aa.facilities = as_string(v, "facilities"); }},
            {"d0", o_d0, [&](const json& v) { aa.d0 = as_double(v, "d0"); }},
            {"w-at-d0", o_w, [&](const json& v) { aa.w_at_d0 = as_double(v, "w-at-d0"); }},
            {"threshold-ratio", o_tr,
             [&](const json& v) { aa.threshold_ratio = as_double(v, "threshold-ratio"); }},
            {"grid-side", o_gs, [&](const json& v) { aa.grid_side = as_int(v, "grid-side"); }},
        };
    }

    // demo
    struct {
        std::string experiment;
    } da;
    std::vector<CfgBinding> demo_bindings;
    CLI::App* cmd_demo = app.add_subcommand("demo", "run a bundled synthetic experiment");
    cmd_demo->fallthrough();
    {
        std::string names;
        for (const std::string& n : geobias::pipeline::demo_experiments())
            names += (names.empty() ? "" : "|") + n;
        auto* o_e = cmd_demo->add_option("--experiment", da.experiment, "one of " + names)
                        ->required();
        demo_bindings = {
            {"experiment", o_e, [&](const json& v) { da.experiment = as_string(v, "experiment"); }},
        };
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (g.threads < 1) throw ParameterError("--threads must be >= 1");

        CLI::App* active = nullptr;
        const std::vector<CfgBinding>* active_bindings = nullptr;
        if (cmd_simpson->parsed()) active = cmd_simpson, active_bindings = &simpson_bindings;
        if (cmd_gwr->parsed()) active = cmd_gwr, active_bindings = &gwr_bindings;
        if (cmd_kde->parsed()) active = cmd_kde, active_bindings = &kde_bindings;
        if (cmd_maup->parsed()) active = cmd_maup, active_bindings = &maup_bindings;
        if (cmd_access->parsed()) active = cmd_access, active_bindings = &access_bindings;
        if (cmd_demo->parsed()) active = cmd_demo, active_bindings = &demo_bindings;
        if (active == nullptr) {
            std::cout << app.help();
            return 0;
        }

        if (!g.config_path.empty()) {
            std::vector<CfgBinding> bindings = global_bindings;
            bindings.insert(bindings.end(), active_bindings->begin(), active_bindings->end());
            const json cfg = load_config_file(g.config_path);
            apply_config(cfg, bindings);
            if (g.threads < 1) throw ParameterError("threads must be >= 1");
        }

        // The echoed config holds only parameters that shape the analysis, so
        // reports from runs differing in --out alone stay byte-identical.
        if (active == cmd_simpson) {
            json config{{"alpha", sa.alpha}, {"group", sa.group}, {"input", sa.input},
                        {"x", sa.x},         {"y", sa.y}};
            geobias::CsvSchema schema;
            schema.x = "x";
            schema.y = "y";
            schema.attrs = {sa.x, sa.y};
            schema.group = sa.group;
            const geobias::PointDataset d = load_points(sa.input, schema);
            geobias::pipeline::SimpsonOptions opt;
            opt.x_attr = sa.x;
            opt.y_attr = sa.y;
            opt.alpha = sa.alpha;
            return finish(geobias::pipeline::run_simpson(d, opt, make_context(g, config)), g);
        }
        if (active == cmd_gwr) {
            json config{{"bandwidth", ga.bandwidth},
                        {"bw-hi", ga.bw_hi},
                        {"bw-lo", ga.bw_lo},
                        {"grid-side", ga.grid_side},
                        {"input", ga.input},
                        {"quantile", ga.quantile},
                        {"x1", ga.x1},
                        {"y", ga.y}};
            geobias::CsvSchema schema;
            schema.attrs = {ga.x1, ga.y};
            const geobias::PointDataset d = load_points(ga.input, schema);
            geobias::pipeline::GwrOptions opt;
            opt.x1_attr = ga.x1;
            opt.y_attr = ga.y;
            opt.bandwidth = ga.bandwidth;
            opt.bw_lo = ga.bw_lo;
            opt.bw_hi = ga.bw_hi;
            opt.grid_side = ga.grid_side;
            opt.threshold_quantile = ga.quantile;
            return finish(geobias::pipeline::run_gwr(d, opt, make_context(g, config)), g);
        }
        if (active == cmd_kde) {
            json config{{"grid-side", ka.grid_side}, {"h-hi", ka.h_hi},
                        {"h-lo", ka.h_lo},           {"input", ka.input},
                        {"radius-factor", ka.radius_factor}, {"steps", ka.steps}};
            if (ka.h_lo > 0.0 && ka.h_hi > 0.0 && ka.h_lo >= ka.h_hi)
                throw ParameterError("kde: --h-lo must be below --h-hi");
            geobias::CsvSchema schema;
            const geobias::PointDataset d = load_points(ka.input, schema);
            geobias::pipeline::KdeSweepOptions opt;
            opt.h_lo = ka.h_lo;
            opt.h_hi = ka.h_hi;
            opt.steps = ka.steps;
            opt.grid_side = ka.grid_side;
            opt.radius_factor = ka.radius_factor;
            return finish(geobias::pipeline::run_kde_sweep(d, opt, make_context(g, config)), g);
        }
        if (active == cmd_maup) {
            json config{{"block-sides", ma.block_sides},
                        {"grid-side", ma.grid_side},
                        {"input", ma.input},
                        {"offset-x", ma.offset_x},
                        {"offset-y", ma.offset_y},
                        {"q", ma.q},
                        {"ref-side", ma.ref_side},
                        {"value", ma.value}};
            geobias::CsvSchema schema;
            schema.attrs = {ma.value};
            const geobias::PointDataset d = load_points(ma.input, schema);
            const geobias::Rect bbox = geobias::bounding_box(d);
            const geobias::GridSpec grid = geobias::grid_over(bbox, ma.grid_side, ma.grid_side);
            const geobias::RasterGrid surface =
                geobias::rasterize(d, ma.value, grid, geobias::Aggregator::mean);
            geobias::pipeline::MaupOptions opt;
            opt.block_sides = ma.block_sides;
            opt.offset = {ma.offset_x, ma.offset_y};
            opt.q = ma.q;
            opt.ref_cell_side = ma.ref_side;
            return finish(geobias::pipeline::run_maup(surface, opt, make_context(g, config)), g);
        }
        if (active == cmd_access) {
            json config{{"d0", aa.d0},
                        {"demand", aa.demand},
                        {"facilities", aa.facilities},
                        {"grid-side", aa.grid_side},
                        {"threshold-ratio", aa.threshold_ratio},
                        {"w-at-d0", aa.w_at_d0}};
            const auto demand = geobias::access::load_demand_csv(aa.demand);
            const auto facilities = geobias::access::load_facilities_csv(aa.facilities);
            geobias::pipeline::AccessOptions opt;
            opt.decay = geobias::access::DecaySpec{aa.d0, aa.w_at_d0};
            opt.threshold_ratio = aa.threshold_ratio;
            opt.grid_side = aa.grid_side;
            return finish(
                geobias::pipeline::run_access(demand, facilities, opt, make_context(g, config)),
                g);
        }
        // demo: default seed 42 when --seed is absent
        const std::uint64_t seed = g.seed_given() ? g.seed : 42;
        return finish(
            geobias::pipeline::run_demo(da.experiment, seed, make_context(g, json::object())), g);
    } catch (const ParameterError& e) {
        log_error(e.what(), g.json_logs);
        return 2;
    } catch (const SchemaError& e) {
        log_error(e.what(), g.json_logs);
        return 2;
    } catch (const Error& e) {
        log_error(e.what(), g.json_logs);
        return 1;
    } catch (const std::exception& e) {
        log_error(e.what(), g.json_logs);
        return 1;
    }
}
