#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hazmap/harness.hpp"
#include "hazmap/report_io.hpp"

namespace fs = std::filesystem;
using namespace hazmap;

namespace {

enum Exit { kOk = 0, kConfig = 1, kObjective = 2, kScore = 3 };

struct Common {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "JSON run configuration");
    cmd->add_option("--objective", c.preset_name,
                    "preset: gaussian-2d, gaussian-4d, gaussian-4d-full, cutin-3d");
    cmd->add_option("--seed", c.seed, "single seed, overrides the config seed list");
    cmd->add_option("--budget", c.budget, "fixed budget, disables the stopping rule");
    cmd->add_option("--out", c.out, "output directory (else $HAZMAP_OUT_DIR, else config output_dir)");
}

RunConfig resolve(const Common& c)
{
    RunConfig cfg = c.config_path.empty() ? preset(c.preset_name.empty() ? "gaussian-2d" : c.preset_name)
                                          : load_config(c.config_path);
    if (!c.config_path.empty() && !c.preset_name.empty()) {
        throw ConfigError("--config and --objective are mutually exclusive");
    }
    if (c.seed) cfg.seeds = {*c.seed};
    if (c.budget) {
        cfg.budget = *c.budget;
        cfg.stopping_enabled = false;
    }
    if (!c.out.empty()) {
        cfg.output_dir = c.out;
    } else if (const char* env = std::getenv("HAZMAP_OUT_DIR"); env && *env) {
        cfg.output_dir = env;
    }
    cfg.validate();
    return cfg;
}

std::string stem(const RunReport& r)
{
    return r.config.objective + "_" + std::string(to_string(r.algorithm)) + "_" +
           std::string(to_string(r.config.ucb.mode)) + "_seed" + std::to_string(r.seed);
}

void persist(const RunReport& r, const fs::path& dir)
{
    const auto name = stem(r);
    write_json(dir / (name + ".json"), report_to_json(r));
    std::vector<std::string> trace = r.selection_trace;
    for (const auto& d : r.stop_history) {
        nlohmann::json j{{"event", "stop_check"}, {"n", d.n_samples}, {"coverage", d.coverage},
                         {"f2_obv", d.f2_obv}, {"stop", d.stop}};
        trace.push_back(j.dump());
    }
    write_lines(dir / (name + "_trace.jsonl"), trace);
    emit_plots(r, dir, name);
}

void summarize(const RunReport& r)
{
    std::cout << stem(r) << ": n=" << r.records.size() << " domains=" << r.domains.size()
              << " f2_grid=" << r.metrics.f2_grid << " api=" << r.metrics.api << " adi=" << r.metrics.adi
              << " hazard_ratio=" << r.metrics.hazard_ratio << (r.metrics.no_detection ? " no_detection" : "")
              << " time=" << r.timings.at("total") << "s" << (r.complete ? "" : " INCOMPLETE: " + r.failure)
              << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

int do_runs(const Common& c, Algorithm algorithm)
{
    const RunConfig cfg = resolve(c);
    const fs::path dir = cfg.output_dir;
    const auto ctx = make_evaluation_context(cfg);
    std::ofstream table;
    fs::create_directories(dir);
    table.open(dir / "results.csv", std::ios::app | std::ios::binary);
    if (table.tellp() == 0) table << "objective,algorithm,mode,seed,n_samples," << metrics_csv_header() << '\n';
    int code = kOk;
    for (auto seed : cfg.seeds) {
        const auto r = algorithm == Algorithm::item ? run_item(cfg, seed, ctx) : run_random_baseline(cfg, seed, ctx);
        persist(r, dir);
        summarize(r);
        table << r.config.objective << ',' << to_string(r.algorithm) << ',' << to_string(r.config.ucb.mode) << ','
              << seed << ',' << r.records.size() << ',' << metrics_csv_row(r.metrics) << '\n';
        if (!r.complete) code = kObjective;
    }
    return code;
}

int do_ablate(const Common& c)
{
    const RunConfig cfg = resolve(c);
    const fs::path dir = cfg.output_dir;
    const auto pairs = run_ablation(cfg);
    nlohmann::json summary{{"schema", kAblationSchema}, {"objective", cfg.objective}};
    int wins = 0;
    int code = kOk;
    for (const auto& p : pairs) {
        persist(p.improved, dir);
        persist(p.original, dir);
        summarize(p.improved);
        summarize(p.original);
        summary["pairs"].push_back({{"seed", p.seed},
                                    {"improved_focus", p.improved_focus},
                                    {"original_focus", p.original_focus}});
        wins += p.improved_focus > p.original_focus ? 1 : 0;
        if (!p.improved.complete || !p.original.complete) code = kObjective;
        std::cout << "seed " << p.seed << ": boundary focus improved=" << p.improved_focus
                  << " original=" << p.original_focus << '\n';
    }
    summary["improved_wins"] = wins;
    write_json(dir / (cfg.objective + "_ablation.json"), summary);
    std::cout << "improved mode ahead in " << wins << " of " << pairs.size() << " seeds\n";
    return code;
}

int do_score(const std::string& report_path)
{
    const auto j = read_json(report_path);
    const RunReport r = report_from_json(j);
    const auto ctx = make_evaluation_context(r.config);
    const MetricReport recomputed = rescore(r, ctx);
    const auto stored = metrics_to_json(r.metrics);
    const auto fresh = metrics_to_json(recomputed);
    std::cout << metrics_csv_header() << '\n' << metrics_csv_row(recomputed) << '\n';
    if (stored != fresh) {
        std::cerr << "score mismatch\nstored:     " << stored.dump() << "\nrecomputed: " << fresh.dump() << '\n';
        return kScore;
    }
    std::cout << "metrics reproduced exactly\n";
    return kOk;
}

int do_oracle(const std::string& name, std::size_t resolution, const std::string& out_arg)
{
    RunConfig cfg = preset(name);
    std::string out = out_arg;
    if (out.empty()) {
        const char* env = std::getenv("HAZMAP_OUT_DIR");
        out = env && *env ? env : cfg.output_dir;
    }
    const auto objective = objective_for(cfg);
    const std::size_t res = resolution ? resolution : default_truth_resolution(objective);
    const auto truth = grid_oracle(objective, res);
    const fs::path dir = out;
    fs::create_directories(dir);
    std::ofstream csv(dir / (objective.name + "_oracle.csv"), std::ios::binary);
    write_ground_truth_csv(truth, csv);
    std::ofstream side(dir / (objective.name + "_oracle.json"), std::ios::binary);
    side << ground_truth_sidecar_json(truth, objective.name);
    std::cout << objective.name << ": " << truth.size() << " nodes, hazardous fraction "
              << truth.hazardous_fraction << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hazmap: hazardous-domain search over black-box risk functions"};
    app.require_subcommand(1);

    Common run_opts, base_opts, abl_opts;
    auto* run = app.add_subcommand("run", "tree-guided search");
    add_common(run, run_opts);
    auto* baseline = app.add_subcommand("baseline", "uniform random sampling baseline");
    add_common(baseline, base_opts);
    auto* ablate = app.add_subcommand("ablate", "improved vs original UCB on the same seeds");
    add_common(ablate, abl_opts);

    std::string report_path;
    auto* score = app.add_subcommand("score", "recompute metrics from a stored report");
    score->add_option("report", report_path, "report JSON")->required();

    std::string oracle_name = "gaussian-2d";
    std::size_t oracle_res = 0;
    std::string oracle_out;
    auto* oracle = app.add_subcommand("oracle", "exhaustive ground-truth grid");
    oracle->add_option("--objective", oracle_name, "gaussian-2d, gaussian-4d, cutin-3d");
    oracle->add_option("--resolution", oracle_res, "nodes per axis");
    oracle->add_option("--out", oracle_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return do_runs(run_opts, Algorithm::item);
        if (*baseline) return do_runs(base_opts, Algorithm::random);
        if (*ablate) return do_ablate(abl_opts);
        if (*score) return do_score(report_path);
        if (*oracle) return do_oracle(oracle_name, oracle_res, oracle_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ObjectiveError& e) {
        std::cerr << "objective failure: " << e.what() << '\n';
        return kObjective;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
