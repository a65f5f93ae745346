#include "hazmap/report_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hazmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json box_to_json(const HazardBox& b)
{
    return {{"lower", b.lower}, {"upper", b.upper}, {"member_count", b.member_count}};
}

HazardBox box_from_json(const json& j)
{
    return HazardBox(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>(),
                     j.value("member_count", std::size_t{0}));
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
void read_into(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::string csv_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

json config_to_json(const RunConfig& c)
{
    json j;
    j["schema"] = kConfigSchema;
    j["objective"] = c.objective;
    if (c.objective == "custom") {
        j["custom"] = {{"dim", c.custom.dim},
                       {"bias", c.custom.bias},
                       {"sigma", c.custom.sigma},
                       {"half_range", c.custom.half_range},
                       {"threshold", c.custom.threshold}};
    }
    j["budget"] = c.budget ? json(*c.budget) : json(nullptr);
    j["stopping"] = {{"enabled", c.stopping_enabled},
                     {"f2_threshold", c.stop.f2_threshold},
                     {"coverage_threshold", c.stop.coverage_threshold},
                     {"bins", c.stop.bins},
                     {"first_check", c.stop.first_check},
                     {"check_every", c.stop.check_every},
                     {"max_samples", c.max_samples}};
    j["initial_samples"] = c.initial_samples;
    j["ucb"] = {{"c_p", c.ucb.c_p},
                {"mode", std::string(to_string(c.ucb.mode))},
                {"batch", c.ucb.batch},
                {"dropout_fraction", c.dropout_fraction}};
    if (c.dropout_k_explicit) j["ucb"]["dropout_k"] = c.ucb.dropout_k;
    j["classifier"] = {{"k_nn", c.classifier.k_nn}, {"distance_weighted", c.classifier.distance_weighted}};
    j["tree"] = {{"leaf_min", c.tree.leaf_min},
                 {"min_split_accuracy", c.tree.min_split_accuracy},
                 {"max_depth", c.tree.max_depth}};
    j["identify"] = {{"sibling_gap_ratio", c.identify.sibling_gap_ratio}};
    j["evaluation"] = {{"truth_resolution", c.truth_resolution}, {"ratio_resolution", c.ratio_resolution}};
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir;
    j["trace_selections"] = c.trace_selections;
    return j;
}

RunConfig config_from_json(const json& j)
{
    reject_unknown(j,
                   {"schema", "preset", "objective", "custom", "budget", "stopping", "initial_samples", "ucb",
                    "classifier", "tree", "identify", "evaluation", "seeds", "output_dir", "trace_selections"},
                   "config");
    try {
        if (auto it = j.find("schema"); it != j.end() && it->get<std::string>() != kConfigSchema) {
            throw ConfigError("config: unsupported schema '" + it->get<std::string>() + "'");
        }
        std::string base = j.value("preset", j.value("objective", std::string("gaussian-2d")));
        RunConfig c = preset(base);
        read_into(j, "objective", c.objective);

        if (auto it = j.find("custom"); it != j.end()) {
            reject_unknown(*it, {"dim", "bias", "sigma", "half_range", "threshold"}, "custom");
            read_into(*it, "dim", c.custom.dim);
            read_into(*it, "bias", c.custom.bias);
            read_into(*it, "sigma", c.custom.sigma);
            read_into(*it, "half_range", c.custom.half_range);
            read_into(*it, "threshold", c.custom.threshold);
        }
        if (auto it = j.find("stopping"); it != j.end()) {
            reject_unknown(*it,
                           {"enabled", "f2_threshold", "coverage_threshold", "bins", "first_check", "check_every",
                            "max_samples"},
                           "stopping");
            read_into(*it, "enabled", c.stopping_enabled);
            read_into(*it, "f2_threshold", c.stop.f2_threshold);
            read_into(*it, "coverage_threshold", c.stop.coverage_threshold);
            read_into(*it, "bins", c.stop.bins);
            read_into(*it, "first_check", c.stop.first_check);
            read_into(*it, "check_every", c.stop.check_every);
            read_into(*it, "max_samples", c.max_samples);
            if (c.stopping_enabled && !j.contains("budget")) c.budget.reset();
        }
        if (auto it = j.find("budget"); it != j.end()) {
            if (it->is_null()) {
                c.budget.reset();
            } else {
                c.budget = it->get<std::size_t>();
                if (!(j.contains("stopping") && j["stopping"].contains("enabled"))) c.stopping_enabled = false;
            }
        }
        read_into(j, "initial_samples", c.initial_samples);
        if (auto it = j.find("ucb"); it != j.end()) {
            reject_unknown(*it, {"c_p", "mode", "batch", "dropout_k", "dropout_fraction"}, "ucb");
            read_into(*it, "c_p", c.ucb.c_p);
            if (it->contains("mode")) c.ucb.mode = parse_ucb_mode((*it)["mode"].get<std::string>());
            read_into(*it, "batch", c.ucb.batch);
            read_into(*it, "dropout_fraction", c.dropout_fraction);
            if (it->contains("dropout_k")) {
                c.ucb.dropout_k = (*it)["dropout_k"].get<double>();
                c.dropout_k_explicit = true;
            }
        }
        if (auto it = j.find("classifier"); it != j.end()) {
            reject_unknown(*it, {"k_nn", "distance_weighted"}, "classifier");
            read_into(*it, "k_nn", c.classifier.k_nn);
            read_into(*it, "distance_weighted", c.classifier.distance_weighted);
        }
        if (auto it = j.find("tree"); it != j.end()) {
            reject_unknown(*it, {"leaf_min", "min_split_accuracy", "max_depth"}, "tree");
            read_into(*it, "leaf_min", c.tree.leaf_min);
            read_into(*it, "min_split_accuracy", c.tree.min_split_accuracy);
            read_into(*it, "max_depth", c.tree.max_depth);
        }
        if (auto it = j.find("identify"); it != j.end()) {
            reject_unknown(*it, {"sibling_gap_ratio"}, "identify");
            read_into(*it, "sibling_gap_ratio", c.identify.sibling_gap_ratio);
        }
        if (auto it = j.find("evaluation"); it != j.end()) {
            reject_unknown(*it, {"truth_resolution", "ratio_resolution"}, "evaluation");
            read_into(*it, "truth_resolution", c.truth_resolution);
            read_into(*it, "ratio_resolution", c.ratio_resolution);
        }
        read_into(j, "seeds", c.seeds);
        read_into(j, "output_dir", c.output_dir);
        read_into(j, "trace_selections", c.trace_selections);
        c.validate();
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json metrics_to_json(const MetricReport& m)
{
    json j{{"f2_grid", m.f2_grid},
           {"api", m.api},
           {"adi", m.adi},
           {"hazard_ratio", m.hazard_ratio},
           {"no_detection", m.no_detection}};
    j["per_gt"] = json::array();
    for (const auto& b : m.per_gt) {
        j["per_gt"].push_back({{"gt_volume", b.gt_volume},
                               {"overlap", b.overlap},
                               {"identified_volume", b.identified_volume},
                               {"matched", b.matched},
                               {"api", b.api},
                               {"adi", b.adi}});
    }
    return j;
}

MetricReport metrics_from_json(const json& j)
{
    MetricReport m;
    m.f2_grid = j.at("f2_grid").get<double>();
    m.api = j.at("api").get<double>();
    m.adi = j.at("adi").get<double>();
    m.hazard_ratio = j.at("hazard_ratio").get<double>();
    m.no_detection = j.at("no_detection").get<bool>();
    for (const auto& b : j.at("per_gt")) {
        GtBreakdown g;
        g.gt_volume = b.at("gt_volume").get<double>();
        g.overlap = b.at("overlap").get<double>();
        g.identified_volume = b.at("identified_volume").get<double>();
        g.matched = b.at("matched").get<std::vector<std::size_t>>();
        g.api = b.at("api").get<double>();
        g.adi = b.at("adi").get<double>();
        m.per_gt.push_back(std::move(g));
    }
    return m;
}

std::string metrics_csv_header()
{
    return "f2_grid,api,adi,hazard_ratio,no_detection";
}

std::string metrics_csv_row(const MetricReport& m)
{
    return csv_number(m.f2_grid) + "," + csv_number(m.api) + "," + csv_number(m.adi) + "," +
           csv_number(m.hazard_ratio) + "," + (m.no_detection ? "1" : "0");
}

json tree_to_json(const PartitionTree& tree)
{
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json jn{{"id", n.id},
                {"parent", n.parent},
                {"left", n.left},
                {"right", n.right},
                {"depth", n.depth},
                {"region", box_to_json(n.region)},
                {"size", n.members.size()},
                {"mean_risk", n.mean_risk},
                {"boundary", n.boundary},
                {"v_boundary", n.v_boundary},
                {"stats",
                 {{"v_exploit", n.stats.v_exploit},
                  {"mean_density", n.stats.mean_density},
                  {"mean_loss", n.stats.mean_loss}}}};
        if (n.split) jn["split"] = {{"axis", n.split->axis}, {"threshold", n.split->threshold}};
        if (n.is_leaf()) jn["members"] = n.members;
        nodes.push_back(std::move(jn));
    }
    return nodes;
}

json domain_to_json(const IdentifiedDomain& d)
{
    json lineage = json::array();
    for (const auto& e : d.lineage) {
        lineage.push_back({{"kind", std::string(to_string(e.kind))},
                           {"node", e.node},
                           {"sources_a", e.sources_a},
                           {"sources_b", e.sources_b}});
    }
    return {{"box", box_to_json(d.box)},
            {"source_leaves", d.source_leaves},
            {"members", d.members},
            {"lineage", std::move(lineage)}};
}

json report_to_json(const RunReport& r, bool include_timings)
{
    json j;
    j["schema"] = kReportSchema;
    j["algorithm"] = std::string(to_string(r.algorithm));
    j["objective"] = r.config.objective;
    j["seed"] = r.seed;
    j["config"] = config_to_json(r.config);
    j["config"]["ucb"]["dropout_k_resolved"] = r.config.ucb.dropout_k;
    j["complete"] = r.complete;
    if (!r.complete) j["failure"] = r.failure;
    j["warnings"] = r.warnings;
    j["evaluations"] = r.evaluations;

    json recs = json::array();
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& s = r.records[i];
        recs.push_back({{"index", s.sample_index},
                        {"point", s.point},
                        {"risk", s.risk},
                        {"hazardous", s.hazardous},
                        {"density", s.density},
                        {"loss", s.loss},
                        {"from_boundary", i < r.from_boundary.size() && r.from_boundary[i] != 0}});
    }
    j["records"] = std::move(recs);

    json snaps = json::array();
    for (const auto& s : r.snapshots) snaps.push_back({{"n_samples", s.n_samples}, {"nodes", tree_to_json(s.tree)}});
    j["tree_snapshots"] = std::move(snaps);

    json stops = json::array();
    for (const auto& d : r.stop_history) {
        stops.push_back({{"n", d.n_samples},
                         {"coverage", d.coverage},
                         {"f2_obv", d.f2_obv},
                         {"stop", d.stop},
                         {"coverage_threshold", d.coverage_threshold},
                         {"f2_threshold", d.f2_threshold},
                         {"test_size", d.test_size},
                         {"train_size", d.train_size}});
    }
    j["stop_history"] = std::move(stops);

    json doms = json::array();
    for (const auto& d : r.domains) doms.push_back(domain_to_json(d));
    j["domains"] = std::move(doms);
    json gts = json::array();
    for (const auto& b : r.truth_boxes) gts.push_back(box_to_json(b));
    j["truth_boxes"] = std::move(gts);
    j["metrics"] = metrics_to_json(r.metrics);
    j["boundary_focus"] = boundary_focus(r);
    if (include_timings) j["timings"] = r.timings;
    return j;
}

RunReport report_from_json(const json& j)
{
    if (j.value("schema", std::string()) != kReportSchema) throw Error("not a " + std::string(kReportSchema) + " document");
    RunReport r;
    r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    json cfg = j.at("config");
    const double dropout_k = cfg["ucb"].value("dropout_k_resolved", 0.0);
    cfg["ucb"].erase("dropout_k_resolved");
    r.config = config_from_json(cfg);
    if (dropout_k > 0.0) r.config.ucb.dropout_k = dropout_k;
    r.complete = j.value("complete", true);
    r.failure = j.value("failure", std::string());
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.evaluations = j.value("evaluations", std::size_t{0});
    for (const auto& s : j.at("records")) {
        SampleRecord rec;
        rec.sample_index = s.at("index").get<std::size_t>();
        rec.point = s.at("point").get<Point>();
        rec.risk = s.at("risk").get<double>();
        rec.hazardous = s.at("hazardous").get<bool>();
        rec.density = s.at("density").get<double>();
        rec.loss = s.at("loss").get<double>();
        r.from_boundary.push_back(s.value("from_boundary", false) ? 1 : 0);
        r.records.push_back(std::move(rec));
    }
    for (const auto& d : j.at("stop_history")) {
        StopDecision s;
        s.n_samples = d.at("n").get<std::size_t>();
        s.coverage = d.at("coverage").get<double>();
        s.f2_obv = d.at("f2_obv").get<double>();
        s.stop = d.at("stop").get<bool>();
        s.coverage_threshold = d.at("coverage_threshold").get<double>();
        s.f2_threshold = d.at("f2_threshold").get<double>();
        s.test_size = d.at("test_size").get<std::size_t>();
        s.train_size = d.at("train_size").get<std::size_t>();
        r.stop_history.push_back(s);
    }
    for (const auto& d : j.at("domains")) {
        IdentifiedDomain dom;
        dom.box = box_from_json(d.at("box"));
        dom.source_leaves = d.at("source_leaves").get<std::vector<int>>();
        dom.members = d.at("members").get<std::vector<std::size_t>>();
        r.domains.push_back(std::move(dom));
    }
    for (const auto& b : j.at("truth_boxes")) r.truth_boxes.push_back(box_from_json(b));
    r.metrics = metrics_from_json(j.at("metrics"));
    if (auto it = j.find("timings"); it != j.end()) r.timings = it->get<std::map<std::string, double>>();
    return r;
}

void write_json(const fs::path& path, const json& j)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(1) << '\n';
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return json::parse(in);
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (const auto& l : lines) out << l << '\n';
}

std::vector<fs::path> emit_plots(const RunReport& report, const fs::path& dir, const std::string& prefix)
{
    fs::create_directories(dir);
    const std::size_t dim = objective_for(report.config).space.dim();
    std::vector<fs::path> written;

    {
        auto path = dir / (prefix + "_samples.csv");
        std::ofstream out(path, std::ios::binary);
        for (std::size_t d = 0; d < dim; ++d) out << 'x' << d << ',';
        out << "sample_index,risk\n";
        for (const auto& r : report.records) {
            for (double v : r.point) out << csv_number(v) << ',';
            out << r.sample_index << ',' << csv_number(r.risk) << '\n';
        }
        written.push_back(path);
    }
    {
        auto path = dir / (prefix + "_stop_trace.csv");
        std::ofstream out(path, std::ios::binary);
        out << "n,coverage,f2_obv,stop\n";
        for (const auto& s : report.stop_history) {
            out << s.n_samples << ',' << csv_number(s.coverage) << ',' << csv_number(s.f2_obv) << ','
                << (s.stop ? 1 : 0) << '\n';
        }
        written.push_back(path);
    }
    {
        auto path = dir / (prefix + "_domains.csv");
        std::ofstream out(path, std::ios::binary);
        out << "domain";
        for (std::size_t d = 0; d < dim; ++d) out << ",lower" << d << ",upper" << d;
        out << ",member_count\n";
        for (std::size_t i = 0; i < report.domains.size(); ++i) {
            const auto& b = report.domains[i].box;
            out << i;
            for (std::size_t d = 0; d < b.dim(); ++d) out << ',' << csv_number(b.lower[d]) << ',' << csv_number(b.upper[d]);
            out << ',' << b.member_count << '\n';
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace hazmap
