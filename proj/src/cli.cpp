#include "ucimon/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucimon/config.hpp"
#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/netrisk.hpp"
#include "ucimon/pipeline.hpp"
#include "ucimon/scenario.hpp"

namespace ucimon {
namespace {

namespace fs = std::filesystem;
using csv::format_double;

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::string runs_root = "runs";
    std::map<std::string, std::string> values;  // one slot per config key
    std::vector<std::pair<std::string, CLI::Option*>> key_options;
    // predict
    std::int64_t mmsi = 0;
    std::vector<std::string> at;
    std::vector<double> delta_s;
    std::string from;
    // generate
    std::string scenario;
};

std::string dashed(std::string_view key) {
    std::string s(key);
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

void add_key_options(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config_path, "run configuration file");
    sub->add_option("-o,--out", o.out_dir, "output directory (default: <runs-root>/<command>-<hash>)");
    sub->add_option("--runs-root", o.runs_root, "parent of generated run directories")->capture_default_str();
    for (const auto& k : config_keys()) {
        std::string names = "--" + dashed(k.name);
        if (names != "--" + std::string(k.name)) names += ",--" + std::string(k.name);
        auto* opt = sub->add_option(names, o.values[std::string(k.name)], std::string(k.help));
        opt->group("Configuration keys");
        o.key_options.emplace_back(std::string(k.name), opt);
    }
}

/// Keys a command cannot run without.
std::vector<std::string> required_keys(std::string_view cmd, const RunConfig& cfg) {
    std::vector<std::string> missing;
    const auto need = [&](std::string_view k) {
        if (!cfg.has(k)) missing.push_back("config key '" + std::string(k) + "' is required by '" + std::string(cmd) + "'");
    };
    if (cmd == "ingest" || cmd == "density" || cmd == "predict" || cmd == "anomalies" || cmd == "pipeline") need("ais");
    if (cmd == "filter") {
        need("ais");
        need("uci");
    }
    if (cmd == "associate") {
        need("ais");
        need("detections");
    }
    if (cmd == "assess") {
        need("rule_file");
        if (!cfg.has("events") && !cfg.has("ais"))
            missing.push_back("'assess' needs either config key 'events' or config key 'ais'");
    }
    if (cmd == "netrisk") need("graph_edges");
    return missing;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// canonical() with every path made absolute, so the file can be fed back.
std::string resolved_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : config_keys()) {
        std::string v = cfg.text(k.name);
        if (k.kind == KeyKind::path && cfg.has(k.name)) v = fs::absolute(*cfg.path(k.name)).lexically_normal().string();
        out += std::string(k.name) + " = " + v + "\n";
    }
    return out;
}

/// Same command, configuration and input bytes give the same directory name.
std::string run_hash(const Options& o, const RunConfig& cfg) {
    std::uint64_t h = fnv1a64(o.command);
    h = fnv1a64(cfg.canonical(), h);
    std::ostringstream extra;
    extra << o.mmsi << '|' << o.from << '|' << o.scenario;
    for (const auto& a : o.at) extra << '|' << a;
    for (double d : o.delta_s) extra << '|' << format_double(d);
    h = fnv1a64(extra.str(), h);
    for (const auto& k : config_keys()) {
        if (k.kind != KeyKind::path) continue;
        if (const auto p = cfg.path(k.name); p && fs::is_regular_file(*p)) h = fnv1a64(read_bytes(*p), h);
    }
    return hex64(h);
}

class RunDir {
public:
    RunDir(fs::path dir, std::string header) : dir_(std::move(dir)), header_(std::move(header)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    const fs::path& path() const { return dir_; }
    const std::string& header() const { return header_; }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw InputError("cannot write " + (dir_ / name).string());
        f << header_;
        return f;
    }

private:
    fs::path dir_;
    std::string header_;
};

std::string iso(double t) { return format_iso8601(static_cast<Timestamp>(std::llround(t))); }

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// ---- writers shared by the commands and the pipeline ----------------------

void write_ingest(const RunDir& dir, const TrackStore& store, std::ostream& out) {
    {
        auto f = dir.open("tracks.csv");
        write_ais_csv(f, std::span<const Track>(store.tracks));
    }
    {
        auto f = dir.open("ingest_errors.csv");
        f << "line,kind,field,message\n";
        for (const auto& e : store.errors)
            f << e.line << ',' << to_string(e.kind) << ',' << csv::escape(e.field) << ',' << csv::escape(e.message)
              << '\n';
    }
    std::size_t points = 0;
    for (const auto& t : store.tracks) points += t.points.size();
    {
        auto f = dir.open("ingest_summary.csv");
        f << "metric,value\n";
        f << "rows," << store.rows << '\n';
        f << "points," << points << '\n';
        f << "tracks," << store.tracks.size() << '\n';
        f << "rejected," << store.errors.size() - store.conflicts << '\n';
        f << "collapsed," << store.collapsed << '\n';
        f << "conflicts," << store.conflicts << '\n';
    }
    out << "ingest: " << store.rows << " rows, " << points << " points in " << store.tracks.size() << " tracks, "
        << store.errors.size() << " errors\n";
}

void write_density(const RunDir& dir, const DensityProducts& d, std::ostream& out) {
    write_density_csv(d.traffic, dir.path() / "traffic_density.csv", dir.header());
    write_density_csv(d.stationary, dir.path() / "stationary_density.csv", dir.header());
    auto f = dir.open("stationary_areas.csv");
    f << "area,lat,lon,members,dwell_h\n";
    for (const auto& a : d.areas)
        f << a.id << ',' << format_double(a.centroid.lat) << ',' << format_double(a.centroid.lon) << ','
          << a.member_points.size() << ',' << format_double(a.dwell_weight) << '\n';
    out << "density: " << format_double(d.traffic.total()) << " vessel-hours, " << d.areas.size()
        << " stationary areas\n";
}

std::optional<DepthGrid> load_bathymetry(const RunConfig& cfg) {
    if (const auto p = cfg.path("bathymetry")) return DepthGrid::from_csv(*p);
    return std::nullopt;
}

void write_candidates(const RunDir& dir, const RunConfig& cfg, std::span<const Track> tracks,
                      std::span<const UciGeometry> ucis, std::ostream& out) {
    const FilterCriteria crit = filter_criteria(cfg);
    if (const auto errs = crit.validate(); !errs.empty()) throw InputError("filter criteria: " + errs.front());
    const auto bathy = load_bathymetry(cfg);
    auto f = dir.open("candidates.csv");
    f << "uci,mmsi,dwell_s,mean_sog_kn,manoeuvre_rate_per_min,drift_fraction,nearest_approach_m,nearest_lat,"
         "nearest_lon,first_entry,last_exit,criteria\n";
    std::size_t n = 0;
    for (const auto& u : ucis) {
        for (const auto& c : select_candidates(tracks, u, crit, bathy ? &*bathy : nullptr)) {
            std::string crits;
            for (Criterion k : c.matched_criteria) crits += (crits.empty() ? "" : "|") + std::string(to_string(k));
            f << csv::escape(u.name) << ',' << c.mmsi << ',' << format_double(c.dwell_s) << ','
              << format_double(c.stats.mean_sog) << ',' << format_double(c.stats.manoeuvre_rate) << ','
              << format_double(c.stats.drift_fraction) << ',' << format_double(c.nearest_approach_m) << ','
              << format_double(c.nearest_pos.lat) << ',' << format_double(c.nearest_pos.lon) << ','
              << iso(c.first_entry_t) << ',' << iso(c.last_exit_t) << ',' << crits << '\n';
            ++n;
        }
    }
    out << "filter: " << n << " candidates over " << ucis.size() << " UCIs\n";
}

constexpr double kSarTrackStepS = 60.0;

void write_scenes(const RunDir& dir, const RunConfig& cfg, std::span<const Track> tracks,
                  std::span<const SceneResult> scenes, std::ostream& out) {
    {
        auto f = dir.open("associations.csv");
        bool first = true;
        for (const auto& s : scenes) {
            write_association_csv(f, s.scene, first);
            first = false;
        }
        if (first) f << "detection_id,mmsi,distance_m,used_prediction,flag\n";
    }
    {
        auto f = dir.open("scene_report.csv");
        f << "image_id,detection_id,lat,lon,mmsi,distance_m,offset_e_m,offset_n_m,flag,gap_mmsi,gap_s\n";
        for (const auto& s : scenes)
            for (const auto& r : s.scene.rows) {
                f << csv::escape(s.image_id) << ',' << csv::escape(r.detection.id) << ','
                  << format_double(r.detection.pos.lat) << ',' << format_double(r.detection.pos.lon) << ','
                  << (r.association.mmsi ? std::to_string(*r.association.mmsi) : "") << ','
                  << opt_str(r.association.distance_m) << ',' << (r.offset ? format_double(r.offset->east) : "")
                  << ',' << (r.offset ? format_double(r.offset->north) : "") << ',' << to_string(r.flag) << ','
                  << (r.gap_mmsi ? std::to_string(*r.gap_mmsi) : "") << ',' << opt_str(r.gap_s) << '\n';
            }
    }
    {
        // plot-ready trajectory pieces around each acquisition
        const double w = cfg.number("window_s");
        const double max_gap = cfg.number("max_gap_s");
        auto f = dir.open("sar_tracks.csv");
        f << "image_id,mmsi,timestamp,lat,lon,source,radius_3sigma_m\n";
        for (const auto& s : scenes) {
            for (const auto& tr : tracks) {
                if (tr.points.empty()) continue;
                const auto n = static_cast<long>(std::floor(2.0 * w / kSarTrackStepS));
                for (long i = 0; i <= n; ++i) {
                    const double t = s.t_acq - w + static_cast<double>(i) * kSarTrackStepS;
                    if (const auto p = interpolate_position(tr, t, max_gap))
                        f << csv::escape(s.image_id) << ',' << tr.mmsi << ',' << iso(t) << ','
                          << format_double(p->lat) << ',' << format_double(p->lon) << ",interpolated,\n";
                }
            }
            for (const auto& [mmsi, p] : s.predictions)
                f << csv::escape(s.image_id) << ',' << mmsi << ',' << iso(p.t) << ',' << format_double(p.mean_pos.lat)
                  << ',' << format_double(p.mean_pos.lon) << ",predicted," << format_double(p.radius_3sigma_m)
                  << '\n';
        }
    }
    std::size_t dets = 0, flagged = 0;
    for (const auto& s : scenes) {
        dets += s.scene.rows.size();
        flagged += s.scene.flagged;
        for (const auto& [mmsi, m] : s.models) {
            auto f = dir.open("ou_" + std::to_string(mmsi) + ".model");
            save_ou_model(f, m);
        }
    }
    out << "associate: " << scenes.size() << " images, " << dets << " detections, " << flagged << " flagged\n";
}

void write_events(const RunDir& dir, std::span<const AnomalyEvent> events, std::ostream& out) {
    auto f = dir.open("events.jsonl");
    write_events_jsonl(f, events);
    out << "anomalies: " << events.size() << " events\n";
}

void write_assessments(const RunDir& dir, std::span<const VesselAssessment> results, std::ostream& out) {
    const Frame cf = consistency_frame();
    const Subset con = cf.singleton("consistent");
    const Subset inc = cf.singleton("inconsistent");
    {
        auto f = dir.open("assessments.jsonl");
        for (const auto& va : results) {
            auto j = to_json(va.assessment);
            j["nav_status"] = {{"consistent", va.status.mass(con)},
                               {"inconsistent", va.status.mass(inc)},
                               {"unknown", va.status.mass(cf.full())}};
            f << j.dump() << '\n';
        }
    }
    {
        auto f = dir.open("status_checks.csv");
        f << "mmsi,m_consistent,m_inconsistent,m_unknown\n";
        for (const auto& va : results)
            f << va.assessment.mmsi << ',' << format_double(va.status.mass(con)) << ','
              << format_double(va.status.mass(inc)) << ',' << format_double(va.status.mass(cf.full())) << '\n';
    }
    out << "assess: " << results.size() << " vessels\n";
    for (const auto& va : results) {
        const auto& a = va.assessment;
        for (const auto& [name, bp] : a.singletons)
            if (name == a.target)
                out << "  " << a.mmsi << ' ' << name << " bel=" << format_double(bp.first)
                    << " pl=" << format_double(bp.second) << " conflict=" << format_double(a.conflict) << '\n';
    }
}

std::vector<std::size_t> parse_edge_list(const std::string& text, std::size_t edge_count) {
    std::vector<std::size_t> out;
    for (const auto& tok : csv::split(text)) {
        const auto t = csv::trim(tok);
        if (t.empty()) continue;
        const auto v = csv::parse_int(t);
        if (!v || *v < 0 || static_cast<std::size_t>(*v) >= edge_count)
            throw InputError("fail_edges: '" + std::string(t) + "' is not an edge index below " +
                             std::to_string(edge_count));
        out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
}

void run_netrisk(const RunDir& dir, const RunConfig& cfg, std::ostream& out) {
    const InfraGraph g = load_graph(*cfg.path("graph_edges"), cfg.path("graph_nodes"));
    if (g.node_count() == 0 || g.edge_count() == 0) throw InputError("infrastructure graph has no edges");

    FailureScenario targeted;
    targeted.mode = FailureMode::degree_targeted;
    const auto tcurve = robustness_curve(g, targeted);
    {
        auto f = dir.open("curve_targeted.csv");
        write_curve_csv(f, tcurve);
    }

    const auto seeds = static_cast<std::uint64_t>(cfg.integer("netrisk_seeds"));
    const auto base = static_cast<std::uint64_t>(cfg.integer("seed"));
    std::vector<CurvePoint> rcurve;
    for (std::uint64_t i = 0; i < seeds; ++i) {
        FailureScenario rs;
        rs.mode = FailureMode::random;
        rs.seed = base + i;
        const auto c = robustness_curve(g, rs);
        if (rcurve.empty()) {
            rcurve = c;
            for (auto& p : rcurve) p.giant_fraction = 0.0;
        }
        for (std::size_t k = 0; k < c.size(); ++k) rcurve[k].giant_fraction += c[k].giant_fraction;
    }
    for (auto& p : rcurve) p.giant_fraction /= static_cast<double>(seeds);
    {
        auto f = dir.open("curve_random.csv");
        write_curve_csv(f, rcurve);
    }

    const auto cp = choke_points(g, static_cast<std::size_t>(cfg.integer("top_k")));
    {
        auto f = dir.open("choke_points.csv");
        f << "kind,rank,id,endpoints,betweenness\n";
        for (std::size_t i = 0; i < cp.nodes.size(); ++i)
            f << "node," << i + 1 << ',' << csv::escape(cp.nodes[i].id) << ",," << format_double(cp.nodes[i].score)
              << '\n';
        for (std::size_t i = 0; i < cp.edges.size(); ++i) {
            const auto& e = g.edge(static_cast<std::size_t>(std::stoul(cp.edges[i].id)));
            f << "edge," << i + 1 << ',' << cp.edges[i].id << ','
              << csv::escape(g.node(e.u).id + "-" + g.node(e.v).id) << ',' << format_double(cp.edges[i].score)
              << '\n';
        }
    }

    auto initial = parse_edge_list(cfg.text("fail_edges"), g.edge_count());
    if (initial.empty() && !cp.edges.empty()) initial.push_back(static_cast<std::size_t>(std::stoul(cp.edges[0].id)));
    const double alpha = cfg.number("alpha");
    const auto cascade = cascade_simulate(g, initial, alpha);
    {
        auto f = dir.open("cascade.csv");
        f << "round,edge,src,dst,kind\n";
        for (std::size_t r = 0; r < cascade.timeline.size(); ++r)
            for (std::size_t e : cascade.timeline[r]) {
                const auto& ed = g.edge(e);
                f << r << ',' << e << ',' << csv::escape(g.node(ed.u).id) << ',' << csv::escape(g.node(ed.v).id)
                  << ',' << csv::escape(ed.kind) << '\n';
            }
    }
    {
        auto f = dir.open("netrisk_summary.csv");
        f << "metric,value\n";
        f << "nodes," << g.node_count() << '\n';
        f << "edges," << g.edge_count() << '\n';
        f << "area_targeted," << format_double(curve_area(tcurve)) << '\n';
        f << "area_random," << format_double(curve_area(rcurve)) << '\n';
        f << "alpha," << format_double(alpha) << '\n';
        f << "cascade_initial," << initial.size() << '\n';
        f << "cascade_rounds," << cascade.rounds << '\n';
        f << "surviving_edge_fraction," << format_double(cascade.surviving_edge_fraction) << '\n';
        f << "giant_fraction_after_cascade," << format_double(cascade.giant_fraction) << '\n';
    }
    out << "netrisk: " << g.node_count() << " nodes, " << g.edge_count() << " edges, targeted area "
        << format_double(curve_area(tcurve)) << ", random area " << format_double(curve_area(rcurve))
        << ", cascade rounds " << cascade.rounds << '\n';
}

std::vector<UciGeometry> load_ucis(const RunConfig& cfg) {
    if (const auto p = cfg.path("uci")) return load_uci_geojson(*p);
    return {};
}

std::vector<SarDetection> load_detections(const RunConfig& cfg, std::ostream& err) {
    const auto p = cfg.path("detections");
    if (!p) return {};
    auto parsed = parse_detections_csv(*p);
    for (const auto& e : parsed.errors)
        err << "warning: " << p->filename().string() << " line " << e.line << ": " << e.message << '\n';
    return std::move(parsed.detections);
}

/// Normalcy reference: the history file when configured, else the tracks.
DensityProducts reference_density(const RunConfig& cfg, std::span<const Track> tracks) {
    if (cfg.has("history")) {
        const TrackStore hist = load_tracks(cfg, "history");
        return compute_density(cfg, hist.tracks, density_grid_spec(cfg, hist.tracks));
    }
    return compute_density(cfg, tracks, density_grid_spec(cfg, tracks));
}

RuleSet rules_for(const RunConfig& cfg) {
    if (const auto p = cfg.path("rule_file")) return load_rules(*p);
    std::istringstream in{std::string(default_rules_text())};
    return parse_rules(in);
}

// ---- commands ---------------------------------------------------------------

void cmd_predict(const RunDir& dir, const RunConfig& cfg, const Options& o, std::ostream& out) {
    const TrackStore store = load_tracks(cfg);
    const auto it = std::find_if(store.tracks.begin(), store.tracks.end(),
                                 [&](const Track& t) { return static_cast<std::int64_t>(t.mmsi) == o.mmsi; });
    if (it == store.tracks.end() || it->points.empty())
        throw InputError("no AIS track for MMSI " + std::to_string(o.mmsi));
    double t_from = static_cast<double>(it->points.back().t);
    if (!o.from.empty()) {
        const auto t = parse_iso8601(o.from);
        if (!t) throw InputError("--from: bad timestamp '" + o.from + "'");
        t_from = static_cast<double>(*t);
    }
    const auto model = fit_before(*it, t_from, cfg.number("ou_window_s"));
    if (!model)
        throw InsufficientData("MMSI " + std::to_string(o.mmsi) + ": too few usable fixes before " + iso(t_from) +
                               " to fit a motion model");
    std::vector<double> deltas = o.delta_s;
    for (const auto& a : o.at) {
        const auto t = parse_iso8601(a);
        if (!t) throw InputError("--at: bad timestamp '" + a + "'");
        deltas.push_back(static_cast<double>(*t) - model->anchor_t);
    }
    if (deltas.empty()) deltas = {600.0, 3 * 3600.0, 21 * 3600.0};
    for (double d : deltas)
        if (d < 0.0) throw InputError("prediction time precedes the last fix by " + format_double(-d) + " s");
    {
        auto f = dir.open("predictions.csv");
        f << "mmsi,delta_s,timestamp,lat,lon,vel_e_ms,vel_n_ms,cov_ee_m2,cov_en_m2,cov_nn_m2,radius_3sigma_m\n";
        for (double d : deltas) {
            const Prediction p = predict(*model, model->anchor_t + d);
            f << o.mmsi << ',' << format_double(d) << ',' << iso(p.t) << ',' << format_double(p.mean_pos.lat) << ','
              << format_double(p.mean_pos.lon) << ',' << format_double(p.mean_velocity.east) << ','
              << format_double(p.mean_velocity.north) << ',' << format_double(p.cov.ee) << ','
              << format_double(p.cov.en) << ',' << format_double(p.cov.nn) << ','
              << format_double(p.radius_3sigma_m) << '\n';
        }
    }
    {
        auto f = dir.open("ou_" + std::to_string(o.mmsi) + ".model");
        save_ou_model(f, *model);
    }
    out << "predict: MMSI " << o.mmsi << " anchored at " << iso(model->anchor_t) << ", " << deltas.size()
        << " predictions\n";
}

void cmd_generate(const RunDir& dir, const RunConfig& cfg, const Options& o, std::ostream& out) {
    const Scenario s = make_scenario(o.scenario, static_cast<std::uint64_t>(cfg.integer("seed")));
    write_scenario(s, dir.path(), dir.header());
    {
        std::ofstream f(dir.path() / "default.rules", std::ios::binary);
        if (!f) throw InputError("cannot write default.rules");
        f << default_rules_text();
    }
    {
        std::ofstream f(dir.path() / "scenario.cfg", std::ios::binary | std::ios::app);
        f << "rule_file = default.rules\n";
    }
    out << "generate: scenario " << s.name << ", " << s.tracks.size() << " vessels, " << s.detections.size()
        << " detections\n";
}

void dispatch(const Options& o, const RunConfig& cfg, const RunDir& dir, std::ostream& out, std::ostream& err) {
    const std::string& c = o.command;
    if (c == "generate") return cmd_generate(dir, cfg, o, out);
    if (c == "netrisk") return run_netrisk(dir, cfg, out);
    if (c == "predict") return cmd_predict(dir, cfg, o, out);

    if (c == "assess" && !cfg.has("ais")) {
        const auto p = *cfg.path("events");
        std::ifstream in(p);
        if (!in) throw InputError("cannot open " + p.string());
        const auto events = read_events_jsonl(in);
        const RuleSet rules = load_rules(*cfg.path("rule_file"));
        write_assessments(dir, assess_vessels(cfg, events, {}, rules), out);
        return;
    }

    const TrackStore store = load_tracks(cfg);
    if (c == "ingest") return write_ingest(dir, store, out);
    if (c == "density") {
        const auto grid = density_grid_spec(cfg, store.tracks);
        return write_density(dir, compute_density(cfg, store.tracks, grid), out);
    }
    const auto ucis = load_ucis(cfg);
    if (c == "filter") return write_candidates(dir, cfg, store.tracks, ucis, out);

    const auto dets = load_detections(cfg, err);
    const auto scenes = associate_scenes(cfg, store.tracks, dets);
    if (c == "associate") return write_scenes(dir, cfg, store.tracks, scenes, out);

    // the rule file is read before the heavier detectors run
    std::optional<RuleSet> rules;
    if (c == "assess") rules = load_rules(*cfg.path("rule_file"));
    if (c == "pipeline") rules = rules_for(cfg);

    const DensityProducts density = reference_density(cfg, store.tracks);
    std::vector<AnomalyEvent> events;
    if (c == "assess" && cfg.has("events")) {
        const auto p = *cfg.path("events");
        std::ifstream in(p);
        if (!in) throw InputError("cannot open " + p.string());
        events = read_events_jsonl(in);
    } else {
        events = detect_anomalies(cfg, store.tracks, ucis, density, scenes);
    }
    if (c == "anomalies") return write_events(dir, events, out);
    if (c == "assess") return write_assessments(dir, assess_vessels(cfg, events, store.tracks, *rules), out);

    // pipeline
    write_ingest(dir, store, out);
    write_density(dir, density, out);
    if (!ucis.empty()) write_candidates(dir, cfg, store.tracks, ucis, out);
    if (!scenes.empty()) write_scenes(dir, cfg, store.tracks, scenes, out);
    write_events(dir, events, out);
    write_assessments(dir, assess_vessels(cfg, events, store.tracks, *rules), out);
    if (cfg.has("graph_edges")) run_netrisk(dir, cfg, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maritime monitoring of undersea critical infrastructure", "ucimon"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Options o;

    const std::pair<const char*, const char*> commands[] = {
        {"ingest", "parse AIS, build tracks and report record errors"},
        {"density", "traffic and stationary density grids, stationary areas"},
        {"filter", "candidate vessels near each UCI"},
        {"associate", "pair SAR detections with AIS tracks"},
        {"predict", "long-term OU position prediction for one vessel"},
        {"anomalies", "run the anomaly detectors"},
        {"assess", "evidential threat assessment per vessel"},
        {"netrisk", "robustness curves, choke points and cascades"},
        {"generate", "write a synthetic scenario"},
        {"pipeline", "every stage the configuration supports"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_key_options(sub, o);
        if (std::string_view(name) == "predict") {
            sub->add_option("--mmsi", o.mmsi, "vessel to predict")->required();
            sub->add_option("--at", o.at, "absolute prediction time, ISO-8601 (repeatable)");
            sub->add_option("--delta-s", o.delta_s, "seconds after the anchor fix (repeatable)");
            sub->add_option("--from", o.from, "fit on fixes up to this time (default: last fix)");
        }
        if (std::string_view(name) == "generate")
            sub->add_option("--scenario", o.scenario, "baltic, shetland or adriatic")
                ->required()
                ->check(CLI::IsMember({"baltic", "shetland", "adriatic"}));
        sub->callback([&o, name = std::string(name)] { o.command = name; });
    }

    std::vector<const char*> argv{"ucimon"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = o.config_path.empty() ? RunConfig() : RunConfig::from_file(o.config_path);
        for (const auto& [key, opt] : o.key_options) {
            if (opt->count() == 0) continue;
            std::string v = o.values[key];
            const auto k = std::find_if(config_keys().begin(), config_keys().end(),
                                        [&](const ConfigKey& ck) { return ck.name == key; });
            // command-line paths are relative to the working directory
            if (k->kind == KeyKind::path && !v.empty()) v = fs::absolute(v).string();
            cfg.set(key, v);
        }
        auto problems = cfg.validate();
        for (auto& m : required_keys(o.command, cfg)) problems.push_back(std::move(m));
        if (!problems.empty()) {
            err << "error: invalid configuration (" << problems.size() << " problem"
                << (problems.size() == 1 ? "" : "s") << ")\n";
            for (const auto& p : problems) err << "  - " << p << '\n';
            return 1;
        }

        const fs::path dir_path =
            o.out_dir.empty() ? fs::path(o.runs_root) / (o.command + "-" + run_hash(o, cfg).substr(0, 12))
                              : fs::path(o.out_dir);
        const RunDir dir(dir_path, header_block(cfg));
        {
            auto f = dir.open("config.resolved");
            f << resolved_config(cfg);
        }
        dispatch(o, cfg, dir, out, err);
        out << "run directory: " << dir.path().string() << '\n';
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const InvariantViolation& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ucimon
