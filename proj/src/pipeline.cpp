#include "ucimon/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucimon/errors.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

TrackStore load_tracks(const RunConfig& cfg, std::string_view key) {
    const auto path = cfg.path(key);
    if (!path) throw InputError("config key '" + std::string(key) + "' is required");
    AisParseResult parsed = parse_ais_csv(*path);
    TrackSet set = build_tracks(parsed.points, cfg.integer("dedup_window_s"));
    TrackStore store;
    store.rows = parsed.row_count;
    store.errors = std::move(parsed.errors);
    store.collapsed = set.collapsed;
    store.conflicts = set.conflicts.size();
    for (auto& c : set.conflicts) store.errors.push_back(std::move(c));
    store.tracks = std::move(set.tracks);
    if (const auto vp = cfg.path("vessels")) {
        VesselParseResult v = parse_vessel_csv(*vp);
        for (auto& e : v.errors) {
            e.message = "vessels: " + e.message;
            store.errors.push_back(std::move(e));
        }
        attach_vessel_info(store.tracks, v.vessels);
    }
    return store;
}

FilterCriteria filter_criteria(const RunConfig& cfg) {
    FilterCriteria c;
    c.d_max_km = cfg.number("d_max_km");
    c.t_min_s = cfg.number("t_min_s");
    c.s_max_kn = cfg.number("s_max_kn");
    c.manoeuvre_rate_min = cfg.optional_number("manoeuvre_rate_min");
    c.min_length_m = cfg.optional_number("min_length_m");
    c.depth_gate_m = cfg.optional_number("depth_gate_m");
    c.turn_threshold_deg = cfg.number("turn_deg");
    c.drift_threshold_kn = cfg.number("drift_kn");
    return c;
}

AnomalyConfig anomaly_config(const RunConfig& cfg) {
    AnomalyConfig a;
    a.drift_threshold_kn = cfg.number("drift_kn");
    a.report_floor = cfg.number("report_floor");
    return a;
}

GridSpec density_grid_spec(const RunConfig& cfg, std::span<const Track> tracks) {
    const double cell = cfg.number("cell_deg");
    if (const auto b = cfg.bbox("bbox")) return GridSpec(*b, cell);
    double lat0 = 90.0, lat1 = -90.0, lon0 = 180.0, lon1 = -180.0;
    for (const auto& t : tracks)
        for (const auto& p : t.points) {
            lat0 = std::min(lat0, p.pos.lat);
            lat1 = std::max(lat1, p.pos.lat);
            lon0 = std::min(lon0, p.pos.lon);
            lon1 = std::max(lon1, p.pos.lon);
        }
    if (lat0 > lat1) throw InputError("no AIS positions to size the density grid");
    const auto down = [&](double x) { return std::floor(x / cell) * cell; };
    BBox b{down(lat0), down(lon0), down(lat1) + cell, down(lon1) + cell};
    b.lat_min = std::max(b.lat_min, -90.0);
    b.lat_max = std::min(b.lat_max, 90.0);
    b.lon_min = std::max(b.lon_min, -180.0);
    b.lon_max = std::min(b.lon_max, 180.0);
    return GridSpec(b, cell);
}

DensityProducts compute_density(const RunConfig& cfg, std::span<const Track> tracks, const GridSpec& grid) {
    double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
    for (const auto& t : tracks) {
        if (t.points.empty()) continue;
        t0 = std::min(t0, static_cast<double>(t.points.front().t));
        t1 = std::max(t1, static_cast<double>(t.points.back().t));
    }
    DensityProducts out{DensityGrid(grid), DensityGrid(grid), {}};
    if (!(t1 > t0)) return out;
    DensityParams p;
    p.interval = {t0, t1};
    p.drift_threshold_kn = cfg.number("drift_kn");
    p.max_gap_s = cfg.number("max_gap_s");
    p.mode = DensityMode::all_traffic;
    out.traffic = build_density(tracks, grid, p);
    p.mode = DensityMode::stationary;
    out.stationary = build_density(tracks, grid, p);
    const auto slow = low_speed_points(tracks, p.drift_threshold_kn);
    out.areas = cluster_stationary(slow, cfg.number("eps_m"), static_cast<std::size_t>(cfg.integer("min_pts")));
    return out;
}

std::optional<OuModel> fit_before(const Track& track, double t_from, double window_s) {
    const auto& pts = track.points;
    const auto it = std::upper_bound(pts.begin(), pts.end(), t_from,
                                     [](double t, const AisPoint& p) { return t < static_cast<double>(p.t); });
    if (it == pts.begin()) return std::nullopt;
    const auto last = static_cast<double>((it - 1)->t);
    try {
        return fit_ou(track, {last - window_s, last});
    } catch (const InsufficientData&) {
        return std::nullopt;
    }
}

std::vector<SceneResult> associate_scenes(const RunConfig& cfg, std::span<const Track> tracks,
                                          std::span<const SarDetection> detections) {
    std::vector<SceneResult> out;
    const double max_gap = cfg.number("max_gap_s");
    for (auto& [image, dets] : group_by_image(detections)) {
        SceneResult sr;
        sr.image_id = image;
        sr.t_acq = static_cast<double>(dets.front().t_acq);
        if (cfg.boolean("use_prediction")) {
            for (const auto& tr : tracks) {
                if (tr.points.empty() || interpolate_position(tr, sr.t_acq, max_gap)) continue;
                const auto first = static_cast<double>(tr.points.front().t);
                if (first > sr.t_acq) continue;
                auto it = std::upper_bound(tr.points.begin(), tr.points.end(), sr.t_acq,
                                           [](double t, const AisPoint& p) { return t < static_cast<double>(p.t); });
                if (sr.t_acq - static_cast<double>((it - 1)->t) > cfg.number("predict_horizon_s")) continue;
                if (auto model = fit_before(tr, sr.t_acq, cfg.number("ou_window_s"))) {
                    sr.predictions.emplace(tr.mmsi, predict(*model, sr.t_acq));
                    sr.models.emplace(tr.mmsi, *model);
                }
            }
        }
        AssociationParams ap;
        ap.gate_km = cfg.number("gate_km");
        ap.max_gap_s = max_gap;
        ap.predictions = sr.predictions.empty() ? nullptr : &sr.predictions;
        sr.associations = associate(dets, tracks, ap);
        ReportParams rp;
        rp.gap_flag_s = cfg.number("gap_flag_s");
        rp.near_km = cfg.number("near_km");
        sr.scene = association_report(dets, sr.associations, tracks, rp);
        out.push_back(std::move(sr));
    }
    return out;
}

std::vector<AnomalyEvent> detect_anomalies(const RunConfig& cfg, std::span<const Track> tracks,
                                           std::span<const UciGeometry> ucis, const DensityProducts& density,
                                           std::span<const SceneResult> scenes) {
    const AnomalyConfig ac = anomaly_config(cfg);
    const FilterCriteria crit = filter_criteria(cfg);
    const double gap_min = cfg.number("gap_min_s");
    std::vector<AnomalyEvent> all;
    const auto add = [&](std::vector<AnomalyEvent> ev) {
        for (auto& e : ev) all.push_back(std::move(e));
    };
    for (const auto& tr : tracks) {
        if (tr.points.empty()) continue;
        // each gap keeps the most severe reading over the configured UCIs
        std::vector<AnomalyEvent> gaps = detect_ais_gap(tr, gap_min, nullptr, ac);
        for (const auto& u : ucis) {
            auto with = detect_ais_gap(tr, gap_min, &u, ac);
            for (std::size_t i = 0; i < gaps.size(); ++i)
                if (with[i].severity > gaps[i].severity) gaps[i] = std::move(with[i]);
        }
        add(std::move(gaps));

        const TimeWindow span{static_cast<double>(tr.points.front().t), static_cast<double>(tr.points.back().t)};
        for (const auto& u : ucis) {
            add(detect_loiter(tr, u, crit, density.stationary, ac));
            if (span.length() >= ac.search_min_window_s) add(detect_search_pattern(tr, u, span, ac));
        }
        if (!ucis.empty()) add(detect_zone_entry(tr, ucis, ac, &density.traffic));
        add(detect_route_deviation(tr, density.traffic, ac));
    }
    for (const auto& s : scenes) add(unassociated_events(s.scene, ac));
    return finalize_events(std::move(all), ac.report_floor);
}

std::vector<VesselAssessment> assess_vessels(const RunConfig& cfg, std::span<const AnomalyEvent> events,
                                             std::span<const Track> tracks, const RuleSet& rules) {
    std::map<Mmsi, const Track*> by_mmsi;
    for (const auto& t : tracks) by_mmsi[t.mmsi] = &t;
    std::vector<Mmsi> ids;
    for (const auto& e : events)
        if (e.mmsi != 0) ids.push_back(e.mmsi);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    StatusCheckParams sp;
    sp.drift_threshold_kn = cfg.number("drift_kn");
    sp.cap = cfg.number("status_cap");
    const Frame cf = consistency_frame();
    std::vector<VesselAssessment> out;
    for (Mmsi id : ids) {
        AssessmentContext ctx;
        ctx.vessel.mmsi = id;
        VesselAssessment va;
        if (auto it = by_mmsi.find(id); it != by_mmsi.end()) {
            const Track& tr = *it->second;
            ctx.vessel = tr.info;
            if (!tr.points.empty())
                va.status = check_status_consistency(
                    tr, {static_cast<double>(tr.points.front().t), static_cast<double>(tr.points.back().t)},
                    std::nullopt, sp);
        }
        const double inc = va.status.mass(cf.singleton("inconsistent"));
        const double con = va.status.mass(cf.singleton("consistent"));
        ctx.intel["nav_status"] = va.status.is_vacuous() ? "unknown" : (inc > con ? "inconsistent" : "consistent");
        va.assessment = assess(id, events, ctx, rules);
        out.push_back(std::move(va));
    }
    return out;
}

}  // namespace ucimon
