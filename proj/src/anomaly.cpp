#include "ucimon/anomaly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include "ucimon/errors.hpp"

namespace ucimon {

namespace {

constexpr std::array<std::pair<AnomalyKind, std::string_view>, 6> kKindNames{{
    {AnomalyKind::ais_gap, "ais_gap"},
    {AnomalyKind::loiter_near_uci, "loiter_near_uci"},
    {AnomalyKind::zone_entry, "zone_entry"},
    {AnomalyKind::route_deviation, "route_deviation"},
    {AnomalyKind::search_pattern, "search_pattern"},
    {AnomalyKind::unassociated_sar, "unassociated_sar"},
}};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::string fmt_hours(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f h", s / 3600.0);
    return buf;
}

// Normalcy lookup that treats positions outside the grid as never visited.
double normalcy_or_zero(const DensityGrid& grid, const GeoPoint& p) {
    if (!grid.spec().cell_of(p)) return 0.0;
    return normalcy_score(grid, p);
}

GeoPoint centroid(std::span<const GeoPoint> pts) {
    const LocalFrame frame(pts.front());
    Vec2 sum{0.0, 0.0};
    for (const auto& p : pts) sum = sum + frame.project(p);
    return frame.unproject((1.0 / static_cast<double>(pts.size())) * sum);
}

}  // namespace

std::string_view to_string(AnomalyKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "ais_gap";
}

std::optional<AnomalyKind> anomaly_kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKindNames)
        if (name == s) return kind;
    return std::nullopt;
}

std::vector<AnomalyEvent> detect_ais_gap(const Track& track, double min_gap_s, const UciGeometry* uci,
                                         const AnomalyConfig& cfg) {
    if (!(min_gap_s > 0.0)) throw InputError("detect_ais_gap: min_gap must be > 0");
    std::vector<AnomalyEvent> out;
    const auto& pts = track.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const auto dur = static_cast<double>(pts[i].t - pts[i - 1].t);
        if (dur < min_gap_s) continue;
        AnomalyEvent e;
        e.mmsi = track.mmsi;
        e.kind = AnomalyKind::ais_gap;
        e.t_start = static_cast<double>(pts[i - 1].t);
        e.t_end = static_cast<double>(pts[i].t);
        e.severity = std::min(1.0, dur / cfg.gap_full_s);
        e.fields["gap_s"] = dur;
        e.fields["start_lat"] = pts[i - 1].pos.lat;
        e.fields["start_lon"] = pts[i - 1].pos.lon;
        e.fields["end_lat"] = pts[i].pos.lat;
        e.fields["end_lon"] = pts[i].pos.lon;
        e.summary = "AIS silent for " + fmt_hours(dur);
        if (uci) {
            const double r = uci->corridor_km * 1000.0;
            const double d0 = distance_to_polyline(pts[i - 1].pos, uci->route);
            const double d1 = distance_to_polyline(pts[i].pos, uci->route);
            e.fields["start_dist_m"] = d0;
            e.fields["end_dist_m"] = d1;
            if (d0 <= r || d1 <= r) {
                e.severity = std::min(1.0, e.severity * cfg.gap_corridor_boost);
                e.zone = uci->name;
                e.summary += " with an endpoint inside the " + uci->name + " corridor";
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<AnomalyEvent> detect_loiter(const Track& track, const UciGeometry& uci, const FilterCriteria& crit,
                                        const DensityGrid& stationary_grid, const AnomalyConfig& cfg) {
    const auto rep = evaluate_candidate(track, uci, crit, nullptr);
    if (!rep) return {};

    const double radius = crit.d_max_km * 1000.0;
    std::vector<GeoPoint> inside;
    for (const auto& p : track.points)
        if (distance_to_polyline(p.pos, uci.route) <= radius) inside.push_back(p.pos);
    const GeoPoint c = inside.empty() ? rep->nearest_pos : centroid(inside);

    const double normalcy = normalcy_or_zero(stationary_grid, c);
    if (!(normalcy < cfg.loiter_normalcy_max)) return {};

    AnomalyEvent e;
    e.mmsi = track.mmsi;
    e.kind = AnomalyKind::loiter_near_uci;
    e.t_start = rep->first_entry_t;
    e.t_end = rep->last_exit_t;
    e.severity = clamp01((1.0 - normalcy) * std::min(1.0, rep->dwell_s / crit.t_min_s));
    e.zone = uci.name;
    e.fields["dwell_s"] = rep->dwell_s;
    e.fields["mean_sog_kn"] = rep->stats.mean_sog;
    e.fields["nearest_m"] = rep->nearest_approach_m;
    e.fields["normalcy"] = normalcy;
    e.fields["centroid_lat"] = c.lat;
    e.fields["centroid_lon"] = c.lon;
    e.summary = "loitered " + fmt_hours(rep->dwell_s) + " near " + uci.name + " outside known stationary areas";
    return {e};
}

std::vector<AnomalyEvent> detect_search_pattern(const Track& track, const UciGeometry& uci, TimeWindow window,
                                                const AnomalyConfig& cfg) {
    if (window.length() < cfg.search_min_window_s)
        throw InputError("detect_search_pattern: window shorter than " + fmt_hours(cfg.search_min_window_s));

    enum class Phase { approach, drift };
    struct Run {
        Phase phase;
        double t0, t1;
    };

    std::vector<const AisPoint*> pts;
    for (const auto& p : track.points)
        if (window.contains(static_cast<double>(p.t))) pts.push_back(&p);
    if (pts.size() < 2) return {};

    std::vector<double> range(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) range[i] = distance_to_polyline(pts[i]->pos, uci.route);

    const auto push = [](std::vector<Run>& runs, Run r) {
        if (!runs.empty() && runs.back().phase == r.phase)
            runs.back().t1 = r.t1;
        else
            runs.push_back(r);
    };

    std::vector<Run> raw;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto t0 = static_cast<double>(pts[i]->t), t1 = static_cast<double>(pts[i + 1]->t);
        const bool powered = pts[i]->sog >= cfg.drift_threshold_kn;
        if (powered && range[i + 1] < range[i])
            push(raw, {Phase::approach, t0, t1});
        else if (!powered && range[i + 1] > range[i])
            push(raw, {Phase::drift, t0, t1});
    }

    std::vector<Run> runs;
    for (const auto& r : raw)
        if (r.t1 - r.t0 >= cfg.search_min_phase_s) push(runs, r);

    std::size_t approaches = 0, drifts = 0;
    for (const auto& r : runs) (r.phase == Phase::approach ? approaches : drifts)++;
    const std::size_t cycles = drifts > 0 ? approaches : 0;
    if (cycles < cfg.search_min_cycles) return {};

    AnomalyEvent e;
    e.mmsi = track.mmsi;
    e.kind = AnomalyKind::search_pattern;
    e.t_start = runs.front().t0;
    e.t_end = runs.back().t1;
    e.severity = clamp01(static_cast<double>(cycles) / cfg.search_full_cycles);
    e.zone = uci.name;
    e.fields["cycles"] = static_cast<double>(cycles);
    std::size_t n = 0;
    for (const auto& r : runs)
        if (r.phase == Phase::approach) e.fields["approach_" + std::to_string(++n) + "_t"] = r.t0;
    e.summary = std::to_string(cycles) + " approach/drift cycles around " + uci.name;
    return {e};
}

std::vector<AnomalyEvent> detect_zone_entry(const Track& track, std::span<const UciGeometry> zones,
                                            const AnomalyConfig& cfg, const DensityGrid* traffic_grid) {
    if (zones.empty()) throw InputError("detect_zone_entry: no zones");
    std::vector<AnomalyEvent> out;
    if (track.points.empty()) return out;
    for (const auto& z : zones) {
        const auto w = cfg.zone_kind_weight.find(z.kind);
        const double weight = w == cfg.zone_kind_weight.end() ? 1.0 : w->second;
        const CorridorProfile prof = corridor_profile(track, z.route, z.corridor_km * 1000.0);
        for (const auto& pass : prof.passes) {
            AnomalyEvent e;
            e.mmsi = track.mmsi;
            e.kind = AnomalyKind::zone_entry;
            e.t_start = pass.t_in;
            e.t_end = pass.t_out;
            e.severity = clamp01(cfg.zone_base_severity * weight);
            if (traffic_grid) {
                const auto at = interpolate_position(track, pass.t_in, std::numeric_limits<double>::max());
                const double normalcy = at ? normalcy_or_zero(*traffic_grid, *at) : 0.0;
                e.severity *= 1.0 - normalcy;
                e.fields["normalcy"] = normalcy;
            }
            e.zone = z.name;
            e.fields["duration_s"] = pass.t_out - pass.t_in;
            e.fields["corridor_km"] = z.corridor_km;
            e.summary = "inside the " + z.name + " corridor for " + fmt_hours(pass.t_out - pass.t_in);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<AnomalyEvent> detect_route_deviation(const Track& track, const DensityGrid& traffic_grid,
                                                 const AnomalyConfig& cfg) {
    std::vector<AnomalyEvent> out;
    const auto& pts = track.points;
    std::size_t i = 0;
    while (i < pts.size()) {
        if (!traffic_grid.spec().cell_of(pts[i].pos) ||
            !(normalcy_score(traffic_grid, pts[i].pos) < cfg.deviation_normalcy_max)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double worst = 1.0;
        while (j < pts.size() && traffic_grid.spec().cell_of(pts[j].pos)) {
            const double s = normalcy_score(traffic_grid, pts[j].pos);
            if (!(s < cfg.deviation_normalcy_max)) break;
            worst = std::min(worst, s);
            ++j;
        }
        if (j - i >= 2) {
            const auto dur = static_cast<double>(pts[j - 1].t - pts[i].t);
            AnomalyEvent e;
            e.mmsi = track.mmsi;
            e.kind = AnomalyKind::route_deviation;
            e.t_start = static_cast<double>(pts[i].t);
            e.t_end = static_cast<double>(pts[j - 1].t);
            e.severity = clamp01(dur / cfg.deviation_full_s);
            e.fields["duration_s"] = dur;
            e.fields["reports"] = static_cast<double>(j - i);
            e.fields["min_normalcy"] = worst;
            e.summary = "off the usual traffic lanes for " + fmt_hours(dur);
            out.push_back(std::move(e));
        }
        i = j;
    }
    return out;
}

std::vector<AnomalyEvent> unassociated_events(const AnnotatedScene& scene, const AnomalyConfig& cfg) {
    std::vector<AnomalyEvent> out;
    for (const auto& r : scene.rows) {
        if (r.flag == SceneFlag::ok) continue;
        AnomalyEvent e;
        e.kind = AnomalyKind::unassociated_sar;
        e.t_start = e.t_end = static_cast<double>(r.detection.t_acq);
        e.fields["det_lat"] = r.detection.pos.lat;
        e.fields["det_lon"] = r.detection.pos.lon;
        if (r.flag == SceneFlag::gap_bracketing && r.gap_mmsi) {
            e.mmsi = *r.gap_mmsi;
            e.severity = cfg.unassociated_gap_severity;
            if (r.gap_s) e.fields["gap_s"] = *r.gap_s;
            e.summary = "SAR detection " + r.detection.id + " falls inside an AIS gap of this vessel";
        } else if (r.association.used_prediction) {
            e.severity = cfg.unassociated_gap_severity;
            e.summary = "SAR detection " + r.detection.id + " has no AIS counterpart";
        } else {
            e.severity = cfg.unassociated_severity;
            e.summary = "SAR detection " + r.detection.id + " has no AIS counterpart";
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<AnomalyEvent> finalize_events(std::vector<AnomalyEvent> events, double report_floor) {
    std::erase_if(events, [&](const AnomalyEvent& e) { return e.severity < report_floor; });
    std::stable_sort(events.begin(), events.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
        return std::tie(a.mmsi, a.t_start, a.kind, a.t_end, a.zone) <
               std::tie(b.mmsi, b.t_start, b.kind, b.t_end, b.zone);
    });
    return events;
}

nlohmann::json to_json(const AnomalyEvent& e) {
    nlohmann::json j;
    j["mmsi"] = e.mmsi;
    j["kind"] = std::string(to_string(e.kind));
    j["t_start"] = e.t_start;
    j["t_end"] = e.t_end;
    j["severity"] = e.severity;
    j["zone"] = e.zone;
    j["summary"] = e.summary;
    j["fields"] = e.fields;
    return j;
}

AnomalyEvent anomaly_event_from_json(const nlohmann::json& j) {
    try {
        AnomalyEvent e;
        e.mmsi = j.at("mmsi").get<Mmsi>();
        const auto kind = anomaly_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw InputError("unknown anomaly kind '" + j.at("kind").get<std::string>() + "'");
        e.kind = *kind;
        e.t_start = j.at("t_start").get<double>();
        e.t_end = j.at("t_end").get<double>();
        e.severity = j.at("severity").get<double>();
        e.zone = j.value("zone", "");
        e.summary = j.value("summary", "");
        if (j.contains("fields")) e.fields = j.at("fields").get<std::map<std::string, double>>();
        if (!(e.t_end >= e.t_start)) throw InputError("event ends before it starts");
        if (!(e.severity >= 0.0 && e.severity <= 1.0)) throw InputError("severity outside [0, 1]");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("malformed event: ") + ex.what());
    }
}

void write_events_jsonl(std::ostream& out, std::span<const AnomalyEvent> events) {
    for (const auto& e : events) out << to_json(e).dump() << '\n';
}

std::vector<AnomalyEvent> read_events_jsonl(std::istream& in) {
    std::vector<AnomalyEvent> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line.front() == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& ex) {
            throw InputError("events line " + std::to_string(n) + ": " + ex.what());
        }
        out.push_back(anomaly_event_from_json(j));
    }
    return out;
}

}  // namespace ucimon
