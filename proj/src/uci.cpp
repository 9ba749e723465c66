#include "ucimon/uci.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"

namespace ucimon {

std::string_view to_string(UciKind k) {
    switch (k) {
        case UciKind::pipeline: return "pipeline";
        case UciKind::power_cable: return "power_cable";
        case UciKind::comm_cable: return "comm_cable";
    }
    return "pipeline";
}

std::optional<UciKind> uci_kind_from_string(std::string_view s) {
    if (s == "pipeline") return UciKind::pipeline;
    if (s == "power_cable") return UciKind::power_cable;
    if (s == "comm_cable") return UciKind::comm_cable;
    return std::nullopt;
}

std::vector<UciGeometry> parse_uci_geojson(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("UCI GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw InputError("UCI GeoJSON: expected a FeatureCollection");

    std::vector<UciGeometry> out;
    std::size_t idx = 0;
    for (const auto& feat : doc["features"]) {
        const std::string where = "UCI feature " + std::to_string(idx++) + ": ";
        try {
            const auto& geom = feat.at("geometry");
            if (geom.at("type").get<std::string>() != "LineString")
                throw InputError(where + "geometry must be a LineString");
            std::vector<GeoPoint> verts;
            for (const auto& c : geom.at("coordinates")) {
                if (!c.is_array() || c.size() < 2) throw InputError(where + "bad coordinate");
                verts.push_back(make_geo_point(c[1].get<double>(), c[0].get<double>()));
            }
            const auto& props = feat.at("properties");
            UciGeometry g{props.at("name").get<std::string>(), UciKind::pipeline, Polyline(std::move(verts)),
                          props.at("corridor_km").get<double>()};
            const auto kind = uci_kind_from_string(props.at("kind").get<std::string>());
            if (!kind) throw InputError(where + "unknown kind");
            g.kind = *kind;
            if (!(g.corridor_km > 0.0)) throw InputError(where + "corridor_km must be > 0");
            out.push_back(std::move(g));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + e.what());
        } catch (const InputError& e) {
            const std::string msg = e.what();
            throw InputError(msg.rfind(where, 0) == 0 ? msg : where + msg);
        }
    }
    return out;
}

std::vector<UciGeometry> load_uci_geojson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_uci_geojson(ss.str());
}

std::string to_geojson(std::span<const UciGeometry> ucis) {
    nlohmann::json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = nlohmann::json::array();
    for (const auto& u : ucis) {
        nlohmann::json coords = nlohmann::json::array();
        for (const auto& v : u.route.vertices()) coords.push_back({v.lon, v.lat});
        fc["features"].push_back({{"type", "Feature"},
                                  {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                                  {"properties",
                                   {{"name", u.name}, {"kind", std::string(to_string(u.kind))},
                                    {"corridor_km", u.corridor_km}}}});
    }
    return fc.dump(2) + "\n";
}

DepthGrid::DepthGrid(double lat0, double lon0, double dlat, double dlon, std::size_t rows, std::size_t cols,
                     std::vector<double> depths)
    : lat0_(lat0), lon0_(lon0), dlat_(dlat), dlon_(dlon), rows_(rows), cols_(cols), depths_(std::move(depths)) {
    if (rows_ < 2 || cols_ < 2) throw InputError("depth grid needs at least 2x2 nodes");
    if (!(dlat_ > 0.0) || !(dlon_ > 0.0)) throw InputError("depth grid spacing must be > 0");
    if (depths_.size() != rows_ * cols_) throw InputError("depth grid size mismatch");
}

DepthGrid DepthGrid::from_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::map<std::pair<double, double>, double> nodes;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        if (!header) {
            if (csv::trim(line) != "lat,lon,depth_m") throw InputError("bathymetry: expected header lat,lon,depth_m");
            header = true;
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != 3) throw InputError("bathymetry line " + std::to_string(line_no) + ": expected 3 fields");
        const auto lat = csv::parse_double(f[0]), lon = csv::parse_double(f[1]), d = csv::parse_double(f[2]);
        if (!lat || !lon || !d) throw InputError("bathymetry line " + std::to_string(line_no) + ": not a number");
        if (!nodes.emplace(std::pair{*lat, *lon}, *d).second)
            throw InputError("bathymetry line " + std::to_string(line_no) + ": repeated node");
    }
    if (!header) throw InputError("bathymetry: missing header");
    std::set<double> lats, lons;
    for (const auto& [k, v] : nodes) {
        lats.insert(k.first);
        lons.insert(k.second);
    }
    if (lats.size() < 2 || lons.size() < 2 || nodes.size() != lats.size() * lons.size())
        throw InputError("bathymetry: nodes do not form a complete lattice");
    const std::vector<double> la(lats.begin(), lats.end()), lo(lons.begin(), lons.end());
    const double dlat = (la.back() - la.front()) / static_cast<double>(la.size() - 1);
    const double dlon = (lo.back() - lo.front()) / static_cast<double>(lo.size() - 1);
    for (std::size_t i = 0; i < la.size(); ++i)
        if (std::fabs(la[i] - (la.front() + static_cast<double>(i) * dlat)) > 1e-6 * std::max(1.0, dlat))
            throw InputError("bathymetry: irregular latitude spacing");
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (std::fabs(lo[j] - (lo.front() + static_cast<double>(j) * dlon)) > 1e-6 * std::max(1.0, dlon))
            throw InputError("bathymetry: irregular longitude spacing");
    std::vector<double> depths;
    depths.reserve(nodes.size());
    for (double a : la)
        for (double o : lo) depths.push_back(nodes.at({a, o}));
    return DepthGrid(la.front(), lo.front(), dlat, dlon, la.size(), lo.size(), std::move(depths));
}

DepthGrid DepthGrid::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    return from_csv(in);
}

std::optional<double> DepthGrid::depth_at(const GeoPoint& p) const {
    const double fr = (p.lat - lat0_) / dlat_;
    const double fc = (p.lon - lon0_) / dlon_;
    const double max_r = static_cast<double>(rows_ - 1), max_c = static_cast<double>(cols_ - 1);
    if (fr < 0.0 || fc < 0.0 || fr > max_r || fc > max_c) return std::nullopt;
    const auto r0 = std::min(static_cast<std::size_t>(fr), rows_ - 2);
    const auto c0 = std::min(static_cast<std::size_t>(fc), cols_ - 2);
    const double u = fr - static_cast<double>(r0), v = fc - static_cast<double>(c0);
    const auto at = [&](std::size_t r, std::size_t c) { return depths_[r * cols_ + c]; };
    return (1 - u) * (1 - v) * at(r0, c0) + (1 - u) * v * at(r0, c0 + 1) + u * (1 - v) * at(r0 + 1, c0) +
           u * v * at(r0 + 1, c0 + 1);
}

std::vector<std::string> FilterCriteria::validate() const {
    std::vector<std::string> errs;
    if (!(d_max_km > 0.0)) errs.emplace_back("d_max_km must be > 0");
    if (!(t_min_s > 0.0)) errs.emplace_back("t_min_s must be > 0");
    if (!(s_max_kn >= 0.0)) errs.emplace_back("s_max_kn must be >= 0");
    if (manoeuvre_rate_min && !(*manoeuvre_rate_min > 0.0)) errs.emplace_back("manoeuvre_rate_min must be > 0");
    if (min_length_m && !(*min_length_m > 0.0)) errs.emplace_back("min_length_m must be > 0");
    if (depth_gate_m && !(*depth_gate_m > 0.0)) errs.emplace_back("depth_gate_m must be > 0");
    if (!(turn_threshold_deg > 0.0)) errs.emplace_back("turn_threshold_deg must be > 0");
    if (!(drift_threshold_kn > 0.0)) errs.emplace_back("drift_threshold_kn must be > 0");
    return errs;
}

std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::dwell: return "dwell";
        case Criterion::low_speed: return "low_speed";
        case Criterion::high_manoeuvre: return "high_manoeuvre";
    }
    return "dwell";
}

CorridorProfile corridor_profile(const Track& track, const Polyline& route, double radius_m, double substep_s) {
    CorridorProfile prof;
    prof.nearest_m = std::numeric_limits<double>::infinity();
    const auto& pts = track.points;
    if (pts.empty()) return prof;

    bool open = false;
    double open_since = 0.0;  // start of the pass in progress
    const auto note = [&](const GeoPoint& pos, double t, double d) {
        if (d < prof.nearest_m) {
            prof.nearest_m = d;
            prof.nearest_pos = pos;
            prof.nearest_t = t;
        }
    };
    const auto close = [&](double t) {
        prof.passes.push_back({open_since, t});
        open = false;
    };

    double t_prev = static_cast<double>(pts[0].t);
    double d_prev = distance_to_polyline(pts[0].pos, route);
    note(pts[0].pos, t_prev, d_prev);
    if (d_prev <= radius_m) {
        open = true;
        open_since = t_prev;
    }

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double ta = static_cast<double>(pts[i].t), tb = static_cast<double>(pts[i + 1].t);
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((tb - ta) / substep_s)));
        for (std::size_t k = 1; k <= n; ++k) {
            const double t = k == n ? tb : ta + (tb - ta) * static_cast<double>(k) / static_cast<double>(n);
            const GeoPoint pos = k == n ? pts[i + 1].pos : position_between(pts[i], pts[i + 1], t);
            const double d = distance_to_polyline(pos, route);
            note(pos, t, d);
            const bool was_in = d_prev <= radius_m, is_in = d <= radius_m;
            if (was_in && is_in) {
                prof.dwell_s += t - t_prev;
            } else if (was_in != is_in) {
                const double tc = t_prev + (radius_m - d_prev) / (d - d_prev) * (t - t_prev);
                if (was_in) {
                    prof.dwell_s += tc - t_prev;
                    close(tc);
                } else {
                    prof.dwell_s += t - tc;
                    open = true;
                    open_since = tc;
                }
            }
            t_prev = t;
            d_prev = d;
        }
    }
    if (open) close(t_prev);
    return prof;
}

double dwell_time(const Track& track, const UciGeometry& uci, double d_max_km) {
    return corridor_profile(track, uci.route, d_max_km * 1000.0).dwell_s;
}

namespace {

KinematicStats stats_over_passes(const Track& track, const CorridorProfile& prof, const FilterCriteria& crit) {
    TimeWindow w{prof.passes.front().t_in, prof.passes.back().t_out};
    try {
        return compute_stats(track, w, crit.drift_threshold_kn, crit.turn_threshold_deg);
    } catch (const InsufficientData&) {
        // no report inside the corridor: widen to the bracketing reports
        const auto& pts = track.points;
        auto lo = std::upper_bound(pts.begin(), pts.end(), w.start,
                                   [](double t, const AisPoint& p) { return t < static_cast<double>(p.t); });
        auto hi = std::lower_bound(pts.begin(), pts.end(), w.end,
                                   [](const AisPoint& p, double t) { return static_cast<double>(p.t) < t; });
        if (lo != pts.begin()) --lo;
        if (hi == pts.end()) --hi;
        w = {static_cast<double>(lo->t), static_cast<double>(hi->t)};
        return compute_stats(track, w, crit.drift_threshold_kn, crit.turn_threshold_deg);
    }
}

}  // namespace

std::optional<CandidateReport> evaluate_candidate(const Track& track, const UciGeometry& uci,
                                                  const FilterCriteria& crit, const DepthGrid* bathymetry) {
    if (track.points.empty()) return std::nullopt;
    const CorridorProfile prof = corridor_profile(track, uci.route, crit.d_max_km * 1000.0);
    if (prof.passes.empty() || prof.dwell_s < crit.t_min_s) return std::nullopt;

    CandidateReport rep;
    rep.mmsi = track.mmsi;
    rep.dwell_s = prof.dwell_s;
    rep.nearest_approach_m = prof.nearest_m;
    rep.nearest_pos = prof.nearest_pos;
    rep.first_entry_t = prof.passes.front().t_in;
    rep.last_exit_t = prof.passes.back().t_out;
    rep.stats = stats_over_passes(track, prof, crit);

    const bool low_speed = rep.stats.mean_sog <= crit.s_max_kn;
    const bool busy = crit.manoeuvre_rate_min && rep.stats.manoeuvre_rate >= *crit.manoeuvre_rate_min;
    if (!low_speed && !busy) return std::nullopt;

    if (bathymetry && crit.min_length_m && crit.depth_gate_m && track.info.length_m &&
        *track.info.length_m < *crit.min_length_m) {
        const auto depth = bathymetry->depth_at(prof.nearest_pos);
        if (depth && *depth > *crit.depth_gate_m) return std::nullopt;
    }

    rep.matched_criteria.insert(Criterion::dwell);
    if (low_speed) rep.matched_criteria.insert(Criterion::low_speed);
    if (busy) rep.matched_criteria.insert(Criterion::high_manoeuvre);
    return rep;
}

std::vector<CandidateReport> select_candidates(std::span<const Track> tracks, const UciGeometry& uci,
                                               const FilterCriteria& crit, const DepthGrid* bathymetry) {
    if (const auto errs = crit.validate(); !errs.empty()) throw InputError("filter criteria: " + errs.front());
    std::vector<CandidateReport> out;
    for (const auto& tr : tracks)
        if (auto rep = evaluate_candidate(tr, uci, crit, bathymetry)) out.push_back(std::move(*rep));
    std::sort(out.begin(), out.end(), [](const CandidateReport& a, const CandidateReport& b) {
        if (a.dwell_s != b.dwell_s) return a.dwell_s > b.dwell_s;
        return a.mmsi < b.mmsi;
    });
    return out;
}

}  // namespace ucimon
