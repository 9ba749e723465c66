#include "ucimon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/ou.hpp"

namespace ucimon {

std::vector<OuSample> simulate_ou(Vec2 mu, Vec2 gamma, Vec2 sigma, OuSample start, double dt, std::size_t steps,
                                  Rng& rng) {
    if (!(dt > 0.0)) throw InputError("simulate_ou: dt must be > 0");
    std::vector<OuSample> out;
    out.reserve(steps + 1);
    out.push_back(start);
    const auto axis = [&](double m, double g, double s, double& x, double& v) {
        const OuMoments mo = ou_moments(m, g, s, v, dt);
        const double z1 = rng.normal(), z2 = rng.normal();
        const double sv = std::sqrt(std::max(0.0, mo.var_vel));
        const double cx = sv > 0.0 ? mo.cov_pos_vel / sv : 0.0;
        const double rx = std::sqrt(std::max(0.0, mo.var_pos - cx * cx));
        x += mo.mean_pos + cx * z1 + rx * z2;
        v = mo.mean_vel + sv * z1;
    };
    OuSample cur = start;
    for (std::size_t k = 0; k < steps; ++k) {
        axis(mu.east, gamma.east, sigma.east, cur.pos.east, cur.vel.east);
        axis(mu.north, gamma.north, sigma.north, cur.pos.north, cur.vel.north);
        cur.t += dt;
        out.push_back(cur);
    }
    return out;
}

namespace {

double iso(const char* s) { return static_cast<double>(*parse_iso8601(s)); }

double wrap360(double deg) {
    double d = std::fmod(deg, 360.0);
    return d < 0.0 ? d + 360.0 : d;
}

// Emits reports while steering a vessel through a sequence of legs.
class TrackBuilder {
public:
    TrackBuilder(Mmsi mmsi, GeoPoint start, double t0, double report_s, Rng& rng)
        : mmsi_(mmsi), pos_(start), t_(t0), dt_(report_s), rng_(rng) {}

    GeoPoint pos() const { return pos_; }
    double t() const { return t_; }

    void report(double sog_kn, double cog_deg, std::optional<NavStatus> status) {
        AisPoint p;
        p.mmsi = mmsi_;
        p.t = static_cast<Timestamp>(std::llround(t_));
        p.pos = pos_;
        p.sog = std::max(0.0, sog_kn + rng_.uniform(-0.2, 0.2));
        p.cog = wrap360(cog_deg + rng_.uniform(-2.0, 2.0));
        p.heading = wrap360(std::round(cog_deg));
        p.nav_status = status;
        if (!pts_.empty() && pts_.back().t >= p.t) return;
        pts_.push_back(p);
    }

    void leg(double bearing, double speed_kn, double duration_s, std::optional<NavStatus> st, bool silent = false) {
        const auto n = static_cast<std::size_t>(std::ceil(duration_s / dt_ - 1e-9));
        for (std::size_t k = 0; k < n; ++k) {
            const double step = std::min(dt_, duration_s - static_cast<double>(k) * dt_);
            pos_ = destination(pos_, bearing, speed_kn * kKnotToMps * step);
            t_ += step;
            if (!silent) report(speed_kn, bearing, st);
        }
    }

    /// Sails straight to `target`; returns when within one step of it.
    void toward(const GeoPoint& target, double speed_kn, std::optional<NavStatus> st, bool silent = false) {
        const double step_m = speed_kn * kKnotToMps * dt_;
        while (geodesic_distance(pos_, target) > step_m) leg(initial_bearing(pos_, target), speed_kn, dt_, st, silent);
    }

    /// Swings around `anchor` for `duration_s`.
    void anchored(const GeoPoint& anchor, double duration_s, double swing_m) {
        const auto n = static_cast<std::size_t>(std::ceil(duration_s / dt_));
        for (std::size_t k = 0; k < n; ++k) {
            t_ += dt_;
            pos_ = destination(anchor, rng_.uniform(0.0, 360.0), rng_.uniform(0.0, swing_m));
            report(rng_.uniform(0.0, 0.3), rng_.uniform(0.0, 360.0), NavStatus::at_anchor);
        }
    }

    void skip(double duration_s) { t_ += duration_s; }
    void teleport(const GeoPoint& p) { pos_ = p; }

    Track take(VesselInfo info) {
        Track tr;
        tr.mmsi = mmsi_;
        info.mmsi = mmsi_;
        tr.info = info;
        tr.points = std::move(pts_);
        pts_.clear();
        return tr;
    }

private:
    Mmsi mmsi_;
    GeoPoint pos_;
    double t_;
    double dt_;
    Rng& rng_;
    std::vector<AisPoint> pts_;
};

VesselInfo vessel(ShipType type, double length, OwnershipRisk risk, std::string name) {
    VesselInfo v;
    v.ship_type = type;
    v.length_m = length;
    v.ownership_risk = risk;
    v.name = std::move(name);
    return v;
}

// Straight transit between two points, starting at t0.
Track transit(Mmsi mmsi, const GeoPoint& a, const GeoPoint& b, double t0, double speed_kn, double report_s, Rng& rng,
              VesselInfo info) {
    TrackBuilder tb(mmsi, a, t0, report_s, rng);
    tb.report(speed_kn, initial_bearing(a, b), NavStatus::under_way_engine);
    tb.toward(b, speed_kn, NavStatus::under_way_engine);
    return tb.take(std::move(info));
}

Track anchorage_stay(Mmsi mmsi, const GeoPoint& centre, double t0, double duration_s, double report_s, Rng& rng,
                     VesselInfo info) {
    const GeoPoint spot = destination(centre, rng.uniform(0.0, 360.0), rng.uniform(0.0, 1500.0));
    TrackBuilder tb(mmsi, spot, t0, report_s, rng);
    tb.report(0.1, 0.0, NavStatus::at_anchor);
    tb.anchored(spot, duration_s, 120.0);
    return tb.take(std::move(info));
}

// Position on a geodesic lane at fraction f, shifted sideways by `offset_m`.
GeoPoint lane_point(const GeoPoint& a, const GeoPoint& b, double f, double offset_m) {
    const GeoPoint p = intermediate_point(a, b, f);
    return destination(p, initial_bearing(a, b) + 90.0, offset_m);
}

// Detection of a vessel seen by the radar: azimuth shift along its motion
// plus a little positional noise.
GeoPoint sar_echo(const GeoPoint& true_pos, double sog_kn, double cog_deg, Rng& rng) {
    const GeoPoint shifted = destination(true_pos, cog_deg + 90.0, 40.0 * sog_kn * kKnotToMps);
    return destination(shifted, rng.uniform(0.0, 360.0), std::fabs(rng.normal()) * 50.0);
}

// Adds a detection for every track with a position at t.
void observe(std::vector<SarDetection>& dets, const std::vector<Track>& tracks, double t, const std::string& image,
             Rng& rng) {
    for (const auto& tr : tracks) {
        const auto pos = interpolate_position(tr, t, 600.0);
        if (!pos) continue;
        const auto it = std::upper_bound(tr.points.begin(), tr.points.end(), t,
                                         [](double tt, const AisPoint& p) { return tt < static_cast<double>(p.t); });
        const AisPoint& ref = *(it == tr.points.begin() ? it : it - 1);
        dets.push_back({"", image, static_cast<Timestamp>(t), sar_echo(*pos, ref.sog, ref.cog, rng)});
    }
}

void number_detections(std::vector<SarDetection>& dets, Rng& rng) {
    // shuffle so ids carry no hint of the vessel order
    for (std::size_t i = dets.size(); i > 1; --i) std::swap(dets[i - 1], dets[rng.below(i)]);
    for (std::size_t i = 0; i < dets.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "d%03zu", i + 1);
        dets[i].id = buf;
    }
}

}  // namespace

// ---- Baltic -------------------------------------------------------------------

Scenario baltic_scenario(std::uint64_t seed) {
    Rng rng(seed);
    Scenario s;
    s.name = "baltic";
    s.bbox = {54.5, 14.6, 56.0, 17.0};
    s.cell_deg = 0.05;

    const Polyline route({{54.88, 15.40}, {55.10, 15.65}, {55.40, 15.95}, {55.60, 16.25}});
    s.ucis.push_back({"NS-A", UciKind::pipeline, route, 1.0});

    const double t0 = iso("2022-09-20T00:00:00Z");
    const double t_sar = iso("2022-09-20T16:05:00Z");
    const std::string image = "S1A_20220920T160500";
    const GeoPoint lane_w{55.25, 14.70}, lane_e{55.25, 16.90};
    const GeoPoint diag_s{54.60, 15.90}, diag_n{55.90, 16.85};
    const GeoPoint anchorage{54.72, 16.45};

    // lane traffic, both directions, spread over the day
    Mmsi id = 230000100;
    for (int k = 0; k < 10; ++k) {
        const bool east = k % 2 == 0;
        const double off = rng.uniform(-1500.0, 1500.0);
        const GeoPoint a = lane_point(lane_w, lane_e, east ? 0.0 : 1.0, off);
        const GeoPoint b = lane_point(lane_w, lane_e, east ? 1.0 : 0.0, off);
        const double start = t0 + 2.4 * 3600.0 * k + rng.uniform(0.0, 1800.0);
        s.tracks.push_back(transit(id++, a, b, start, rng.uniform(10.0, 14.0), 120.0, rng,
                                   vessel(ShipType::cargo, rng.uniform(90.0, 200.0), OwnershipRisk::low, "LANE")));
    }
    // anchorage
    for (int k = 0; k < 4; ++k)
        s.tracks.push_back(anchorage_stay(id++, anchorage, t0, 24 * 3600.0, 360.0, rng,
                                          vessel(ShipType::tanker, rng.uniform(120.0, 250.0), OwnershipRisk::low,
                                                 "ANCHORED")));

    // vessel working the pipeline: approach under power, drift away, repeat
    {
        const Mmsi mmsi = 273000001;
        const GeoPoint foot = intermediate_point(route.vertices()[1], route.vertices()[2], 0.6);
        const double away = initial_bearing(route.vertices()[1], route.vertices()[2]) + 90.0;
        const GeoPoint near = destination(foot, away, 300.0);
        TrackBuilder tb(mmsi, destination(foot, away, 30000.0), t0 + 5 * 3600.0, 120.0, rng);
        tb.report(10.0, away + 180.0, NavStatus::under_way_engine);
        tb.toward(near, 10.0, NavStatus::under_way_engine);
        for (int c = 0; c < 5; ++c) {
            tb.leg(away + rng.uniform(-5.0, 5.0), 1.0, 90 * 60.0, NavStatus::under_way_engine);
            if (c < 4) tb.toward(near, 6.0, NavStatus::under_way_engine);
        }
        tb.leg(away, 10.0, 2 * 3600.0, NavStatus::under_way_engine);
        s.tracks.push_back(tb.take(vessel(ShipType::other, 70.0, OwnershipRisk::high, "WORKER")));
    }

    // vessel that goes quiet around the image time and leaves its lane
    GeoPoint gap_truth;
    {
        const Mmsi mmsi = 273000002;
        const double v = 11.0;
        const double brg = initial_bearing(diag_s, diag_n);
        const double t_start = t_sar - 6 * 3600.0;
        const double gap_from = t_sar - 2.5 * 3600.0, gap_to = t_sar + 2.5 * 3600.0;
        TrackBuilder tb(mmsi, diag_s, t_start, 120.0, rng);
        tb.report(v, brg, NavStatus::under_way_engine);
        tb.leg(brg, v, gap_from - t_start, NavStatus::under_way_engine);
        const GeoPoint on_lane_sar = destination(tb.pos(), brg, v * kKnotToMps * (t_sar - gap_from));
        const GeoPoint on_lane_end = destination(tb.pos(), brg, v * kKnotToMps * (gap_to - gap_from));
        gap_truth = destination(on_lane_sar, brg - 90.0, 6000.0);
        const double d1 = geodesic_distance(tb.pos(), gap_truth);
        tb.leg(initial_bearing(tb.pos(), gap_truth), d1 / (t_sar - gap_from) / kKnotToMps, t_sar - gap_from,
               std::nullopt, true);
        const double d2 = geodesic_distance(tb.pos(), on_lane_end);
        tb.leg(initial_bearing(tb.pos(), on_lane_end), d2 / (gap_to - t_sar) / kKnotToMps, gap_to - t_sar,
               std::nullopt, true);
        tb.report(v, brg, NavStatus::under_way_engine);
        tb.leg(brg, v, 3 * 3600.0, NavStatus::under_way_engine);
        s.tracks.push_back(tb.take(vessel(ShipType::cargo, 140.0, OwnershipRisk::medium, "QUIET")));
        s.truth.push_back({"gap_vessel_at_sar", mmsi, t_sar, gap_truth});
    }

    observe(s.detections, s.tracks, t_sar, image, rng);
    s.detections.push_back({"", image, static_cast<Timestamp>(t_sar), sar_echo(gap_truth, 11.0, 0.0, rng)});
    const GeoPoint dark{55.00, 16.40};
    s.detections.push_back({"", image, static_cast<Timestamp>(t_sar), dark});
    s.truth.push_back({"dark_detection", std::nullopt, t_sar, dark});
    number_detections(s.detections, rng);

    // three days of earlier traffic
    Mmsi hid = 231000000;
    const double h0 = t0 - 3 * 24 * 3600.0;
    for (int k = 0; k < 24; ++k) {
        const bool east = k % 2 == 0;
        const double off = rng.uniform(-1500.0, 1500.0);
        const double start = h0 + 3 * 3600.0 * k;
        if (k % 3 == 2)
            s.history.push_back(transit(hid++, diag_s, diag_n, start, rng.uniform(10.0, 13.0), 300.0, rng,
                                        vessel(ShipType::cargo, 120.0, OwnershipRisk::low, "HIST")));
        else
            s.history.push_back(transit(hid++, lane_point(lane_w, lane_e, east ? 0.0 : 1.0, off),
                                        lane_point(lane_w, lane_e, east ? 1.0 : 0.0, off), start,
                                        rng.uniform(10.0, 14.0), 300.0, rng,
                                        vessel(ShipType::cargo, 150.0, OwnershipRisk::low, "HIST")));
    }
    for (int k = 0; k < 6; ++k)
        s.history.push_back(anchorage_stay(hid++, anchorage, h0 + 4 * 3600.0 * k, 36 * 3600.0, 360.0, rng,
                                           vessel(ShipType::tanker, 180.0, OwnershipRisk::low, "HIST")));

    s.config_lines = {"gap_min_s = 14400"};
    return s;
}

// ---- Shetland -----------------------------------------------------------------

Scenario shetland_scenario(std::uint64_t seed) {
    Rng rng(seed);
    Scenario s;
    s.name = "shetland";
    s.bbox = {59.9, -1.6, 60.6, 0.0};
    s.cell_deg = 0.05;

    const Polyline route({{60.10, -1.20}, {60.25, -0.95}, {60.40, -0.60}});
    s.ucis.push_back({"SH-CABLE", UciKind::comm_cable, route, 1.0});

    for (double lat = 59.9; lat <= 60.6 + 1e-9; lat += 0.05)
        for (double lon = -1.6; lon <= 0.0 + 1e-9; lon += 0.05)
            s.bathymetry.push_back({std::round(lat * 100.0) / 100.0, std::round(lon * 100.0) / 100.0,
                                    std::round((60.0 + 150.0 * (lon + 1.6) / 1.6 + rng.uniform(-5.0, 5.0)) * 10.0) /
                                        10.0});

    const double t0 = iso("2023-01-10T00:00:00Z");
    const double along = initial_bearing(route.vertices()[0], route.vertices()[2]);

    // trawlers towing back and forth across the cable with frequent course changes
    Mmsi id = 235000100;
    const double fractions[] = {0.15, 0.3, 0.45, 0.6, 0.9};
    for (int k = 0; k < 5; ++k) {
        const GeoPoint on = intermediate_point(route.vertices()[0], route.vertices()[2], fractions[k]);
        TrackBuilder tb(id++, destination(on, along - 90.0, 2500.0), t0 + 3600.0 * k, 60.0, rng);
        tb.report(3.5, along + 90.0, NavStatus::engaged_in_fishing);
        for (int pass = 0; pass < 12; ++pass) {
            const double heading = along + (pass % 2 == 0 ? 90.0 : -90.0);
            for (int z = 0; z < 4; ++z)
                tb.leg(heading + (z % 2 == 0 ? 35.0 : -35.0), 3.5, 10 * 60.0, NavStatus::engaged_in_fishing);
            tb.leg(heading + 180.0, 0.0, 60.0, NavStatus::engaged_in_fishing);
        }
        const double len = k == 4 ? 24.0 : rng.uniform(48.0, 70.0);
        s.tracks.push_back(tb.take(vessel(ShipType::fishing, len, OwnershipRisk::low, "TRAWLER")));
    }
    // through traffic
    for (int k = 0; k < 6; ++k) {
        const GeoPoint a{rng.uniform(59.92, 60.05), -1.55}, b{rng.uniform(60.45, 60.58), -0.05};
        const bool north = k % 2 == 0;
        s.tracks.push_back(transit(id++, north ? a : b, north ? b : a, t0 + 3 * 3600.0 * k, rng.uniform(11.0, 15.0),
                                   120.0, rng, vessel(ShipType::cargo, 160.0, OwnershipRisk::low, "TRANSIT")));
    }

    // history: the same traffic pattern, fishing farther south-west
    Mmsi hid = 236000000;
    const double h0 = t0 - 3 * 24 * 3600.0;
    for (int k = 0; k < 12; ++k) {
        const GeoPoint a{rng.uniform(59.92, 60.05), -1.55}, b{rng.uniform(60.45, 60.58), -0.05};
        s.history.push_back(transit(hid++, a, b, h0 + 5 * 3600.0 * k, 12.0, 300.0, rng,
                                    vessel(ShipType::cargo, 160.0, OwnershipRisk::low, "HIST")));
    }
    for (int k = 0; k < 4; ++k) {
        TrackBuilder tb(hid++, {59.98, -1.45 + 0.05 * k}, h0 + 6 * 3600.0 * k, 300.0, rng);
        tb.report(3.5, 0.0, NavStatus::engaged_in_fishing);
        for (int pass = 0; pass < 10; ++pass) tb.leg(pass % 2 == 0 ? 20.0 : 200.0, 3.5, 3600.0,
                                                    NavStatus::engaged_in_fishing);
        s.history.push_back(tb.take(vessel(ShipType::fishing, 30.0, OwnershipRisk::low, "HIST")));
    }

    s.config_lines = {"bathymetry = bathymetry.csv", "manoeuvre_rate_min = 0.05", "min_length_m = 45",
                      "depth_gate_m = 100"};
    return s;
}

// ---- Adriatic -----------------------------------------------------------------

Scenario adriatic_scenario(std::uint64_t seed) {
    Rng rng(seed);
    Scenario s;
    s.name = "adriatic";
    s.bbox = {39.6, 17.6, 41.6, 20.2};
    s.cell_deg = 0.05;

    const Polyline tap({{40.40, 18.55}, {40.60, 19.00}, {40.80, 19.45}});
    const Polyline ote({{40.30, 18.60}, {40.55, 19.05}, {40.75, 19.50}});
    s.ucis.push_back({"TAP", UciKind::pipeline, tap, 1.0});
    s.ucis.push_back({"OTEGLOBE", UciKind::comm_cable, ote, 1.0});

    const double t0 = iso("2023-02-01T00:00:00Z");
    const double t_gap = t0 + 48 * 3600.0;
    const double t_sar = t_gap + 3 * 3600.0;
    const double t_back = t_gap + 21.5 * 3600.0;
    const std::string image = "S1B_20230203T030000";

    // the silent vessel: OU velocity, last fix on the pipeline
    const Mmsi mmsi = 247000001;
    const Vec2 mu{0.3, 0.15};
    const Vec2 gamma{1.0 / 5400.0, 1.0 / 5400.0};
    const double vstd = 0.6;
    const Vec2 sigma{vstd * std::sqrt(2.0 * gamma.east), vstd * std::sqrt(2.0 * gamma.north)};
    const double dt = 60.0;
    OuSample start{t0, {0.0, 0.0}, {mu.east + vstd * rng.normal(), mu.north + vstd * rng.normal()}};
    const auto before = simulate_ou(mu, gamma, sigma, start, dt, 48 * 60, rng);
    const auto after = simulate_ou(mu, gamma, sigma, before.back(), dt,
                                   static_cast<std::size_t>((t_back + 2 * 3600.0 - t_gap) / dt), rng);
    const GeoPoint anchor = tap.vertices()[1];
    const LocalFrame frame(anchor);
    const Vec2 shift = before.back().pos;
    const auto to_point = [&](const OuSample& o, std::optional<NavStatus> st) {
        AisPoint p;
        p.mmsi = mmsi;
        p.t = static_cast<Timestamp>(std::llround(o.t));
        p.pos = frame.unproject(o.pos - shift);
        p.sog = norm(o.vel) / kKnotToMps;
        p.cog = wrap360(rad2deg(std::atan2(o.vel.east, o.vel.north)));
        p.nav_status = st;
        return p;
    };
    Track silent;
    silent.mmsi = mmsi;
    silent.info = vessel(ShipType::other, 55.0, OwnershipRisk::high, "SILENT");
    silent.info.mmsi = mmsi;
    for (const auto& o : before) silent.points.push_back(to_point(o, NavStatus::under_way_engine));
    GeoPoint truth_at_sar;
    for (const auto& o : after) {
        if (std::fabs(o.t - t_sar) < 0.5) truth_at_sar = frame.unproject(o.pos - shift);
        if (o.t >= t_back - 0.5) silent.points.push_back(to_point(o, NavStatus::under_way_engine));
    }
    s.tracks.push_back(std::move(silent));
    s.truth.push_back({"gap_start", mmsi, t_gap, anchor});
    s.truth.push_back({"gap_vessel_at_sar", mmsi, t_sar, truth_at_sar});

    // north-south lane across the strait
    Mmsi id = 247100000;
    for (int k = 0; k < 6; ++k) {
        const bool north = k % 2 == 0;
        const double lon = 18.80 + 0.01 * k;
        const GeoPoint a{39.8, lon}, b{41.4, lon};
        const double speed = rng.uniform(12.0, 14.0);
        const double start = t_sar - rng.uniform(1.0, 5.0) * 3600.0;
        s.tracks.push_back(transit(id++, north ? a : b, north ? b : a, start, speed, 120.0, rng,
                                   vessel(ShipType::cargo, 150.0, OwnershipRisk::low, "LANE")));
    }
    for (int k = 0; k < 3; ++k)
        s.tracks.push_back(anchorage_stay(id++, {40.68, 18.05}, t0 + 24 * 3600.0, 48 * 3600.0, 360.0, rng,
                                          vessel(ShipType::tanker, 200.0, OwnershipRisk::low, "ANCHORED")));

    observe(s.detections, s.tracks, t_sar, image, rng);
    s.detections.push_back({"", image, static_cast<Timestamp>(t_sar),
                            destination(truth_at_sar, rng.uniform(0.0, 360.0), std::fabs(rng.normal()) * 30.0)});
    const GeoPoint dark{40.25, 18.30};
    s.detections.push_back({"", image, static_cast<Timestamp>(t_sar), dark});
    s.truth.push_back({"dark_detection", std::nullopt, t_sar, dark});
    number_detections(s.detections, rng);

    Mmsi hid = 248000000;
    const double h0 = t0 - 3 * 24 * 3600.0;
    for (int k = 0; k < 18; ++k) {
        const bool north = k % 2 == 0;
        const double lon = 18.78 + 0.01 * (k % 7);
        const GeoPoint a{39.8, lon}, b{41.4, lon};
        s.history.push_back(transit(hid++, north ? a : b, north ? b : a, h0 + 4 * 3600.0 * k, 13.0, 300.0, rng,
                                    vessel(ShipType::cargo, 150.0, OwnershipRisk::low, "HIST")));
    }
    for (int k = 0; k < 4; ++k)
        s.history.push_back(anchorage_stay(hid++, {40.68, 18.05}, h0 + 6 * 3600.0 * k, 40 * 3600.0, 360.0, rng,
                                           vessel(ShipType::tanker, 200.0, OwnershipRisk::low, "HIST")));

    s.config_lines = {"gap_min_s = 14400"};
    return s;
}

Scenario make_scenario(std::string_view name, std::uint64_t seed) {
    if (name == "baltic") return baltic_scenario(seed);
    if (name == "shetland") return shetland_scenario(seed);
    if (name == "adriatic") return adriatic_scenario(seed);
    throw InputError("unknown scenario '" + std::string(name) + "' (expected baltic, shetland or adriatic)");
}

void write_scenario(const Scenario& s, const std::filesystem::path& dir, std::string_view header_block) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw InputError("cannot write " + (dir / name).string());
        out << header_block;
        return out;
    };
    {
        auto out = open("ais.csv");
        write_ais_csv(out, s.tracks);
    }
    {
        auto out = open("ais_history.csv");
        write_ais_csv(out, s.history);
    }
    {
        std::vector<VesselInfo> infos;
        for (const auto* set : {&s.tracks, &s.history})
            for (const auto& t : *set) infos.push_back(t.info);
        std::sort(infos.begin(), infos.end(), [](const auto& a, const auto& b) { return a.mmsi < b.mmsi; });
        auto out = open("vessels.csv");
        write_vessel_csv(out, infos);
    }
    {
        std::ofstream out(dir / "uci.geojson", std::ios::binary);
        out << to_geojson(s.ucis) << '\n';
    }
    {
        auto out = open("detections.csv");
        write_detections_csv(out, s.detections);
    }
    {
        auto out = open("truth.csv");
        out << "label,mmsi,timestamp,lat,lon\n";
        for (const auto& t : s.truth) {
            out << t.label << ',';
            if (t.mmsi) out << *t.mmsi;
            out << ',' << format_iso8601(static_cast<Timestamp>(std::llround(t.t))) << ','
                << csv::format_double(t.pos.lat) << ',' << csv::format_double(t.pos.lon) << '\n';
        }
    }
    if (!s.bathymetry.empty()) {
        auto out = open("bathymetry.csv");
        out << "lat,lon,depth_m\n";
        for (const auto& d : s.bathymetry)
            out << csv::format_double(d.lat) << ',' << csv::format_double(d.lon) << ','
                << csv::format_double(d.depth_m) << '\n';
    }
    {
        auto out = open("scenario.cfg");
        out << "# scenario " << s.name << "\n";
        out << "ais = ais.csv\nhistory = ais_history.csv\nvessels = vessels.csv\nuci = uci.geojson\n"
               "detections = detections.csv\n";
        char bbox[128];
        std::snprintf(bbox, sizeof bbox, "bbox = %s,%s,%s,%s\n", csv::format_double(s.bbox.lat_min).c_str(),
                      csv::format_double(s.bbox.lon_min).c_str(), csv::format_double(s.bbox.lat_max).c_str(),
                      csv::format_double(s.bbox.lon_max).c_str());
        out << bbox << "cell_deg = " << csv::format_double(s.cell_deg) << '\n';
        for (const auto& l : s.config_lines) out << l << '\n';
    }
}

}  // namespace ucimon
