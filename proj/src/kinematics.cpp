#include "ucimon/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "ucimon/errors.hpp"

namespace ucimon {

double course_difference(double a_deg, double b_deg) {
    double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

GeoPoint position_between(const AisPoint& a, const AisPoint& b, double t) {
    const double span = static_cast<double>(b.t - a.t);
    if (span <= 0.0) return a.pos;
    const double f = std::clamp((t - static_cast<double>(a.t)) / span, 0.0, 1.0);
    return intermediate_point(a.pos, b.pos, f);
}

std::optional<GeoPoint> interpolate_position(const Track& track, double t, double max_gap_s) {
    if (track.points.empty()) throw InputError("interpolate_position: empty track");
    if (!(max_gap_s > 0.0)) throw InputError("interpolate_position: max_gap must be > 0");
    const auto& pts = track.points;
    if (t < static_cast<double>(pts.front().t) || t > static_cast<double>(pts.back().t)) return std::nullopt;
    // first report with time >= t
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const AisPoint& p, double tt) { return static_cast<double>(p.t) < tt; });
    if (it != pts.end() && static_cast<double>(it->t) == t) return it->pos;
    const AisPoint& after = *it;
    const AisPoint& before = *(it - 1);
    if (static_cast<double>(after.t - before.t) > max_gap_s) return std::nullopt;
    return position_between(before, after, t);
}

std::vector<Gap> find_gaps(const Track& track, double min_duration_s) {
    if (!(min_duration_s > 0.0)) throw InputError("find_gaps: min_duration must be > 0");
    std::vector<Gap> out;
    const auto& pts = track.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const std::int64_t dt = pts[i].t - pts[i - 1].t;
        if (static_cast<double>(dt) > min_duration_s)
            out.push_back(Gap{track.mmsi, pts[i - 1].t, pts[i].t, dt, pts[i - 1].pos, pts[i].pos});
    }
    return out;
}

KinematicStats compute_stats(const Track& track, TimeWindow window, double drift_threshold_kn,
                             double turn_threshold_deg) {
    if (!(drift_threshold_kn > 0.0) || !(turn_threshold_deg > 0.0))
        throw InputError("compute_stats: thresholds must be > 0");
    const auto& pts = track.points;
    std::size_t inside = 0;
    std::size_t last_inside = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (window.contains(static_cast<double>(pts[i].t))) {
            ++inside;
            last_inside = i;
        }
    }
    if (inside == 0) throw InsufficientData("compute_stats: no reports inside the window");

    KinematicStats st;
    double sog_time = 0.0;
    double drift_time = 0.0;
    std::size_t events = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = std::max(static_cast<double>(pts[i].t), window.start);
        const double b = std::min(static_cast<double>(pts[i + 1].t), window.end);
        if (b > a) {
            const double w = b - a;
            st.duration_s += w;
            sog_time += w * pts[i].sog;
            if (pts[i].sog < drift_threshold_kn) drift_time += w;
        }
        if (window.contains(static_cast<double>(pts[i].t)) && window.contains(static_cast<double>(pts[i + 1].t)) &&
            course_difference(pts[i].cog, pts[i + 1].cog) > turn_threshold_deg)
            ++events;
    }
    if (st.duration_s > 0.0) {
        st.mean_sog = sog_time / st.duration_s;
        st.drift_fraction = drift_time / st.duration_s;
        st.manoeuvre_rate = static_cast<double>(events) / (st.duration_s / 60.0);
    } else {
        // a single instant: the lone report speaks for the window
        const AisPoint& p = pts[last_inside];
        st.mean_sog = p.sog;
        st.drift_fraction = p.sog < drift_threshold_kn ? 1.0 : 0.0;
    }
    return st;
}

}  // namespace ucimon
