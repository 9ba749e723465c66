#ifndef UCIMON_KINEMATICS_HPP
#define UCIMON_KINEMATICS_HPP

#include <optional>
#include <vector>

#include "ucimon/ais.hpp"

namespace ucimon {

/// Closed time interval in epoch seconds.
struct TimeWindow {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t <= end; }
};

struct Gap {
    Mmsi mmsi = 0;
    Timestamp t_start = 0;
    Timestamp t_end = 0;
    std::int64_t duration = 0;
    GeoPoint start_pos;
    GeoPoint end_pos;
};

struct KinematicStats {
    double mean_sog = 0.0;        // knots, time-weighted
    double manoeuvre_rate = 0.0;  // course-change events per minute
    double drift_fraction = 0.0;  // share of time with sog below the drift threshold
    double duration_s = 0.0;      // covered time inside the window
};

/// Smallest angle between two courses, in [0, 180].
double course_difference(double a_deg, double b_deg);

/// Great-circle position between two reports at time t, linear in time.
GeoPoint position_between(const AisPoint& a, const AisPoint& b, double t);

/// Position at time t when t falls on a report or between two reports at
/// most `max_gap_s` apart; nullopt outside the track span or inside a longer
/// gap. Throws InputError on an empty track or non-positive max_gap_s.
std::optional<GeoPoint> interpolate_position(const Track& track, double t, double max_gap_s);

/// Every consecutive-report spacing strictly longer than `min_duration_s`.
std::vector<Gap> find_gaps(const Track& track, double min_duration_s);

/// Sample-and-hold statistics: each report's sog holds until the next
/// report. A manoeuvre is a course change above `turn_threshold_deg` between
/// consecutive reports that both fall inside the window. Throws
/// InsufficientData when no report falls in the window.
KinematicStats compute_stats(const Track& track, TimeWindow window, double drift_threshold_kn,
                             double turn_threshold_deg);

}  // namespace ucimon

#endif  // UCIMON_KINEMATICS_HPP
