#ifndef UCIMON_ANOMALY_HPP
#define UCIMON_ANOMALY_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ucimon/ais.hpp"
#include "ucimon/density.hpp"
#include "ucimon/kinematics.hpp"
#include "ucimon/sar_assoc.hpp"
#include "ucimon/uci.hpp"

namespace ucimon {

enum class AnomalyKind { ais_gap, loiter_near_uci, zone_entry, route_deviation, search_pattern, unassociated_sar };

std::string_view to_string(AnomalyKind k);
std::optional<AnomalyKind> anomaly_kind_from_string(std::string_view s);

struct AnomalyEvent {
    Mmsi mmsi = 0;  // 0 when no vessel could be attributed
    AnomalyKind kind = AnomalyKind::ais_gap;
    double t_start = 0.0;
    double t_end = 0.0;
    double severity = 0.0;  // [0, 1]
    std::string summary;
    std::map<std::string, double> fields;
    std::string zone;  // UCI name, when one is involved
};

/// Heuristic severity settings. None of these come from a calibrated model;
/// they shape the indicators handed to the evidential layer.
struct AnomalyConfig {
    double gap_full_s = 24 * 3600.0;  // gap length that saturates severity
    double gap_corridor_boost = 1.5;
    double loiter_normalcy_max = 0.2;
    double drift_threshold_kn = 3.0;
    std::size_t search_min_cycles = 3;
    double search_full_cycles = 5.0;
    double search_min_phase_s = 600.0;
    double search_min_window_s = 2 * 3600.0;
    double zone_base_severity = 0.5;
    std::map<UciKind, double> zone_kind_weight{
        {UciKind::pipeline, 1.0}, {UciKind::power_cable, 1.0}, {UciKind::comm_cable, 1.0}};
    double deviation_normalcy_max = 0.05;
    double deviation_full_s = 3600.0;
    double unassociated_severity = 0.3;
    double unassociated_gap_severity = 0.6;
    double report_floor = 0.1;
};

/// One event per report spacing of at least `min_gap_s`. Severity grows with
/// duration up to gap_full_s and is boosted when either end of the gap lies
/// inside the UCI corridor.
std::vector<AnomalyEvent> detect_ais_gap(const Track& track, double min_gap_s, const UciGeometry* uci,
                                         const AnomalyConfig& cfg = {});

/// Fires when the track passes the UCI selection gates and the centroid of
/// its in-corridor reports sits in a cell that the stationary-area grid
/// rates below loiter_normalcy_max. Positions outside the grid score 0.
std::vector<AnomalyEvent> detect_loiter(const Track& track, const UciGeometry& uci, const FilterCriteria& crit,
                                        const DensityGrid& stationary_grid, const AnomalyConfig& cfg = {});

/// Alternation between powered approaches to the route (sog at or above the
/// drift threshold, range decreasing) and drifts away from it (sog below,
/// range increasing). Phases shorter than search_min_phase_s are ignored.
/// The cycle count is the number of approach phases once at least one drift
/// phase is present. Throws InputError for windows shorter than
/// search_min_window_s.
std::vector<AnomalyEvent> detect_search_pattern(const Track& track, const UciGeometry& uci, TimeWindow window,
                                                const AnomalyConfig& cfg = {});

/// One event per maximal stay inside any zone corridor. With a traffic grid,
/// severity is scaled by one minus the normalcy of the entry point, so
/// crossings along established lanes weigh little.
std::vector<AnomalyEvent> detect_zone_entry(const Track& track, std::span<const UciGeometry> zones,
                                            const AnomalyConfig& cfg = {}, const DensityGrid* traffic_grid = nullptr);

/// Runs of at least two consecutive reports whose cells score below
/// deviation_normalcy_max on the all-traffic grid.
std::vector<AnomalyEvent> detect_route_deviation(const Track& track, const DensityGrid& traffic_grid,
                                                 const AnomalyConfig& cfg = {});

/// Turns flagged scene rows into events. Rows flagged gap_bracketing are
/// attributed to the gapped vessel.
std::vector<AnomalyEvent> unassociated_events(const AnnotatedScene& scene, const AnomalyConfig& cfg = {});

/// Drops events below the report floor and sorts by (mmsi, t_start, kind).
std::vector<AnomalyEvent> finalize_events(std::vector<AnomalyEvent> events, double report_floor);

nlohmann::json to_json(const AnomalyEvent& e);
AnomalyEvent anomaly_event_from_json(const nlohmann::json& j);
void write_events_jsonl(std::ostream& out, std::span<const AnomalyEvent> events);
std::vector<AnomalyEvent> read_events_jsonl(std::istream& in);

}  // namespace ucimon

#endif  // UCIMON_ANOMALY_HPP
