#ifndef UCIMON_UCI_HPP
#define UCIMON_UCI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

enum class UciKind { pipeline, power_cable, comm_cable };

std::string_view to_string(UciKind k);
std::optional<UciKind> uci_kind_from_string(std::string_view s);

/// A pipeline or cable route with its protection corridor half-width.
struct UciGeometry {
    std::string name;
    UciKind kind = UciKind::pipeline;
    Polyline route;
    double corridor_km = 1.0;
};

/// Reads a GeoJSON FeatureCollection of LineStrings with properties
/// {name, kind, corridor_km}. Throws InputError on anything else.
std::vector<UciGeometry> load_uci_geojson(const std::filesystem::path& path);
std::vector<UciGeometry> parse_uci_geojson(std::string_view text);
std::string to_geojson(std::span<const UciGeometry> ucis);

/// Regular lat/lon lattice of depths (meters, positive down) with bilinear lookup.
class DepthGrid {
public:
    /// `depths` is row-major, rows ascending in latitude.
    DepthGrid(double lat0, double lon0, double dlat, double dlon, std::size_t rows, std::size_t cols,
              std::vector<double> depths);

    /// Reads CSV `lat,lon,depth_m`; every lattice node must appear once.
    static DepthGrid from_csv(const std::filesystem::path& path);
    static DepthGrid from_csv(std::istream& in);

    /// nullopt outside the lattice.
    std::optional<double> depth_at(const GeoPoint& p) const;

private:
    double lat0_, lon0_, dlat_, dlon_;
    std::size_t rows_, cols_;
    std::vector<double> depths_;
};

struct FilterCriteria {
    double d_max_km = 5.0;
    double t_min_s = 3600.0;
    double s_max_kn = 3.0;
    std::optional<double> manoeuvre_rate_min;  // events per minute
    std::optional<double> min_length_m;
    std::optional<double> depth_gate_m;
    double turn_threshold_deg = 30.0;
    double drift_threshold_kn = 3.0;

    /// All violated preconditions, empty when valid.
    std::vector<std::string> validate() const;
};

enum class Criterion { dwell, low_speed, high_manoeuvre };

std::string_view to_string(Criterion c);

struct CandidateReport {
    Mmsi mmsi = 0;
    double dwell_s = 0.0;
    KinematicStats stats;
    std::set<Criterion> matched_criteria;
    double nearest_approach_m = 0.0;
    GeoPoint nearest_pos;
    double first_entry_t = 0.0;
    double last_exit_t = 0.0;
};

/// Maximal interval spent inside a corridor.
struct CorridorPass {
    double t_in = 0.0;
    double t_out = 0.0;
};

struct CorridorProfile {
    std::vector<CorridorPass> passes;
    double dwell_s = 0.0;
    double nearest_m = 0.0;
    GeoPoint nearest_pos;
    double nearest_t = 0.0;
};

inline constexpr double kCorridorSubstepS = 30.0;

/// Walks the interpolated track in sub-steps of at most `substep_s`. Within a
/// sub-step membership is decided at both ends; a boundary crossing is placed
/// by linear interpolation of the distance to the route.
CorridorProfile corridor_profile(const Track& track, const Polyline& route, double radius_m,
                                 double substep_s = kCorridorSubstepS);

/// Seconds spent within `d_max_km` of the route.
double dwell_time(const Track& track, const UciGeometry& uci, double d_max_km);

/// Applies all selection gates to one track. Speed statistics cover the span
/// from the first corridor entry to the last exit.
std::optional<CandidateReport> evaluate_candidate(const Track& track, const UciGeometry& uci,
                                                  const FilterCriteria& crit, const DepthGrid* bathymetry);

/// Emitted reports are ordered by descending dwell, then ascending MMSI.
std::vector<CandidateReport> select_candidates(std::span<const Track> tracks, const UciGeometry& uci,
                                               const FilterCriteria& crit, const DepthGrid* bathymetry);

}  // namespace ucimon

#endif  // UCIMON_UCI_HPP
