#ifndef UCIMON_AIS_HPP
#define UCIMON_AIS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ucimon/geo.hpp"

namespace ucimon {

using Mmsi = std::uint32_t;

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z is optional).
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

/// ITU-R M.1371 navigational status codes.
enum class NavStatus : std::uint8_t {
    under_way_engine = 0,
    at_anchor = 1,
    not_under_command = 2,
    restricted_manoeuvrability = 3,
    constrained_by_draught = 4,
    moored = 5,
    aground = 6,
    engaged_in_fishing = 7,
    under_way_sailing = 8,
    undefined = 15,
};

std::optional<NavStatus> nav_status_from_code(std::int64_t code);

inline constexpr double kSogCeilingKn = 102.2;

struct AisPoint {
    Mmsi mmsi = 0;
    Timestamp t = 0;
    GeoPoint pos;
    double sog = 0.0;  // knots
    double cog = 0.0;  // degrees [0, 360)
    std::optional<double> heading;
    std::optional<NavStatus> nav_status;

    friend bool operator==(const AisPoint&, const AisPoint&) = default;
};

enum class OwnershipRisk { low, medium, high, unknown };

std::string_view to_string(OwnershipRisk r);
std::optional<OwnershipRisk> ownership_risk_from_string(std::string_view s);

enum class ShipType { fishing, cargo, tanker, passenger, tug, pleasure, military, research, other };

std::string_view to_string(ShipType t);
std::optional<ShipType> ship_type_from_string(std::string_view s);

struct VesselInfo {
    Mmsi mmsi = 0;
    std::optional<std::string> name;
    std::optional<ShipType> ship_type;
    std::optional<double> length_m;
    OwnershipRisk ownership_risk = OwnershipRisk::unknown;

    friend bool operator==(const VesselInfo&, const VesselInfo&) = default;
};

/// Per-vessel trajectory with strictly increasing timestamps.
struct Track {
    Mmsi mmsi = 0;
    std::vector<AisPoint> points;
    VesselInfo info;

    Timestamp start() const { return points.front().t; }
    Timestamp end() const { return points.back().t; }

    friend bool operator==(const Track&, const Track&) = default;
};

enum class RecordErrorKind { format, range, duplicate };

std::string_view to_string(RecordErrorKind k);

struct RecordError {
    std::size_t line = 0;  // 1-based line number in the source file, 0 when not file-backed
    RecordErrorKind kind = RecordErrorKind::format;
    std::string field;
    std::string message;
};

struct AisParseResult {
    std::vector<AisPoint> points;
    std::vector<RecordError> errors;
    std::size_t row_count = 0;  // data rows seen (excludes header, blanks, comments)
};

inline constexpr std::string_view kAisHeader = "mmsi,timestamp,lat,lon,sog,cog,heading,nav_status";
inline constexpr std::string_view kVesselHeader = "mmsi,name,ship_type,length_m,ownership_risk";

/// Reads an AIS CSV file. Throws InputError when the file cannot be opened or
/// the header is not kAisHeader. Malformed rows become RecordErrors.
AisParseResult parse_ais_csv(const std::filesystem::path& path);
AisParseResult parse_ais_csv(std::istream& in);

/// Parses one data row; `line` is only used to label errors.
std::variant<AisPoint, RecordError> parse_ais_row(std::string_view row, std::size_t line);

void write_ais_csv(std::ostream& out, std::span<const Track> tracks);
void write_ais_csv(std::ostream& out, std::span<const AisPoint> points);

struct TrackSet {
    std::vector<Track> tracks;         // ascending mmsi
    std::size_t collapsed = 0;         // points merged into an earlier report
    std::vector<RecordError> conflicts;  // same (mmsi, t) with different positions
};

/// Groups points by MMSI and orders them by time. Reports sharing a timestamp
/// collapse to one; a report at the same position as the last retained one and
/// within `dedup_window_s` of it collapses too. Input order does not matter:
/// points are first sorted on all fields, so "first" means smallest.
TrackSet build_tracks(std::span<const AisPoint> points, std::int64_t dedup_window_s);

struct VesselParseResult {
    std::map<Mmsi, VesselInfo> vessels;
    std::vector<RecordError> errors;
};

VesselParseResult parse_vessel_csv(const std::filesystem::path& path);
VesselParseResult parse_vessel_csv(std::istream& in);
void write_vessel_csv(std::ostream& out, std::span<const VesselInfo> vessels);

/// Copies matching VesselInfo into each track; unmatched tracks get a default
/// record carrying only the MMSI.
void attach_vessel_info(std::span<Track> tracks, const std::map<Mmsi, VesselInfo>& vessels);

}  // namespace ucimon

#endif  // UCIMON_AIS_HPP
