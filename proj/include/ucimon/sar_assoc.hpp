#ifndef UCIMON_SAR_ASSOC_HPP
#define UCIMON_SAR_ASSOC_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/ou.hpp"

namespace ucimon {

struct SarDetection {
    std::string id;
    std::string image_id;
    Timestamp t_acq = 0;
    GeoPoint pos;
};

struct DetectionParseResult {
    std::vector<SarDetection> detections;
    std::vector<RecordError> errors;
};

inline constexpr std::string_view kDetectionHeader = "id,image_id,timestamp,lat,lon";

DetectionParseResult parse_detections_csv(const std::filesystem::path& path);
DetectionParseResult parse_detections_csv(std::istream& in);
void write_detections_csv(std::ostream& out, std::span<const SarDetection> detections);

/// Splits detections into scenes by image_id (ascending).
std::map<std::string, std::vector<SarDetection>> group_by_image(std::span<const SarDetection> detections);

struct Association {
    std::string detection_id;
    std::optional<Mmsi> mmsi;          // empty when unassociated
    std::optional<double> distance_m;  // present iff associated
    bool used_prediction = false;
    std::optional<GeoPoint> track_pos;  // interpolated or predicted position
};

struct AssociationParams {
    double gate_km = 3.0;
    double max_gap_s = 6 * 3600.0;
    /// Opt-in: long-term predictions for vessels whose interpolation is
    /// unavailable at the acquisition time. The gate for such a pair widens
    /// to the prediction's 3-sigma radius when that is larger.
    const std::map<Mmsi, Prediction>* predictions = nullptr;
};

/// Optimal one-to-one pairing of the detections of one scene with tracks.
/// The cost of a pair is the great-circle distance between the detection and
/// the track's interpolated position at acquisition time; pairs at or beyond
/// the gate, or without a position, are forbidden. The largest possible
/// number of pairs is formed at minimum total distance. Inputs are sorted by
/// detection id and MMSI first, so the result does not depend on input order.
/// Output follows ascending detection id.
///
/// Throws InputError on repeated detection ids or mixed acquisition times.
std::vector<Association> associate(std::span<const SarDetection> detections, std::span<const Track> tracks,
                                   const AssociationParams& params);

enum class SceneFlag { ok, unassociated, gap_bracketing };

std::string_view to_string(SceneFlag f);

struct SceneRow {
    SarDetection detection;
    Association association;
    std::optional<Vec2> offset;  // detection minus matched position, meters east/north
    SceneFlag flag = SceneFlag::ok;
    std::optional<Mmsi> gap_mmsi;  // track whose AIS gap brackets the acquisition
    std::optional<double> gap_s;
};

struct AnnotatedScene {
    std::vector<SceneRow> rows;
    std::size_t flagged = 0;
};

struct ReportParams {
    double gap_flag_s = 3600.0;  // report spacing that counts as a gap
    double near_km = 20.0;       // how close the gapped track must pass
};

/// Joins detections with their associations. Every unassociated detection is
/// flagged; it is flagged gap_bracketing when some track has an AIS gap of at
/// least `gap_flag_s` spanning the acquisition time and its straight
/// great-circle path across the gap passes within `near_km` of the detection.
AnnotatedScene association_report(std::span<const SarDetection> detections, std::span<const Association> assocs,
                                   std::span<const Track> tracks, const ReportParams& params = {});

/// CSV `detection_id,mmsi,distance_m,used_prediction,flag`.
void write_association_csv(std::ostream& out, const AnnotatedScene& scene, bool with_header = true);

}  // namespace ucimon

#endif  // UCIMON_SAR_ASSOC_HPP
