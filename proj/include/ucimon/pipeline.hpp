#ifndef UCIMON_PIPELINE_HPP
#define UCIMON_PIPELINE_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/anomaly.hpp"
#include "ucimon/config.hpp"
#include "ucimon/density.hpp"
#include "ucimon/evidential.hpp"
#include "ucimon/ou.hpp"
#include "ucimon/sar_assoc.hpp"
#include "ucimon/uci.hpp"

namespace ucimon {

/// Loaded AIS with vessel info attached, plus what ingest had to say.
struct TrackStore {
    std::vector<Track> tracks;
    std::vector<RecordError> errors;
    std::size_t rows = 0;
    std::size_t collapsed = 0;
    std::size_t conflicts = 0;
};

/// Reads the AIS file at config key `key` and attaches the vessel register
/// when one is configured.
TrackStore load_tracks(const RunConfig& cfg, std::string_view key = "ais");

FilterCriteria filter_criteria(const RunConfig& cfg);
AnomalyConfig anomaly_config(const RunConfig& cfg);

/// bbox from the config, else the extent of the tracks widened to whole cells.
GridSpec density_grid_spec(const RunConfig& cfg, std::span<const Track> tracks);

struct DensityProducts {
    DensityGrid traffic;
    DensityGrid stationary;
    std::vector<StationaryArea> areas;
};

/// Both density grids and the stationary areas over the full span of `tracks`.
DensityProducts compute_density(const RunConfig& cfg, std::span<const Track> tracks, const GridSpec& grid);

struct SceneResult {
    std::string image_id;
    double t_acq = 0.0;
    std::vector<Association> associations;
    AnnotatedScene scene;
    std::map<Mmsi, Prediction> predictions;  // silent vessels extrapolated to t_acq
    std::map<Mmsi, OuModel> models;
};

/// Fits an OU model on the fixes of `track` in [t_from - ou_window_s, t_from]
/// ending at the last fix at or before t_from. nullopt with too few fixes.
std::optional<OuModel> fit_before(const Track& track, double t_from, double window_s);

/// Associates every image in turn. With use_prediction, vessels lacking an
/// interpolated position whose last fix precedes the image by at most
/// predict_horizon_s get an OU extrapolation.
std::vector<SceneResult> associate_scenes(const RunConfig& cfg, std::span<const Track> tracks,
                                          std::span<const SarDetection> detections);

/// Runs every detector on every track; finalized (floor applied, sorted).
std::vector<AnomalyEvent> detect_anomalies(const RunConfig& cfg, std::span<const Track> tracks,
                                           std::span<const UciGeometry> ucis, const DensityProducts& density,
                                           std::span<const SceneResult> scenes);

struct VesselAssessment {
    ThreatAssessment assessment;
    MassFunction status = MassFunction::vacuous(consistency_frame());
};

/// One assessment per vessel with events, in MMSI order; unattributed
/// events (MMSI 0) are not assessed. The navigational status check feeds the
/// `nav_status` intel field (consistent, inconsistent or unknown).
std::vector<VesselAssessment> assess_vessels(const RunConfig& cfg, std::span<const AnomalyEvent> events,
                                             std::span<const Track> tracks, const RuleSet& rules);

}  // namespace ucimon

#endif  // UCIMON_PIPELINE_HPP
