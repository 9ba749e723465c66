#ifndef UCIMON_SCENARIO_HPP
#define UCIMON_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/rng.hpp"
#include "ucimon/sar_assoc.hpp"
#include "ucimon/uci.hpp"

namespace ucimon {

/// One exact step of the integrated OU process per axis.
struct OuSample {
    double t = 0.0;
    Vec2 pos;  // plane offset, meters
    Vec2 vel;  // m/s
};

/// Exact simulation: (position, velocity) increments are drawn from their
/// joint Gaussian law, so the step size introduces no discretization error.
/// Returns steps + 1 samples starting with the given state.
std::vector<OuSample> simulate_ou(Vec2 mu, Vec2 gamma, Vec2 sigma, OuSample start, double dt, std::size_t steps,
                                  Rng& rng);

/// Something placed in the scene on purpose, for checking outputs.
struct PlantedTruth {
    std::string label;
    std::optional<Mmsi> mmsi;
    double t = 0.0;
    GeoPoint pos;
};

struct DepthSample {
    double lat, lon, depth_m;
};

struct Scenario {
    std::string name;
    BBox bbox;
    double cell_deg = 0.05;
    std::vector<Track> tracks;   // current AIS with vessel info attached
    std::vector<Track> history;  // earlier traffic, the reference for normalcy
    std::vector<UciGeometry> ucis;
    std::vector<SarDetection> detections;
    std::vector<DepthSample> bathymetry;
    std::vector<PlantedTruth> truth;
    /// Extra configuration lines suited to the scenario (key = value).
    std::vector<std::string> config_lines;
};

/// Pipeline crossing a shipping lane, an anchorage, a vessel that works the
/// pipeline with approach/drift cycles, and a SAR scene with a detection
/// inside a five-hour AIS gap and one without any AIS counterpart.
Scenario baltic_scenario(std::uint64_t seed);

/// Fishing vessels trawling back and forth over a cable, some in water too
/// deep for their size, plus through traffic. Ships bathymetry.
Scenario shetland_scenario(std::uint64_t seed);

/// A vessel with OU-distributed velocity that goes silent on a cable for
/// 21.5 hours, a SAR scene three hours after its last fix containing its
/// true position, other traffic and a dark detection.
Scenario adriatic_scenario(std::uint64_t seed);

Scenario make_scenario(std::string_view name, std::uint64_t seed);

/// Writes ais.csv, ais_history.csv, vessels.csv, uci.geojson,
/// detections.csv, truth.csv, bathymetry.csv (when present) and
/// scenario.cfg. Every file starts with `header_block` where the format
/// allows comments.
void write_scenario(const Scenario& s, const std::filesystem::path& dir, std::string_view header_block = {});

}  // namespace ucimon

#endif  // UCIMON_SCENARIO_HPP
