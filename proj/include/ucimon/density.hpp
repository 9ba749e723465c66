#ifndef UCIMON_DENSITY_HPP
#define UCIMON_DENSITY_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

/// Time-weighted presence per lat/lon cell, in vessel-hours.
class DensityGrid {
public:
    DensityGrid() = default;
    explicit DensityGrid(GridSpec spec) : spec_(spec), weights_(spec.cell_count(), 0.0) {}

    const GridSpec& spec() const { return spec_; }
    double at(CellIndex c) const { return weights_[spec_.flat(c)]; }
    double& at(CellIndex c) { return weights_[spec_.flat(c)]; }
    std::span<const double> weights() const { return weights_; }
    double total() const;

    DensityGrid& operator+=(const DensityGrid& other);

private:
    GridSpec spec_;
    std::vector<double> weights_;
};

enum class DensityMode { all_traffic, stationary };

struct DensityParams {
    TimeWindow interval;
    DensityMode mode = DensityMode::all_traffic;
    double drift_threshold_kn = 3.0;
    double max_gap_s = 6 * 3600.0;  // longer report spacings deposit nothing
};

/// Deposits each track segment's in-interval time into the cells its
/// great-circle path crosses, pro-rated by time spent in each cell. In
/// stationary mode only segments whose reported sog is below the drift
/// threshold deposit. Time spent outside the bbox is dropped.
DensityGrid build_density(std::span<const Track> tracks, const GridSpec& grid, const DensityParams& params);

/// Empirical quantile of the cell weight at p among non-zero cells (share of
/// non-zero cells whose weight is <= the weight at p); 0 for an empty cell.
/// Throws InputError when p is outside the grid.
double normalcy_score(const DensityGrid& grid, const GeoPoint& p);

/// CSV `cell_lat,cell_lon,weight` for non-zero cells plus a sidecar file
/// (`<path>.meta`) holding the grid geometry.
void write_density_csv(const DensityGrid& grid, const std::filesystem::path& path, std::string_view header_block = {});
DensityGrid read_density_csv(const std::filesystem::path& path);

inline constexpr int kNoise = -1;

/// DBSCAN under great-circle distance. A point is core when at least
/// `min_pts` points (itself included) lie within `eps_m`. Points are visited
/// in ascending (lat, lon, input index) order; clusters are numbered in
/// creation order and a border point joins the first cluster that reaches it.
/// Returns one label per input point, kNoise for noise.
std::vector<int> dbscan(std::span<const GeoPoint> points, double eps_m, std::size_t min_pts);

struct StationaryArea {
    int id = 0;
    std::vector<std::size_t> member_points;  // indices into the input, ascending
    GeoPoint centroid;
    double dwell_weight = 0.0;  // vessel-hours
};

inline constexpr double kMaxHoldS = 600.0;

/// Clusters low-speed reports into stationary areas. Each report holds for
/// the time to the next report of the same vessel in the input (capped at
/// `max_hold_s`; a vessel's last report reuses its previous hold), and the
/// dwell weight of an area is the summed hold of its members.
std::vector<StationaryArea> cluster_stationary(std::span<const AisPoint> points, double eps_m, std::size_t min_pts,
                                               double max_hold_s = kMaxHoldS);

/// Reports from `tracks` whose sog is below `drift_threshold_kn`.
std::vector<AisPoint> low_speed_points(std::span<const Track> tracks, double drift_threshold_kn);

}  // namespace ucimon

#endif  // UCIMON_DENSITY_HPP
