#ifndef UCIMON_GEO_HPP
#define UCIMON_GEO_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ucimon {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kKnotToMps = 1852.0 / 3600.0;

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

/// Normalizes a longitude to [-180, 180).
double normalize_lon(double lon_deg);

/// WGS-84 position in degrees. Construct through make_geo_point() when the
/// values come from outside; it validates and normalizes longitude.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

/// Throws InputError when lat is outside [-90, 90] or either value is not finite.
GeoPoint make_geo_point(double lat, double lon);

/// East/north offset in meters on a local plane.
struct Vec2 {
    double east = 0.0;
    double north = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.east + b.east, a.north + b.north}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.east - b.east, a.north - b.north}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.east, s * v.north}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double norm(Vec2 v);

/// Great-circle distance on a sphere of radius kEarthRadiusM (haversine).
double geodesic_distance(const GeoPoint& a, const GeoPoint& b);

/// Initial bearing from a to b, degrees clockwise from north in [0, 360).
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

/// Point reached travelling `distance_m` along the great circle leaving
/// `origin` with `bearing_deg`.
GeoPoint destination(const GeoPoint& origin, double bearing_deg, double distance_m);

/// Great-circle interpolation; fraction 0 returns a, 1 returns b.
GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction);

/// Azimuthal equidistant projection centered on `origin`. Distances and
/// bearings from the origin are exact; elsewhere distortion grows with
/// (d / R)^2, well below 0.1 % inside 100 km.
class LocalFrame {
public:
    explicit LocalFrame(GeoPoint origin) : origin_(origin) {}

    const GeoPoint& origin() const { return origin_; }
    Vec2 project(const GeoPoint& p) const;
    GeoPoint unproject(Vec2 v) const;

private:
    GeoPoint origin_;
};

/// Ordered vertex list with at least two vertices and no consecutive repeats.
class Polyline {
public:
    /// Throws InputError when the invariants do not hold.
    explicit Polyline(std::vector<GeoPoint> vertices);

    std::span<const GeoPoint> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

private:
    std::vector<GeoPoint> vertices_;
};

/// Distance from p to the nearest point of the polyline. Segments are
/// evaluated on a LocalFrame centered on p; vertex distances are exact.
double distance_to_polyline(const GeoPoint& p, const Polyline& line);

/// Axis-aligned lat/lon rectangle, south-west inclusive.
struct BBox {
    double lat_min = 0.0;
    double lon_min = 0.0;
    double lat_max = 0.0;
    double lon_max = 0.0;

    bool contains(const GeoPoint& p) const;
    bool empty() const { return !(lat_max > lat_min) || !(lon_max > lon_min); }

    friend bool operator==(const BBox&, const BBox&) = default;
};

struct CellIndex {
    std::size_t row = 0;  // south to north
    std::size_t col = 0;  // west to east

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Regular lat/lon lattice over a bounding box.
class GridSpec {
public:
    GridSpec() = default;
    /// Throws InputError on an empty box or non-positive cell size.
    GridSpec(BBox bbox, double cell_deg);

    const BBox& bbox() const { return bbox_; }
    double cell_deg() const { return cell_deg_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t cell_count() const { return rows_ * cols_; }

    std::optional<CellIndex> cell_of(const GeoPoint& p) const;
    GeoPoint cell_center(CellIndex c) const;
    std::size_t flat(CellIndex c) const { return c.row * cols_ + c.col; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    BBox bbox_{};
    double cell_deg_ = 0.0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

}  // namespace ucimon

#endif  // UCIMON_GEO_HPP
