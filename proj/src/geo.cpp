#include "ucimon/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ucimon/errors.hpp"

namespace ucimon {

double normalize_lon(double lon_deg) {
    if (lon_deg >= -180.0 && lon_deg < 180.0) return lon_deg;
    double l = std::fmod(lon_deg + 180.0, 360.0);
    if (l < 0.0) l += 360.0;
    l -= 180.0;
    // fmod can land exactly on 180 after the shift back
    if (l >= 180.0) l -= 360.0;
    return l;
}

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon < 180.0;
}

GeoPoint make_geo_point(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon))
        throw InputError("non-finite coordinate");
    if (lat < -90.0 || lat > 90.0)
        throw InputError("latitude out of range: " + std::to_string(lat));
    return GeoPoint{lat, normalize_lon(lon)};
}

double norm(Vec2 v) { return std::hypot(v.east, v.north); }

double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    // absolute differences keep the expression bit-symmetric in (a, b)
    const double dphi = std::fabs(phi2 - phi1);
    const double dlam = std::fabs(deg2rad(b.lon - a.lon));
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    const double dlam = deg2rad(b.lon - a.lon);
    const double y = std::sin(dlam) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
    double brg = rad2deg(std::atan2(y, x));
    if (brg < 0.0) brg += 360.0;
    if (brg >= 360.0) brg -= 360.0;
    return brg;
}

GeoPoint destination(const GeoPoint& origin, double bearing_deg, double distance_m) {
    const double delta = distance_m / kEarthRadiusM;
    const double theta = deg2rad(bearing_deg);
    const double phi1 = deg2rad(origin.lat);
    const double lam1 = deg2rad(origin.lon);
    const double sin_phi2 =
        std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
    const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
    const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                          std::cos(delta) - std::sin(phi1) * sin_phi2);
    return GeoPoint{rad2deg(phi2), normalize_lon(rad2deg(lam2))};
}

GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction) {
    if (fraction == 0.0) return a;
    if (fraction == 1.0) return b;
    const double delta = geodesic_distance(a, b) / kEarthRadiusM;
    if (delta < 1e-12) return a;
    const double phi1 = deg2rad(a.lat), lam1 = deg2rad(a.lon);
    const double phi2 = deg2rad(b.lat), lam2 = deg2rad(b.lon);
    const double sd = std::sin(delta);
    const double wa = std::sin((1.0 - fraction) * delta) / sd;
    const double wb = std::sin(fraction * delta) / sd;
    const double x = wa * std::cos(phi1) * std::cos(lam1) + wb * std::cos(phi2) * std::cos(lam2);
    const double y = wa * std::cos(phi1) * std::sin(lam1) + wb * std::cos(phi2) * std::sin(lam2);
    const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
    const double phi = std::atan2(z, std::hypot(x, y));
    const double lam = std::atan2(y, x);
    return GeoPoint{rad2deg(phi), normalize_lon(rad2deg(lam))};
}

Vec2 LocalFrame::project(const GeoPoint& p) const {
    const double d = geodesic_distance(origin_, p);
    if (d == 0.0) return {};
    const double az = deg2rad(initial_bearing(origin_, p));
    return {d * std::sin(az), d * std::cos(az)};
}

GeoPoint LocalFrame::unproject(Vec2 v) const {
    const double d = norm(v);
    if (d == 0.0) return origin_;
    const double az = rad2deg(std::atan2(v.east, v.north));
    return destination(origin_, az, d);
}

Polyline::Polyline(std::vector<GeoPoint> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw InputError("polyline needs at least two vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!is_valid(vertices_[i])) throw InputError("polyline vertex out of range");
        if (i > 0 && vertices_[i] == vertices_[i - 1])
            throw InputError("polyline has consecutive identical vertices");
    }
}

namespace {

// Distance from the plane origin to segment [a, b].
double origin_to_segment(Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.east * ab.east + ab.north * ab.north;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(-(a.east * ab.east + a.north * ab.north) / len2, 0.0, 1.0);
    return norm(a + t * ab);
}

}  // namespace

double distance_to_polyline(const GeoPoint& p, const Polyline& line) {
    const LocalFrame frame(p);
    const auto verts = line.vertices();
    double best = std::numeric_limits<double>::infinity();
    Vec2 prev = frame.project(verts[0]);
    best = std::min(best, geodesic_distance(p, verts[0]));
    for (std::size_t i = 1; i < verts.size(); ++i) {
        const Vec2 cur = frame.project(verts[i]);
        best = std::min(best, origin_to_segment(prev, cur));
        best = std::min(best, geodesic_distance(p, verts[i]));
        prev = cur;
    }
    return best;
}

bool BBox::contains(const GeoPoint& p) const {
    return p.lat >= lat_min && p.lat < lat_max && p.lon >= lon_min && p.lon < lon_max;
}

GridSpec::GridSpec(BBox bbox, double cell_deg) : bbox_(bbox), cell_deg_(cell_deg) {
    if (bbox.empty()) throw InputError("empty bounding box");
    if (!(cell_deg > 0.0) || !std::isfinite(cell_deg)) throw InputError("cell size must be positive");
    rows_ = static_cast<std::size_t>(std::ceil((bbox.lat_max - bbox.lat_min) / cell_deg - 1e-9));
    cols_ = static_cast<std::size_t>(std::ceil((bbox.lon_max - bbox.lon_min) / cell_deg - 1e-9));
    rows_ = std::max<std::size_t>(rows_, 1);
    cols_ = std::max<std::size_t>(cols_, 1);
}

std::optional<CellIndex> GridSpec::cell_of(const GeoPoint& p) const {
    if (!bbox_.contains(p)) return std::nullopt;
    const auto r = static_cast<std::size_t>(std::floor((p.lat - bbox_.lat_min) / cell_deg_));
    const auto c = static_cast<std::size_t>(std::floor((p.lon - bbox_.lon_min) / cell_deg_));
    if (r >= rows_ || c >= cols_) return std::nullopt;
    return CellIndex{r, c};
}

GeoPoint GridSpec::cell_center(CellIndex c) const {
    return GeoPoint{bbox_.lat_min + (static_cast<double>(c.row) + 0.5) * cell_deg_,
                    bbox_.lon_min + (static_cast<double>(c.col) + 0.5) * cell_deg_};
}

}  // namespace ucimon
