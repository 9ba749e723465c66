#include "ucimon/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"

namespace ucimon {

double DensityGrid::total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

DensityGrid& DensityGrid::operator+=(const DensityGrid& other) {
    if (!(spec_ == other.spec_)) throw InvariantViolation("adding density grids with different geometry");
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += other.weights_[i];
    return *this;
}

namespace {

constexpr double kSubstepCells = 8.0;  // substeps per cell width
constexpr double kMaxSubsteps = 200000.0;

void deposit_segment(DensityGrid& grid, const AisPoint& a, const AisPoint& b, double from, double to) {
    const double span = static_cast<double>(b.t - a.t);
    const double dlat = std::fabs(b.pos.lat - a.pos.lat);
    const double dlon = std::fabs(normalize_lon(b.pos.lon - a.pos.lon));
    const double frac = span > 0.0 ? (to - from) / span : 1.0;
    const double cells_crossed = std::max(dlat, dlon) * frac / grid.spec().cell_deg();
    const double n = std::clamp(std::ceil(cells_crossed * kSubstepCells), 1.0, kMaxSubsteps);
    const double step = (to - from) / n;
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t k = 0; k < count; ++k) {
        const double tm = from + (static_cast<double>(k) + 0.5) * step;
        const GeoPoint p = position_between(a, b, tm);
        if (auto cell = grid.spec().cell_of(p)) grid.at(*cell) += step / 3600.0;
    }
}

}  // namespace

DensityGrid build_density(std::span<const Track> tracks, const GridSpec& spec, const DensityParams& params) {
    if (spec.bbox().empty()) throw InputError("build_density: empty bbox");
    if (!(params.interval.end > params.interval.start)) throw InputError("build_density: empty interval");
    DensityGrid grid(spec);
    for (const auto& tr : tracks) {
        const auto& pts = tr.points;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto& a = pts[i];
            const auto& b = pts[i + 1];
            if (static_cast<double>(b.t - a.t) > params.max_gap_s) continue;
            if (params.mode == DensityMode::stationary && !(a.sog < params.drift_threshold_kn)) continue;
            const double from = std::max(static_cast<double>(a.t), params.interval.start);
            const double to = std::min(static_cast<double>(b.t), params.interval.end);
            if (to > from) deposit_segment(grid, a, b, from, to);
        }
    }
    return grid;
}

double normalcy_score(const DensityGrid& grid, const GeoPoint& p) {
    const auto cell = grid.spec().cell_of(p);
    if (!cell) throw InputError("normalcy_score: position outside the density grid");
    const double w = grid.at(*cell);
    if (!(w > 0.0)) return 0.0;
    std::size_t nonzero = 0, below = 0;
    for (double v : grid.weights()) {
        if (v > 0.0) {
            ++nonzero;
            if (v <= w) ++below;
        }
    }
    return static_cast<double>(below) / static_cast<double>(nonzero);
}

void write_density_csv(const DensityGrid& grid, const std::filesystem::path& path, std::string_view header_block) {
    const auto& s = grid.spec();
    {
        std::ofstream meta(path.string() + ".meta");
        if (!meta) throw InputError("cannot write " + path.string() + ".meta");
        meta << header_block << "lat_min=" << csv::format_double(s.bbox().lat_min) << '\n'
             << "lon_min=" << csv::format_double(s.bbox().lon_min) << '\n'
             << "lat_max=" << csv::format_double(s.bbox().lat_max) << '\n'
             << "lon_max=" << csv::format_double(s.bbox().lon_max) << '\n'
             << "cell_deg=" << csv::format_double(s.cell_deg()) << '\n'
             << "rows=" << s.rows() << '\n'
             << "cols=" << s.cols() << '\n'
             << "units=vessel_hours\n";
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << header_block << "cell_lat,cell_lon,weight\n";
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t c = 0; c < s.cols(); ++c) {
            const double w = grid.at({r, c});
            if (!(w > 0.0)) continue;
            const GeoPoint ctr = s.cell_center({r, c});
            out << csv::format_double(ctr.lat) << ',' << csv::format_double(ctr.lon) << ',' << csv::format_double(w)
                << '\n';
        }
    }
}

DensityGrid read_density_csv(const std::filesystem::path& path) {
    std::ifstream meta(path.string() + ".meta");
    if (!meta) throw InputError("cannot open " + path.string() + ".meta");
    std::map<std::string, double> kv;
    std::string line;
    while (std::getline(meta, line)) {
        if (csv::is_skippable(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        if (auto v = csv::parse_double(line.substr(eq + 1))) kv[csv::trim(line.substr(0, eq))] = *v;
    }
    for (const char* k : {"lat_min", "lon_min", "lat_max", "lon_max", "cell_deg"})
        if (!kv.count(k)) throw InputError(std::string("density meta missing ") + k);
    DensityGrid grid(GridSpec(BBox{kv["lat_min"], kv["lon_min"], kv["lat_max"], kv["lon_max"]}, kv["cell_deg"]));

    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        if (!header) {
            if (csv::trim(line) != "cell_lat,cell_lon,weight") throw InputError("density CSV: bad header");
            header = true;
            continue;
        }
        const auto f = csv::split(line);
        const auto lat = f.size() == 3 ? csv::parse_double(f[0]) : std::nullopt;
        const auto lon = f.size() == 3 ? csv::parse_double(f[1]) : std::nullopt;
        const auto w = f.size() == 3 ? csv::parse_double(f[2]) : std::nullopt;
        if (!lat || !lon || !w) throw InputError("density CSV line " + std::to_string(line_no) + ": malformed");
        const auto cell = grid.spec().cell_of({*lat, *lon});
        if (!cell) throw InputError("density CSV line " + std::to_string(line_no) + ": outside grid");
        grid.at(*cell) = *w;
    }
    return grid;
}

std::vector<int> dbscan(std::span<const GeoPoint> points, double eps_m, std::size_t min_pts) {
    if (!(eps_m > 0.0)) throw InputError("dbscan: eps must be > 0");
    if (min_pts < 1) throw InputError("dbscan: min_pts must be >= 1");
    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].lat != points[b].lat) return points[a].lat < points[b].lat;
        if (points[a].lon != points[b].lon) return points[a].lon < points[b].lon;
        return a < b;
    });
    std::vector<double> sorted_lat(n);
    for (std::size_t k = 0; k < n; ++k) sorted_lat[k] = points[order[k]].lat;
    // great-circle distance is at least R * |dlat|, so a latitude band bounds the search
    const double band = rad2deg(eps_m / kEarthRadiusM) * (1.0 + 1e-9) + 1e-12;

    // neighbors as positions in `order`, ascending
    const auto region = [&](std::size_t pos, std::vector<std::size_t>& out) {
        out.clear();
        const GeoPoint& p = points[order[pos]];
        auto lo = std::lower_bound(sorted_lat.begin(), sorted_lat.end(), p.lat - band);
        auto hi = std::upper_bound(sorted_lat.begin(), sorted_lat.end(), p.lat + band);
        for (auto it = lo; it != hi; ++it) {
            const auto q = static_cast<std::size_t>(it - sorted_lat.begin());
            if (geodesic_distance(p, points[order[q]]) <= eps_m) out.push_back(q);
        }
    };

    constexpr int kUnvisited = -2;
    std::vector<int> label(n, kUnvisited);  // indexed by position in `order`
    std::vector<std::size_t> nbrs, queue;
    int cluster = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (label[pos] != kUnvisited) continue;
        region(pos, nbrs);
        if (nbrs.size() < min_pts) {
            label[pos] = kNoise;
            continue;
        }
        label[pos] = cluster;
        queue = nbrs;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t q = queue[qi];
            if (label[q] == kNoise) label[q] = cluster;  // border point
            if (label[q] != kUnvisited) continue;
            label[q] = cluster;
            region(q, nbrs);
            if (nbrs.size() >= min_pts) queue.insert(queue.end(), nbrs.begin(), nbrs.end());
        }
        ++cluster;
    }

    std::vector<int> out(n);
    for (std::size_t k = 0; k < n; ++k) out[order[k]] = label[k];
    return out;
}

std::vector<StationaryArea> cluster_stationary(std::span<const AisPoint> points, double eps_m, std::size_t min_pts,
                                               double max_hold_s) {
    std::vector<GeoPoint> pos;
    pos.reserve(points.size());
    for (const auto& p : points) pos.push_back(p.pos);
    const auto labels = dbscan(pos, eps_m, min_pts);

    // per-report hold time, grouped by vessel
    std::vector<double> hold(points.size(), max_hold_s);
    std::map<Mmsi, std::vector<std::size_t>> by_vessel;
    for (std::size_t i = 0; i < points.size(); ++i) by_vessel[points[i].mmsi].push_back(i);
    for (auto& [mmsi, idx] : by_vessel) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return points[a].t < points[b].t; });
        for (std::size_t k = 0; k + 1 < idx.size(); ++k)
            hold[idx[k]] = std::min(static_cast<double>(points[idx[k + 1]].t - points[idx[k]].t), max_hold_s);
        if (idx.size() >= 2) hold[idx.back()] = hold[idx[idx.size() - 2]];
    }

    const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<StationaryArea> areas(static_cast<std::size_t>(std::max(n_clusters, 0)));
    std::vector<double> sx(areas.size()), sy(areas.size()), sz(areas.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] < 0) continue;
        const auto c = static_cast<std::size_t>(labels[i]);
        areas[c].member_points.push_back(i);
        areas[c].dwell_weight += hold[i] / 3600.0;
        const double phi = deg2rad(points[i].pos.lat), lam = deg2rad(points[i].pos.lon);
        sx[c] += std::cos(phi) * std::cos(lam);
        sy[c] += std::cos(phi) * std::sin(lam);
        sz[c] += std::sin(phi);
    }
    for (std::size_t c = 0; c < areas.size(); ++c) {
        areas[c].id = static_cast<int>(c);
        areas[c].centroid = GeoPoint{rad2deg(std::atan2(sz[c], std::hypot(sx[c], sy[c]))),
                                     normalize_lon(rad2deg(std::atan2(sy[c], sx[c])))};
    }
    return areas;
}

std::vector<AisPoint> low_speed_points(std::span<const Track> tracks, double drift_threshold_kn) {
    std::vector<AisPoint> out;
    for (const auto& tr : tracks)
        for (const auto& p : tr.points)
            if (p.sog < drift_threshold_kn) out.push_back(p);
    return out;
}

}  // namespace ucimon
