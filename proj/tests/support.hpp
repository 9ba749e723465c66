#ifndef UCIMON_TESTS_SUPPORT_HPP
#define UCIMON_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/rng.hpp"

namespace test {

using namespace ucimon;

inline AisPoint fix(Mmsi mmsi, Timestamp t, double lat, double lon, double sog = 10.0, double cog = 0.0,
                    std::optional<NavStatus> status = std::nullopt) {
    AisPoint p;
    p.mmsi = mmsi;
    p.t = t;
    p.pos = {lat, lon};
    p.sog = sog;
    p.cog = cog;
    p.nav_status = status;
    return p;
}

/// Straight constant-speed track from `start` on `bearing`, one fix per `dt`.
inline Track straight_track(Mmsi mmsi, GeoPoint start, double bearing, double speed_kn, Timestamp t0, int steps,
                            Timestamp dt) {
    Track tr;
    tr.mmsi = mmsi;
    tr.info.mmsi = mmsi;
    for (int i = 0; i <= steps; ++i) {
        const double d = speed_kn * kKnotToMps * static_cast<double>(i * dt);
        const GeoPoint p = destination(start, bearing, d);
        tr.points.push_back(fix(mmsi, t0 + i * dt, p.lat, p.lon, speed_kn, bearing));
    }
    return tr;
}

/// Random walk with irregular report spacing inside a box around `origin`.
inline Track random_track(Rng& rng, Mmsi mmsi, GeoPoint origin, Timestamp t0, int n, double max_dt_s = 900.0) {
    Track tr;
    tr.mmsi = mmsi;
    tr.info.mmsi = mmsi;
    GeoPoint p{origin.lat + rng.uniform(-0.2, 0.2), origin.lon + rng.uniform(-0.2, 0.2)};
    Timestamp t = t0;
    double course = rng.uniform(0.0, 360.0);
    for (int i = 0; i < n; ++i) {
        const double sog = rng.uniform() < 0.3 ? rng.uniform(0.0, 3.0) : rng.uniform(3.0, 15.0);
        tr.points.push_back(fix(mmsi, t, p.lat, p.lon, sog, course));
        const auto dt = static_cast<Timestamp>(1 + rng.below(static_cast<std::uint64_t>(max_dt_s)));
        course = std::fmod(course + rng.uniform(-60.0, 60.0) + 360.0, 360.0);
        p = destination(p, course, sog * kKnotToMps * static_cast<double>(dt));
        t += dt;
    }
    return tr;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ucimon_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace test

#endif  // UCIMON_TESTS_SUPPORT_HPP
