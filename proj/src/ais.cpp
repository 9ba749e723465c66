#include "ucimon/ais.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"

namespace ucimon {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    out = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

RecordError make_error(std::size_t line, RecordErrorKind kind, std::string field, std::string msg) {
    return RecordError{line, kind, std::move(field), std::move(msg)};
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    return in;
}

// Returns the first non-skippable line, or throws when there is none.
std::string read_header(std::istream& in, std::size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!csv::is_skippable(line)) return csv::trim(line);
    }
    throw InputError("missing CSV header");
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
    const std::string s = csv::trim(text);
    // YYYY-MM-DDTHH:MM:SS[Z]
    if (s.size() != 19 && !(s.size() == 20 && s.back() == 'Z')) return std::nullopt;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (!digits(s, 0, 4, y) || s[4] != '-' || !digits(s, 5, 2, mo) || s[7] != '-' ||
        !digits(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') || !digits(s, 11, 2, h) ||
        s[13] != ':' || !digits(s, 14, 2, mi) || s[16] != ':' || !digits(s, 17, 2, se))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || static_cast<unsigned>(d) > days_in_month(y, mo) || h > 23 ||
        mi > 59 || se > 59)
        return std::nullopt;
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_iso8601(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::optional<NavStatus> nav_status_from_code(std::int64_t code) {
    if (code < 0 || code > 15) return std::nullopt;
    if (code <= 8) return static_cast<NavStatus>(code);
    return NavStatus::undefined;  // 9..14 are reserved
}

std::string_view to_string(OwnershipRisk r) {
    switch (r) {
        case OwnershipRisk::low: return "low";
        case OwnershipRisk::medium: return "medium";
        case OwnershipRisk::high: return "high";
        case OwnershipRisk::unknown: break;
    }
    return "unknown";
}

std::optional<OwnershipRisk> ownership_risk_from_string(std::string_view s) {
    if (s == "low") return OwnershipRisk::low;
    if (s == "medium") return OwnershipRisk::medium;
    if (s == "high") return OwnershipRisk::high;
    if (s == "unknown" || s.empty()) return OwnershipRisk::unknown;
    return std::nullopt;
}

namespace {
constexpr std::array<std::pair<ShipType, std::string_view>, 9> kShipTypes{{
    {ShipType::fishing, "fishing"},
    {ShipType::cargo, "cargo"},
    {ShipType::tanker, "tanker"},
    {ShipType::passenger, "passenger"},
    {ShipType::tug, "tug"},
    {ShipType::pleasure, "pleasure"},
    {ShipType::military, "military"},
    {ShipType::research, "research"},
    {ShipType::other, "other"},
}};
}  // namespace

std::string_view to_string(ShipType t) {
    for (const auto& [k, v] : kShipTypes)
        if (k == t) return v;
    return "other";
}

std::optional<ShipType> ship_type_from_string(std::string_view s) {
    for (const auto& [k, v] : kShipTypes)
        if (v == s) return k;
    return std::nullopt;
}

std::string_view to_string(RecordErrorKind k) {
    switch (k) {
        case RecordErrorKind::format: return "format";
        case RecordErrorKind::range: return "range";
        case RecordErrorKind::duplicate: return "duplicate";
    }
    return "format";
}

std::variant<AisPoint, RecordError> parse_ais_row(std::string_view row, std::size_t line) {
    const auto f = csv::split(row);
    if (f.size() != 8)
        return make_error(line, RecordErrorKind::format, "row",
                          "expected 8 fields, got " + std::to_string(f.size()));
    AisPoint p;

    const auto mmsi = csv::parse_int(f[0]);
    if (!mmsi) return make_error(line, RecordErrorKind::format, "mmsi", "not an integer");
    if (*mmsi <= 0 || *mmsi > 999'999'999)
        return make_error(line, RecordErrorKind::range, "mmsi", "outside 1..999999999");
    p.mmsi = static_cast<Mmsi>(*mmsi);

    const auto t = parse_iso8601(f[1]);
    if (!t) return make_error(line, RecordErrorKind::format, "timestamp", "not ISO-8601 UTC");
    p.t = *t;

    const auto lat = csv::parse_double(f[2]);
    if (!lat) return make_error(line, RecordErrorKind::format, "lat", "not a number");
    if (*lat < -90.0 || *lat > 90.0) return make_error(line, RecordErrorKind::range, "lat", "outside [-90, 90]");
    const auto lon = csv::parse_double(f[3]);
    if (!lon) return make_error(line, RecordErrorKind::format, "lon", "not a number");
    if (*lon < -180.0 || *lon > 180.0)
        return make_error(line, RecordErrorKind::range, "lon", "outside [-180, 180]");
    p.pos = GeoPoint{*lat, normalize_lon(*lon)};

    const auto sog = csv::parse_double(f[4]);
    if (!sog) return make_error(line, RecordErrorKind::format, "sog", "not a number");
    if (*sog < 0.0 || *sog >= kSogCeilingKn)
        return make_error(line, RecordErrorKind::range, "sog", "outside [0, 102.2)");
    p.sog = *sog;

    const auto cog = csv::parse_double(f[5]);
    if (!cog) return make_error(line, RecordErrorKind::format, "cog", "not a number");
    if (*cog < 0.0 || *cog >= 360.0) return make_error(line, RecordErrorKind::range, "cog", "outside [0, 360)");
    p.cog = *cog;

    if (!csv::trim(f[6]).empty()) {
        const auto hdg = csv::parse_double(f[6]);
        if (!hdg) return make_error(line, RecordErrorKind::format, "heading", "not a number");
        if (*hdg == 511.0) {
            // AIS "not available"
        } else if (*hdg < 0.0 || *hdg >= 360.0) {
            return make_error(line, RecordErrorKind::range, "heading", "outside [0, 360)");
        } else {
            p.heading = *hdg;
        }
    }

    if (!csv::trim(f[7]).empty()) {
        const auto code = csv::parse_int(f[7]);
        if (!code) return make_error(line, RecordErrorKind::format, "nav_status", "not an integer");
        const auto st = nav_status_from_code(*code);
        if (!st) return make_error(line, RecordErrorKind::range, "nav_status", "outside 0..15");
        p.nav_status = st;
    }
    return p;
}

AisParseResult parse_ais_csv(std::istream& in) {
    std::size_t line_no = 0;
    const std::string header = read_header(in, line_no);
    if (header != kAisHeader) throw InputError("unexpected AIS header: '" + header + "'");
    AisParseResult res;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        ++res.row_count;
        auto parsed = parse_ais_row(line, line_no);
        if (auto* p = std::get_if<AisPoint>(&parsed))
            res.points.push_back(*p);
        else
            res.errors.push_back(std::get<RecordError>(std::move(parsed)));
    }
    return res;
}

AisParseResult parse_ais_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_ais_csv(in);
}

void write_ais_csv(std::ostream& out, std::span<const AisPoint> points) {
    out << kAisHeader << '\n';
    for (const auto& p : points) {
        out << p.mmsi << ',' << format_iso8601(p.t) << ',' << csv::format_double(p.pos.lat) << ','
            << csv::format_double(p.pos.lon) << ',' << csv::format_double(p.sog) << ','
            << csv::format_double(p.cog) << ',';
        if (p.heading) out << csv::format_double(*p.heading);
        out << ',';
        if (p.nav_status) out << static_cast<int>(*p.nav_status);
        out << '\n';
    }
}

void write_ais_csv(std::ostream& out, std::span<const Track> tracks) {
    std::vector<AisPoint> all;
    for (const auto& tr : tracks) all.insert(all.end(), tr.points.begin(), tr.points.end());
    write_ais_csv(out, std::span<const AisPoint>(all));
}

TrackSet build_tracks(std::span<const AisPoint> points, std::int64_t dedup_window_s) {
    if (dedup_window_s < 0) throw InputError("dedup window must be >= 0");
    std::vector<AisPoint> sorted(points.begin(), points.end());
    const auto key = [](const AisPoint& p) {
        return std::tie(p.mmsi, p.t, p.pos.lat, p.pos.lon, p.sog, p.cog, p.heading, p.nav_status);
    };
    std::sort(sorted.begin(), sorted.end(), [&](const AisPoint& a, const AisPoint& b) { return key(a) < key(b); });

    TrackSet out;
    for (const auto& p : sorted) {
        if (out.tracks.empty() || out.tracks.back().mmsi != p.mmsi) {
            Track tr;
            tr.mmsi = p.mmsi;
            tr.info.mmsi = p.mmsi;
            tr.points.push_back(p);
            out.tracks.push_back(std::move(tr));
            continue;
        }
        const AisPoint& last = out.tracks.back().points.back();
        if (p.t == last.t) {
            ++out.collapsed;
            if (!(p.pos == last.pos)) {
                out.conflicts.push_back(make_error(0, RecordErrorKind::duplicate, "timestamp",
                                                   "mmsi " + std::to_string(p.mmsi) + " at " +
                                                       format_iso8601(p.t) +
                                                       " reported twice with different positions"));
            }
            continue;
        }
        if (p.pos == last.pos && p.t - last.t <= dedup_window_s) {
            ++out.collapsed;
            continue;
        }
        out.tracks.back().points.push_back(p);
    }
    return out;
}

VesselParseResult parse_vessel_csv(std::istream& in) {
    std::size_t line_no = 0;
    const std::string header = read_header(in, line_no);
    if (header != kVesselHeader) throw InputError("unexpected vessel header: '" + header + "'");
    VesselParseResult res;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        const auto f = csv::split(line);
        if (f.size() != 5) {
            res.errors.push_back(make_error(line_no, RecordErrorKind::format, "row", "expected 5 fields"));
            continue;
        }
        VesselInfo v;
        const auto mmsi = csv::parse_int(f[0]);
        if (!mmsi || *mmsi <= 0 || *mmsi > 999'999'999) {
            res.errors.push_back(make_error(line_no, RecordErrorKind::range, "mmsi", "invalid MMSI"));
            continue;
        }
        v.mmsi = static_cast<Mmsi>(*mmsi);
        if (!f[1].empty()) v.name = f[1];
        const std::string type = csv::trim(f[2]);
        if (!type.empty()) {
            v.ship_type = ship_type_from_string(type);
            if (!v.ship_type) {
                res.errors.push_back(make_error(line_no, RecordErrorKind::range, "ship_type", "unknown: " + type));
                continue;
            }
        }
        if (!csv::trim(f[3]).empty()) {
            const auto len = csv::parse_double(f[3]);
            if (!len || *len <= 0.0) {
                res.errors.push_back(make_error(line_no, RecordErrorKind::range, "length_m", "must be > 0"));
                continue;
            }
            v.length_m = len;
        }
        const auto risk = ownership_risk_from_string(csv::trim(f[4]));
        if (!risk) {
            res.errors.push_back(make_error(line_no, RecordErrorKind::range, "ownership_risk", "unknown level"));
            continue;
        }
        v.ownership_risk = *risk;
        if (res.vessels.count(v.mmsi)) {
            res.errors.push_back(make_error(line_no, RecordErrorKind::duplicate, "mmsi", "repeated vessel record"));
            continue;
        }
        res.vessels.emplace(v.mmsi, std::move(v));
    }
    return res;
}

VesselParseResult parse_vessel_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_vessel_csv(in);
}

void write_vessel_csv(std::ostream& out, std::span<const VesselInfo> vessels) {
    out << kVesselHeader << '\n';
    for (const auto& v : vessels) {
        out << v.mmsi << ',' << csv::escape(v.name.value_or("")) << ',';
        if (v.ship_type) out << to_string(*v.ship_type);
        out << ',';
        if (v.length_m) out << csv::format_double(*v.length_m);
        out << ',' << to_string(v.ownership_risk) << '\n';
    }
}

void attach_vessel_info(std::span<Track> tracks, const std::map<Mmsi, VesselInfo>& vessels) {
    for (auto& tr : tracks) {
        if (auto it = vessels.find(tr.mmsi); it != vessels.end()) {
            tr.info = it->second;
        } else {
            tr.info = VesselInfo{};
            tr.info.mmsi = tr.mmsi;
        }
    }
}

}  // namespace ucimon
