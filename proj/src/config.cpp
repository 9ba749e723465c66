#include "ucimon/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ucimon/ais.hpp"
#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/uci.hpp"

namespace ucimon {

namespace {

using K = KeyKind;

constexpr std::array kKeys{
    ConfigKey{"ais", K::path, "", "", "AIS reports CSV"},
    ConfigKey{"vessels", K::path, "", "", "vessel register CSV"},
    ConfigKey{"history", K::path, "", "", "earlier AIS used as the normalcy reference (default: ais)"},
    ConfigKey{"uci", K::path, "", "", "UCI routes, GeoJSON"},
    ConfigKey{"detections", K::path, "", "", "SAR detections CSV"},
    ConfigKey{"bathymetry", K::path, "", "", "depth lattice CSV"},
    ConfigKey{"rule_file", K::path, "", "", "evidential rule file"},
    ConfigKey{"events", K::path, "", "", "anomaly events JSON-lines (assess input)"},
    ConfigKey{"graph_edges", K::path, "", "", "infrastructure edge list CSV"},
    ConfigKey{"graph_nodes", K::path, "", "", "infrastructure node CSV"},
    ConfigKey{"dedup_window_s", K::integer, "0", ">=0", "collapse repeated positions within this many seconds"},
    ConfigKey{"gate_km", K::number, "3", ">0", "association gate"},
    ConfigKey{"max_gap_s", K::number, "21600", ">0", "longest report spacing bridged by interpolation"},
    ConfigKey{"window_s", K::number, "600", ">0", "half-width of the trajectory window around an image time"},
    ConfigKey{"drift_kn", K::number, "3", ">0", "speed below which a vessel drifts"},
    ConfigKey{"turn_deg", K::number, "30", "(0,180]", "course change counted as a manoeuvre"},
    ConfigKey{"d_max_km", K::number, "5", ">0", "UCI proximity radius"},
    ConfigKey{"t_min_s", K::number, "3600", ">0", "minimum dwell near a UCI"},
    ConfigKey{"s_max_kn", K::number, "3", ">0", "maximum mean speed near a UCI"},
    ConfigKey{"manoeuvre_rate_min", K::optional_number, "", ">0", "alternative gate: manoeuvres per minute"},
    ConfigKey{"min_length_m", K::optional_number, "", ">0", "depth gate applies to shorter vessels"},
    ConfigKey{"depth_gate_m", K::optional_number, "", ">0", "depth beyond which short vessels are dropped"},
    ConfigKey{"cell_deg", K::number, "0.05", ">0", "density cell size"},
    ConfigKey{"bbox", K::bbox, "", "", "lat_min,lon_min,lat_max,lon_max (default: data extent)"},
    ConfigKey{"eps_m", K::number, "500", ">0", "DBSCAN radius"},
    ConfigKey{"min_pts", K::integer, "5", ">=1", "DBSCAN core size, the point itself included"},
    ConfigKey{"gap_min_s", K::number, "21600", ">0", "shortest AIS gap reported as an anomaly"},
    ConfigKey{"gap_flag_s", K::number, "3600", ">0", "gap length that flags an unassociated detection"},
    ConfigKey{"near_km", K::number, "20", ">0", "distance for gap-bracketing flags"},
    ConfigKey{"ou_window_s", K::number, "172800", ">0", "history used to fit the OU model"},
    ConfigKey{"predict_horizon_s", K::number, "21600", ">0", "longest extrapolation used for association"},
    ConfigKey{"use_prediction", K::boolean, "true", "", "predict positions of silent vessels at image time"},
    ConfigKey{"report_floor", K::number, "0.1", "[0,1]", "events below this severity are dropped"},
    ConfigKey{"status_cap", K::number, "0.8", "[0,1]", "mass committed by the navigational status check"},
    ConfigKey{"alpha", K::number, "1.2", ">=1", "cascade capacity factor"},
    ConfigKey{"top_k", K::integer, "5", ">=1", "choke points listed"},
    ConfigKey{"fail_edges", K::text, "", "", "edge indices failed at cascade start, comma separated"},
    ConfigKey{"netrisk_seeds", K::integer, "20", ">=1", "random-failure replays"},
    ConfigKey{"seed", K::integer, "0", ">=0", "seed for every stochastic component"},
};

const ConfigKey* find_key(std::string_view name) {
    for (const auto& k : kKeys)
        if (k.name == name) return &k;
    return nullptr;
}

std::optional<BBox> parse_bbox(std::string_view s) {
    const auto f = csv::split(s);
    if (f.size() != 4) return std::nullopt;
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto x = csv::parse_double(f[i]);
        if (!x) return std::nullopt;
        v[i] = *x;
    }
    return BBox{v[0], v[1], v[2], v[3]};
}

std::optional<bool> parse_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    return std::nullopt;
}

std::optional<std::string> check_constraint(std::string_view c, double v) {
    if (c == ">0" && !(v > 0.0)) return "must be > 0";
    if (c == ">=0" && !(v >= 0.0)) return "must be >= 0";
    if (c == ">=1" && !(v >= 1.0)) return "must be >= 1";
    if (c == "[0,1]" && !(v >= 0.0 && v <= 1.0)) return "must lie in [0, 1]";
    if (c == "(0,180]" && !(v > 0.0 && v <= 180.0)) return "must lie in (0, 180]";
    return std::nullopt;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

RunConfig::RunConfig() {
    for (const auto& k : kKeys)
        if (!k.default_value.empty()) values_.emplace(std::string(k.name), std::string(k.default_value));
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return from_text(ss.str(), base);
}

RunConfig RunConfig::from_text(std::string_view text, std::filesystem::path base_dir) {
    RunConfig cfg;
    cfg.base_dir_ = std::move(base_dir);
    std::map<std::string, std::size_t> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos && line.find('"') > hash) line.resize(hash);
        if (csv::trim(line).empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(n) + ": ";
        if (eq == std::string::npos) {
            cfg.parse_errors_.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key = csv::trim(std::string_view(line).substr(0, eq));
        std::string value = csv::trim(std::string_view(line).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (!find_key(key)) {
            cfg.parse_errors_.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (auto [it, fresh] = seen.emplace(key, n); !fresh) {
            cfg.parse_errors_.push_back(where + "'" + key + "' already set on line " + std::to_string(it->second));
            continue;
        }
        cfg.values_[key] = std::move(value);
    }
    return cfg;
}

void RunConfig::set(std::string_view key, std::string value) {
    if (!find_key(key)) {
        parse_errors_.push_back("unknown key '" + std::string(key) + "'");
        return;
    }
    values_[std::string(key)] = std::move(value);
}

bool RunConfig::has(std::string_view key) const {
    const auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::vector<std::string> RunConfig::validate() const {
    std::vector<std::string> errs = parse_errors_;
    for (const auto& k : kKeys) {
        if (!has(k.name)) continue;
        const std::string& v = values_.find(k.name)->second;
        const std::string name(k.name);
        switch (k.kind) {
            case K::path: {
                const auto p = path(k.name);
                if (!std::filesystem::exists(*p)) errs.push_back(name + ": file not found: " + p->string());
                break;
            }
            case K::number:
            case K::optional_number: {
                const auto x = csv::parse_double(v);
                if (!x)
                    errs.push_back(name + ": '" + v + "' is not a number");
                else if (auto msg = check_constraint(k.constraint, *x))
                    errs.push_back(name + ": " + *msg);
                break;
            }
            case K::integer: {
                const auto x = csv::parse_int(v);
                if (!x)
                    errs.push_back(name + ": '" + v + "' is not an integer");
                else if (auto msg = check_constraint(k.constraint, static_cast<double>(*x)))
                    errs.push_back(name + ": " + *msg);
                break;
            }
            case K::time:
                if (!parse_iso8601(v)) errs.push_back(name + ": '" + v + "' is not an ISO-8601 UTC time");
                break;
            case K::bbox: {
                const auto b = parse_bbox(v);
                if (!b)
                    errs.push_back(name + ": expected lat_min,lon_min,lat_max,lon_max");
                else if (b->empty() || b->lat_min < -90.0 || b->lat_max > 90.0 || b->lon_min < -180.0 ||
                         b->lon_max > 180.0)
                    errs.push_back(name + ": box is empty or outside valid coordinates");
                break;
            }
            case K::boolean:
                if (!parse_bool(v)) errs.push_back(name + ": expected true or false");
                break;
            case K::text:
                break;
        }
    }
    if (has("fail_edges"))
        for (const auto& f : csv::split(text("fail_edges")))
            if (const auto x = csv::parse_int(f); !x || *x < 0)
                errs.push_back("fail_edges: '" + csv::trim(f) + "' is not an edge index");
    if (has("min_length_m") != has("depth_gate_m"))
        errs.push_back("min_length_m and depth_gate_m must be given together");
    return errs;
}

std::string RunConfig::text(std::string_view key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? std::string() : it->second;
}

double RunConfig::number(std::string_view key) const {
    const auto x = csv::parse_double(text(key));
    if (!x) throw InputError("config: '" + std::string(key) + "' is not set to a number");
    return *x;
}

std::optional<double> RunConfig::optional_number(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
}

std::int64_t RunConfig::integer(std::string_view key) const {
    const auto x = csv::parse_int(text(key));
    if (!x) throw InputError("config: '" + std::string(key) + "' is not set to an integer");
    return *x;
}

bool RunConfig::boolean(std::string_view key) const { return parse_bool(text(key)).value_or(false); }

std::optional<std::int64_t> RunConfig::time(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return parse_iso8601(text(key));
}

std::optional<BBox> RunConfig::bbox(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return parse_bbox(text(key));
}

std::optional<std::filesystem::path> RunConfig::path(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    std::filesystem::path p(text(key));
    return p.is_absolute() ? p : base_dir_ / p;
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& k : kKeys) {
        out += k.name;
        out += " = ";
        out += text(k.name);
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical())); }

std::string header_block(const RunConfig& cfg) {
    return "# ucimon " + std::string(kToolVersion) + "\n# config_hash " + cfg.hash() + "\n";
}

}  // namespace ucimon
