#ifndef UCIMON_CONFIG_HPP
#define UCIMON_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucimon/geo.hpp"

namespace ucimon {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class KeyKind { path, number, optional_number, integer, time, bbox, boolean, text };

struct ConfigKey {
    std::string_view name;
    KeyKind kind;
    std::string_view default_value;  // empty means unset
    std::string_view constraint;     // "", ">0", ">=0", ">=1", "[0,1]", "(0,180]"
    std::string_view help;
};

/// Every key a run configuration understands, in canonical order.
std::span<const ConfigKey> config_keys();

/// Flat key = value settings. Values keep their textual form; typed access
/// goes through the getters, which assume validate() came back clean.
class RunConfig {
public:
    RunConfig();

    /// Reads `key = value` lines; '#' starts a comment, values may be
    /// double-quoted. Relative paths resolve against the file's directory.
    /// Unknown keys and repeated keys are collected as errors rather than
    /// thrown; see errors().
    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_text(std::string_view text, std::filesystem::path base_dir = ".");

    void set(std::string_view key, std::string value);
    bool has(std::string_view key) const;

    /// Every problem found: parse errors plus each key checked against the
    /// preconditions of the module that consumes it.
    std::vector<std::string> validate() const;

    std::string text(std::string_view key) const;
    double number(std::string_view key) const;
    std::optional<double> optional_number(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    bool boolean(std::string_view key) const;
    std::optional<std::int64_t> time(std::string_view key) const;
    std::optional<BBox> bbox(std::string_view key) const;
    /// Resolved path, nullopt when unset.
    std::optional<std::filesystem::path> path(std::string_view key) const;

    /// All keys with values, one `key = value` line each, in canonical order.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::vector<std::string> parse_errors_;
    std::filesystem::path base_dir_ = ".";
};

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

/// Comment lines naming the tool version and config hash.
std::string header_block(const RunConfig& cfg);

}  // namespace ucimon

#endif  // UCIMON_CONFIG_HPP
