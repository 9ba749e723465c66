#ifndef UCIMON_CSV_HPP
#define UCIMON_CSV_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ucimon::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; surrounding whitespace is kept.
std::vector<std::string> split(std::string_view line);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);

std::string trim(std::string_view s);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Comment lines (leading '#') and blank lines are skipped by every reader.
bool is_skippable(std::string_view line);

}  // namespace ucimon::csv

#endif  // UCIMON_CSV_HPP
