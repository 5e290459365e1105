#pragma once

// Small helpers shared by the line-oriented text formats.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wlanloc::text {

/// Splits on LF, stripping a trailing CR from each line. A final empty line
/// after the last LF is not reported.
[[nodiscard]] std::vector<std::string_view> split_lines(std::string_view text);

/// Whitespace-separated tokens.
[[nodiscard]] std::vector<std::string_view> tokens(std::string_view line);

/// Drops everything from the first '#' on.
[[nodiscard]] std::string_view strip_comment(std::string_view line);

[[nodiscard]] std::string_view trim(std::string_view s);

[[nodiscard]] bool starts_with(std::string_view s, std::string_view prefix) noexcept;

/// Whole-token finite double; accepts decimal and exponent notation.
[[nodiscard]] std::optional<double> parse_double(std::string_view s) noexcept;

/// Plain decimal: optional '-', digits, optional '.' followed by digits.
[[nodiscard]] std::optional<double> parse_plain_decimal(std::string_view s) noexcept;

[[nodiscard]] std::optional<std::int64_t> parse_int(std::string_view s) noexcept;
[[nodiscard]] std::optional<std::uint64_t> parse_uint(std::string_view s) noexcept;

/// Shortest text that parses back to exactly `v`.
[[nodiscard]] std::string format_shortest(double v);

/// Shortest fixed-notation text that parses back to exactly `v`.
[[nodiscard]] std::string format_plain(double v);

/// format_plain, with ".0" appended when the value is integral.
[[nodiscard]] std::string format_decimal(double v);

/// Exactly `decimals` digits after the point; never renders "-0.00".
[[nodiscard]] std::string format_fixed(double v, int decimals);

}  // namespace wlanloc::text
