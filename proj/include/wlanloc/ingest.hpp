#pragma once

// Text formats for scan records and radio maps.
//
// Scan text, one block per cell, numbered from 1:
//
//   CELL 1
//     MAC: 02:00:00:00:00:01
//     ESSID: "UQC-1"            (or: ESSID: hidden)
//     SIGNAL: -67 dBm
//
// Radio map:
//
//   RADIOMAP v1 spacing=5
//   AP 0 02:00:00:00:00:01 UQC-1 7.625 13 10.75
//   PT 0 0 -67.41 -70.12 ...
//
// Both readers accept LF or CRLF; writers emit LF.

#include <filesystem>
#include <string>
#include <string_view>

#include "wlanloc/core.hpp"

namespace wlanloc {

/// Throws ParseError carrying the offending line number. The text does not
/// carry a scan mode; the caller supplies it.
[[nodiscard]] ScanObservation parse_scan_text(std::string_view text,
                                              ScanMode mode = ScanMode::passive);

[[nodiscard]] std::string serialize_scan(const ScanObservation& obs);

[[nodiscard]] ScanObservation load_scan(const std::filesystem::path& path,
                                        ScanMode mode = ScanMode::passive);

/// RSSI values are written with two decimals; positions and AP coordinates
/// use the shortest exact representation. The cloaked flag is not stored.
[[nodiscard]] std::string serialize_radio_map(const RadioMap& map);

/// Throws ParseError on malformed lines, dimension mismatches, duplicate
/// positions or an empty entry section.
[[nodiscard]] RadioMap parse_radio_map(std::string_view text);

void save_radio_map(const RadioMap& map, const std::filesystem::path& path);
[[nodiscard]] RadioMap load_radio_map(const std::filesystem::path& path);

/// Structural equality with RSSI compared at the file's 2-decimal precision.
[[nodiscard]] bool equal_at_file_precision(const RadioMap& a, const RadioMap& b);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace wlanloc
