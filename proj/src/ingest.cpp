#include "wlanloc/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "wlanloc/text.hpp"

namespace wlanloc {

namespace {

constexpr std::string_view kMacPrefix = "  MAC: ";
constexpr std::string_view kEssidPrefix = "  ESSID: ";
constexpr std::string_view kSignalPrefix = "  SIGNAL: ";
constexpr std::string_view kSignalSuffix = " dBm";

bool quotable_essid(std::string_view s) noexcept {
  return s.size() <= 32 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= ' ' && c < 0x7F && c != '"'; });
}

bool blank(std::string_view line) { return text::trim(line).empty(); }

}  // namespace

ScanObservation parse_scan_text(std::string_view input, ScanMode mode) {
  const auto lines = text::split_lines(input);
  std::vector<Reading> readings;
  std::set<MacAddress> seen;

  std::size_t n = 0;
  const auto expect = [&](std::string_view prefix, std::string_view what) -> std::string_view {
    while (n < lines.size() && blank(lines[n])) ++n;
    if (n >= lines.size()) throw ParseError(lines.size(), "cell ends before its " + std::string(what) + " line");
    const auto line = lines[n];
    if (!text::starts_with(line, prefix)) {
      throw ParseError(n + 1, "expected '" + std::string(text::trim(prefix)) + "' line");
    }
    return line.substr(prefix.size());
  };

  while (true) {
    while (n < lines.size() && blank(lines[n])) ++n;
    if (n >= lines.size()) break;

    const std::size_t cell_line = n + 1;
    const auto tok = text::tokens(lines[n]);
    if (tok.size() != 2 || tok[0] != "CELL" || !text::starts_with(lines[n], "CELL ")) {
      throw ParseError(cell_line, "expected 'CELL <n>'");
    }
    const auto number = text::parse_uint(tok[1]);
    if (!number || *number != readings.size() + 1) {
      throw ParseError(cell_line, "cells must be numbered consecutively from 1");
    }
    if (readings.size() == kMaxScanEntries) {
      throw ParseError(cell_line, "cell " + std::to_string(*number) +
                                      " exceeds the 64-entry scan buffer");
    }
    ++n;

    const auto mac_text = expect(kMacPrefix, "MAC");
    const auto mac = MacAddress::parse(mac_text);
    if (!mac) throw ParseError(n + 1, "malformed MAC '" + std::string(mac_text) + "'");
    if (!seen.insert(*mac).second) {
      throw ParseError(n + 1, "duplicate MAC " + mac->to_string());
    }
    ++n;

    const auto essid_text = expect(kEssidPrefix, "ESSID");
    std::optional<std::string> essid;
    if (essid_text != "hidden") {
      if (essid_text.size() < 2 || essid_text.front() != '"' || essid_text.back() != '"' ||
          !quotable_essid(essid_text.substr(1, essid_text.size() - 2))) {
        throw ParseError(n + 1, "ESSID must be a quoted name or 'hidden'");
      }
      essid = std::string(essid_text.substr(1, essid_text.size() - 2));
    } else if (mode == ScanMode::active) {
      throw ParseError(n + 1, "active scans cannot report hidden networks");
    }
    ++n;

    auto signal_text = expect(kSignalPrefix, "SIGNAL");
    if (signal_text.size() <= kSignalSuffix.size() ||
        signal_text.substr(signal_text.size() - kSignalSuffix.size()) != kSignalSuffix) {
      throw ParseError(n + 1, "SIGNAL must end with ' dBm'");
    }
    signal_text.remove_suffix(kSignalSuffix.size());
    const auto rssi = text::parse_plain_decimal(signal_text);
    if (!rssi) throw ParseError(n + 1, "non-numeric SIGNAL '" + std::string(signal_text) + "'");
    ++n;

    readings.push_back(Reading{*mac, std::move(essid), *rssi});
  }
  return ScanObservation{std::move(readings), mode};
}

std::string serialize_scan(const ScanObservation& obs) {
  std::ostringstream out;
  std::size_t cell = 1;
  for (const auto& r : obs.readings()) {
    out << "CELL " << cell++ << '\n' << kMacPrefix << r.mac.to_string() << '\n' << kEssidPrefix;
    if (r.hidden()) {
      out << "hidden";
    } else {
      if (!quotable_essid(*r.essid)) {
        throw InvariantError("essid of " + r.mac.to_string() + " cannot be written to a scan record");
      }
      out << '"' << *r.essid << '"';
    }
    out << '\n' << kSignalPrefix << text::format_plain(r.rssi_dbm) << kSignalSuffix << '\n';
  }
  return out.str();
}

ScanObservation load_scan(const std::filesystem::path& path, ScanMode mode) {
  return parse_scan_text(read_file(path), mode);
}

// ---------------------------------------------------------------------------

std::string serialize_radio_map(const RadioMap& map) {
  std::ostringstream out;
  out << "RADIOMAP v1 spacing=" << text::format_shortest(map.spacing()) << '\n';
  const auto& roster = map.roster();
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const auto& ap = roster[i];
    out << "AP " << i << ' ' << ap.mac.to_string() << ' ' << ap.essid << ' '
        << text::format_shortest(ap.pos.x) << ' ' << text::format_shortest(ap.pos.y) << ' '
        << text::format_shortest(ap.pos.z) << '\n';
  }
  for (const auto& e : map.entries()) {
    out << "PT " << text::format_shortest(e.pos.x) << ' ' << text::format_shortest(e.pos.y);
    for (const double v : e.fp.values()) out << ' ' << text::format_fixed(v, 2);
    out << '\n';
  }
  return out.str();
}

RadioMap parse_radio_map(std::string_view input) {
  const auto lines = text::split_lines(input);
  std::optional<double> spacing;
  std::vector<AccessPoint> roster;
  std::vector<MapEntry> entries;
  std::set<MacAddress> macs;
  std::set<Point2> positions;

  const auto number = [](std::size_t line_no, std::string_view tok) {
    const auto v = text::parse_double(tok);
    if (!v) throw ParseError(line_no, "unparseable number '" + std::string(tok) + "'");
    return *v;
  };

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto tok = text::tokens(text::strip_comment(lines[n]));
    if (tok.empty()) continue;

    if (!spacing) {
      if (tok.size() != 3 || tok[0] != "RADIOMAP" || tok[1] != "v1" ||
          !text::starts_with(tok[2], "spacing=")) {
        throw ParseError(line_no, "expected 'RADIOMAP v1 spacing=<m>' header");
      }
      const double s = number(line_no, tok[2].substr(8));
      if (!(s > 0.0)) throw ParseError(line_no, "spacing must be positive");
      spacing = s;
      continue;
    }

    if (tok[0] == "AP") {
      if (!entries.empty()) throw ParseError(line_no, "AP line after the first PT line");
      if (tok.size() != 7) throw ParseError(line_no, "expected AP <i> <mac> <essid> <x> <y> <z>");
      const auto index = text::parse_uint(tok[1]);
      if (!index || *index != roster.size()) {
        throw ParseError(line_no, "AP indices must run 0, 1, 2, ...");
      }
      const auto mac = MacAddress::parse(tok[2]);
      if (!mac) throw ParseError(line_no, "malformed MAC '" + std::string(tok[2]) + "'");
      if (!macs.insert(*mac).second) throw ParseError(line_no, "duplicate AP " + mac->to_string());
      AccessPoint ap{*mac, std::string(tok[3]), false,
                     Point3{number(line_no, tok[4]), number(line_no, tok[5]), number(line_no, tok[6])}};
      try {
        validate_access_point(ap);
      } catch (const InvariantError& e) {
        throw ParseError(line_no, e.what());
      }
      roster.push_back(std::move(ap));
    } else if (tok[0] == "PT") {
      if (roster.empty()) throw ParseError(line_no, "PT line before any AP line");
      if (tok.size() != 3 + roster.size()) {
        throw ParseError(line_no, "entry has " + std::to_string(tok.size() < 3 ? 0 : tok.size() - 3) +
                                      " RSSI values; roster has " + std::to_string(roster.size()));
      }
      const Point2 pos{number(line_no, tok[1]), number(line_no, tok[2])};
      if (!positions.insert(pos).second) throw ParseError(line_no, "duplicate entry position");
      std::vector<double> rssi;
      rssi.reserve(roster.size());
      for (std::size_t i = 3; i < tok.size(); ++i) rssi.push_back(number(line_no, tok[i]));
      try {
        entries.push_back(MapEntry{pos, Fingerprint{std::move(rssi)}});
      } catch (const InvariantError& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
  }

  if (!spacing) throw ParseError(0, "missing RADIOMAP header");
  if (roster.empty()) throw ParseError(0, "radio map has no AP lines");
  if (entries.empty()) throw ParseError(0, "radio map has no PT entries");
  return RadioMap{std::move(roster), *spacing, std::move(entries)};
}

void save_radio_map(const RadioMap& map, const std::filesystem::path& path) {
  if (map.empty()) throw InvariantError("refusing to save a radio map without entries");
  write_file(path, serialize_radio_map(map));
}

RadioMap load_radio_map(const std::filesystem::path& path) { return parse_radio_map(read_file(path)); }

bool equal_at_file_precision(const RadioMap& a, const RadioMap& b) {
  if (a.spacing() != b.spacing() || a.size() != b.size() || a.dimension() != b.dimension()) {
    return false;
  }
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const auto& x = a.roster()[i];
    const auto& y = b.roster()[i];
    if (x.mac != y.mac || x.essid != y.essid || x.pos != y.pos) return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.entries()[i];
    const auto& y = b.entries()[i];
    if (x.pos != y.pos) return false;
    for (std::size_t d = 0; d < a.dimension(); ++d) {
      if (text::format_fixed(x.fp[d], 2) != text::format_fixed(y.fp[d], 2)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace wlanloc
