#include "wlanloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace wlanloc {

double planar_distance(const Point2& a, const Point2& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double spatial_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// ---------------------------------------------------------------------------

namespace {

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text) noexcept {
  if (text.size() != 17) return std::nullopt;
  std::array<std::uint8_t, 6> octets{};
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t at = i * 3;
    if (i > 0 && text[at - 1] != ':') return std::nullopt;
    const int hi = hex_value(text[at]);
    const int lo = hex_value(text[at + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return MacAddress{octets};
}

MacAddress MacAddress::from_u64(std::uint64_t value) noexcept {
  std::array<std::uint8_t, 6> octets{};
  for (int i = 5; i >= 0; --i) {
    octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xFF);
    value >>= 8;
  }
  return MacAddress{octets};
}

std::string MacAddress::to_string() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(17);
  for (std::size_t i = 0; i < octets_.size(); ++i) {
    if (i > 0) out.push_back(':');
    out.push_back(kDigits[octets_[i] >> 4]);
    out.push_back(kDigits[octets_[i] & 0x0F]);
  }
  return out;
}

// ---------------------------------------------------------------------------

bool is_token_essid(std::string_view essid) noexcept {
  if (essid.empty() || essid.size() > 32 || essid.front() == '#') return false;
  return std::all_of(essid.begin(), essid.end(), [](char c) { return c > ' ' && c < 0x7F && c != '"'; });
}

void validate_access_point(const AccessPoint& ap) {
  const auto& p = ap.pos;
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw InvariantError("access point " + ap.mac.to_string() + " has a non-finite position");
  }
  if (p.z < 0.0) {
    throw InvariantError("access point " + ap.mac.to_string() + " is below the floor");
  }
  if (!is_token_essid(ap.essid)) {
    throw InvariantError("access point " + ap.mac.to_string() + " has an invalid essid");
  }
}

void validate_roster(std::span<const AccessPoint> roster) {
  std::set<MacAddress> seen;
  for (const auto& ap : roster) {
    validate_access_point(ap);
    if (!seen.insert(ap.mac).second) {
      throw InvariantError("duplicate access point " + ap.mac.to_string());
    }
  }
}

// ---------------------------------------------------------------------------

double clamp_rssi(double dbm) noexcept { return std::clamp(dbm, kRssiFloor, kRssiCeil); }

Fingerprint::Fingerprint(std::vector<double> rssi) : rssi_(std::move(rssi)) {
  for (const double v : rssi_) {
    if (!std::isfinite(v) || v < kRssiFloor || v > kRssiCeil) {
      throw InvariantError("fingerprint value " + std::to_string(v) + " outside [-100, -10] dBm");
    }
  }
}

Fingerprint Fingerprint::clamped(std::vector<double> rssi) {
  for (double& v : rssi) {
    if (!std::isfinite(v)) throw InvariantError("fingerprint value is not finite");
    v = clamp_rssi(v);
  }
  return Fingerprint{std::move(rssi)};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("fingerprint dimensions differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + "); rosters are incompatible");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double euclidean_distance(const Fingerprint& a, const Fingerprint& b) {
  return std::sqrt(squared_distance(a.values(), b.values()));
}

// ---------------------------------------------------------------------------

RadioMap::RadioMap(std::vector<AccessPoint> roster, double spacing, std::vector<MapEntry> entries)
    : roster_(std::move(roster)), spacing_(spacing), entries_(std::move(entries)) {
  if (roster_.empty()) throw InvariantError("radio map roster is empty");
  validate_roster(roster_);
  if (!std::isfinite(spacing_) || spacing_ <= 0.0) {
    throw InvariantError("radio map spacing must be positive");
  }
  std::set<Point2> positions;
  for (const auto& e : entries_) {
    if (e.fp.dimension() != roster_.size()) {
      throw DimensionError("map entry has " + std::to_string(e.fp.dimension()) +
                           " values for a roster of " + std::to_string(roster_.size()));
    }
    if (!std::isfinite(e.pos.x) || !std::isfinite(e.pos.y)) {
      throw InvariantError("map entry position is not finite");
    }
    if (!positions.insert(e.pos).second) {
      throw InvariantError("duplicate map entry position (" + std::to_string(e.pos.x) + ", " +
                           std::to_string(e.pos.y) + ")");
    }
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(ScanMode mode) noexcept {
  return mode == ScanMode::active ? "active" : "passive";
}

std::optional<ScanMode> parse_scan_mode(std::string_view text) noexcept {
  if (text == "passive") return ScanMode::passive;
  if (text == "active") return ScanMode::active;
  return std::nullopt;
}

ScanObservation::ScanObservation(std::vector<Reading> readings, ScanMode mode)
    : readings_(std::move(readings)), mode_(mode) {
  if (readings_.size() > kMaxScanEntries) {
    throw InvariantError("scan holds " + std::to_string(readings_.size()) +
                         " readings; at most 64 are buffered");
  }
  std::set<MacAddress> seen;
  for (const auto& r : readings_) {
    if (!std::isfinite(r.rssi_dbm)) {
      throw InvariantError("reading for " + r.mac.to_string() + " is not finite");
    }
    if (!seen.insert(r.mac).second) {
      throw InvariantError("duplicate reading for " + r.mac.to_string());
    }
    if (mode_ == ScanMode::active && r.hidden()) {
      throw InvariantError("active scan cannot report hidden network " + r.mac.to_string());
    }
  }
}

const Reading* ScanObservation::find(const MacAddress& mac) const noexcept {
  const auto it = std::find_if(readings_.begin(), readings_.end(),
                               [&](const Reading& r) { return r.mac == mac; });
  return it == readings_.end() ? nullptr : &*it;
}

Fingerprint align_fingerprint(const ScanObservation& obs, std::span<const AccessPoint> roster) {
  std::vector<double> slots(roster.size(), kRssiFloor);
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (const Reading* r = obs.find(roster[i].mac)) slots[i] = clamp_rssi(r->rssi_dbm);
  }
  return Fingerprint{std::move(slots)};
}

ScanObservation fingerprint_to_observation(const Fingerprint& fp,
                                           std::span<const AccessPoint> roster) {
  if (fp.dimension() != roster.size()) {
    throw DimensionError("fingerprint dimension does not match roster");
  }
  std::vector<Reading> readings;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (fp[i] <= kRssiFloor) continue;
    std::optional<std::string> essid;
    if (!roster[i].cloaked) essid = roster[i].essid;
    readings.push_back(Reading{roster[i].mac, std::move(essid), fp[i]});
  }
  return ScanObservation{std::move(readings), ScanMode::passive};
}

}  // namespace wlanloc
