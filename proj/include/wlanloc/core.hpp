#pragma once

// Domain types shared by every part of the toolkit: MAC addresses, access
// points, RSSI fingerprints, radio maps, scan observations and position
// estimates. All of them validate on construction and are immutable
// afterwards, so they can be shared freely between threads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wlanloc {

inline constexpr double kRssiFloor = -100.0;
inline constexpr double kRssiCeil = -10.0;
inline constexpr std::size_t kMaxScanEntries = 64;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fingerprints (or a fingerprint and a map) built over different rosters.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Point2 {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  friend bool operator==(const Point3&, const Point3&) = default;
};

[[nodiscard]] double planar_distance(const Point2& a, const Point2& b) noexcept;
[[nodiscard]] double spatial_distance(const Point3& a, const Point3& b) noexcept;

// ---------------------------------------------------------------------------
// MacAddress
// ---------------------------------------------------------------------------

/// 48-bit station address. Text form is "AA:BB:CC:DD:EE:FF", uppercase.
class MacAddress {
 public:
  constexpr MacAddress() = default;
  explicit constexpr MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

  /// Strict parse: exactly 17 chars, uppercase hex pairs separated by ':'.
  [[nodiscard]] static std::optional<MacAddress> parse(std::string_view text) noexcept;
  [[nodiscard]] static MacAddress from_u64(std::uint64_t value) noexcept;

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] const std::array<std::uint8_t, 6>& octets() const noexcept { return octets_; }

  friend bool operator==(const MacAddress&, const MacAddress&) = default;
  friend auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

// ---------------------------------------------------------------------------
// AccessPoint
// ---------------------------------------------------------------------------

struct AccessPoint {
  MacAddress mac;
  std::string essid;
  bool cloaked{false};
  Point3 pos;

  friend bool operator==(const AccessPoint&, const AccessPoint&) = default;
};

/// ESSID usable as a whitespace-delimited token in site and map files:
/// 1..32 printable ASCII characters, no whitespace, no '"', not starting with '#'.
[[nodiscard]] bool is_token_essid(std::string_view essid) noexcept;

/// Throws InvariantError unless pos is finite, z >= 0 and the essid is a token.
void validate_access_point(const AccessPoint& ap);

/// Throws InvariantError if two APs share a MAC or any AP is invalid.
void validate_roster(std::span<const AccessPoint> roster);

// ---------------------------------------------------------------------------
// Fingerprint
// ---------------------------------------------------------------------------

/// RSSI vector in dBm, one slot per roster AP. Values lie in [-100, -10];
/// an AP that was not heard holds exactly kRssiFloor.
class Fingerprint {
 public:
  Fingerprint() = default;

  /// Throws InvariantError if any value is non-finite or outside [floor, ceil].
  explicit Fingerprint(std::vector<double> rssi);

  /// Clamps every value into range. Non-finite values throw.
  [[nodiscard]] static Fingerprint clamped(std::vector<double> rssi);

  [[nodiscard]] std::size_t dimension() const noexcept { return rssi_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return rssi_; }
  [[nodiscard]] double operator[](std::size_t i) const { return rssi_.at(i); }

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  std::vector<double> rssi_;
};

[[nodiscard]] double clamp_rssi(double dbm) noexcept;

/// Sum of squared component differences, accumulated in slot order.
/// Throws DimensionError on mismatched dimensions.
[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b);

/// Euclidean distance in signal space.
[[nodiscard]] double euclidean_distance(const Fingerprint& a, const Fingerprint& b);

// ---------------------------------------------------------------------------
// RadioMap
// ---------------------------------------------------------------------------

struct MapEntry {
  Point2 pos;
  Fingerprint fp;

  friend bool operator==(const MapEntry&, const MapEntry&) = default;
};

/// Example database: a roster of APs plus (grid position, fingerprint) pairs.
/// An empty entry list is representable; indexing and persistence reject it.
class RadioMap {
 public:
  RadioMap(std::vector<AccessPoint> roster, double spacing, std::vector<MapEntry> entries);

  [[nodiscard]] const std::vector<AccessPoint>& roster() const noexcept { return roster_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] const std::vector<MapEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return roster_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const RadioMap&, const RadioMap&) = default;

 private:
  std::vector<AccessPoint> roster_;
  double spacing_;
  std::vector<MapEntry> entries_;
};

// ---------------------------------------------------------------------------
// ScanObservation
// ---------------------------------------------------------------------------

enum class ScanMode { passive, active };

[[nodiscard]] std::string_view to_string(ScanMode mode) noexcept;
[[nodiscard]] std::optional<ScanMode> parse_scan_mode(std::string_view text) noexcept;

struct Reading {
  MacAddress mac;
  /// std::nullopt when the network does not advertise its name.
  std::optional<std::string> essid;
  double rssi_dbm{kRssiFloor};

  [[nodiscard]] bool hidden() const noexcept { return !essid.has_value(); }

  friend bool operator==(const Reading&, const Reading&) = default;
};

/// Readings produced by one scan. At most 64 readings, unique MACs, finite
/// RSSI. Active scans cannot contain hidden networks.
class ScanObservation {
 public:
  ScanObservation() = default;
  ScanObservation(std::vector<Reading> readings, ScanMode mode);

  [[nodiscard]] const std::vector<Reading>& readings() const noexcept { return readings_; }
  [[nodiscard]] ScanMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t size() const noexcept { return readings_.size(); }
  [[nodiscard]] const Reading* find(const MacAddress& mac) const noexcept;

  friend bool operator==(const ScanObservation&, const ScanObservation&) = default;

 private:
  std::vector<Reading> readings_;
  ScanMode mode_{ScanMode::passive};
};

/// Slot i takes the reading for roster[i] (clamped), or kRssiFloor if absent.
/// Readings from MACs outside the roster are ignored.
[[nodiscard]] Fingerprint align_fingerprint(const ScanObservation& obs,
                                            std::span<const AccessPoint> roster);

/// Inverse direction of align_fingerprint: one reading per slot above the floor.
[[nodiscard]] ScanObservation fingerprint_to_observation(const Fingerprint& fp,
                                                         std::span<const AccessPoint> roster);

// ---------------------------------------------------------------------------
// PositionEstimate
// ---------------------------------------------------------------------------

struct Neighbor {
  std::size_t index{0};
  double distance{0.0};

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct PositionEstimate {
  Point2 pos;
  std::vector<Neighbor> neighbors;

  [[nodiscard]] std::size_t k_used() const noexcept { return neighbors.size(); }
};

}  // namespace wlanloc
