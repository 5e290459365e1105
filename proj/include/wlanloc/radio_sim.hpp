#pragma once

// Synthetic propagation: log-distance path loss with log-normal shadowing,
// radio-map construction over a rectangular site, and seeded passive/active
// scan simulation.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wlanloc/core.hpp"

namespace wlanloc {

struct PathLossModel {
  double p0_dbm{-40.0};  // RSSI at the reference distance
  double d0_m{1.0};
  double exponent{3.0};
  double shadowing_sigma_db{4.0};

  /// Throws InvariantError unless exponent > 0, sigma >= 0 and d0 > 0.
  void validate() const;
};

/// Rectangular floor area [0, width] x [0, depth] with ceiling/wall mounted APs.
class Site {
 public:
  Site(double width, double depth, std::vector<AccessPoint> aps, double client_height);

  [[nodiscard]] double width() const noexcept { return width_; }
  [[nodiscard]] double depth() const noexcept { return depth_; }
  [[nodiscard]] const std::vector<AccessPoint>& aps() const noexcept { return aps_; }
  [[nodiscard]] double client_height() const noexcept { return client_height_; }
  [[nodiscard]] bool contains(const Point2& p) const noexcept;
  [[nodiscard]] double diagonal() const noexcept;

  friend bool operator==(const Site&, const Site&) = default;

 private:
  double width_;
  double depth_;
  std::vector<AccessPoint> aps_;
  double client_height_;
};

/// Noise-free RSSI at `point`: p0 - 10 n log10(d / d0), clamped to [-100, -10].
/// Throws InvariantError when `point` coincides with the AP.
[[nodiscard]] double path_loss_rssi(const AccessPoint& ap, const Point3& point,
                                    const PathLossModel& model);

/// Unclamped variant, used to decide whether a reading falls below sensitivity.
[[nodiscard]] double path_loss_rssi_unclamped(const AccessPoint& ap, const Point3& point,
                                              const PathLossModel& model);

/// Grid positions (i * spacing, j * spacing) that fit inside the site, ordered
/// row by row (y outer, x inner).
[[nodiscard]] std::vector<Point2> grid_positions(const Site& site, double spacing);

/// Noise-free fingerprint at every grid point, measured at client height.
[[nodiscard]] RadioMap build_radio_map(const Site& site, double spacing,
                                       const PathLossModel& model);

/// One scan at `client_pos`. Each AP gets one Gaussian draw (in site order,
/// whether or not it ends up visible) from a generator seeded with `seed`.
/// Readings below -100 dBm before clamping are dropped; active scans skip
/// cloaked APs; passive scans report them as hidden. Above 64 readings only the
/// strongest 64 survive, ties resolved in site order.
[[nodiscard]] ScanObservation simulate_scan(const Site& site, const Point2& client_pos,
                                            ScanMode mode, const PathLossModel& model,
                                            std::uint64_t seed);

/// 30.5 x 52 m hall, six APs 10.75 m up on a 2 x 3 grid.
[[nodiscard]] Site uq_centre_preset();

/// Default propagation model for the hall preset (p0 -40 dBm, n = 3, sigma 4 dB).
[[nodiscard]] PathLossModel uq_centre_model();

// Site file:  SITE <width> <depth> <client_height>
//             AP <mac> <essid> <cloaked:0|1> <x> <y> <z>
[[nodiscard]] Site parse_site_text(std::string_view text);
[[nodiscard]] std::string serialize_site(const Site& site);
[[nodiscard]] Site load_site(const std::filesystem::path& path);

}  // namespace wlanloc
