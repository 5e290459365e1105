#include "wlanloc/radio_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wlanloc/random.hpp"
#include "wlanloc/text.hpp"

namespace wlanloc {

void PathLossModel::validate() const {
  if (!std::isfinite(p0_dbm)) throw InvariantError("path-loss reference power must be finite");
  if (!(d0_m > 0.0) || !std::isfinite(d0_m)) {
    throw InvariantError("path-loss reference distance must be positive");
  }
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw InvariantError("path-loss exponent must be positive");
  }
  if (!(shadowing_sigma_db >= 0.0) || !std::isfinite(shadowing_sigma_db)) {
    throw InvariantError("shadowing sigma must be non-negative");
  }
}

Site::Site(double width, double depth, std::vector<AccessPoint> aps, double client_height)
    : width_(width), depth_(depth), aps_(std::move(aps)), client_height_(client_height) {
  if (!(width_ > 0.0) || !(depth_ > 0.0) || !std::isfinite(width_) || !std::isfinite(depth_)) {
    throw InvariantError("site dimensions must be positive");
  }
  if (aps_.empty()) throw InvariantError("site has no access points");
  validate_roster(aps_);
  const auto lowest = std::min_element(aps_.begin(), aps_.end(), [](const auto& a, const auto& b) {
    return a.pos.z < b.pos.z;
  });
  if (!(client_height_ >= 0.0) || !(client_height_ < lowest->pos.z)) {
    throw InvariantError("client height must lie in [0, lowest AP height)");
  }
}

bool Site::contains(const Point2& p) const noexcept {
  return p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= depth_;
}

double Site::diagonal() const noexcept { return std::hypot(width_, depth_); }

// ---------------------------------------------------------------------------

double path_loss_rssi_unclamped(const AccessPoint& ap, const Point3& point,
                                const PathLossModel& model) {
  const double dist = spatial_distance(ap.pos, point);
  if (dist == 0.0) {
    throw InvariantError("path loss is undefined at the transmitter position of " +
                         ap.mac.to_string());
  }
  return model.p0_dbm - 10.0 * model.exponent * std::log10(dist / model.d0_m);
}

double path_loss_rssi(const AccessPoint& ap, const Point3& point, const PathLossModel& model) {
  return clamp_rssi(path_loss_rssi_unclamped(ap, point, model));
}

std::vector<Point2> grid_positions(const Site& site, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvariantError("grid spacing must be positive");
  }
  std::vector<Point2> out;
  for (std::size_t j = 0;; ++j) {
    const double y = static_cast<double>(j) * spacing;
    if (y > site.depth()) break;
    for (std::size_t i = 0;; ++i) {
      const double x = static_cast<double>(i) * spacing;
      if (x > site.width()) break;
      out.push_back(Point2{x, y});
    }
  }
  return out;
}

RadioMap build_radio_map(const Site& site, double spacing, const PathLossModel& model) {
  model.validate();
  std::vector<MapEntry> entries;
  for (const Point2& p : grid_positions(site, spacing)) {
    const Point3 at{p.x, p.y, site.client_height()};
    std::vector<double> rssi;
    rssi.reserve(site.aps().size());
    for (const auto& ap : site.aps()) rssi.push_back(path_loss_rssi(ap, at, model));
    entries.push_back(MapEntry{p, Fingerprint{std::move(rssi)}});
  }
  return RadioMap{site.aps(), spacing, std::move(entries)};
}

ScanObservation simulate_scan(const Site& site, const Point2& client_pos, ScanMode mode,
                              const PathLossModel& model, std::uint64_t seed) {
  model.validate();
  if (!site.contains(client_pos)) {
    throw InvariantError("client position (" + text::format_shortest(client_pos.x) + ", " +
                         text::format_shortest(client_pos.y) + ") is outside the site");
  }
  const Point3 at{client_pos.x, client_pos.y, site.client_height()};
  DeterministicRng rng(seed);

  struct Candidate {
    std::size_t ap;
    double rssi;
  };
  std::vector<Candidate> heard;
  const auto& aps = site.aps();
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const double noise = model.shadowing_sigma_db * rng.normal();
    const double raw = path_loss_rssi_unclamped(aps[i], at, model) + noise;
    if (raw < kRssiFloor) continue;  // below receiver sensitivity
    if (mode == ScanMode::active && aps[i].cloaked) continue;
    heard.push_back(Candidate{i, clamp_rssi(raw)});
  }

  if (heard.size() > kMaxScanEntries) {
    std::stable_sort(heard.begin(), heard.end(),
                     [](const Candidate& a, const Candidate& b) { return a.rssi > b.rssi; });
    heard.resize(kMaxScanEntries);
    std::sort(heard.begin(), heard.end(),
              [](const Candidate& a, const Candidate& b) { return a.ap < b.ap; });
  }

  std::vector<Reading> readings;
  readings.reserve(heard.size());
  for (const auto& c : heard) {
    const auto& ap = aps[c.ap];
    std::optional<std::string> essid;
    if (!ap.cloaked) essid = ap.essid;
    readings.push_back(Reading{ap.mac, std::move(essid), c.rssi});
  }
  return ScanObservation{std::move(readings), mode};
}

Site uq_centre_preset() {
  constexpr double kWidth = 30.5;
  constexpr double kDepth = 52.0;
  constexpr double kApHeight = 10.75;
  std::vector<AccessPoint> aps;
  int n = 1;
  for (const double x : {kWidth / 4.0, 3.0 * kWidth / 4.0}) {
    for (const double y : {kDepth / 4.0, kDepth / 2.0, 3.0 * kDepth / 4.0}) {
      aps.push_back(AccessPoint{MacAddress::from_u64(0x020000000000ULL + static_cast<unsigned>(n)),
                                "UQC-" + std::to_string(n), false, Point3{x, y, kApHeight}});
      ++n;
    }
  }
  return Site{kWidth, kDepth, std::move(aps), 1.0};
}

PathLossModel uq_centre_model() { return PathLossModel{-40.0, 1.0, 3.0, 4.0}; }

// ---------------------------------------------------------------------------

Site parse_site_text(std::string_view input) {
  const auto lines = text::split_lines(input);
  std::optional<std::array<double, 3>> header;
  std::vector<AccessPoint> aps;

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto tok = text::tokens(text::strip_comment(lines[n]));
    if (tok.empty()) continue;

    if (tok[0] == "SITE") {
      if (header) throw ParseError(line_no, "duplicate SITE header");
      if (!aps.empty()) throw ParseError(line_no, "SITE header must precede AP lines");
      if (tok.size() != 4) throw ParseError(line_no, "expected SITE <width> <depth> <client_height>");
      std::array<double, 3> v{};
      for (std::size_t i = 0; i < 3; ++i) {
        const auto d = text::parse_double(tok[i + 1]);
        if (!d) throw ParseError(line_no, "bad number '" + std::string(tok[i + 1]) + "'");
        v[i] = *d;
      }
      header = v;
    } else if (tok[0] == "AP") {
      if (!header) throw ParseError(line_no, "AP line before SITE header");
      if (tok.size() != 7) {
        throw ParseError(line_no, "expected AP <mac> <essid> <cloaked> <x> <y> <z>");
      }
      const auto mac = MacAddress::parse(tok[1]);
      if (!mac) throw ParseError(line_no, "malformed MAC '" + std::string(tok[1]) + "'");
      if (!is_token_essid(tok[2])) throw ParseError(line_no, "invalid essid");
      if (tok[3] != "0" && tok[3] != "1") throw ParseError(line_no, "cloaked flag must be 0 or 1");
      std::array<double, 3> xyz{};
      for (std::size_t i = 0; i < 3; ++i) {
        const auto d = text::parse_double(tok[i + 4]);
        if (!d) throw ParseError(line_no, "bad number '" + std::string(tok[i + 4]) + "'");
        xyz[i] = *d;
      }
      AccessPoint ap{*mac, std::string(tok[2]), tok[3] == "1", Point3{xyz[0], xyz[1], xyz[2]}};
      try {
        validate_access_point(ap);
      } catch (const InvariantError& e) {
        throw ParseError(line_no, e.what());
      }
      if (std::any_of(aps.begin(), aps.end(), [&](const auto& a) { return a.mac == ap.mac; })) {
        throw ParseError(line_no, "duplicate access point " + ap.mac.to_string());
      }
      aps.push_back(std::move(ap));
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
  }

  if (!header) throw ParseError(0, "missing SITE header");
  try {
    return Site{(*header)[0], (*header)[1], std::move(aps), (*header)[2]};
  } catch (const InvariantError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_site(const Site& site) {
  std::ostringstream out;
  out << "SITE " << text::format_shortest(site.width()) << ' '
      << text::format_shortest(site.depth()) << ' '
      << text::format_shortest(site.client_height()) << '\n';
  for (const auto& ap : site.aps()) {
    out << "AP " << ap.mac.to_string() << ' ' << ap.essid << ' ' << (ap.cloaked ? 1 : 0) << ' '
        << text::format_shortest(ap.pos.x) << ' ' << text::format_shortest(ap.pos.y) << ' '
        << text::format_shortest(ap.pos.z) << '\n';
  }
  return out.str();
}

Site load_site(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open site file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_site_text(buf.str());
}

}  // namespace wlanloc
