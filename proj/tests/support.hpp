#pragma once

// Random instance generators and small fixtures shared by the test suites.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "wlanloc/core.hpp"
#include "wlanloc/radio_sim.hpp"

namespace wlanloc::testing {

inline AccessPoint make_ap(std::uint64_t n, Point3 pos = {0.0, 0.0, 3.0}, bool cloaked = false) {
  return AccessPoint{MacAddress::from_u64(0x0A0000000000ULL + n), "ap-" + std::to_string(n), cloaked, pos};
}

inline std::vector<AccessPoint> make_roster(std::size_t d) {
  std::vector<AccessPoint> roster;
  for (std::size_t i = 0; i < d; ++i) {
    roster.push_back(make_ap(i + 1, Point3{static_cast<double>(i), 0.0, 3.0}));
  }
  return roster;
}

inline std::vector<double> random_rssi(std::mt19937_64& rng, std::size_t d, bool integral = false) {
  std::uniform_real_distribution<double> real(kRssiFloor, kRssiCeil);
  std::uniform_int_distribution<int> whole(-95, -15);
  std::vector<double> v(d);
  for (auto& x : v) x = integral ? static_cast<double>(whole(rng)) : real(rng);
  return v;
}

inline Fingerprint random_fingerprint(std::mt19937_64& rng, std::size_t d, bool integral = false) {
  return Fingerprint{random_rssi(rng, d, integral)};
}

/// Map with `n` entries on distinct integer positions. Integral fingerprints
/// produce many exact distance ties.
inline RadioMap random_map(std::mt19937_64& rng, std::size_t n, std::size_t d, bool integral = false) {
  std::vector<MapEntry> entries;
  entries.reserve(n);
  const std::size_t row = 1 + static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back(MapEntry{Point2{static_cast<double>(i % row), static_cast<double>(i / row)},
                               random_fingerprint(rng, d, integral)});
  }
  return RadioMap{make_roster(d), 1.0, std::move(entries)};
}

/// Three APs, the third cloaked, on a 20 x 20 m floor.
inline Site cloaked_site() {
  return Site{20.0, 20.0,
              {AccessPoint{*MacAddress::parse("02:00:00:00:00:0A"), "open-a", false, {2.0, 2.0, 3.0}},
               AccessPoint{*MacAddress::parse("02:00:00:00:00:0B"), "open-b", false, {18.0, 2.0, 3.0}},
               AccessPoint{*MacAddress::parse("02:00:00:00:00:0C"), "secret", true, {10.0, 18.0, 3.0}}},
              1.0};
}

/// 70 APs on a 10 x 7 lattice over a compact 10 x 10 m floor.
inline Site dense_site() {
  std::vector<AccessPoint> aps;
  for (std::size_t i = 0; i < 70; ++i) {
    aps.push_back(make_ap(i + 1, Point3{static_cast<double>(i % 10) * 10.0 / 9.0,
                                        static_cast<double>(i / 10) * 10.0 / 6.0, 3.0}));
  }
  return Site{10.0, 10.0, std::move(aps), 1.0};
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("wlanloc-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace wlanloc::testing
