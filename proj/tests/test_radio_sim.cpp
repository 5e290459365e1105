#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "wlanloc/locator.hpp"
#include "wlanloc/radio_sim.hpp"

using namespace wlanloc;
using wlanloc::testing::cloaked_site;
using wlanloc::testing::dense_site;
using wlanloc::testing::make_ap;

TEST_CASE("path loss examples") {
  const PathLossModel free_space{-40.0, 1.0, 2.0, 0.0};
  const auto ap = make_ap(1, Point3{0.0, 0.0, 10.75});
  CHECK(path_loss_rssi(ap, Point3{1.0, 0.0, 10.75}, free_space) == -40.0);
  CHECK(path_loss_rssi(ap, Point3{0.0, 10.0, 10.75}, free_space) == doctest::Approx(-60.0).epsilon(1e-12));
  // -40 - 20 log10(9.75), evaluated separately: -59.78009231397074
  CHECK(path_loss_rssi(ap, Point3{0.0, 0.0, 1.0}, free_space) == doctest::Approx(-59.78009231397074).epsilon(1e-12));
  CHECK_THROWS_AS((void)path_loss_rssi(ap, ap.pos, free_space), InvariantError);

  const PathLossModel hot{0.0, 1.0, 2.0, 0.0};
  CHECK(path_loss_rssi(ap, Point3{1.0, 0.0, 10.75}, hot) == -10.0);
  const PathLossModel weak{-95.0, 1.0, 4.0, 0.0};
  CHECK(path_loss_rssi(ap, Point3{50.0, 0.0, 10.75}, weak) == -100.0);
}

TEST_CASE("path loss is monotone in distance") {
  const auto model = uq_centre_model();
  const auto ap = make_ap(1, Point3{5.0, 5.0, 10.75});
  double previous = path_loss_rssi(ap, Point3{5.0, 5.0, 0.0}, model);
  for (double r = 0.25; r < 200.0; r += 0.25) {
    const double now = path_loss_rssi(ap, Point3{5.0 + r, 5.0, 0.0}, model);
    REQUIRE(now <= previous);
    previous = now;
  }
}

TEST_CASE("model and site validation") {
  CHECK_THROWS_AS(PathLossModel({-40.0, 1.0, 0.0, 1.0}).validate(), InvariantError);
  CHECK_THROWS_AS(PathLossModel({-40.0, 0.0, 2.0, 1.0}).validate(), InvariantError);
  CHECK_THROWS_AS(PathLossModel({-40.0, 1.0, 2.0, -1.0}).validate(), InvariantError);
  CHECK_THROWS_AS(Site(0.0, 5.0, {make_ap(1)}, 1.0), InvariantError);
  CHECK_THROWS_AS(Site(5.0, 5.0, {}, 1.0), InvariantError);
  CHECK_THROWS_AS(Site(5.0, 5.0, {make_ap(1, {0, 0, 1.0})}, 1.0), InvariantError);
}

TEST_CASE("hall preset") {
  const Site site = uq_centre_preset();
  CHECK(site.width() == 30.5);
  CHECK(site.depth() == 52.0);
  CHECK(site.client_height() == 1.0);
  REQUIRE(site.aps().size() == 6);
  std::set<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& ap = site.aps()[i];
    CHECK(ap.pos.z == 10.75);
    CHECK_FALSE(ap.cloaked);
    CHECK(ap.essid == "UQC-" + std::to_string(i + 1));
    CHECK(ap.mac.to_string() == "02:00:00:00:00:0" + std::to_string(i + 1));
    xy.emplace(ap.pos.x, ap.pos.y);
  }
  const std::set<std::pair<double, double>> expected{{7.625, 13.0}, {7.625, 26.0}, {7.625, 39.0},
                                                     {22.875, 13.0}, {22.875, 26.0}, {22.875, 39.0}};
  CHECK(xy == expected);
}

TEST_CASE("radio map grid") {
  const Site site = uq_centre_preset();
  const auto model = uq_centre_model();
  const RadioMap map = build_radio_map(site, 5.0, model);
  REQUIRE(map.size() == 77);
  CHECK(map.roster() == site.aps());
  CHECK(map.entries().front().pos == Point2{0.0, 0.0});
  CHECK(map.entries().back().pos == Point2{30.0, 50.0});
  std::set<double> xs;
  std::set<double> ys;
  for (const auto& e : map.entries()) {
    xs.insert(e.pos.x);
    ys.insert(e.pos.y);
    for (std::size_t i = 0; i < site.aps().size(); ++i) {
      REQUIRE(e.fp[i] == path_loss_rssi(site.aps()[i], Point3{e.pos.x, e.pos.y, 1.0}, model));
    }
  }
  CHECK(xs.size() == 7);
  CHECK(ys.size() == 11);

  const RadioMap single = build_radio_map(site, 100.0, model);
  REQUIRE(single.size() == 1);
  CHECK(single.entries()[0].pos == Point2{0.0, 0.0});

  CHECK_THROWS_AS((void)build_radio_map(site, 0.0, model), InvariantError);
  CHECK_THROWS_AS((void)build_radio_map(site, -1.0, model), InvariantError);
}

TEST_CASE("cloaked APs and scan modes") {
  const Site site = cloaked_site();
  const auto model = uq_centre_model();
  const auto secret = site.aps()[2].mac;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto active = simulate_scan(site, {10.0, 10.0}, ScanMode::active, model, seed);
    const auto passive = simulate_scan(site, {10.0, 10.0}, ScanMode::passive, model, seed);
    CHECK(active.find(secret) == nullptr);
    REQUIRE(passive.find(secret) != nullptr);
    CHECK(passive.find(secret)->hidden());
    CHECK(passive.mode() == ScanMode::passive);
    for (const auto& r : active.readings()) {
      const auto* p = passive.find(r.mac);
      REQUIRE(p != nullptr);
      CHECK(p->rssi_dbm == r.rssi_dbm);
    }
  }
}

TEST_CASE("70 APs keep the strongest 64") {
  const Site site = dense_site();
  const PathLossModel model{-40.0, 1.0, 3.0, 0.0};
  const Point2 client{3.3, 7.1};
  const auto obs = simulate_scan(site, client, ScanMode::passive, model, 5);
  REQUIRE(obs.size() == 64);

  // Independent ranking: own log-distance evaluation, stable by roster order.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < site.aps().size(); ++i) {
    const auto& p = site.aps()[i].pos;
    const double d = std::sqrt((p.x - client.x) * (p.x - client.x) + (p.y - client.y) * (p.y - client.y) +
                               (p.z - 1.0) * (p.z - 1.0));
    ranked.emplace_back(-40.0 - 30.0 * std::log10(d), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::set<MacAddress> expected;
  for (std::size_t i = 0; i < 64; ++i) expected.insert(site.aps()[ranked[i].second].mac);
  std::set<MacAddress> got;
  for (const auto& r : obs.readings()) got.insert(r.mac);
  CHECK(got == expected);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(simulate_scan(site, client, ScanMode::passive, uq_centre_model(), seed).size() == 64);
  }
}

TEST_CASE("readings below the noise floor vanish") {
  const Site site(200.0, 10.0, {make_ap(1, {0.0, 0.0, 3.0}), make_ap(2, {200.0, 0.0, 3.0})}, 1.0);
  const PathLossModel model{-40.0, 1.0, 3.5, 0.0};
  const auto obs = simulate_scan(site, {1.0, 1.0}, ScanMode::passive, model, 0);
  REQUIRE(obs.size() == 1);
  CHECK(obs.readings()[0].mac == site.aps()[0].mac);
}

TEST_CASE("simulation is deterministic and seed dependent") {
  const Site site = uq_centre_preset();
  const auto model = uq_centre_model();
  const auto a = simulate_scan(site, {12.3, 40.1}, ScanMode::passive, model, 99);
  const auto b = simulate_scan(site, {12.3, 40.1}, ScanMode::passive, model, 99);
  const auto c = simulate_scan(site, {12.3, 40.1}, ScanMode::passive, model, 100);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS((void)simulate_scan(site, {-0.1, 3.0}, ScanMode::passive, model, 1), InvariantError);
  CHECK_THROWS_AS((void)simulate_scan(site, {3.0, 52.01}, ScanMode::passive, model, 1), InvariantError);
  CHECK_NOTHROW((void)simulate_scan(site, {30.5, 52.0}, ScanMode::passive, model, 1));
}

TEST_CASE("noise-free scan at a grid point reproduces its fingerprint") {
  const Site site = uq_centre_preset();
  PathLossModel model = uq_centre_model();
  const RadioMap map = build_radio_map(site, 5.0, model);
  model.shadowing_sigma_db = 0.0;
  const NNIndex index(map);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& e = map.entries()[i];
    const auto obs = simulate_scan(site, e.pos, ScanMode::passive, model, i);
    REQUIRE(align_fingerprint(obs, map.roster()) == e.fp);
    const auto hit = k_nearest(index, e.fp, 1);
    REQUIRE(hit.size() == 1);
    CHECK(hit[0].index == i);
    CHECK(hit[0].distance == 0.0);
  }
}

TEST_CASE("site file") {
  const Site site = cloaked_site();
  const std::string text = serialize_site(site);
  CHECK(text.rfind("SITE 20 20 1\n", 0) == 0);
  CHECK(text.find("AP 02:00:00:00:00:0C secret 1 10 18 3\n") != std::string::npos);
  CHECK(parse_site_text(text) == site);
  CHECK(parse_site_text("# hall\r\nSITE 30.5 52 1\r\nAP 02:00:00:00:00:01 a 0 1 2 10.75 # roof\r\n").aps().size() == 1);

  const auto fails_at = [](const char* input) -> std::size_t {
    try {
      (void)parse_site_text(input);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 999;
  };
  CHECK(fails_at("AP 02:00:00:00:00:01 a 0 1 2 3\n") == 1);
  CHECK(fails_at("SITE 10 10 1\nAP 02:00:00:00:00:1 a 0 1 2 3\n") == 2);
  CHECK(fails_at("SITE 10 10 1\nAP 02:00:00:00:00:01 a 2 1 2 3\n") == 2);
  CHECK(fails_at("SITE 10 10 1\nAP 02:00:00:00:00:01 a 0 1 x 3\n") == 2);
  CHECK(fails_at("SITE 10 10 1\nAP 02:00:00:00:00:01 a 0 1 2 3\nAP 02:00:00:00:00:01 b 0 1 2 3\n") == 3);
  CHECK(fails_at("SITE 10 10 1\n") == 0);                                      // no APs
  CHECK(fails_at("SITE 10 10 5\nAP 02:00:00:00:00:01 a 0 1 2 3\n") == 0);     // client above AP
  CHECK(fails_at("SITE 10 10 1\nWALL 1 2\n") == 2);
}
