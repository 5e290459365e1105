#include <random>
#include <thread>

#include "doctest.h"
#include "wlanloc/locator.hpp"
#include "wlanloc/radio_sim.hpp"
#include "wlanloc/service.hpp"
#include "wlanloc/text.hpp"

using namespace wlanloc;

namespace {

RadioMap hall_map() { return build_radio_map(uq_centre_preset(), 5.0, uq_centre_model()); }

struct RunningServer {
  LocationServer server;
  Endpoint endpoint;

  explicit RunningServer(double epsilon = 0.0) : server(hall_map(), epsilon) {
    server.bind(Endpoint{"127.0.0.1", 0});
    server.start();
    endpoint = Endpoint{"127.0.0.1", server.port()};
  }
};

std::string local_reply(const RadioMap& map, const NNIndex& index, const ScanObservation& obs, std::int64_t k) {
  const auto est = locate(map, index, obs, k);
  return "OK x=" + text::format_fixed(est.pos.x, 2) + " y=" + text::format_fixed(est.pos.y, 2) +
         " k=" + std::to_string(est.k_used());
}

}  // namespace

TEST_CASE("endpoint parsing") {
  const auto ep = Endpoint::parse("127.0.0.1:7117");
  CHECK(ep.host == "127.0.0.1");
  CHECK(ep.port == 7117);
  CHECK(ep.to_string() == "127.0.0.1:7117");
  CHECK_THROWS_AS((void)Endpoint::parse("127.0.0.1"), InvariantError);
  CHECK_THROWS_AS((void)Endpoint::parse(":80"), InvariantError);
  CHECK_THROWS_AS((void)Endpoint::parse("localhost:70000"), InvariantError);
}

TEST_CASE("request handling without sockets") {
  const RadioMap map = hall_map();
  const NNIndex index(map);
  const Site site = uq_centre_preset();
  PathLossModel quiet = uq_centre_model();
  quiet.shadowing_sigma_db = 0.0;
  const auto obs = simulate_scan(site, {5.0, 10.0}, ScanMode::passive, quiet, 1);
  const auto line = protocol::encode_request(protocol::make_request(obs, 1));
  CHECK(handle_request_line(map, index, 0.0, line) == "OK x=5.00 y=10.00 k=1");
  CHECK(handle_request_line(map, index, 0.0, "LOCATE k=0") == "ERR 400 bad-k");
  CHECK(handle_request_line(map, index, 0.0, "LOCATE k=-4") == "ERR 400 bad-k");
  CHECK(handle_request_line(map, index, 0.0, "hello there") == "ERR 400 parse");
  CHECK(handle_request_line(map, index, 0.0, "LOCATE k=500") == "OK x=15.00 y=25.00 k=77");
}

TEST_CASE("remote estimates match local ones") {
  RunningServer rs;
  const RadioMap& map = rs.server.map();
  const NNIndex& index = rs.server.index();
  const Site site = uq_centre_preset();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.0, site.width());
  std::uniform_real_distribution<double> uy(0.0, site.depth());

  LocationClient client(rs.endpoint);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto obs = simulate_scan(site, {ux(rng), uy(rng)}, ScanMode::passive, uq_centre_model(), i);
    const std::int64_t k = 1 + static_cast<std::int64_t>(i % 7);
    const auto remote = client.locate(obs, k);
    REQUIRE(protocol::encode_response(remote) == local_reply(map, index, obs, k));
  }

  const auto one_shot = request_locate(rs.endpoint, ScanObservation{}, 200);
  CHECK(one_shot.k_used == 77);
}

TEST_CASE("service errors are decoded") {
  RunningServer rs;
  LocationClient client(rs.endpoint);
  try {
    (void)client.locate(ScanObservation{}, 0);
    FAIL("k=0 accepted");
  } catch (const ServiceError& e) {
    CHECK(e.reply() == protocol::ErrorReply{400, "bad-k"});
  }
  CHECK(client.exchange("nonsense") == "ERR 400 parse");
  CHECK(client.exchange("") == "ERR 400 parse");
  CHECK(client.exchange(std::string(LocationServer::kMaxLineBytes + 10, 'x')) == "ERR 400 too-long");
  CHECK(client.exchange("LOCATE k=2").rfind("OK ", 0) == 0);
}

TEST_CASE("malformed lines do not disturb the connection") {
  RunningServer rs;
  LocationClient client(rs.endpoint);
  const std::string valid = "LOCATE k=77";
  std::size_t answered = 0;
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(client.exchange("LOCATE k=3 zz" + std::to_string(i)) == "ERR 400 parse");
    if (i % 50 == 0) {
      REQUIRE(client.exchange(valid) == "OK x=15.00 y=25.00 k=77");
      ++answered;
    }
  }
  CHECK(answered == 20);
}

TEST_CASE("concurrent clients") {
  RunningServer rs;
  std::vector<std::thread> threads;
  std::atomic<int> good{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      LocationClient client(rs.endpoint);
      for (int i = 0; i < 50; ++i) {
        if (client.exchange("LOCATE k=77") == "OK x=15.00 y=25.00 k=77") ++good;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(good.load() == 400);
}

TEST_CASE("transport failures") {
  std::uint16_t dead_port = 0;
  {
    RunningServer rs;
    dead_port = rs.server.port();
    rs.server.stop();
  }
  CHECK_THROWS_AS((void)request_locate(Endpoint{"127.0.0.1", dead_port}, ScanObservation{}, 1), TransportError);

  RunningServer a;
  LocationServer b(hall_map(), 0.0);
  CHECK_THROWS_AS(b.bind(Endpoint{"127.0.0.1", a.server.port()}), TransportError);
}
