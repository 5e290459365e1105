#pragma once

// TCP location service. The server holds one radio map and its index, both
// read-only; every request line gets exactly one reply line and connections
// stay open across requests and errors.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wlanloc/core.hpp"
#include "wlanloc/locator.hpp"
#include "wlanloc/protocol.hpp"

namespace wlanloc {

inline constexpr std::string_view kDefaultBind = "127.0.0.1:7117";

struct Endpoint {
  std::string host;
  std::uint16_t port{0};

  /// "host:port"; throws InvariantError on a malformed address.
  [[nodiscard]] static Endpoint parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
};

/// Connection refused, timeout, or the peer hung up mid-exchange.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The server answered with an ERR line.
class ServiceError : public Error {
 public:
  explicit ServiceError(protocol::ErrorReply reply)
      : Error("server error " + std::to_string(reply.code) + " " + reply.reason),
        reply_(std::move(reply)) {}

  [[nodiscard]] const protocol::ErrorReply& reply() const noexcept { return reply_; }

 private:
  protocol::ErrorReply reply_;
};

/// Handles one request line; never throws. Exposed for in-process use.
[[nodiscard]] std::string handle_request_line(const RadioMap& map, const NNIndex& index,
                                              double epsilon, std::string_view line);

class LocationServer {
 public:
  /// Longest accepted request line; longer lines are answered with
  /// "ERR 400 too-long" and discarded.
  static constexpr std::size_t kMaxLineBytes = 16 * 1024;

  LocationServer(RadioMap map, double epsilon);
  ~LocationServer();

  LocationServer(const LocationServer&) = delete;
  LocationServer& operator=(const LocationServer&) = delete;

  /// Binds and starts listening. Port 0 picks an ephemeral port. Throws
  /// TransportError if the address cannot be bound.
  void bind(const Endpoint& endpoint);

  /// Actual bound port (useful after binding port 0).
  [[nodiscard]] std::uint16_t port() const noexcept { return port_; }

  /// Accept loop; returns after stop(). One thread per connection.
  void run();

  /// Starts run() on a background thread.
  void start();

  /// Thread-safe, idempotent. Closes the listener and joins all workers.
  void stop();

  [[nodiscard]] const RadioMap& map() const noexcept { return map_; }
  [[nodiscard]] const NNIndex& index() const noexcept { return index_; }

 private:
  void serve_connection(int fd, const std::atomic<bool>& stopping) const;

  RadioMap map_;
  NNIndex index_;
  double epsilon_;
  int listen_fd_{-1};
  std::uint16_t port_{0};
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::mutex workers_mu_;
  std::vector<Worker> workers_;
};

/// Persistent client connection; sends one line and waits for one line.
class LocationClient {
 public:
  explicit LocationClient(const Endpoint& endpoint,
                          std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~LocationClient();

  LocationClient(const LocationClient&) = delete;
  LocationClient& operator=(const LocationClient&) = delete;

  /// Raw exchange; the line must not contain '\n'. Throws TransportError.
  [[nodiscard]] std::string exchange(std::string_view line);

  /// Throws ServiceError on an ERR reply, TransportError on I/O failure.
  [[nodiscard]] protocol::LocateOk locate(const ScanObservation& obs, std::int64_t k);

 private:
  int fd_{-1};
  std::string buffer_;
};

/// One-shot request on a fresh connection.
[[nodiscard]] protocol::LocateOk request_locate(const Endpoint& endpoint,
                                                const ScanObservation& obs, std::int64_t k,
                                                std::chrono::milliseconds timeout =
                                                    std::chrono::seconds(5));

}  // namespace wlanloc
