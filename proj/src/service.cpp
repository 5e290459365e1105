#include "wlanloc/service.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "wlanloc/text.hpp"

namespace wlanloc {

namespace {

constexpr int kPollMs = 100;

std::string errno_text() { return std::strerror(errno); }

void close_fd(int& fd) noexcept {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

bool send_all(int fd, std::string_view data) noexcept {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

addrinfo* resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw TransportError("cannot resolve " + ep.to_string() + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw InvariantError("address must look like <host>:<port>");
  }
  const auto port = text::parse_uint(text.substr(colon + 1));
  if (!port || *port > 65535) throw InvariantError("invalid port in '" + std::string(text) + "'");
  return Endpoint{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(*port)};
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

// ---------------------------------------------------------------------------

std::string handle_request_line(const RadioMap& map, const NNIndex& index, double epsilon,
                                std::string_view line) {
  using namespace protocol;
  try {
    LocateRequest req;
    try {
      req = decode_request(line);
    } catch (const ParseError&) {
      return encode_response(ErrorReply{400, std::string(kReasonParse)});
    }
    if (req.k < 1) return encode_response(ErrorReply{400, std::string(kReasonBadK)});
    const auto est = locate(map, index, to_observation(req), req.k, epsilon);
    return encode_response(to_reply(est));
  } catch (...) {
    return encode_response(ErrorReply{500, std::string(kReasonInternal)});
  }
}

// ---------------------------------------------------------------------------

LocationServer::LocationServer(RadioMap map, double epsilon)
    : map_(std::move(map)), index_(map_), epsilon_(epsilon) {
  if (!(epsilon_ >= 0.0)) throw InvariantError("epsilon must be non-negative");
}

LocationServer::~LocationServer() { stop(); }

void LocationServer::bind(const Endpoint& endpoint) {
  if (listen_fd_ >= 0) throw Error("server is already bound");
  addrinfo* res = resolve(endpoint, true);
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw TransportError("socket: " + errno_text());
  }
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd, 64) != 0) {
    const std::string why = errno_text();
    ::freeaddrinfo(res);
    close_fd(fd);
    throw TransportError("cannot bind " + endpoint.to_string() + ": " + why);
  }
  ::freeaddrinfo(res);

  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  listen_fd_ = fd;
}

void LocationServer::run() {
  if (listen_fd_ < 0) throw Error("server is not bound");
  while (!stopping_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMs);
    if (ready <= 0 || !(pfd.revents & POLLIN)) continue;
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) continue;
    const int one = 1;
    ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(workers_mu_);
    std::erase_if(workers_, [](Worker& w) {
      if (!w.done->load()) return false;
      w.thread.join();
      return true;
    });
    auto done = std::make_shared<std::atomic<bool>>(false);
    workers_.push_back(Worker{std::thread([this, client, done] {
                                serve_connection(client, stopping_);
                                done->store(true);
                              }),
                              done});
  }
}

void LocationServer::start() {
  if (listen_fd_ < 0) throw Error("server is not bound");
  accept_thread_ = std::thread([this] { run(); });
}

void LocationServer::stop() {
  stopping_.store(true);
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<Worker> workers;
  {
    std::lock_guard lock(workers_mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) {
    if (w.thread.joinable()) w.thread.join();
  }
  close_fd(listen_fd_);
}

void LocationServer::serve_connection(int fd, const std::atomic<bool>& stopping) const {
  std::string pending;
  bool discarding = false;  // inside an over-long line
  char buf[4096];

  while (!stopping.load()) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMs);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      break;
    }

    bool ok = true;
    std::string_view chunk(buf, static_cast<std::size_t>(n));
    while (ok && !chunk.empty()) {
      const auto nl = chunk.find('\n');
      if (nl == std::string_view::npos) {
        if (!discarding) pending.append(chunk);
        if (!discarding && pending.size() > kMaxLineBytes) {
          ok = send_all(fd, protocol::encode_response(
                                protocol::ErrorReply{400, std::string(protocol::kReasonTooLong)}) + "\n");
          pending.clear();
          discarding = true;
        }
        break;
      }
      if (discarding) {
        discarding = false;  // the over-long line already got its reply
      } else {
        pending.append(chunk.substr(0, nl));
        const std::string reply = pending.size() > kMaxLineBytes
            ? protocol::encode_response(protocol::ErrorReply{400, std::string(protocol::kReasonTooLong)})
            : handle_request_line(map_, index_, epsilon_, pending);
        ok = send_all(fd, reply + "\n");
      }
      pending.clear();
      chunk.remove_prefix(nl + 1);
    }
    if (!ok) break;
  }
  ::close(fd);
}

// ---------------------------------------------------------------------------

LocationClient::LocationClient(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  addrinfo* res = resolve(endpoint, false);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw TransportError("socket: " + errno_text());
  }
  const int flags = ::fcntl(fd_, F_GETFL, 0);
  ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 && errno != EINPROGRESS) {
    const std::string why = errno_text();
    close_fd(fd_);
    throw TransportError("cannot connect to " + endpoint.to_string() + ": " + why);
  }
  if (rc != 0) {
    pollfd pfd{fd_, POLLOUT, 0};
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    int err = 0;
    socklen_t len = sizeof err;
    if (rc > 0) ::getsockopt(fd_, SOL_SOCKET, SO_ERROR, &err, &len);
    if (rc <= 0 || err != 0) {
      close_fd(fd_);
      throw TransportError("cannot connect to " + endpoint.to_string() + ": " +
                           (rc <= 0 ? std::string("timed out") : std::string(std::strerror(err))));
    }
  }
  ::fcntl(fd_, F_SETFL, flags);

  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

LocationClient::~LocationClient() { close_fd(fd_); }

std::string LocationClient::exchange(std::string_view line) {
  if (fd_ < 0) throw TransportError("connection is closed");
  if (line.find('\n') != std::string_view::npos) throw InvariantError("request spans lines");
  std::string out(line);
  out += '\n';
  if (!send_all(fd_, out)) {
    close_fd(fd_);
    throw TransportError("send failed: " + errno_text());
  }
  char buf[4096];
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return reply;
    }
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n > 0) {
      buffer_.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    const std::string why = n == 0 ? "server closed the connection" : errno_text();
    close_fd(fd_);
    throw TransportError("no reply: " + why);
  }
}

protocol::LocateOk LocationClient::locate(const ScanObservation& obs, std::int64_t k) {
  const std::string reply = exchange(protocol::encode_request(protocol::make_request(obs, k)));
  protocol::Response resp;
  try {
    resp = protocol::decode_response(reply);
  } catch (const ParseError& e) {
    throw TransportError(std::string("malformed reply: ") + e.what());
  }
  if (auto* err = std::get_if<protocol::ErrorReply>(&resp)) throw ServiceError(std::move(*err));
  return std::get<protocol::LocateOk>(resp);
}

protocol::LocateOk request_locate(const Endpoint& endpoint, const ScanObservation& obs,
                                  std::int64_t k, std::chrono::milliseconds timeout) {
  LocationClient client(endpoint, timeout);
  return client.locate(obs, k);
}

}  // namespace wlanloc
