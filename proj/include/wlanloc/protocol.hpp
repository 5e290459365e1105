#pragma once

// Line protocol between scanning clients and the location server.
//
//   request:  LOCATE k=<k> <mac>=<rssi>[,<mac>=<rssi>]*
//   reply:    OK x=<x> y=<y> k=<k_used>      (x, y with exactly two decimals)
//             ERR <code> <word>
//
// A request without readings is written "LOCATE k=<k>". Lines end in LF; a
// trailing CR is tolerated on input.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wlanloc/core.hpp"

namespace wlanloc::protocol {

struct MacRssi {
  MacAddress mac;
  double rssi_dbm{0.0};

  friend bool operator==(const MacRssi&, const MacRssi&) = default;
};

struct LocateRequest {
  /// Any integer is syntactically valid; the server rejects k < 1.
  std::int64_t k{1};
  std::vector<MacRssi> readings;

  friend bool operator==(const LocateRequest&, const LocateRequest&) = default;
};

struct LocateOk {
  double x{0.0};
  double y{0.0};
  std::uint64_t k_used{0};

  friend bool operator==(const LocateOk&, const LocateOk&) = default;
};

struct ErrorReply {
  int code{400};
  std::string reason;

  friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

using Response = std::variant<LocateOk, ErrorReply>;

/// Reason tokens used by the server.
inline constexpr std::string_view kReasonParse = "parse";
inline constexpr std::string_view kReasonBadK = "bad-k";
inline constexpr std::string_view kReasonTooLong = "too-long";
inline constexpr std::string_view kReasonInternal = "internal";

/// RSSI values are written in the shortest fixed notation that reads back to
/// the same double, always with a decimal point.
[[nodiscard]] std::string encode_request(const LocateRequest& req);

/// Rejects any deviation from the grammar, duplicate MACs, more than 64
/// readings and non-plain numbers. Throws ParseError.
[[nodiscard]] LocateRequest decode_request(std::string_view line);

[[nodiscard]] std::string encode_response(const Response& resp);

/// Throws ParseError.
[[nodiscard]] Response decode_response(std::string_view line);

[[nodiscard]] LocateRequest make_request(const ScanObservation& obs, std::int64_t k);

/// Readings become hidden passive observations; the wire carries no ESSIDs.
[[nodiscard]] ScanObservation to_observation(const LocateRequest& req);

[[nodiscard]] LocateOk to_reply(const PositionEstimate& est);

}  // namespace wlanloc::protocol
