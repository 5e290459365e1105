#include "wlanloc/protocol.hpp"

#include <set>

#include "wlanloc/text.hpp"

namespace wlanloc::protocol {

namespace {

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

/// Splits on single spaces; empty fields (double spaces, leading or trailing
/// spaces) are grammar violations and surface as empty views.
std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto sp = line.find(' ', start);
    out.push_back(line.substr(start, sp == std::string_view::npos ? sp : sp - start));
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  return out;
}

[[noreturn]] void reject(const std::string& why) { throw ParseError(0, why); }

std::string_view keyed(std::string_view field, std::string_view key) {
  if (!text::starts_with(field, key)) reject("expected '" + std::string(key) + "'");
  return field.substr(key.size());
}

bool is_digits(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

bool is_reason_word(std::string_view s) {
  return !s.empty() && s.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") ==
                           std::string_view::npos;
}

/// Exactly two decimals: -?digits.dd
std::optional<double> parse_centi(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos || s.size() - dot != 3) return std::nullopt;
  return text::parse_plain_decimal(s);
}

}  // namespace

std::string encode_request(const LocateRequest& req) {
  std::string out = "LOCATE k=" + std::to_string(req.k);
  for (std::size_t i = 0; i < req.readings.size(); ++i) {
    out += i == 0 ? ' ' : ',';
    out += req.readings[i].mac.to_string();
    out += '=';
    out += text::format_decimal(req.readings[i].rssi_dbm);
  }
  return out;
}

LocateRequest decode_request(std::string_view line) {
  const auto f = fields(chomp(line));
  if (f.size() < 2 || f.size() > 3 || f[0] != "LOCATE") reject("expected 'LOCATE k=<k> ...'");

  const auto k_text = keyed(f[1], "k=");
  const bool negative = !k_text.empty() && k_text.front() == '-';
  if (!is_digits(negative ? k_text.substr(1) : k_text)) reject("k must be an integer");
  const auto k = text::parse_int(k_text);
  if (!k) reject("k out of range");

  LocateRequest req{*k, {}};
  if (f.size() == 2) return req;

  std::set<MacAddress> seen;
  std::string_view list = f[2];
  while (true) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) reject("expected <mac>=<rssi>");
    const auto mac = MacAddress::parse(item.substr(0, eq));
    if (!mac) reject("malformed MAC");
    const auto rssi = text::parse_plain_decimal(item.substr(eq + 1));
    if (!rssi) reject("malformed RSSI");
    if (!seen.insert(*mac).second) reject("duplicate MAC " + mac->to_string());
    req.readings.push_back(MacRssi{*mac, *rssi});
    if (req.readings.size() > kMaxScanEntries) reject("more than 64 readings");
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return req;
}

std::string encode_response(const Response& resp) {
  if (const auto* ok = std::get_if<LocateOk>(&resp)) {
    return "OK x=" + text::format_fixed(ok->x, 2) + " y=" + text::format_fixed(ok->y, 2) +
           " k=" + std::to_string(ok->k_used);
  }
  const auto& err = std::get<ErrorReply>(resp);
  return "ERR " + std::to_string(err.code) + " " + err.reason;
}

Response decode_response(std::string_view line) {
  const auto f = fields(chomp(line));
  if (f.size() == 4 && f[0] == "OK") {
    const auto x = parse_centi(keyed(f[1], "x="));
    const auto y = parse_centi(keyed(f[2], "y="));
    const auto k_text = keyed(f[3], "k=");
    if (!x || !y) reject("coordinates must carry exactly two decimals");
    if (!is_digits(k_text)) reject("k must be a non-negative integer");
    const auto k = text::parse_uint(k_text);
    if (!k) reject("k out of range");
    return LocateOk{*x, *y, *k};
  }
  if (f.size() == 3 && f[0] == "ERR") {
    if (f[1].size() != 3 || !is_digits(f[1])) reject("error code must be three digits");
    if (!is_reason_word(f[2])) reject("error reason must be a single word");
    return ErrorReply{static_cast<int>(*text::parse_int(f[1])), std::string(f[2])};
  }
  reject("expected 'OK ...' or 'ERR ...'");
}

LocateRequest make_request(const ScanObservation& obs, std::int64_t k) {
  LocateRequest req{k, {}};
  req.readings.reserve(obs.size());
  for (const auto& r : obs.readings()) req.readings.push_back(MacRssi{r.mac, r.rssi_dbm});
  return req;
}

ScanObservation to_observation(const LocateRequest& req) {
  std::vector<Reading> readings;
  readings.reserve(req.readings.size());
  for (const auto& r : req.readings) readings.push_back(Reading{r.mac, std::nullopt, r.rssi_dbm});
  return ScanObservation{std::move(readings), ScanMode::passive};
}

LocateOk to_reply(const PositionEstimate& est) {
  return LocateOk{est.pos.x, est.pos.y, est.k_used()};
}

}  // namespace wlanloc::protocol
