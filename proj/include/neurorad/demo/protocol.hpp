#pragma once

// Line-delimited text frames exchanged with demo clients.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/gesture.hpp"

namespace neurorad::demo {

inline constexpr int kProtocolVersion = 1;

enum class SessionMode { Pointer, Replay };

inline std::string_view token(SessionMode m) noexcept {
  return m == SessionMode::Pointer ? "pointer" : "replay";
}

struct HelloMsg { std::string version; };
struct ModeMsg { SessionMode mode; };
struct PointerMsg { double t_ms; double x; double y; };
struct ReplayMsg { GestureClass cls; std::uint64_t seed; };
struct ByeMsg {};

using ClientMessage = std::variant<HelloMsg, ModeMsg, PointerMsg, ReplayMsg, ByeMsg>;

/// Parse failure with the error code and text to send back.
struct ProtocolFault {
  std::string code;
  std::string text;
};

using ParseResult = std::variant<ClientMessage, ProtocolFault>;

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

inline ParseResult parse_client_frame(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  const auto w = split_words(line);
  auto fault = [](std::string text) { return ProtocolFault{"protocol", std::move(text)}; };
  if (w.empty()) return fault("empty frame");
  const auto verb = w[0];
  auto arity = [&](std::size_t n) { return w.size() == n + 1; };

  if (verb == "HELLO") {
    if (!arity(1)) return fault("usage: HELLO <ver>");
    return ClientMessage{HelloMsg{std::string(w[1])}};
  }
  if (verb == "MODE") {
    if (!arity(1)) return fault("usage: MODE pointer|replay");
    if (w[1] == "pointer") return ClientMessage{ModeMsg{SessionMode::Pointer}};
    if (w[1] == "replay") return ClientMessage{ModeMsg{SessionMode::Replay}};
    return fault("unknown mode '" + std::string(w[1]) + "'");
  }
  if (verb == "PTR") {
    if (!arity(3)) return fault("usage: PTR <t_ms> <x> <y>");
    auto t = parse_number<double>(w[1]);
    auto x = parse_number<double>(w[2]);
    auto y = parse_number<double>(w[3]);
    if (!t || !x || !y) return fault("PTR fields must be finite numbers");
    return ClientMessage{PointerMsg{*t, *x, *y}};
  }
  if (verb == "REPLAY") {
    if (!arity(2)) return fault("usage: REPLAY <class_id> <seed>");
    auto c = parse_number<unsigned>(w[1]);
    auto seed = parse_number<std::uint64_t>(w[2]);
    if (!c || *c >= kGestureCount) return fault("class_id must be 0-4");
    if (!seed) return fault("seed must be an unsigned integer");
    return ClientMessage{ReplayMsg{*gesture_from_code(static_cast<long>(*c)), *seed}};
  }
  if (verb == "BYE") {
    if (!arity(0)) return fault("usage: BYE");
    return ClientMessage{ByeMsg{}};
  }
  return fault("unknown verb '" + std::string(verb) + "'");
}

inline std::string ready_frame(std::uint64_t id) { return "READY " + std::to_string(id); }

inline std::string warn_frame(std::string_view code, std::string_view text) {
  return "WARN " + std::string(code) + " " + std::string(text);
}

inline std::string err_frame(std::string_view code, std::string_view text) {
  return "ERR " + std::string(code) + " " + std::string(text);
}

inline std::string label_frame(std::int64_t t_ms, GestureClass cls, double confidence) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "LBL %lld %u %.3f", static_cast<long long>(t_ms),
                static_cast<unsigned>(code(cls)), confidence);
  return buf;
}

inline std::string event_batch_frame(std::span<const EventRecord> events) {
  std::string s = "EVTB " + std::to_string(events.size());
  for (const auto& e : events) {
    s += ' ';
    s += std::to_string(e.t_ticks);
    s += e.polarity > 0 ? " 1" : " -1";
  }
  return s;
}

/// Splits `events` into EVTB frames holding at most `max_per_frame` events.
inline std::vector<std::string> event_batch_frames(std::span<const EventRecord> events,
                                                   std::size_t max_per_frame = 256) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < events.size(); i += max_per_frame)
    out.push_back(event_batch_frame(events.subspan(i, std::min(max_per_frame, events.size() - i))));
  return out;
}

/// Server frames as seen by a client. Used by tests and the replay tool.
struct LabelFrame {
  std::int64_t t_ms;
  GestureClass cls;
  double confidence;
};

inline std::optional<LabelFrame> parse_label_frame(std::string_view line) {
  const auto w = split_words(line);
  if (w.size() != 4 || w[0] != "LBL") return std::nullopt;
  auto t = parse_number<std::int64_t>(w[1]);
  auto c = parse_number<unsigned>(w[2]);
  auto conf = parse_number<double>(w[3]);
  if (!t || !c || !conf || *c >= kGestureCount) return std::nullopt;
  return LabelFrame{*t, *gesture_from_code(static_cast<long>(*c)), *conf};
}

inline std::optional<std::vector<EventRecord>> parse_event_batch_frame(std::string_view line) {
  const auto w = split_words(line);
  if (w.size() < 2 || w[0] != "EVTB") return std::nullopt;
  auto n = parse_number<std::size_t>(w[1]);
  if (!n || w.size() != 2 + 2 * *n) return std::nullopt;
  std::vector<EventRecord> out;
  for (std::size_t i = 0; i < *n; ++i) {
    auto t = parse_number<std::uint64_t>(w[2 + 2 * i]);
    auto p = parse_number<int>(w[3 + 2 * i]);
    if (!t || !p || (*p != 1 && *p != -1)) return std::nullopt;
    out.push_back({*t, static_cast<std::int8_t>(*p)});
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) noexcept {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace neurorad::demo
