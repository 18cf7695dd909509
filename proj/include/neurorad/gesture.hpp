#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "neurorad/error.hpp"

namespace neurorad {

// Codes are stable across NRAD files, manifests and wire frames.
enum class GestureClass : std::uint8_t {
  PushPull = 0,
  SlowWave = 1,
  FastWave = 2,
  UpDown = 3,
  NoActivity = 4,
};

inline constexpr std::size_t kGestureCount = 5;

inline constexpr std::array<GestureClass, kGestureCount> kAllGestures = {
    GestureClass::PushPull, GestureClass::SlowWave, GestureClass::FastWave,
    GestureClass::UpDown, GestureClass::NoActivity};

constexpr int code(GestureClass g) noexcept { return static_cast<int>(g); }

inline std::optional<GestureClass> gesture_from_code(long c) noexcept {
  if (c < 0 || c >= static_cast<long>(kGestureCount)) return std::nullopt;
  return static_cast<GestureClass>(c);
}

/// Kebab-case token used on the command line and in manifest ids.
constexpr std::string_view token(GestureClass g) noexcept {
  switch (g) {
    case GestureClass::PushPull: return "push-pull";
    case GestureClass::SlowWave: return "slow-wave";
    case GestureClass::FastWave: return "fast-wave";
    case GestureClass::UpDown: return "up-down";
    case GestureClass::NoActivity: return "no-activity";
  }
  return "unknown";
}

constexpr bool is_transverse(GestureClass g) noexcept {
  return g == GestureClass::SlowWave || g == GestureClass::FastWave ||
         g == GestureClass::UpDown;
}

/// Accepts either the kebab-case token or the integer code.
inline GestureClass parse_gesture(std::string_view text) {
  for (auto g : kAllGestures) {
    if (text == token(g)) return g;
  }
  if (text.size() == 1 && text[0] >= '0' && text[0] <= '4') {
    return static_cast<GestureClass>(text[0] - '0');
  }
  throw ValidationError("unknown gesture class '" + std::string(text) + "'");
}

}  // namespace neurorad
