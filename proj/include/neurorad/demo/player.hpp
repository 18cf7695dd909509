#pragma once

// Mock media player driven by debounced gestures.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "neurorad/gesture.hpp"

namespace neurorad::demo {

struct PlayerState {
  bool playing = false;
  int volume = 50;  // 0..100 in steps of 25
  bool muted = false;
  double position = 0.0;  // seconds

  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

inline constexpr double kSeekStepSeconds = 10.0;
inline constexpr int kVolumeStep = 25;

struct ControlOutcome {
  PlayerState state;
  std::vector<std::string> frames;  // CTL frames, in order
};

/// PushPull toggles play/pause, SlowWave seeks back 10 s (floored at 0),
/// FastWave seeks forward 10 s, UpDown steps the volume by 25 wrapping 100->0,
/// and NoActivity (the sustained-idle signal) mutes. Any gesture while muted
/// unmutes first.
inline ControlOutcome map_gesture_to_control(GestureClass label, PlayerState s) {
  ControlOutcome out;
  if (label == GestureClass::NoActivity) {
    if (!s.muted) {
      s.muted = true;
      out.frames.push_back("CTL MUTE 1");
    }
    out.state = s;
    return out;
  }
  if (s.muted) {
    s.muted = false;
    out.frames.push_back("CTL MUTE 0");
  }
  switch (label) {
    case GestureClass::PushPull:
      s.playing = !s.playing;
      out.frames.push_back("CTL PLAYPAUSE");
      break;
    case GestureClass::SlowWave:
      s.position = std::max(0.0, s.position - kSeekStepSeconds);
      out.frames.push_back("CTL SEEK -10");
      break;
    case GestureClass::FastWave:
      s.position += kSeekStepSeconds;
      out.frames.push_back("CTL SEEK +10");
      break;
    case GestureClass::UpDown:
      s.volume = s.volume >= 100 ? 0 : s.volume + kVolumeStep;
      out.frames.push_back("CTL VOL " + std::to_string(s.volume));
      break;
    case GestureClass::NoActivity:
      break;
  }
  out.state = s;
  return out;
}

struct DebounceConfig {
  std::size_t run_length = 3;
  double cooldown_seconds = 1.0;
};

/// Fires once per run of `run_length` identical non-NoActivity labels, and
/// only if the cooldown since the previous fire has elapsed.
class Debouncer {
 public:
  explicit Debouncer(DebounceConfig cfg = {}) : cfg_(cfg) {}

  std::optional<GestureClass> push(GestureClass label, double t_seconds) {
    if (run_len_ > 0 && label == run_label_) {
      ++run_len_;
    } else {
      run_label_ = label;
      run_len_ = 1;
      run_fired_ = false;
    }
    if (label == GestureClass::NoActivity || run_fired_ || run_len_ < cfg_.run_length)
      return std::nullopt;
    if (has_fired_ && t_seconds - last_fire_ < cfg_.cooldown_seconds) return std::nullopt;
    run_fired_ = true;
    has_fired_ = true;
    last_fire_ = t_seconds;
    return label;
  }

  void reset() {
    run_len_ = 0;
    run_fired_ = false;
    has_fired_ = false;
  }

 private:
  DebounceConfig cfg_;
  GestureClass run_label_ = GestureClass::NoActivity;
  std::size_t run_len_ = 0;
  bool run_fired_ = false;
  bool has_fired_ = false;
  double last_fire_ = 0.0;
};

/// Signals once when NoActivity labels have persisted for `hold_seconds`.
class IdleTracker {
 public:
  explicit IdleTracker(double hold_seconds = 30.0) : hold_(hold_seconds) {}

  bool push(GestureClass label, double t_seconds) {
    if (label != GestureClass::NoActivity) {
      idle_ = false;
      fired_ = false;
      return false;
    }
    if (!idle_) {
      idle_ = true;
      since_ = t_seconds;
    }
    if (!fired_ && t_seconds - since_ >= hold_) {
      fired_ = true;
      return true;
    }
    return false;
  }

 private:
  double hold_;
  bool idle_ = false;
  double since_ = 0.0;
  bool fired_ = false;
};

}  // namespace neurorad::demo
