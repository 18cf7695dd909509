#pragma once

// Per-client demo session: protocol state machine, input staging, the live
// pipeline, debouncing and the player.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neurorad/dataset.hpp"
#include "neurorad/demo/live_pipeline.hpp"
#include "neurorad/demo/player.hpp"
#include "neurorad/demo/protocol.hpp"
#include "neurorad/error.hpp"
#include "neurorad/radar_synth.hpp"
#include "neurorad/rng.hpp"

namespace neurorad::demo {

class SessionRegistry {
 public:
  explicit SessionRegistry(std::size_t capacity = 16) : capacity_(capacity) {}

  std::optional<std::uint64_t> acquire() {
    std::lock_guard lock(mu_);
    if (active_.size() >= capacity_) return std::nullopt;
    const auto id = next_id_++;
    active_.insert(id);
    return id;
  }

  void release(std::uint64_t id) {
    std::lock_guard lock(mu_);
    active_.erase(id);
  }

  std::size_t active() const {
    std::lock_guard lock(mu_);
    return active_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::uint64_t next_id_ = 1;
  std::set<std::uint64_t> active_;
};

/// Serial-style label sink: one class byte followed by '\n' per label.
class UartMirror {
 public:
  explicit UartMirror(const std::string& path) : out_(path, std::ios::binary | std::ios::app) {
    if (!out_) throw IoError(path, "cannot open UART sink");
  }

  void write(GestureClass cls) {
    std::lock_guard lock(mu_);
    const char bytes[2] = {static_cast<char>(code(cls)), '\n'};
    out_.write(bytes, 2);
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

inline std::vector<std::uint8_t> uart_bytes(GestureClass cls) { return {static_cast<std::uint8_t>(code(cls)), '\n'}; }

struct PointerMapping {
  double radial_base = 0.8;
  double radial_gain = 0.6;
  double lateral_gain = 0.6;
  double lowpass_hz = 5.0;
  double hold_latency = 0.1;  // seconds before a silent pointer counts as stationary
};

inline double pointer_range(double x, double y, const PointerMapping& m = {}) noexcept {
  const double r = m.radial_base - m.radial_gain * y;
  const double xm = m.lateral_gain * (x - 0.5);
  return std::sqrt(r * r + xm * xm);
}

struct SessionConfig {
  LiveConfig live{};
  DebounceConfig debounce{};
  double idle_mute_seconds = 30.0;
  double replay_duration = 3.0;
  double replay_snr_db = 20.0;
  std::size_t max_events_per_frame = 256;
  PointerMapping pointer{};
  std::function<void(GestureClass)> uart;  // label mirror, empty when disabled
};

enum class Outcome { StateChange, Warning, Error };

struct HandleResult {
  Outcome outcome = Outcome::StateChange;
  std::vector<std::string> frames;
  bool close = false;
};

/// Deterministic replay signal for a class and seed.
inline SampledSignal replay_signal(GestureClass cls, std::uint64_t seed, double duration,
                                   double snr_db, const RadarConfig& radar) {
  const auto& profile = kUserProfiles[seed % kUserProfiles.size()];
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(code(cls)), 2}));
  const auto params = draw_params(cls, profile, rng, duration, snr_db);
  const auto traj = gesture_trajectory(cls, params, derive_seed(seed, {static_cast<std::uint64_t>(code(cls)), 0}));
  return synthesize_if(traj, radar, snr_db, derive_seed(seed, {static_cast<std::uint64_t>(code(cls)), 1}));
}

class Session {
 public:
  Session(SessionConfig cfg, std::shared_ptr<const QuantModel> model,
          std::shared_ptr<SessionRegistry> registry, std::uint64_t seed = 0)
      : cfg_(std::move(cfg)),
        model_(std::move(model)),
        registry_(std::move(registry)),
        seed_(seed),
        debouncer_(cfg_.debounce),
        idle_(cfg_.idle_mute_seconds) {}

  ~Session() { release(); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  HandleResult handle(std::string_view line) {
    auto parsed = parse_client_frame(line);
    if (auto* f = std::get_if<ProtocolFault>(&parsed)) return error(f->code, f->text);
    return std::visit([this](const auto& m) { return on(m); }, std::get<ClientMessage>(parsed));
  }

  /// Advances the session clock by `dt` seconds and returns the frames the
  /// pipeline produced meanwhile.
  std::vector<std::string> tick(double dt) {
    std::vector<std::string> out;
    if (!pipeline_ || closed_) return out;
    clock_ += dt;
    try {
      advance(out);
    } catch (const std::exception& e) {
      out.push_back(err_frame("internal", e.what()));
      reset_pipeline();
    }
    return out;
  }

  std::optional<std::uint64_t> id() const noexcept { return id_; }
  std::optional<SessionMode> mode() const noexcept { return mode_; }
  const PlayerState& player() const noexcept { return player_; }
  bool closed() const noexcept { return closed_; }
  double clock() const noexcept { return clock_; }
  std::size_t dropped_pointer_frames() const noexcept { return dropped_pointer_; }
  std::size_t classifier_calls() const noexcept {
    return retired_calls_ + (pipeline_ ? pipeline_->counters().classifier_calls : 0);
  }
  std::size_t events_emitted() const noexcept { return events_emitted_; }
  /// True once an active replay has delivered all of its samples.
  bool replay_finished() const noexcept {
    return mode_ == SessionMode::Replay && replay_pos_ >= replay_.size();
  }

 private:
  HandleResult on(const HelloMsg&) {
    if (closed_) return error("state", "session closed");
    if (id_) return warning("hello", "already greeted");
    id_ = registry_ ? registry_->acquire() : std::optional<std::uint64_t>(1);
    if (!id_) return error("busy", "session capacity reached");
    HandleResult r;
    r.frames.push_back(ready_frame(*id_));
    return r;
  }

  HandleResult on(const ModeMsg& m) {
    if (auto bad = require_open()) return *bad;
    mode_ = m.mode;
    replay_.clear();
    replay_pos_ = 0;
    pointer_.clear();
    reset_pipeline();
    return {};
  }

  HandleResult on(const PointerMsg& m) {
    if (auto bad = require_open()) return *bad;
    if (mode_ != SessionMode::Pointer) return error("state", "PTR requires pointer mode");
    const double t = m.t_ms / 1000.0;
    if (last_ptr_t_ && t <= *last_ptr_t_) {
      ++dropped_pointer_;
      return warning("order", "non-monotone t_ms dropped (" + std::to_string(dropped_pointer_) +
                                  " total)");
    }
    const double x = std::clamp(m.x, 0.0, 1.0);
    const double y = std::clamp(m.y, 0.0, 1.0);
    if (!ptr_offset_) ptr_offset_ = pipeline_->seconds() - t;
    last_ptr_t_ = t;
    double staged = t + *ptr_offset_;
    if (!pointer_.empty()) staged = std::max(staged, pointer_.back().t + 1e-6);
    pointer_.push_back({staged, pointer_range(x, y, cfg_.pointer)});
    if (x != m.x || y != m.y) return warning("range", "pointer coordinates clamped to [0,1]");
    return {};
  }

  HandleResult on(const ReplayMsg& m) {
    if (auto bad = require_open()) return *bad;
    if (mode_ != SessionMode::Replay) return error("state", "REPLAY requires replay mode");
    reset_pipeline();
    replay_ = replay_signal(m.cls, m.seed, cfg_.replay_duration, cfg_.replay_snr_db,
                            cfg_.live.radar)
                  .samples;
    replay_pos_ = 0;
    return {};
  }

  HandleResult on(const ByeMsg&) {
    if (closed_) return error("state", "session closed");
    release();
    closed_ = true;
    HandleResult r;
    r.close = true;
    return r;
  }

  std::optional<HandleResult> require_open() {
    if (closed_) return error("state", "session closed");
    if (!id_) return error("state", "HELLO required");
    return std::nullopt;
  }

  static HandleResult error(std::string_view code, std::string_view text) {
    return {Outcome::Error, {err_frame(code, text)}, false};
  }
  static HandleResult warning(std::string_view code, std::string_view text) {
    return {Outcome::Warning, {warn_frame(code, text)}, false};
  }

  void release() {
    if (id_ && registry_ && !closed_) registry_->release(*id_);
  }

  void reset_pipeline() {
    if (pipeline_) retired_calls_ += pipeline_->counters().classifier_calls;
    base_ = clock_;
    pipeline_ = std::make_unique<LivePipeline>(cfg_.live, model_,
                                               derive_seed(seed_, {++pipeline_generation_}));
    grid_next_ = 0;
    grid_started_ = false;
    lowpass_.reset();
    ptr_offset_.reset();
    last_ptr_t_.reset();
    pointer_.clear();
  }

  std::uint64_t target_samples() const {
    return static_cast<std::uint64_t>(std::floor((clock_ - base_) * cfg_.live.radar.sim_rate + 1e-9));
  }

  void advance(std::vector<std::string>& out) {
    auto& p = *pipeline_;
    const auto target = target_samples();
    if (mode_ == SessionMode::Replay) {
      while (replay_pos_ < replay_.size() && p.clock_samples() < target)
        p.push_if_sample(replay_[replay_pos_++]);
    } else if (mode_ == SessionMode::Pointer) {
      feed_pointer(target);
    }
    if (p.clock_samples() < target && (mode_ != SessionMode::Pointer || pointer_.empty()))
      p.idle(target - p.clock_samples());

    const auto events = p.take_new_events();
    events_emitted_ += events.size();
    for (auto& f : event_batch_frames(events, cfg_.max_events_per_frame)) out.push_back(std::move(f));

    for (const auto& d : p.evaluate_due()) {
      const double t = base_ + d.t_seconds;
      out.push_back(label_frame(std::llround(t * 1000.0), d.label, d.confidence));
      if (cfg_.uart) cfg_.uart(d.label);
      if (auto fired = debouncer_.push(d.label, t)) apply(*fired, out);
      if (idle_.push(d.label, t)) apply(GestureClass::NoActivity, out);
    }
  }

  void apply(GestureClass cls, std::vector<std::string>& out) {
    auto r = map_gesture_to_control(cls, player_);
    player_ = r.state;
    for (auto& f : r.frames) out.push_back(std::move(f));
  }

  // Resamples staged pointer ranges onto the trajectory grid, low-passes them
  // and hands them to the pipeline. A pointer that has gone quiet is held.
  void feed_pointer(std::uint64_t target) {
    if (pointer_.empty()) return;
    auto& p = *pipeline_;
    const double now = static_cast<double>(target) / cfg_.live.radar.sim_rate;
    if (pointer_.back().t < now - cfg_.pointer.hold_latency)
      pointer_.push_back({now - cfg_.pointer.hold_latency, pointer_.back().r});
    const double step = 1.0 / kTrajectoryRate;
    const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * cfg_.pointer.lowpass_hz * step);
    if (!grid_started_) {
      grid_started_ = true;
      grid_next_ = pointer_.front().t;
    }
    while (grid_next_ <= pointer_.back().t) {
      while (pointer_.size() >= 2 && pointer_[1].t <= grid_next_) pointer_.pop_front();
      double r = pointer_.front().r;
      if (pointer_.size() >= 2 && grid_next_ > pointer_[0].t) {
        const auto& a0 = pointer_[0];
        const auto& a1 = pointer_[1];
        r = a0.r + (grid_next_ - a0.t) / (a1.t - a0.t) * (a1.r - a0.r);
      }
      lowpass_ = lowpass_ ? *lowpass_ + a * (r - *lowpass_) : r;
      p.push_range(*lowpass_);
      grid_next_ += step;
    }
  }

  struct StagedPoint {
    double t;  // pipeline seconds
    double r;  // effective range, m
  };

  SessionConfig cfg_;
  std::shared_ptr<const QuantModel> model_;
  std::shared_ptr<SessionRegistry> registry_;
  std::uint64_t seed_;
  std::optional<std::uint64_t> id_;
  std::optional<SessionMode> mode_;
  bool closed_ = false;
  PlayerState player_{};
  Debouncer debouncer_;
  IdleTracker idle_;
  std::unique_ptr<LivePipeline> pipeline_;
  std::uint64_t pipeline_generation_ = 0;
  std::size_t retired_calls_ = 0;
  std::size_t events_emitted_ = 0;
  double clock_ = 0.0;
  double base_ = 0.0;
  std::vector<double> replay_;
  std::size_t replay_pos_ = 0;
  std::deque<StagedPoint> pointer_;
  std::optional<double> ptr_offset_;
  std::optional<double> last_ptr_t_;
  std::size_t dropped_pointer_ = 0;
  double grid_next_ = 0.0;
  bool grid_started_ = false;
  std::optional<double> lowpass_;
};

}  // namespace neurorad::demo
