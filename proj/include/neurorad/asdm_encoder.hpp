#pragma once

// Asynchronous sigma-delta (level-crossing) encoder: turns a sampled voltage
// into sparse +1/-1 events timestamped on a fixed-rate tick clock.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "neurorad/error.hpp"
#include "neurorad/radar_synth.hpp"

namespace neurorad {

enum class EncoderMode {
  SampleAndUpdate,       // v_ref <- V_in at the event
  InterpolatedCrossing,  // v_ref <- v_ref +/- delta, sub-sample timestamp
};

struct EncoderConfig {
  double delta = 0.7;  // volts
  EncoderMode mode = EncoderMode::SampleAndUpdate;
  double tick_rate = 125e6;
  std::optional<double> v_ref_init;  // first sample when unset
};

struct EventRecord {
  std::uint64_t t_ticks = 0;
  std::int8_t polarity = 1;

  friend auto operator<=>(const EventRecord&, const EventRecord&) = default;
};

struct EventStream {
  double tick_rate = 125e6;
  std::vector<EventRecord> events;
  std::uint64_t duration_ticks = 0;

  double duration_seconds() const noexcept {
    return static_cast<double>(duration_ticks) / tick_rate;
  }
  friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Nearest tick for a time in seconds; ties round up.
inline std::uint64_t to_ticks(double seconds, double tick_rate) noexcept {
  return static_cast<std::uint64_t>(std::floor(seconds * tick_rate + 0.5));
}

inline std::uint64_t seconds_to_ticks(double seconds, double tick_rate = 125e6) {
  return to_ticks(seconds, tick_rate);
}

inline bool is_strictly_sorted(const std::vector<EventRecord>& events) noexcept {
  return std::adjacent_find(events.begin(), events.end(),
                            [](const EventRecord& a, const EventRecord& b) {
                              return a.t_ticks >= b.t_ticks;
                            }) == events.end();
}

inline void validate(const EncoderConfig& cfg, double sample_rate) {
  if (!(std::isfinite(cfg.delta) && cfg.delta > 0.0))
    throw ConfigError("encoder delta must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(cfg.tick_rate >= 2.0 * sample_rate))
    throw ConfigError("tick_rate must be at least twice the sample rate");
  if (cfg.v_ref_init && !std::isfinite(*cfg.v_ref_init))
    throw ConfigError("v_ref_init must be finite");
}

/// Streaming encoder state machine. Feed samples in time order; at most one
/// event comes out per sample.
class Encoder {
 public:
  Encoder(EncoderConfig cfg, double sample_rate)
      : cfg_(cfg), sample_rate_(sample_rate) {
    validate(cfg_, sample_rate_);
    if (cfg_.v_ref_init) v_ref_ = *cfg_.v_ref_init;
  }

  std::optional<EventRecord> push(double v) {
    const std::size_t k = index_++;
    if (!std::isfinite(v)) throw EncodingError(k);
    if (!primed_) {
      primed_ = true;
      if (!cfg_.v_ref_init) v_ref_ = v;
    }
    const double prev = has_prev_ ? prev_ : v;
    const bool had_prev = has_prev_;
    prev_ = v;
    has_prev_ = true;

    std::int8_t polarity = 0;
    if (v >= v_ref_ + cfg_.delta) {
      polarity = 1;
    } else if (v <= v_ref_ - cfg_.delta) {
      polarity = -1;
    } else {
      return std::nullopt;
    }

    double when = static_cast<double>(k);
    if (cfg_.mode == EncoderMode::SampleAndUpdate) {
      v_ref_ = v;
    } else {
      const double level = v_ref_ + polarity * cfg_.delta;
      if (had_prev && v != prev) {
        const double frac = std::clamp((level - prev) / (v - prev), 0.0, 1.0);
        when = static_cast<double>(k) - 1.0 + frac;
      }
      v_ref_ = level;
    }
    std::uint64_t t = to_ticks(when / sample_rate_, cfg_.tick_rate);
    if (last_ticks_ && t <= *last_ticks_) t = *last_ticks_ + 1;
    last_ticks_ = t;
    return EventRecord{t, polarity};
  }

  /// Advances the clock by `n` unobserved samples (no input, no events).
  void skip(std::size_t n) noexcept {
    index_ += n;
    has_prev_ = false;
  }

  double v_ref() const noexcept { return v_ref_; }
  std::size_t samples_seen() const noexcept { return index_; }
  const EncoderConfig& config() const noexcept { return cfg_; }
  double sample_rate() const noexcept { return sample_rate_; }

  /// Tick position of the boundary after `n` samples.
  std::uint64_t ticks_for_samples(std::size_t n) const noexcept {
    return to_ticks(static_cast<double>(n) / sample_rate_, cfg_.tick_rate);
  }

 private:
  EncoderConfig cfg_;
  double sample_rate_;
  double v_ref_ = 0.0;
  double prev_ = 0.0;
  bool primed_ = false;
  bool has_prev_ = false;
  std::size_t index_ = 0;
  std::optional<std::uint64_t> last_ticks_;
};

inline EventStream encode(const SampledSignal& signal, const EncoderConfig& cfg) {
  if (signal.samples.empty()) throw ContractError("cannot encode an empty signal");
  Encoder enc(cfg, signal.sample_rate);
  EventStream out;
  out.tick_rate = cfg.tick_rate;
  for (double v : signal.samples) {
    if (auto ev = enc.push(v)) out.events.push_back(*ev);
  }
  out.duration_ticks = enc.ticks_for_samples(signal.samples.size());
  return out;
}

/// Staircase estimate: v0 plus polarity*delta for every event at or before
/// each grid instant t_j = j / grid_rate.
inline SampledSignal reconstruct(const EventStream& stream, double delta, double v0,
                                 double grid_rate, std::size_t n_grid) {
  if (!is_strictly_sorted(stream.events))
    throw ContractError("reconstruct requires a strictly increasing stream");
  if (!(grid_rate > 0.0)) throw ContractError("grid rate must be positive");
  SampledSignal out;
  out.sample_rate = grid_rate;
  out.samples.resize(n_grid);
  std::size_t next = 0;
  long level = 0;
  for (std::size_t j = 0; j < n_grid; ++j) {
    const auto t = to_ticks(static_cast<double>(j) / grid_rate, stream.tick_rate);
    while (next < stream.events.size() && stream.events[next].t_ticks <= t) {
      level += stream.events[next].polarity;
      ++next;
    }
    out.samples[j] = v0 + delta * static_cast<double>(level);
  }
  return out;
}

struct EventStats {
  std::size_t count = 0;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  double mean_rate_hz = 0.0;
  std::uint64_t max_isi_ticks = 0;
};

inline EventStats event_stats(const EventStream& stream) {
  EventStats s;
  s.count = stream.events.size();
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& e = stream.events[i];
    (e.polarity > 0 ? s.pos_count : s.neg_count) += 1;
    if (i > 0)
      s.max_isi_ticks =
          std::max(s.max_isi_ticks, e.t_ticks - stream.events[i - 1].t_ticks);
  }
  const double seconds = stream.duration_seconds();
  s.mean_rate_hz = seconds > 0.0 ? static_cast<double>(s.count) / seconds : 0.0;
  return s;
}

inline EventStream negate(EventStream s) {
  for (auto& e : s.events) e.polarity = static_cast<std::int8_t>(-e.polarity);
  return s;
}

}  // namespace neurorad
