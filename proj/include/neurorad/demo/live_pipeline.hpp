#pragma once

// Streaming synthesis -> encode -> gate -> featurize -> infer chain for one
// live session. The classifier runs only when the gate opens.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/event_pipeline.hpp"
#include "neurorad/radar_synth.hpp"
#include "neurorad/rng.hpp"
#include "neurorad/tiny_classifier.hpp"

namespace neurorad::demo {

struct LiveConfig {
  RadarConfig radar{};
  EncoderConfig encoder{};
  GateConfig gate{};
  double snr_db = 20.0;
  double span_seconds = kWindowSpanSeconds;
  double hop_seconds = kWindowHopSeconds;
};

struct LabelDecision {
  double t_seconds = 0.0;  // window end, pipeline time
  GestureClass label = GestureClass::NoActivity;
  double confidence = 1.0;
  bool gated = true;  // true when the gate closed and no inference ran
};

struct PipelineCounters {
  std::size_t samples = 0;
  std::size_t events = 0;
  std::size_t windows = 0;
  std::size_t classifier_calls = 0;
  std::size_t classifier_mult_adds = 0;
};

class LivePipeline {
 public:
  LivePipeline(LiveConfig cfg, std::shared_ptr<const QuantModel> model, std::uint64_t seed)
      : cfg_(cfg),
        model_(std::move(model)),
        encoder_(cfg.encoder, cfg.radar.sim_rate),
        buffer_(to_ticks(cfg.span_seconds, cfg.encoder.tick_rate)),
        rng_(seed) {
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    phase0_ = uphase(rng_);
    next_label_ = cfg_.hop_seconds;
  }

  /// One IF voltage sample at the simulation rate.
  void push_if_sample(double v) {
    ++counters_.samples;
    if (auto ev = encoder_.push(v)) {
      buffer_.push(*ev);
      fresh_.push_back(*ev);
      ++counters_.events;
    }
    ++clock_;
  }

  /// Advances time by `n` simulation samples with no signal present.
  void idle(std::size_t n) {
    encoder_.skip(n);
    clock_ += n;
    range_prev_.reset();
  }

  /// One range sample at kTrajectoryRate. IF samples between consecutive range
  /// samples are synthesized by linear interpolation, with white noise whose
  /// level follows the instantaneous carrier amplitude at `snr_db`.
  void push_range(double r) {
    const double ratio = cfg_.radar.sim_rate / kTrajectoryRate;
    if (range_prev_) {
      const auto j = range_index_;
      const auto k_end = static_cast<std::uint64_t>(std::ceil(static_cast<double>(j) * ratio));
      while (range_sim_next_ < k_end) {
        const double pos = static_cast<double>(range_sim_next_) / ratio - static_cast<double>(j - 1);
        const double rr = *range_prev_ + std::clamp(pos, 0.0, 1.0) * (r - *range_prev_);
        const double amp = if_amplitude(rr, cfg_.radar);
        const double sigma = noise_sigma(amp * amp, cfg_.snr_db);
        double v = if_voltage(rr, cfg_.radar, phase0_);
        if (sigma > 0.0) v += std::normal_distribution<double>(0.0, sigma)(rng_);
        push_if_sample(v);
        ++range_sim_next_;
      }
    } else {
      range_index_ = 0;
      range_sim_next_ = 0;
    }
    range_prev_ = r;
    ++range_index_;
  }

  /// Events produced since the previous call.
  std::vector<EventRecord> take_new_events() { return std::exchange(fresh_, {}); }

  /// Evaluates every window whose end (a multiple of the hop) has been reached.
  std::vector<LabelDecision> evaluate_due() {
    std::vector<LabelDecision> out;
    const double now = seconds();
    while (next_label_ <= now + 1e-12) {
      out.push_back(evaluate_window_ending(next_label_));
      labels_emitted_ += 1;
      next_label_ = static_cast<double>(labels_emitted_ + 1) * cfg_.hop_seconds;
    }
    return out;
  }

  double seconds() const noexcept {
    return static_cast<double>(clock_) / cfg_.radar.sim_rate;
  }
  std::uint64_t clock_samples() const noexcept { return clock_; }
  const PipelineCounters& counters() const noexcept { return counters_; }
  const LiveConfig& config() const noexcept { return cfg_; }

 private:
  LabelDecision evaluate_window_ending(double t_end) {
    const auto window = buffer_.window_ending_at(to_ticks(t_end, cfg_.encoder.tick_rate));
    ++counters_.windows;
    LabelDecision d;
    d.t_seconds = t_end;
    if (!model_ || !activity_gate(window, cfg_.gate)) return d;
    const auto p = infer(*model_, featurize(window));
    ++counters_.classifier_calls;
    counters_.classifier_mult_adds += model_->spec().mult_adds();
    d.label = p.label;
    d.confidence = p.confidence;
    d.gated = false;
    return d;
  }

  LiveConfig cfg_;
  std::shared_ptr<const QuantModel> model_;
  Encoder encoder_;
  RollingEventBuffer buffer_;
  Rng rng_;
  double phase0_ = 0.0;
  std::uint64_t clock_ = 0;
  std::vector<EventRecord> fresh_;
  std::size_t labels_emitted_ = 0;
  double next_label_ = 0.0;
  std::optional<double> range_prev_;
  std::uint64_t range_index_ = 0;
  std::uint64_t range_sim_next_ = 0;
  PipelineCounters counters_;
};

}  // namespace neurorad::demo
