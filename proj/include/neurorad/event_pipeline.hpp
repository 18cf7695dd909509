#pragma once

// Event windows, polarity-histogram features and the activity gate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/error.hpp"

namespace neurorad {

inline constexpr double kWindowSpanSeconds = 1.5;
inline constexpr double kWindowHopSeconds = 0.25;
inline constexpr std::size_t kDefaultBins = 32;
inline constexpr std::size_t kFeatureDim = 2 * kDefaultBins;

/// Events with t0 <= t < t0 + span, timestamps rebased to the window start.
/// t0 may be negative for windows that reach back before the stream began.
struct EventWindow {
  std::int64_t t0_ticks = 0;
  std::uint64_t span_ticks = 0;
  std::vector<EventRecord> events;
};

struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct GateConfig {
  std::size_t min_events = 30;
};

struct PolarityHistogram {
  std::vector<std::uint32_t> positive;
  std::vector<std::uint32_t> negative;
};

template <class It>
EventWindow make_window(It first, It last, std::int64_t t0, std::uint64_t span) {
  EventWindow w;
  w.t0_ticks = t0;
  w.span_ticks = span;
  const std::int64_t end = t0 + static_cast<std::int64_t>(span);
  for (auto it = first; it != last; ++it) {
    const auto t = static_cast<std::int64_t>(it->t_ticks);
    if (t < t0) continue;
    if (t >= end) break;
    w.events.push_back(
        EventRecord{static_cast<std::uint64_t>(t - t0), it->polarity});
  }
  return w;
}

inline EventWindow window_at(const EventStream& stream, std::int64_t t0,
                             std::uint64_t span) {
  const auto lo = static_cast<std::uint64_t>(std::max<std::int64_t>(t0, 0));
  auto first = std::lower_bound(
      stream.events.begin(), stream.events.end(), lo,
      [](const EventRecord& e, std::uint64_t t) { return e.t_ticks < t; });
  return make_window(first, stream.events.end(), t0, span);
}

inline std::vector<EventWindow> slice_windows(const EventStream& stream,
                                              std::uint64_t span, std::uint64_t hop) {
  if (span == 0 || hop == 0) throw ContractError("span and hop must be positive");
  std::vector<EventWindow> out;
  for (std::uint64_t t0 = 0; t0 + span <= stream.duration_ticks; t0 += hop)
    out.push_back(window_at(stream, static_cast<std::int64_t>(t0), span));
  return out;
}

/// The single window centred in the stream (offline training view).
inline EventWindow center_window(const EventStream& stream, std::uint64_t span) {
  const std::int64_t slack = static_cast<std::int64_t>(stream.duration_ticks) -
                             static_cast<std::int64_t>(span);
  return window_at(stream, slack > 0 ? slack / 2 : 0, span);
}

inline PolarityHistogram bin_counts(const EventWindow& w, std::size_t n_bins) {
  if (n_bins == 0) throw ContractError("n_bins must be at least 1");
  if (w.span_ticks == 0) throw ContractError("window span must be positive");
  PolarityHistogram h{std::vector<std::uint32_t>(n_bins, 0),
                      std::vector<std::uint32_t>(n_bins, 0)};
  for (const auto& e : w.events) {
    const auto k = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(e.t_ticks) * n_bins) / w.span_ticks);
    auto& bins = e.polarity > 0 ? h.positive : h.negative;
    bins[std::min(k, n_bins - 1)] += 1;
  }
  return h;
}

/// Positive-polarity bins then negative-polarity bins, log1p-compressed and
/// divided by the largest entry. An empty window maps to the zero vector.
inline FeatureVector featurize(const EventWindow& w, std::size_t n_bins = kDefaultBins) {
  const auto h = bin_counts(w, n_bins);
  FeatureVector f;
  f.values.resize(2 * n_bins);
  double peak = 0.0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    f.values[k] = std::log1p(static_cast<double>(h.positive[k]));
    f.values[n_bins + k] = std::log1p(static_cast<double>(h.negative[k]));
  }
  for (double v : f.values) peak = std::max(peak, v);
  if (peak > 0.0)
    for (auto& v : f.values) v /= peak;
  return f;
}

inline bool activity_gate(const EventWindow& w, const GateConfig& cfg) noexcept {
  return w.events.size() >= cfg.min_events;
}

/// Rolling buffer holding the most recent `span` ticks of a live stream.
class RollingEventBuffer {
 public:
  explicit RollingEventBuffer(std::uint64_t span) : span_(span) {}

  void push(const EventRecord& e) { events_.push_back(e); }

  /// Window [t_end - span, t_end). Drops events that can no longer be in any
  /// later window.
  EventWindow window_ending_at(std::uint64_t t_end) {
    const std::int64_t t0 =
        static_cast<std::int64_t>(t_end) - static_cast<std::int64_t>(span_);
    while (!events_.empty() &&
           static_cast<std::int64_t>(events_.front().t_ticks) < t0)
      events_.pop_front();
    return make_window(events_.begin(), events_.end(), t0, span_);
  }

  void clear() { events_.clear(); }
  std::size_t size() const noexcept { return events_.size(); }
  std::uint64_t span() const noexcept { return span_; }

 private:
  std::uint64_t span_;
  std::deque<EventRecord> events_;
};

}  // namespace neurorad
