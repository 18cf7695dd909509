#pragma once

// Conventional dense path: uniform ADC capture, Hann-windowed STFT
// (Doppler-time map), pooled-map classifier, and the bytes/op accounting that
// sets it against the event path.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/error.hpp"
#include "neurorad/event_pipeline.hpp"
#include "neurorad/radar_synth.hpp"
#include "neurorad/tiny_classifier.hpp"

namespace neurorad {

struct AdcConfig {
  double fs = 2048.0;
  int bits = 12;
  double full_scale = 2.0;  // input range is [-full_scale, +full_scale]

  double lsb() const noexcept { return 2.0 * full_scale / std::ldexp(1.0, bits); }
  std::size_t bytes_per_sample() const noexcept {
    return static_cast<std::size_t>((bits + 7) / 8);
  }
};

struct AdcCapture {
  double fs = 0.0;
  int bits = 0;
  double lsb = 0.0;
  std::vector<std::int32_t> codes;

  std::size_t bytes() const noexcept {
    return codes.size() * static_cast<std::size_t>((bits + 7) / 8);
  }
  /// Mid-rise reconstruction level of each code.
  std::vector<double> volts() const {
    std::vector<double> v(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i)
      v[i] = (static_cast<double>(codes[i]) + 0.5) * lsb;
    return v;
  }
};

/// Integer decimation to `fs`, clipping to full scale, mid-rise quantization.
inline AdcCapture adc_sample(const SampledSignal& signal, const AdcConfig& cfg) {
  if (cfg.bits < 8 || cfg.bits > 16) throw ConfigError("ADC bits must lie in [8, 16]");
  if (!(cfg.fs > 0.0) || !(cfg.full_scale > 0.0)) throw ConfigError("invalid ADC config");
  AdcCapture cap;
  cap.fs = cfg.fs;
  cap.bits = cfg.bits;
  cap.lsb = cfg.lsb();
  if (signal.samples.empty()) return cap;
  const double ratio = signal.sample_rate / cfg.fs;
  const auto factor = static_cast<std::size_t>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9)
    throw ConfigError("signal rate " + std::to_string(signal.sample_rate) +
                      " Hz is not an integer multiple of ADC rate " +
                      std::to_string(cfg.fs) + " Hz");
  const long lo = -(1L << (cfg.bits - 1));
  const long hi = (1L << (cfg.bits - 1)) - 1;
  cap.codes.reserve(signal.samples.size() / factor + 1);
  for (std::size_t i = 0; i < signal.samples.size(); i += factor) {
    const double v = std::clamp(signal.samples[i], -cfg.full_scale, cfg.full_scale);
    const auto c = static_cast<long>(std::floor(v / cap.lsb));
    cap.codes.push_back(static_cast<std::int32_t>(std::clamp(c, lo, hi)));
  }
  return cap;
}

/// Real-input FFT of fixed length backed by FFTW.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  std::span<double> input() noexcept { return {in_, n_}; }

  /// Executes on the current input; returns bins 0..n/2.
  std::span<const fftw_complex> execute() noexcept {
    fftw_execute(plan_);
    return {out_, n_ / 2 + 1};
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n)));
  return w;
}

struct DopplerMap {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::vector<double> magnitude;  // frame-major

  double at(std::size_t frame, std::size_t bin) const noexcept {
    return magnitude[frame * n_bins + bin];
  }
  std::size_t peak_bin(std::size_t frame) const noexcept {
    const auto* row = magnitude.data() + frame * n_bins;
    return static_cast<std::size_t>(std::max_element(row, row + n_bins) - row);
  }
};

inline constexpr std::size_t kStftWindow = 256;
inline constexpr std::size_t kStftHop = 64;

/// Hann-windowed magnitude STFT. With `remove_frame_mean` each frame's mean is
/// subtracted before windowing (static-clutter removal).
inline DopplerMap spectrogram(std::span<const double> samples,
                              std::size_t window_len = kStftWindow,
                              std::size_t hop = kStftHop, bool remove_frame_mean = false) {
  if (window_len < 2 || (window_len & (window_len - 1)) != 0)
    throw ConfigError("window length must be a power of two");
  if (hop == 0 || hop > window_len) throw ConfigError("hop must lie in [1, window_len]");
  if (samples.size() < window_len)
    throw InsufficientDataError("need at least " + std::to_string(window_len) +
                                " samples, got " + std::to_string(samples.size()));
  DopplerMap map;
  map.window_len = window_len;
  map.hop = hop;
  map.n_bins = window_len / 2 + 1;
  map.n_frames = (samples.size() - window_len) / hop + 1;
  map.magnitude.resize(map.n_frames * map.n_bins);

  const auto window = hann_window(window_len);
  RealFft fft(window_len);
  for (std::size_t f = 0; f < map.n_frames; ++f) {
    const auto frame = samples.subspan(f * hop, window_len);
    double mean = 0.0;
    if (remove_frame_mean) {
      for (double v : frame) mean += v;
      mean /= static_cast<double>(window_len);
    }
    auto in = fft.input();
    for (std::size_t i = 0; i < window_len; ++i) in[i] = (frame[i] - mean) * window[i];
    const auto out = fft.execute();
    for (std::size_t b = 0; b < map.n_bins; ++b)
      map.magnitude[f * map.n_bins + b] = std::hypot(out[b][0], out[b][1]);
  }
  return map;
}

inline constexpr std::size_t kPoolBands = 16;
inline constexpr std::size_t kPoolSegments = 4;

/// Mean-pools bins 1..n_bins-1 (DC excluded) into 16 bands and frames into 4
/// time segments, log-compressed. Band-major within each segment.
inline FeatureVector pool_map(const DopplerMap& map) {
  if (map.n_frames < kPoolSegments || map.n_bins < kPoolBands + 1)
    throw ContractError("Doppler map too small to pool");
  FeatureVector f;
  f.values.assign(kPoolBands * kPoolSegments, 0.0);
  const std::size_t usable = map.n_bins - 1;
  for (std::size_t s = 0; s < kPoolSegments; ++s) {
    const std::size_t f0 = s * map.n_frames / kPoolSegments;
    const std::size_t f1 = (s + 1) * map.n_frames / kPoolSegments;
    for (std::size_t b = 0; b < kPoolBands; ++b) {
      const std::size_t b0 = 1 + b * usable / kPoolBands;
      const std::size_t b1 = 1 + (b + 1) * usable / kPoolBands;
      double sum = 0.0;
      for (std::size_t fr = f0; fr < f1; ++fr)
        for (std::size_t k = b0; k < b1; ++k) sum += map.at(fr, k);
      const double mean = sum / static_cast<double>((f1 - f0) * (b1 - b0));
      f.values[s * kPoolBands + b] = std::log1p(mean) / 4.0;
    }
  }
  return f;
}

/// Dense-path feature vector for one labelled window of IF signal.
inline FeatureVector dense_features(const SampledSignal& signal, const AdcConfig& adc) {
  const auto cap = adc_sample(signal, adc);
  const auto volts = cap.volts();
  return pool_map(spectrogram(volts, kStftWindow, kStftHop, true));
}

inline Prediction classify_dense(const DopplerMap& map, const FloatModel& model) {
  const auto pooled = pool_map(map);
  if (pooled.size() != model.spec.input)
    throw ContractError("pooled map does not match dense model input");
  return predict(model, pooled);
}

// ---------------------------------------------------------------------------
// Accounting

/// Packed event: 23-bit delta timestamp + 1 polarity bit = 3 bytes. Gaps of
/// 2^23 ticks or more (67.1 ms at 125 MHz) cost one 3-byte extension record
/// per full 2^23 ticks.
inline constexpr std::uint64_t kPackedDeltaSpan = std::uint64_t{1} << 23;
inline constexpr std::size_t kPackedEventBytes = 3;

inline std::size_t packed_event_bytes(const EventStream& s) {
  std::size_t records = 0;
  std::uint64_t prev = 0;
  for (const auto& e : s.events) {
    records += 1 + static_cast<std::size_t>((e.t_ticks - prev) / kPackedDeltaSpan);
    prev = e.t_ticks;
  }
  return records * kPackedEventBytes;
}

/// Real multiply-adds for one STFT frame: windowing, radix-2 butterflies
/// (one complex multiply = 4 real multiply-adds each), magnitudes.
constexpr std::size_t stft_frame_mult_adds(std::size_t n) noexcept {
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  return n + 4 * (n / 2) * log2n + 2 * (n / 2 + 1);
}

struct PipelineCosts {
  std::uint64_t span_ticks = seconds_to_ticks(kWindowSpanSeconds);
  std::uint64_t hop_ticks = seconds_to_ticks(kWindowHopSeconds);
  GateConfig gate{};
  ModelSpec model{};
};

struct LabeledSignal {
  GestureClass label = GestureClass::NoActivity;
  SampledSignal signal;
};

struct ClassRow {
  std::size_t signals = 0;
  std::size_t adc_bytes = 0;
  std::size_t event_bytes = 0;
  std::size_t dense_ops = 0;
  std::size_t event_ops = 0;
  std::size_t events = 0;
  std::size_t windows = 0;
  std::size_t gate_open_windows = 0;

  double ratio() const noexcept {
    return adc_bytes ? static_cast<double>(event_bytes) / static_cast<double>(adc_bytes) : 0.0;
  }
  ClassRow& operator+=(const ClassRow& o) noexcept {
    signals += o.signals;
    adc_bytes += o.adc_bytes;
    event_bytes += o.event_bytes;
    dense_ops += o.dense_ops;
    event_ops += o.event_ops;
    events += o.events;
    windows += o.windows;
    gate_open_windows += o.gate_open_windows;
    return *this;
  }
};

struct ComparisonReport {
  std::size_t adc_bytes = 0;
  std::size_t event_bytes = 0;
  double reduction_ratio = 0.0;  // event_bytes / adc_bytes
  std::size_t dense_mult_adds = 0;
  std::size_t event_mult_adds = 0;
  std::size_t idle_adc_bytes = 0;
  std::size_t idle_event_bytes = 0;
  std::size_t idle_dense_mult_adds = 0;
  std::size_t idle_event_mult_adds = 0;
  std::size_t classifier_invocations = 0;
  std::map<GestureClass, ClassRow> per_class;

  /// Totals over every class except NoActivity.
  ClassRow gesture_totals() const {
    ClassRow t;
    for (const auto& [cls, row] : per_class)
      if (cls != GestureClass::NoActivity) t += row;
    return t;
  }
};

/// Costs of one signal through both pipelines.
inline ClassRow measure_signal(const SampledSignal& signal, const EncoderConfig& enc,
                               const AdcConfig& adc, const PipelineCosts& costs) {
  ClassRow row;
  row.signals = 1;
  if (signal.samples.empty()) return row;

  const auto capture = adc_sample(signal, adc);
  row.adc_bytes = capture.bytes();
  const auto stream = encode(signal, enc);
  row.events = stream.events.size();
  row.event_bytes = packed_event_bytes(stream);

  const std::size_t model_ops = costs.model.mult_adds();
  const std::size_t n = capture.codes.size();
  const std::size_t frames = n >= kStftWindow ? (n - kStftWindow) / kStftHop + 1 : 0;
  const std::size_t span_samples = static_cast<std::size_t>(
      std::llround(static_cast<double>(costs.span_ticks) / enc.tick_rate * adc.fs));
  const std::size_t frames_per_window =
      span_samples >= kStftWindow ? (span_samples - kStftWindow) / kStftHop + 1 : 0;

  const auto windows = slice_windows(stream, costs.span_ticks, costs.hop_ticks);
  row.windows = windows.size();
  row.dense_ops = frames * stft_frame_mult_adds(kStftWindow) +
                  windows.size() * (frames_per_window * (kStftWindow / 2) + model_ops);
  for (const auto& w : windows) {
    row.event_ops += w.events.size() + costs.model.input;
    if (activity_gate(w, costs.gate)) {
      row.event_ops += model_ops;
      row.gate_open_windows += 1;
    }
  }
  return row;
}

inline ComparisonReport compare_pipelines(std::span<const LabeledSignal> signals,
                                          const EncoderConfig& enc, const AdcConfig& adc,
                                          const PipelineCosts& costs = {}) {
  ComparisonReport rep;
  for (const auto& s : signals) rep.per_class[s.label] += measure_signal(s.signal, enc, adc, costs);
  for (const auto& [cls, row] : rep.per_class) {
    rep.adc_bytes += row.adc_bytes;
    rep.event_bytes += row.event_bytes;
    rep.dense_mult_adds += row.dense_ops;
    rep.event_mult_adds += row.event_ops;
    rep.classifier_invocations += row.gate_open_windows;
    if (cls == GestureClass::NoActivity) {
      rep.idle_adc_bytes += row.adc_bytes;
      rep.idle_event_bytes += row.event_bytes;
      rep.idle_dense_mult_adds += row.dense_ops;
      rep.idle_event_mult_adds += row.event_ops;
    }
  }
  rep.reduction_ratio = rep.adc_bytes ? static_cast<double>(rep.event_bytes) /
                                            static_cast<double>(rep.adc_bytes)
                                      : 0.0;
  return rep;
}

}  // namespace neurorad
