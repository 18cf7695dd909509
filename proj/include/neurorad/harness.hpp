#pragma once

// Training, evaluation and benchmarking over a generated dataset.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "neurorad/baseline_fft.hpp"
#include "neurorad/dataset.hpp"
#include "neurorad/event_pipeline.hpp"
#include "neurorad/tiny_classifier.hpp"

namespace neurorad {

using ConfusionMatrix = std::array<std::array<std::size_t, kGestureCount>, kGestureCount>;

struct EvalMetrics {
  std::size_t samples = 0;
  double accuracy = 0.0;
  ConfusionMatrix confusion{};  // [true][predicted]
  std::array<double, kGestureCount> precision{};
  std::array<double, kGestureCount> recall{};
  std::size_t classifier_calls = 0;

  void add(GestureClass truth, GestureClass predicted) {
    confusion[code(truth)][code(predicted)] += 1;
    ++samples;
  }
  void finish() {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < kGestureCount; ++k) {
      hits += confusion[k][k];
      std::size_t row = 0, col = 0;
      for (std::size_t j = 0; j < kGestureCount; ++j) {
        row += confusion[k][j];
        col += confusion[j][k];
      }
      recall[k] = row ? static_cast<double>(confusion[k][k]) / static_cast<double>(row) : 0.0;
      precision[k] = col ? static_cast<double>(confusion[k][k]) / static_cast<double>(col) : 0.0;
    }
    accuracy = samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
  }
};

/// Gate first; the classifier only sees windows the gate lets through.
inline Prediction gated_predict(const FloatModel& m, const EventWindow& w,
                                const GateConfig& gate, std::size_t* calls = nullptr) {
  if (!activity_gate(w, gate)) return {GestureClass::NoActivity, 1.0};
  if (calls) ++*calls;
  return predict(m, featurize(w));
}

struct WindowedSample {
  EventWindow window;
  GestureClass label;
};

inline std::vector<WindowedSample> center_windows(const std::vector<LoadedSample>& samples,
                                                  std::uint64_t span) {
  std::vector<WindowedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({center_window(s.stream, span), s.record->cls});
  return out;
}

inline LabeledSet to_labeled_set(const std::vector<WindowedSample>& windows) {
  LabeledSet set;
  for (const auto& w : windows) set.add(featurize(w.window), w.label);
  return set;
}

inline EvalMetrics evaluate(const FloatModel& m, const std::vector<WindowedSample>& windows,
                            const GateConfig& gate) {
  EvalMetrics metrics;
  for (const auto& w : windows)
    metrics.add(w.label, gated_predict(m, w.window, gate, &metrics.classifier_calls).label);
  metrics.finish();
  return metrics;
}

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double train_accuracy = 0.0;
  double float_test_accuracy = 0.0;  // gated
  EvalMetrics test;                  // quantized, gated
  std::size_t model_bytes = 0;
};

struct RunOptions {
  TrainConfig train{};
  ModelSpec spec{};
  GateConfig gate{};
  std::uint64_t span_ticks = seconds_to_ticks(kWindowSpanSeconds);
  double max_quant_drop = 0.02;
  // Extra training windows per file, as start offsets in seconds from the file
  // start. Negative starts straddle the gesture onset the way live windows do.
  // Only gate-open extras are kept. Evaluation always uses the center window.
  std::vector<double> extra_window_starts{-1.25, -1.0, -0.75, -0.5, -0.25, 0.0, 0.5};
};

inline std::vector<WindowedSample> training_windows(const std::vector<LoadedSample>& samples,
                                                    const RunOptions& opt) {
  auto out = center_windows(samples, opt.span_ticks);
  for (const auto& s : samples) {
    for (double start : opt.extra_window_starts) {
      const auto t0 = static_cast<std::int64_t>(std::llround(start * s.stream.tick_rate));
      auto w = window_at(s.stream, t0, opt.span_ticks);
      if (activity_gate(w, opt.gate)) out.push_back({std::move(w), s.record->cls});
    }
  }
  return out;
}

inline TrainReport run_train(const DatasetManifest& manifest, const RunOptions& opt,
                             const std::filesystem::path& model_out) {
  const auto train_windows = training_windows(load_split(manifest, Split::Train), opt);
  const auto test_windows = center_windows(load_split(manifest, Split::Test), opt.span_ticks);
  const auto train_set = to_labeled_set(train_windows);
  const auto test_set = to_labeled_set(test_windows);

  TrainReport rep;
  auto model = init_model(opt.spec, opt.train.seed);
  rep.initial_loss = mean_loss(model, train_set);
  model = train(std::move(model), train_set, opt.train);
  rep.final_loss = model.meta.final_loss;
  rep.train_accuracy = accuracy(model, train_set);
  rep.float_test_accuracy = evaluate(model, test_windows, opt.gate).accuracy;

  const auto q = quantize(model);
  check_quantization(model, q, test_set, opt.max_quant_drop);
  rep.test = evaluate(q.dequantized(), test_windows, opt.gate);
  rep.model_bytes = q.serialized_size();
  save_model(model_out.string(), q);
  return rep;
}

inline EvalMetrics run_eval(const DatasetManifest& manifest, const QuantModel& q,
                            const RunOptions& opt) {
  const auto test_windows = center_windows(load_split(manifest, Split::Test), opt.span_ticks);
  return evaluate(q.dequantized(), test_windows, opt.gate);
}

inline void print_metrics(std::ostream& os, const EvalMetrics& m) {
  os << "accuracy " << m.accuracy << "\n";
  os << "samples " << m.samples << "\n";
  os << "classifier_calls " << m.classifier_calls << "\n";
  for (auto g : kAllGestures)
    os << "class " << token(g) << " precision " << m.precision[code(g)] << " recall "
       << m.recall[code(g)] << "\n";
  os << "confusion (rows true, cols predicted)\n";
  for (std::size_t i = 0; i < kGestureCount; ++i) {
    for (std::size_t j = 0; j < kGestureCount; ++j) os << (j ? " " : "") << m.confusion[i][j];
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchOptions {
  EncoderConfig encoder{};
  AdcConfig adc{};
  PipelineCosts costs{};
  RadarConfig radar{};
  std::size_t idle_seeds = 20;
  double idle_duration = kWindowSpanSeconds;
  double idle_snr_db = 20.0;
  std::uint64_t idle_seed = 99;
  bool dense_accuracy = true;
  TrainConfig dense_train{};
};

struct BenchReport {
  ComparisonReport report;  // test-split traffic; idle_* from the idle set
  ComparisonReport idle;
  double dense_test_accuracy = -1.0;  // < 0 when not measured
};

/// NoActivity recordings at the default operating point, one per seed.
inline std::vector<LabeledSignal> idle_traffic(const BenchOptions& opt) {
  std::vector<LabeledSignal> out;
  for (std::size_t i = 0; i < opt.idle_seeds; ++i) {
    const auto seed = derive_seed(opt.idle_seed, {i});
    Rng rng(derive_seed(seed, {2}));
    const auto params = draw_params(GestureClass::NoActivity, kUserProfiles[i % 7], rng,
                                    opt.idle_duration, opt.idle_snr_db);
    const auto traj = gesture_trajectory(GestureClass::NoActivity, params, derive_seed(seed, {0}));
    out.push_back({GestureClass::NoActivity,
                   synthesize_if(traj, opt.radar, opt.idle_snr_db, derive_seed(seed, {1}))});
  }
  return out;
}

inline SampledSignal center_crop(const SampledSignal& s, double seconds) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * s.sample_rate));
  if (n >= s.samples.size()) return s;
  const std::size_t start = (s.samples.size() - n) / 2;
  SampledSignal out{s.sample_rate, {}};
  out.samples.assign(s.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     s.samples.begin() + static_cast<std::ptrdiff_t>(start + n));
  return out;
}

inline LabeledSet dense_set(const DatasetManifest& m, Split split, const BenchOptions& opt) {
  LabeledSet set;
  const double span = static_cast<double>(opt.costs.span_ticks) / opt.encoder.tick_rate;
  for (const auto* rec : m.split(split))
    set.add(dense_features(center_crop(synthesize_record(*rec, opt.radar), span), opt.adc),
            rec->cls);
  return set;
}

inline BenchReport run_bench(const DatasetManifest& manifest, const BenchOptions& opt) {
  BenchReport out;
  std::vector<LabeledSignal> traffic;
  for (const auto* rec : manifest.split(Split::Test))
    traffic.push_back({rec->cls, synthesize_record(*rec, opt.radar)});
  out.report = compare_pipelines(traffic, opt.encoder, opt.adc, opt.costs);

  const auto idle = idle_traffic(opt);
  out.idle = compare_pipelines(idle, opt.encoder, opt.adc, opt.costs);
  out.report.idle_adc_bytes = out.idle.adc_bytes;
  out.report.idle_event_bytes = out.idle.event_bytes;
  out.report.idle_dense_mult_adds = out.idle.dense_mult_adds;
  out.report.idle_event_mult_adds = out.idle.event_mult_adds;

  if (opt.dense_accuracy) {
    const auto train_set = dense_set(manifest, Split::Train, opt);
    const auto test_set = dense_set(manifest, Split::Test, opt);
    auto model = train(init_model(ModelSpec{}, opt.dense_train.seed), train_set, opt.dense_train);
    out.dense_test_accuracy = accuracy(model, test_set);
  }
  return out;
}

inline void print_bench_table(std::ostream& os, const BenchReport& b) {
  os << "class,adc_bytes,event_bytes,ratio,dense_ops,event_ops\n";
  auto row = [&os](std::string_view name, const ClassRow& r) {
    os << name << ',' << r.adc_bytes << ',' << r.event_bytes << ',' << r.ratio() << ','
       << r.dense_ops << ',' << r.event_ops << '\n';
  };
  for (const auto& [cls, r] : b.report.per_class) row(token(cls), r);
  row("idle", b.idle.per_class.count(GestureClass::NoActivity)
                  ? b.idle.per_class.at(GestureClass::NoActivity)
                  : ClassRow{});
}

inline void print_bench_text(std::ostream& os, const BenchReport& b) {
  const auto& r = b.report;
  const auto g = r.gesture_totals();
  os << "adc_bytes " << r.adc_bytes << "\n"
     << "event_bytes " << r.event_bytes << "\n"
     << "reduction_ratio " << r.reduction_ratio << "\n"
     << "dense_mult_adds " << r.dense_mult_adds << "\n"
     << "event_mult_adds " << r.event_mult_adds << "\n"
     << "gesture_adc_bytes " << g.adc_bytes << "\n"
     << "gesture_event_bytes " << g.event_bytes << "\n"
     << "gesture_ratio " << g.ratio() << "\n"
     << "idle_adc_bytes " << r.idle_adc_bytes << "\n"
     << "idle_event_bytes " << r.idle_event_bytes << "\n"
     << "idle_ratio "
     << (r.idle_adc_bytes ? static_cast<double>(r.idle_event_bytes) /
                                static_cast<double>(r.idle_adc_bytes)
                          : 0.0)
     << "\n"
     << "idle_dense_mult_adds " << r.idle_dense_mult_adds << "\n"
     << "idle_event_mult_adds " << r.idle_event_mult_adds << "\n"
     << "classifier_invocations " << r.classifier_invocations << "\n";
  if (b.dense_test_accuracy >= 0.0) os << "dense_test_accuracy " << b.dense_test_accuracy << "\n";
}

}  // namespace neurorad
