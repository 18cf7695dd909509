#pragma once

// Single-hidden-layer perceptron trained in double precision, quantized to
// symmetric per-layer int8 and stored in the NRNM format.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "neurorad/byte_io.hpp"
#include "neurorad/error.hpp"
#include "neurorad/event_pipeline.hpp"
#include "neurorad/gesture.hpp"
#include "neurorad/rng.hpp"

namespace neurorad {

struct ModelSpec {
  std::size_t input = kFeatureDim;
  std::size_t hidden = 48;
  std::size_t output = kGestureCount;

  std::size_t parameter_count() const noexcept {
    return input * hidden + hidden + hidden * output + output;
  }
  std::size_t mult_adds() const noexcept { return input * hidden + hidden * output; }
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Row-major `out x in` weight matrix plus bias.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t o, std::size_t i) noexcept { return weights[o * in + i]; }
  double w(std::size_t o, std::size_t i) const noexcept { return weights[o * in + i]; }

  void affine(std::span<const double> x, std::span<double> y) const noexcept {
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = weights.data() + o * in;
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = acc;
    }
  }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
};

struct FloatModel {
  ModelSpec spec;
  DenseLayer hidden;
  DenseLayer output;
  TrainingMeta meta;
};

struct LabeledSet {
  std::vector<FeatureVector> x;
  std::vector<GestureClass> y;

  std::size_t size() const noexcept { return x.size(); }
  void add(FeatureVector f, GestureClass label) {
    x.push_back(std::move(f));
    y.push_back(label);
  }
};

struct TrainConfig {
  double lr = 0.1;
  int lr_halving_epochs = 50;
  int epochs = 150;
  std::size_t batch = 32;
  std::uint64_t seed = 1;
};

struct Prediction {
  GestureClass label = GestureClass::NoActivity;
  double confidence = 0.0;
};

/// Glorot-uniform weights, zero biases.
inline FloatModel init_model(const ModelSpec& spec, std::uint64_t seed) {
  FloatModel m{spec, DenseLayer(spec.input, spec.hidden),
               DenseLayer(spec.hidden, spec.output), TrainingMeta{seed, 0}};
  Rng rng(seed);
  for (DenseLayer* layer : {&m.hidden, &m.output}) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer->in + layer->out));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (auto& w : layer->weights) w = u(rng);
  }
  return m;
}

inline void softmax_inplace(std::span<double> z) noexcept {
  const double peak = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

namespace detail {

inline void check_input(const ModelSpec& spec, std::span<const double> x) {
  if (x.size() != spec.input)
    throw ContractError("feature dimension " + std::to_string(x.size()) +
                        " does not match model input " + std::to_string(spec.input));
}

struct Activations {
  std::vector<double> pre;     // hidden pre-activation
  std::vector<double> hidden;  // after rectifier
  std::vector<double> probs;
};

inline void run(const FloatModel& m, std::span<const double> x, Activations& a) {
  a.pre.resize(m.spec.hidden);
  a.hidden.resize(m.spec.hidden);
  a.probs.resize(m.spec.output);
  m.hidden.affine(x, a.pre);
  for (std::size_t j = 0; j < a.pre.size(); ++j) a.hidden[j] = std::max(0.0, a.pre[j]);
  m.output.affine(a.hidden, a.probs);
  softmax_inplace(a.probs);
}

}  // namespace detail

inline std::vector<double> forward(const FloatModel& m, std::span<const double> x) {
  detail::check_input(m.spec, x);
  detail::Activations a;
  detail::run(m, x, a);
  return a.probs;
}

inline std::vector<double> forward(const FloatModel& m, const FeatureVector& x) {
  return forward(m, std::span<const double>(x.values));
}

/// Argmax with the lowest class index winning ties.
inline Prediction argmax_prediction(std::span<const double> probs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[best]) best = k;
  return {static_cast<GestureClass>(best), probs[best]};
}

inline Prediction predict(const FloatModel& m, const FeatureVector& x) {
  return argmax_prediction(forward(m, x));
}

/// Gradient buffers with the same shapes as the model's layers.
struct Gradients {
  DenseLayer hidden;
  DenseLayer output;

  explicit Gradients(const ModelSpec& s)
      : hidden(s.input, s.hidden), output(s.hidden, s.output) {}

  void zero() {
    for (DenseLayer* l : {&hidden, &output}) {
      std::fill(l->weights.begin(), l->weights.end(), 0.0);
      std::fill(l->bias.begin(), l->bias.end(), 0.0);
    }
  }
};

/// Cross-entropy of one sample; adds d(loss)/d(params) into `grad`.
inline double accumulate_gradient(const FloatModel& m, std::span<const double> x,
                                  GestureClass label, Gradients& grad) {
  detail::check_input(m.spec, x);
  detail::Activations a;
  detail::run(m, x, a);
  const auto target = static_cast<std::size_t>(label);
  const double loss = -std::log(std::max(a.probs[target], 1e-300));

  std::vector<double> dz(a.probs);
  dz[target] -= 1.0;
  std::vector<double> dh(m.spec.hidden, 0.0);
  for (std::size_t o = 0; o < m.spec.output; ++o) {
    grad.output.bias[o] += dz[o];
    for (std::size_t j = 0; j < m.spec.hidden; ++j) {
      grad.output.w(o, j) += dz[o] * a.hidden[j];
      dh[j] += m.output.w(o, j) * dz[o];
    }
  }
  for (std::size_t j = 0; j < m.spec.hidden; ++j) {
    if (a.pre[j] <= 0.0) continue;
    grad.hidden.bias[j] += dh[j];
    double* row = grad.hidden.weights.data() + j * m.spec.input;
    for (std::size_t i = 0; i < m.spec.input; ++i) row[i] += dh[j] * x[i];
  }
  return loss;
}

inline double sample_loss(const FloatModel& m, std::span<const double> x,
                          GestureClass label) {
  const auto p = forward(m, x);
  return -std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
}

inline double mean_loss(const FloatModel& m, const LabeledSet& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    total += sample_loss(m, data.x[i].values, data.y[i]);
  return data.size() ? total / static_cast<double>(data.size()) : 0.0;
}

/// Mini-batch gradient descent on cross-entropy; the step size halves every
/// `lr_halving_epochs` epochs. Deterministic for a fixed dataset order and seed.
inline FloatModel train(FloatModel model, const LabeledSet& data, const TrainConfig& cfg) {
  if (data.size() == 0) throw ContractError("training set is empty");
  if (!(cfg.lr >= 0.0) || cfg.epochs < 1 || cfg.batch == 0)
    throw ConfigError("invalid training configuration");
  for (auto label : data.y)
    if (static_cast<std::size_t>(label) >= model.spec.output)
      throw ContractError("label out of range");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Gradients grad(model.spec);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr =
        cfg.lr * std::pow(0.5, cfg.lr_halving_epochs > 0 ? epoch / cfg.lr_halving_epochs : 0);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      grad.zero();
      for (std::size_t k = start; k < stop; ++k)
        epoch_loss += accumulate_gradient(model, data.x[order[k]].values,
                                          data.y[order[k]], grad);
      const double step = lr / static_cast<double>(stop - start);
      for (auto [layer, g] : {std::pair{&model.hidden, &grad.hidden},
                              std::pair{&model.output, &grad.output}}) {
        for (std::size_t i = 0; i < layer->weights.size(); ++i)
          layer->weights[i] -= step * g->weights[i];
        for (std::size_t i = 0; i < layer->bias.size(); ++i)
          layer->bias[i] -= step * g->bias[i];
      }
    }
    if (!std::isfinite(epoch_loss)) throw TrainingDivergedError(epoch);
  }
  model.meta.seed = cfg.seed;
  model.meta.epochs += cfg.epochs;
  model.meta.final_loss = mean_loss(model, data);
  return model;
}

// ---------------------------------------------------------------------------
// Quantized model and the NRNM format
//
//   offset  size  field
//        0     4  magic "NRNM"
//        4     1  version (1)
//        5     1  layer count (2)
//        6     2  input dim   (u16 LE)
//        8     2  hidden dim  (u16 LE)
//       10     2  output dim  (u16 LE)
//       12     4  reserved, zero
//   per layer:
//              4  scale (f32 LE), real = int8 * scale
//          out*in int8 weights, row-major
//            out  int8 biases

inline constexpr std::size_t kModelBudgetBytes = 4096;
inline constexpr std::size_t kNrnmHeaderBytes = 16;
inline constexpr std::uint8_t kNrnmVersion = 1;

struct QuantLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  float scale = 1.0f;
  std::vector<std::int8_t> weights;
  std::vector<std::int8_t> bias;

  friend bool operator==(const QuantLayer&, const QuantLayer&) = default;
};

class QuantModel {
 public:
  QuantModel(ModelSpec spec, QuantLayer hidden, QuantLayer output)
      : spec_(spec), hidden_(std::move(hidden)), output_(std::move(output)) {
    dequantized_.spec = spec_;
    dequantized_.hidden = expand(hidden_);
    dequantized_.output = expand(output_);
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const QuantLayer& hidden() const noexcept { return hidden_; }
  const QuantLayer& output() const noexcept { return output_; }
  const FloatModel& dequantized() const noexcept { return dequantized_; }

  std::size_t serialized_size() const noexcept {
    return kNrnmHeaderBytes + layer_bytes(hidden_) + layer_bytes(output_);
  }

  friend bool operator==(const QuantModel& a, const QuantModel& b) {
    return a.spec_ == b.spec_ && a.hidden_ == b.hidden_ && a.output_ == b.output_;
  }

 private:
  static std::size_t layer_bytes(const QuantLayer& l) noexcept {
    return 4 + l.weights.size() + l.bias.size();
  }
  static DenseLayer expand(const QuantLayer& q) {
    DenseLayer d(q.in, q.out);
    for (std::size_t i = 0; i < q.weights.size(); ++i)
      d.weights[i] = static_cast<double>(q.weights[i]) * static_cast<double>(q.scale);
    for (std::size_t i = 0; i < q.bias.size(); ++i)
      d.bias[i] = static_cast<double>(q.bias[i]) * static_cast<double>(q.scale);
    return d;
  }

  ModelSpec spec_;
  QuantLayer hidden_;
  QuantLayer output_;
  FloatModel dequantized_;
};

/// Symmetric per-layer scale covering weights and biases; an all-zero layer
/// gets scale 1.
inline QuantLayer quantize_layer(const DenseLayer& d) {
  double peak = 0.0;
  for (double w : d.weights) peak = std::max(peak, std::abs(w));
  for (double b : d.bias) peak = std::max(peak, std::abs(b));
  QuantLayer q;
  q.in = d.in;
  q.out = d.out;
  q.scale = peak > 0.0 ? static_cast<float>(peak / 127.0) : 1.0f;
  const double s = static_cast<double>(q.scale);
  auto to_int8 = [s](double v) {
    return static_cast<std::int8_t>(std::clamp<long>(std::lround(v / s), -127, 127));
  };
  q.weights.reserve(d.weights.size());
  for (double w : d.weights) q.weights.push_back(to_int8(w));
  for (double b : d.bias) q.bias.push_back(to_int8(b));
  return q;
}

inline QuantModel quantize(const FloatModel& m) {
  QuantModel q(m.spec, quantize_layer(m.hidden), quantize_layer(m.output));
  if (q.serialized_size() > kModelBudgetBytes)
    throw SizeError(q.serialized_size(), kModelBudgetBytes);
  return q;
}

inline Prediction infer(const QuantModel& q, const FeatureVector& x) {
  return predict(q.dequantized(), x);
}

inline double accuracy(const FloatModel& m, const LabeledSet& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    hits += predict(m, data.x[i]).label == data.y[i];
  return data.size() ? static_cast<double>(hits) / static_cast<double>(data.size()) : 0.0;
}

/// Throws if the quantized model loses more than `max_drop` accuracy on
/// `holdout` relative to the float model.
inline void check_quantization(const FloatModel& m, const QuantModel& q,
                               const LabeledSet& holdout, double max_drop = 0.02) {
  const double float_acc = accuracy(m, holdout);
  const double quant_acc = accuracy(q.dequantized(), holdout);
  if (float_acc - quant_acc > max_drop + 1e-12)
    throw QuantizationQualityError(
        "quantized accuracy " + std::to_string(quant_acc) + " is more than " +
        std::to_string(max_drop) + " below float accuracy " + std::to_string(float_acc));
}

inline std::vector<std::uint8_t> serialize(const QuantModel& q) {
  ByteWriter w;
  for (char c : std::string_view("NRNM")) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kNrnmVersion);
  w.u8(2);
  w.u16(static_cast<std::uint16_t>(q.spec().input));
  w.u16(static_cast<std::uint16_t>(q.spec().hidden));
  w.u16(static_cast<std::uint16_t>(q.spec().output));
  w.zeros(4);
  for (const QuantLayer* l : {&q.hidden(), &q.output()}) {
    w.f32(l->scale);
    for (auto v : l->weights) w.i8(v);
    for (auto v : l->bias) w.i8(v);
  }
  return std::move(w).take();
}

inline QuantModel parse_quant_model(std::span<const std::uint8_t> data) {
  if (auto bad = magic_mismatch(data, "NRNM")) throw FormatError(*bad, "bad NRNM magic");
  ByteReader r(data);
  r.u32();
  if (r.u8() != kNrnmVersion) throw FormatError(4, "unsupported NRNM version");
  if (r.u8() != 2) throw FormatError(5, "NRNM layer count must be 2");
  ModelSpec spec;
  std::size_t* dims[] = {&spec.input, &spec.hidden, &spec.output};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t at = r.pos();
    *dims[i] = r.u16();
    if (*dims[i] == 0) throw FormatError(at, "zero NRNM dimension");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t at = r.pos();
    if (r.u8() != 0) throw FormatError(at, "nonzero NRNM reserved byte");
  }
  auto read_layer = [&r](std::size_t in, std::size_t out) {
    QuantLayer l;
    l.in = in;
    l.out = out;
    const std::size_t at = r.pos();
    l.scale = r.f32();
    if (!(std::isfinite(l.scale) && l.scale > 0.0f))
      throw FormatError(at, "invalid NRNM layer scale");
    l.weights.resize(in * out);
    for (auto& v : l.weights) v = r.i8();
    l.bias.resize(out);
    for (auto& v : l.bias) v = r.i8();
    return l;
  };
  QuantLayer hidden = read_layer(spec.input, spec.hidden);
  QuantLayer output = read_layer(spec.hidden, spec.output);
  if (r.remaining() != 0) throw FormatError(r.pos(), "trailing bytes after NRNM payload");
  return QuantModel(spec, std::move(hidden), std::move(output));
}

inline void save_model(const std::string& path, const QuantModel& q) {
  write_file_bytes(path, serialize(q));
}

inline QuantModel load_model(const std::string& path) {
  return parse_quant_model(read_file_bytes(path));
}

}  // namespace neurorad
