#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gradcheck.hpp"
#include "neurorad/tiny_classifier.hpp"

using namespace neurorad;

namespace {

FeatureVector random_features(std::mt19937_64& rng, std::size_t dim = kFeatureDim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureVector f;
  f.values.resize(dim);
  for (auto& v : f.values) v = u(rng);
  return f;
}

// Ten points, two per class, each class owning a distinct block of inputs.
LabeledSet toy_separable() {
  LabeledSet s;
  for (std::size_t c = 0; c < kGestureCount; ++c) {
    for (int rep = 0; rep < 2; ++rep) {
      FeatureVector f;
      f.values.assign(kFeatureDim, 0.0);
      for (std::size_t i = 0; i < 12; ++i) f.values[c * 12 + i] = rep == 0 ? 1.0 : 0.6;
      s.add(f, static_cast<GestureClass>(c));
    }
  }
  return s;
}

FloatModel trained_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledSet s;
  // Noisy class prototypes so the network has something real to fit.
  std::vector<FeatureVector> proto;
  for (std::size_t c = 0; c < kGestureCount; ++c) proto.push_back(random_features(rng));
  std::normal_distribution<double> g(0.0, 0.15);
  for (int i = 0; i < 400; ++i) {
    const auto c = static_cast<std::size_t>(i) % kGestureCount;
    FeatureVector f = proto[c];
    for (auto& v : f.values) v = std::clamp(v + g(rng), 0.0, 1.0);
    s.add(f, static_cast<GestureClass>(c));
  }
  TrainConfig cfg;
  cfg.epochs = 30;
  return train(init_model(ModelSpec{}, seed), s, cfg);
}

}  // namespace

TEST(ModelSpec, ParameterCount) {
  ModelSpec s;
  EXPECT_EQ(s.parameter_count(), 3365u);
  EXPECT_EQ(s.parameter_count(), 64u * 48 + 48 + 48 * 5 + 5);
}

TEST(InitModel, DeterministicGlorotZeroBias) {
  const auto a = init_model(ModelSpec{}, 7);
  const auto b = init_model(ModelSpec{}, 7);
  const auto c = init_model(ModelSpec{}, 8);
  EXPECT_EQ(a.hidden, b.hidden);
  EXPECT_EQ(a.output, b.output);
  EXPECT_NE(a.hidden.weights, c.hidden.weights);
  const double bound1 = std::sqrt(6.0 / 112.0);
  EXPECT_NEAR(bound1, 0.2315, 1e-4);
  double peak = 0.0;
  for (double w : a.hidden.weights) {
    EXPECT_LE(std::abs(w), bound1);
    peak = std::max(peak, std::abs(w));
  }
  EXPECT_GT(peak, 0.9 * bound1);
  for (double w : a.output.weights) EXPECT_LE(std::abs(w), std::sqrt(6.0 / 53.0));
  for (double v : a.hidden.bias) EXPECT_EQ(v, 0.0);
  for (double v : a.output.bias) EXPECT_EQ(v, 0.0);
}

TEST(Forward, SoftmaxNormalized) {
  std::mt19937_64 rng(1);
  const auto m = init_model(ModelSpec{}, 3);
  for (int i = 0; i < 200; ++i) {
    const auto p = forward(m, random_features(rng));
    ASSERT_EQ(p.size(), 5u);
    for (double v : p) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
  }
}

TEST(Forward, ZeroWeightsGiveUniform) {
  FloatModel m{ModelSpec{}, DenseLayer(64, 48), DenseLayer(48, 5), {}};
  std::mt19937_64 rng(2);
  for (double v : forward(m, random_features(rng))) EXPECT_DOUBLE_EQ(v, 0.2);
  // Ties resolve to the lowest class index.
  EXPECT_EQ(predict(m, random_features(rng)).label, GestureClass::PushPull);
}

TEST(Forward, DimensionMismatch) {
  const auto m = init_model(ModelSpec{}, 3);
  std::mt19937_64 rng(1);
  EXPECT_THROW(forward(m, random_features(rng, 63)), ContractError);
  EXPECT_THROW(infer(quantize(m), random_features(rng, 65)), ContractError);
}

TEST(Forward, SoftmaxStableForLargeLogits) {
  std::vector<double> z{1000.0, 999.0, -1000.0, 0.0, 1000.0};
  softmax_inplace(z);
  for (double v : z) EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(std::accumulate(z.begin(), z.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(argmax_prediction(z).label, GestureClass::PushPull);
}

TEST(Backprop, MatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = testsupport::gradient_check(seed);
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
    EXPECT_GT(r.checked, 3000u) << "seed " << seed;
  }
}

TEST(Train, ToySetReachesFullTrainingAccuracy) {
  const auto toy = toy_separable();
  const auto m0 = init_model(ModelSpec{}, 11);
  const auto m = train(m0, toy, TrainConfig{});
  EXPECT_EQ(accuracy(m, toy), 1.0);
  EXPECT_LT(mean_loss(m, toy), mean_loss(m0, toy));
  EXPECT_DOUBLE_EQ(m.meta.final_loss, mean_loss(m, toy));
  EXPECT_EQ(m.meta.epochs, 150);
}

TEST(Train, ZeroLearningRateLeavesModelUnchanged) {
  const auto m0 = init_model(ModelSpec{}, 4);
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 3;
  const auto m = train(m0, toy_separable(), cfg);
  EXPECT_EQ(m.hidden, m0.hidden);
  EXPECT_EQ(m.output, m0.output);
}

TEST(Train, Deterministic) {
  const auto a = trained_model(5);
  const auto b = trained_model(5);
  EXPECT_EQ(a.hidden, b.hidden);
  EXPECT_EQ(a.output, b.output);
}

TEST(Train, DivergenceReportsEpoch) {
  TrainConfig cfg;
  cfg.lr = 1e300;
  cfg.epochs = 5;
  try {
    train(init_model(ModelSpec{}, 1), toy_separable(), cfg);
    FAIL() << "expected TrainingDivergedError";
  } catch (const TrainingDivergedError& e) {
    EXPECT_GE(e.epoch(), 0);
    EXPECT_LT(e.epoch(), 5);
  }
}

TEST(Train, RejectsBadInput) {
  EXPECT_THROW(train(init_model(ModelSpec{}, 1), LabeledSet{}, TrainConfig{}), ContractError);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(init_model(ModelSpec{}, 1), toy_separable(), cfg), ConfigError);
}

TEST(Quantize, SizeAndPayload) {
  const auto q = quantize(init_model(ModelSpec{}, 1));
  EXPECT_EQ(q.serialized_size(), 3389u);
  EXPECT_EQ(serialize(q).size(), 3389u);
  EXPECT_LE(q.serialized_size(), kModelBudgetBytes);
}

TEST(Quantize, OversizedModelRejected) {
  ModelSpec big;
  big.hidden = 80;
  try {
    quantize(init_model(big, 1));
    FAIL() << "expected SizeError";
  } catch (const SizeError& e) {
    EXPECT_GT(e.bytes(), kModelBudgetBytes);
  }
}

TEST(Quantize, AllZeroLayer) {
  const DenseLayer zero(64, 48);
  const auto q = quantize_layer(zero);
  EXPECT_EQ(q.scale, 1.0f);
  for (auto v : q.weights) EXPECT_EQ(v, 0);
  for (auto v : q.bias) EXPECT_EQ(v, 0);
}

TEST(Quantize, RoundTripErrorWithinHalfScale) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = trained_model(seed);
    const auto q = quantize(m);
    for (auto [orig, ql, deq] :
         {std::tuple{&m.hidden, &q.hidden(), &q.dequantized().hidden},
          std::tuple{&m.output, &q.output(), &q.dequantized().output}}) {
      const double s = ql->scale;
      for (std::size_t i = 0; i < orig->weights.size(); ++i)
        ASSERT_LE(std::abs(orig->weights[i] - deq->weights[i]), s / 2 + 1e-12);
      for (std::size_t i = 0; i < orig->bias.size(); ++i)
        ASSERT_LE(std::abs(orig->bias[i] - deq->bias[i]), s / 2 + 1e-12);
      int peak = 0;
      for (auto v : ql->weights) peak = std::max(peak, std::abs(int{v}));
      for (auto v : ql->bias) peak = std::max(peak, std::abs(int{v}));
      EXPECT_EQ(peak, 127);
    }
  }
}

TEST(Quantize, LabelAgreementWithFloat) {
  const auto m = trained_model(21);
  const auto q = quantize(m);
  std::mt19937_64 rng(99);
  std::size_t agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_features(rng);
    const auto pq = infer(q, x);
    agree += predict(m, x).label == pq.label;
    EXPECT_GT(pq.confidence, 0.0);
    EXPECT_LT(pq.confidence, 1.0);
    const auto probs = forward(q.dequantized(), x);
    EXPECT_DOUBLE_EQ(pq.confidence, *std::max_element(probs.begin(), probs.end()));
  }
  EXPECT_GE(agree, 980u);
}

TEST(Quantize, QualityCheckRaisesOnLargeDrop) {
  const auto m = trained_model(3);
  // Pair the trained model with a quantized copy of a different, untrained model.
  const auto other = quantize(init_model(ModelSpec{}, 1234));
  LabeledSet holdout;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_features(rng);
    holdout.add(x, predict(m, x).label);
  }
  EXPECT_NO_THROW(check_quantization(m, quantize(m), holdout));
  EXPECT_THROW(check_quantization(m, other, holdout), QuantizationQualityError);
}
