#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qrnn/data.hpp"
#include "qrnn/training.hpp"

using namespace qrnn;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Quadratic bowl 0.5 * sum a_i (x_i - t_i)^2 with gradient a_i (x_i - t_i).
struct Bowl {
  std::vector<double> a;
  std::vector<double> t;
  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * a[i] * (x[i] - t[i]) * (x[i] - t[i]);
    return s;
  }
  std::vector<double> grad(std::span<const double> x) const {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = a[i] * (x[i] - t[i]);
    return g;
  }
};

SequenceSample sample_of(Sequence inputs, double target_probability) {
  SequenceSample s;
  s.inputs = std::move(inputs);
  s.target_probability = target_probability;
  return s;
}

}  // namespace

TEST(Mse, Examples) {
  const std::vector<double> a{0.1, 0.7, 0.3};
  EXPECT_EQ(mse_loss(a, a), 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(mse_loss(std::vector<double>{0.5}, std::vector<double>{0.0}), 0.25);
  EXPECT_THROW(mse_loss(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Spsa, ConstantLossGivesZero) {
  Rng rng(1);
  const LossFn f = [](std::span<const double>) { return 3.5; };
  for (double g : spsa_gradient(f, std::vector<double>{0.1, -2.0, 7.0}, 1e-3, rng)) EXPECT_EQ(g, 0.0);
}

TEST(Spsa, OneDimensionalLinearIsExact) {
  Rng rng(2);
  const LossFn f = [](std::span<const double> x) { return 2.5 * x[0]; };
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(spsa_gradient(f, std::vector<double>{0.3}, 1e-3, rng)[0], 2.5, 1e-9);
  }
}

TEST(Spsa, ExactlyTwoEvaluations) {
  Rng rng(3);
  int calls = 0;
  const LossFn f = [&](std::span<const double> x) {
    ++calls;
    return x[0] * x[1];
  };
  spsa_gradient(f, std::vector<double>{1.0, 2.0}, 0.01, rng);
  EXPECT_EQ(calls, 2);
  EXPECT_THROW(spsa_gradient(f, std::vector<double>{1.0}, 0.0, rng), std::invalid_argument);
}

TEST(Spsa, LinearExpectationIsGradient) {
  // For a linear loss the estimate is delta (delta . g); averaging over all
  // 2^n sign patterns gives g exactly.
  const std::vector<double> g{0.7, -1.3, 0.2};
  const LossFn f = [&](std::span<const double> x) { return g[0] * x[0] + g[1] * x[1] + g[2] * x[2]; };
  Rng rng(4);
  std::vector<double> mean(3, 0.0);
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) {
    const auto e = spsa_gradient(f, std::vector<double>{0.0, 0.0, 0.0}, 1e-3, rng);
    for (std::size_t j = 0; j < 3; ++j) mean[j] += e[j] / draws;
  }
  // Cross terms have standard deviation below 1.5 / sqrt(4000).
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(mean[j], g[j], 4 * 1.5 / std::sqrt(4000.0));
}

TEST(Spsa, QuadraticCosineSimilarity) {
  const Bowl bowl{{1.0, 2.0, 0.5, 3.0}, {0.2, -0.4, 1.0, 0.3}};
  const std::vector<double> x{1.0, 0.3, -0.5, 0.6};
  const auto g = bowl.grad(x);
  Rng rng(5);
  std::vector<double> mean(4, 0.0);
  for (int i = 0; i < 200; ++i) {
    const auto e = spsa_gradient(bowl, x, 1e-3, rng);
    for (std::size_t j = 0; j < 4; ++j) mean[j] += e[j] / 200;
  }
  double dot = 0.0;
  double nm = 0.0;
  double ng = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    dot += mean[j] * g[j];
    nm += mean[j] * mean[j];
    ng += g[j] * g[j];
  }
  EXPECT_GT(dot / std::sqrt(nm * ng), 0.9);
}

TEST(Spsa, QuadraticMeanWithinAnalyticSpread) {
  // On a quadratic the central difference is exact, so component i of one
  // estimate is g_i + sum_{j != i} g_j delta_i delta_j with variance
  // sum_{j != i} g_j^2. The mean of N draws must sit within 4 standard errors.
  const Bowl bowl{{1.0, 2.0, 0.5, 3.0}, {0.2, -0.4, 1.0, 0.3}};
  const std::vector<double> x{1.0, 0.3, -0.5, 0.6};
  const auto g = bowl.grad(x);
  const int draws = 500;
  Rng rng(6);
  std::vector<double> mean(4, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto e = spsa_gradient(bowl, x, 1e-3, rng);
    for (std::size_t j = 0; j < 4; ++j) mean[j] += e[j] / draws;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    double var = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != i) var += g[j] * g[j];
    }
    EXPECT_LE(std::abs(mean[i] - g[i]), 4 * std::sqrt(var / draws)) << "component " << i;
  }
}

TEST(Spsa, RademacherIsBalanced) {
  Rng rng(7);
  const auto d = rademacher(20000, rng);
  double sum = 0.0;
  for (double v : d) {
    EXPECT_TRUE(v == 1.0 || v == -1.0);
    sum += v;
  }
  EXPECT_LT(std::abs(sum) / 20000, 4 / std::sqrt(20000.0));
}

TEST(Adam, ZeroGradientLeavesParams) {
  AdamState s(3);
  std::vector<double> p{0.1, 0.2, 0.3};
  adam_step(s, std::vector<double>(3, 0.0), p, 0.03);
  EXPECT_EQ(p, (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(Adam, FirstStepIsLearningRate) {
  AdamState s(1);
  std::vector<double> p{0.5};
  adam_step(s, std::vector<double>{1.0}, p, 0.03);
  EXPECT_NEAR(p[0], 0.5 - 0.03, 1e-9);
  EXPECT_EQ(s.t, 1);
}

TEST(Adam, TwoStepHandTrace) {
  // g1 = 1, g2 = 3, lr = 0.03, defaults beta1 0.9, beta2 0.999, eps 1e-8.
  // t=1: m = 0.1, v = 0.001, m_hat = 1, v_hat = 1.
  // t=2: m = 0.09 + 0.3 = 0.39, v = 0.000999 + 0.009 = 0.009999,
  //      m_hat = 0.39 / 0.19, v_hat = 0.009999 / 0.001999.
  AdamState s(1);
  std::vector<double> p{0.0};
  adam_step(s, std::vector<double>{1.0}, p, 0.03);
  adam_step(s, std::vector<double>{3.0}, p, 0.03);
  const double step1 = 0.03 * 1.0 / (1.0 + 1e-8);
  const double step2 = 0.03 * (0.39 / 0.19) / (std::sqrt(0.009999 / 0.001999) + 1e-8);
  EXPECT_NEAR(p[0], -step1 - step2, 1e-12);
  EXPECT_NEAR(s.m[0], 0.39, 1e-15);
  EXPECT_NEAR(s.v[0], 0.009999, 1e-15);
}

TEST(Adam, ConstantGradientTwoSteps) {
  // Constant g keeps m_hat = g and v_hat = g^2, so every step is lr g / (|g| + eps).
  const std::vector<double> g{1.0, -2.0, 0.5};
  AdamState s(3);
  std::vector<double> p{0.0, 0.0, 0.0};
  adam_step(s, g, p, 0.03);
  adam_step(s, g, p, 0.03);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(p[i], -2 * 0.03 * g[i] / (std::abs(g[i]) + 1e-8), 1e-12);
    EXPECT_GE(s.v[i], 0.0);
  }
}

TEST(Adam, ShapeMismatchThrows) {
  AdamState s(2);
  std::vector<double> p{0.0, 0.0, 0.0};
  EXPECT_THROW(adam_step(s, std::vector<double>(3, 1.0), p, 0.03), std::invalid_argument);
}

TEST(Optimize, EvaluationNumbering) {
  std::vector<std::uint64_t> seen;
  const BatchLoss loss = [&](std::span<const double> p, std::uint64_t evaluation) {
    seen.push_back(evaluation);
    return p[0] * p[0];
  };
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.spsa_directions = 2;
  const TrainResult r = optimize(loss, {1.0}, cfg);
  const std::vector<std::uint64_t> expected{0, 1, 1, 2, 2, 3, 4, 4, 5, 5, 6};
  EXPECT_EQ(seen, expected);
  ASSERT_EQ(r.curve.size(), 2U);
  EXPECT_EQ(r.curve[0], 1.0);
  EXPECT_EQ(r.final_loss, r.params[0] * r.params[0]);
}

TEST(Optimize, ReducesQuadratic) {
  const Bowl bowl{{1.0, 2.0, 0.5}, {0.2, -0.4, 1.0}};
  const BatchLoss loss = [&](std::span<const double> p, std::uint64_t) { return bowl(p); };
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.learning_rate = 0.05;
  const TrainResult r = optimize(loss, {1.5, 1.0, -1.0}, cfg);
  EXPECT_LT(r.final_loss, 0.05 * r.curve.front());
}

TEST(Optimize, ConfigValidation) {
  const BatchLoss loss = [](std::span<const double>, std::uint64_t) { return 0.0; };
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(optimize(loss, {0.0}, cfg), std::invalid_argument);
  cfg = {};
  cfg.spsa_step = -1.0;
  EXPECT_THROW(optimize(loss, {0.0}, cfg), std::invalid_argument);
  cfg = {};
  cfg.noise = NoiseSpec{0.01, 0.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.exact = false;
  EXPECT_NO_THROW(cfg.validate());
}

class QrnnTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const FeatureTable table = synthetic_ar1(1, 139, 3);
    DatasetOptions o;
    o.sequence_length = 8;
    data_ = new PreparedDataset(prepare_dataset(table, o));
  }
  static void TearDownTestSuite() { delete data_; }
  static QrnnModel model(std::uint64_t seed) {
    QrnnConfig qc;
    qc.n_h = 3;
    qc.n_f = 2;
    return make_model(qc, data_->target_scale, seed);
  }
  static PreparedDataset* data_;
};

PreparedDataset* QrnnTraining::data_ = nullptr;

TEST_F(QrnnTraining, ZeroEpochsLeavesModel) {
  const QrnnModel m = model(1);
  AmplitudeFeatureMap enc(data_->n_features);
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainResult r = train(m, data_->samples.train, enc, cfg);
  EXPECT_EQ(r.params, m.params);
  EXPECT_TRUE(r.curve.empty());
  EXPECT_EQ(r.final_loss, evaluate(m, data_->samples.train, enc, cfg).mse);
}

TEST_F(QrnnTraining, EmptyTrainingSetThrows) {
  AmplitudeFeatureMap enc(data_->n_features);
  EXPECT_THROW(train(model(1), {}, enc, {}), std::invalid_argument);
  EXPECT_THROW(evaluate(model(1), {}, enc, {}), std::invalid_argument);
}

TEST_F(QrnnTraining, Ar1LossHalvesIn50Epochs) {
  ASSERT_GE(data_->samples.train.size(), 100U);
  AmplitudeFeatureMap enc(data_->n_features);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.seed = 1;
  const TrainResult r = train(model(1), data_->samples.train, enc, cfg);
  ASSERT_EQ(r.curve.size(), 50U);
  EXPECT_LE(r.final_loss, 0.5 * r.curve.front());
  const std::vector<double> first(r.curve.begin(), r.curve.begin() + 10);
  const std::vector<double> last(r.curve.end() - 10, r.curve.end());
  EXPECT_LT(median(last), median(first));
}

TEST_F(QrnnTraining, ExactModeDeterministic) {
  AmplitudeFeatureMap enc(data_->n_features);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 4;
  const std::vector<SequenceSample> subset(data_->samples.train.begin(), data_->samples.train.begin() + 20);
  const TrainResult a = train(model(4), subset, enc, cfg);
  cfg.threads = 1;
  const TrainResult b = train(model(4), subset, enc, cfg);
  EXPECT_EQ(a.curve, b.curve);
  EXPECT_EQ(a.params, b.params);
}

TEST_F(QrnnTraining, ShotModeDeterministic) {
  AmplitudeFeatureMap enc(data_->n_features);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.exact = false;
  cfg.shots = 256;
  cfg.noise = NoiseSpec{1e-3, 1e-2};
  cfg.seed = 5;
  const std::vector<SequenceSample> subset(data_->samples.train.begin(), data_->samples.train.begin() + 10);
  const TrainResult a = train(model(5), subset, enc, cfg);
  const TrainResult b = train(model(5), subset, enc, cfg);
  EXPECT_EQ(a.curve, b.curve);
  EXPECT_EQ(a.params, b.params);
  cfg.seed = 6;
  EXPECT_NE(train(model(5), subset, enc, cfg).curve, a.curve);
}

TEST(Evaluate, Examples) {
  // One angle-encoded feature qubit with zero parameters reads sin^2(x / 2).
  QrnnConfig qc;
  qc.n_h = 2;
  qc.n_f = 1;
  qc.encoding = EncodingKind::Angle;
  const QrnnModel m{qc, std::vector<double>(param_count(qc), 0.0), {-1.0, 1.0}, 0};
  AngleFeatureMap enc(1);
  std::vector<SequenceSample> perfect;
  for (double x : {0.1, 0.5, 0.9}) {
    perfect.push_back(sample_of({{0.3}, {x}}, std::pow(std::sin(x / 2), 2)));
  }
  const EvalResult r = evaluate(m, perfect, enc, {});
  EXPECT_NEAR(r.mse, 0.0, 1e-24);

  const double half = std::numbers::pi / 2;  // sin^2(pi / 4) = 0.5
  const std::vector<SequenceSample> split{sample_of({{half}}, 0.0), sample_of({{half}}, 1.0)};
  const EvalResult c = evaluate(m, split, enc, {});
  EXPECT_NEAR(c.mse, 0.25, 1e-12);
  EXPECT_NEAR(c.return_mse, 0.25 * 4.0, 1e-12);
  ASSERT_EQ(c.probabilities.size(), 2U);
  EXPECT_NEAR(c.probabilities[0], 0.5, 1e-12);
}

TEST(Classical, ParamCount) {
  EXPECT_EQ(ClassicalRnn::param_count(3, 3), 24U);
  EXPECT_EQ(make_classical(3, 3, {}, 1).params.size(), 24U);
}

TEST(Classical, ZeroWeightsGiveHalf) {
  ClassicalRnn rnn{3, 3, std::vector<double>(24, 0.0), {}};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    Sequence s(5, FeatureRow(3));
    for (auto& row : s) {
      for (double& v : row) v = n(rng);
    }
    EXPECT_EQ(classical_forward(rnn, s), 0.5);
  }
}

TEST(Classical, MatchesMatrixOracle) {
  const ClassicalRnn rnn = make_classical(3, 2, {}, 9);
  const auto& p = rnn.params;
  Eigen::Vector3d u(p[0], p[1], p[2]);
  Eigen::Matrix<double, 3, 2> v;
  v << p[3], p[4], p[5], p[6], p[7], p[8];
  Eigen::Matrix3d w;
  w << p[9], p[10], p[11], p[12], p[13], p[14], p[15], p[16], p[17];
  Eigen::Vector3d b(p[18], p[19], p[20]);
  const Sequence seq{{0.1, -0.4}, {0.7, 0.2}, {-0.3, 0.9}};
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
  for (const auto& x : seq) h = (v * Eigen::Vector2d(x[0], x[1]) + w * h + b).array().tanh();
  const double expected = 1.0 / (1.0 + std::exp(-u.dot(h)));
  EXPECT_NEAR(classical_forward(rnn, seq), expected, 1e-15);
}

TEST(Classical, ZeroRecurrenceDependsOnLastStepOnly) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ClassicalRnn rnn = make_classical(3, 3, {}, seed);
    std::fill(rnn.params.begin() + 12, rnn.params.begin() + 21, 0.0);  // W
    const FeatureRow last{n(rng), n(rng), n(rng)};
    const Sequence a{{n(rng), n(rng), n(rng)}, {n(rng), n(rng), n(rng)}, last};
    const Sequence b{{n(rng), n(rng), n(rng)}, last};
    EXPECT_EQ(classical_forward(rnn, a), classical_forward(rnn, b));
  }
}

TEST(Classical, ShapeErrors) {
  const ClassicalRnn rnn = make_classical(3, 3, {}, 1);
  EXPECT_THROW(classical_forward(rnn, Sequence{{1.0, 2.0}}), std::invalid_argument);
  ClassicalRnn bad = rnn;
  bad.params.pop_back();
  EXPECT_THROW(classical_forward(bad, Sequence{{1.0, 2.0, 3.0}}), std::invalid_argument);
}

TEST(Classical, TrainingReducesLoss) {
  const FeatureTable table = synthetic_ar1(2, 80, 3);
  DatasetOptions o;
  o.sequence_length = 4;
  const PreparedDataset ds = prepare_dataset(table, o);
  const ClassicalRnn rnn = make_classical(3, ds.n_features, ds.target_scale, 3);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 3;
  const TrainResult r = classical_train(rnn, ds.samples.train, cfg);
  EXPECT_LT(r.final_loss, r.curve.front());
  ClassicalRnn trained = rnn;
  trained.params = r.params;
  EXPECT_NEAR(classical_evaluate(trained, ds.samples.train).mse, r.final_loss, 1e-15);
}
