#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "granusim/error.hpp"
#include "granusim/model_lab.hpp"
#include "granusim/random.hpp"
#include "granusim/tfidf.hpp"
#include "oracles.hpp"

using namespace granusim;
using granusim::testing::docs_from_texts;

namespace {

// 0.5 * (1/1.5 + 1/1.5 - 0) for the balanced four-point example at p = 0.5,
// g = p - y, h = 1/4 and lambda = 1.
constexpr double kFirstGain = 2.0 / 3.0;

SparseRowMatrix<double> dense_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<Eigen::Triplet<double>> t;
  Eigen::Index r = 0, cols = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) {
      if (v != 0.0) t.emplace_back(r, c, v);
      ++c;
    }
    cols = std::max(cols, c);
    ++r;
  }
  SparseRowMatrix<double> m(r, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TEST(Booster, SeparableFourPoints) {
  const std::vector<double> x = {0.1, 0.2, 0.8, 0.9};
  const Labels y = {0, 0, 1, 1};
  BoosterParams p;
  p.rounds = 1;
  const auto model = fit_stump_booster(x, y, p);
  ASSERT_EQ(model.stumps.size(), 1u);
  EXPECT_GT(model.stumps[0].threshold, 0.2);
  EXPECT_LT(model.stumps[0].threshold, 0.8);
  EXPECT_NEAR(model.stumps[0].gain, kFirstGain, 1e-12);
  EXPECT_EQ(model.base_score, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(predict(model, x[i]).label, y[i]);
  EXPECT_EQ(predict(model, 5.0).label, 1);
}

TEST(Booster, ZeroRoundsPredictsBaseRate) {
  BoosterParams p;
  p.rounds = 0;
  const auto balanced = fit_stump_booster(std::vector<double>{1, 2, 3, 4}, Labels{0, 1, 0, 1}, p);
  EXPECT_TRUE(balanced.stumps.empty());
  EXPECT_DOUBLE_EQ(predict(balanced, 10.0).probability, 0.5);
  const auto skewed = fit_stump_booster(std::vector<double>{1, 2, 3, 4}, Labels{0, 1, 1, 1}, p);
  EXPECT_NEAR(predict(skewed, -3.0).probability, 0.75, 1e-15);
}

TEST(Booster, Rejections) {
  EXPECT_THROW(fit_stump_booster(std::vector<double>{1, 2, 3}, Labels{1, 1, 1}), DataError);
  EXPECT_THROW(fit_stump_booster(std::vector<double>{1, 2}, Labels{1}), DataError);
  EXPECT_THROW(fit_stump_booster(std::vector<double>{1, NAN}, Labels{0, 1}), NumericError);
  EXPECT_THROW(fit_stump_booster(std::vector<double>{1, 2}, Labels{0, 2}), DataError);
}

TEST(Booster, FirstGainMatchesExhaustiveSearch) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(60);
    std::vector<double> x(n);
    Labels y(n);
    for (auto& v : x) v = std::round(rng.uniform() * 20) / 20;  // repeated values
    for (auto& v : y) v = rng.uniform() < 0.4 ? 1 : 0;
    y[0] = 0;
    y[1] = 1;
    const double rate = std::accumulate(y.begin(), y.end(), 0.0) / n;
    const double p = rate;  // sigmoid(base_score)
    std::vector<double> g(n), h(n, p * (1 - p));
    for (std::size_t i = 0; i < n; ++i) g[i] = p - y[i];
    const auto split = best_split(x, g, h, 1.0);
    const double oracle = oracle::exhaustive_stump_gain(x, g, h, 1.0);
    if (!split) {
      EXPECT_TRUE(std::isinf(oracle));
      continue;
    }
    EXPECT_NEAR(split->gain, oracle, 1e-12);
  }
}

TEST(Booster, ShiftInvariance) {
  Rng rng(5);
  std::vector<double> x(40), shifted(40);
  Labels y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] + 0.3 * rng.normal() > 0.5 ? 1 : 0;
    shifted[i] = x[i] + 0.25;  // exact in binary
  }
  const auto a = fit_stump_booster(x, y);
  const auto b = fit_stump_booster(shifted, y);
  ASSERT_EQ(a.stumps.size(), b.stumps.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(predict(a, x[i]).probability, predict(b, shifted[i]).probability, 1e-12);
  }
}

TEST(Booster, MonotoneOnSeparableData) {
  // Every round splits between the classes, so each stump votes up.
  const std::vector<double> x = {0.1, 0.15, 0.3, 0.45, 0.5, 0.7, 0.8, 0.95};
  const Labels y = {0, 0, 0, 0, 1, 1, 1, 1};
  BoosterParams p;
  p.rounds = 5;
  const auto model = fit_stump_booster(x, y, p);
  ASSERT_EQ(model.stumps.size(), 5u);
  for (const auto& s : model.stumps) EXPECT_GT(s.right_value, s.left_value);
  double prev = 0.0;
  for (double v = -0.5; v <= 1.5; v += 0.01) {
    const double prob = predict(model, v).probability;
    EXPECT_GE(prob, prev);
    prev = prob;
  }
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  const auto x = dense_rows({{0.2, 0.0, 0.5}, {0.0, 0.7, 0.1}, {0.9, 0.3, 0.0}, {0.1, 0.1, 0.1}, {0.0, 0.0, 0.8}});
  const Labels y = {1, 0, 1, 0, 1};
  LogRegModel m;
  m.weights = Eigen::Vector3d(0.3, -0.7, 1.1);
  m.bias = -0.2;
  m.l2 = 0.05;
  const auto g = logreg_gradient(m, x, y);
  const double h = 1e-6;
  for (Eigen::Index j = 0; j < 3; ++j) {
    LogRegModel up = m, down = m;
    up.weights(j) += h;
    down.weights(j) -= h;
    const double fd = (logreg_loss(up, x, y) - logreg_loss(down, x, y)) / (2 * h);
    EXPECT_LT(std::abs(fd - g.weights(j)), 1e-5 * std::max(1.0, std::abs(fd)));
  }
  LogRegModel up = m, down = m;
  up.bias += h;
  down.bias -= h;
  const double fd = (logreg_loss(up, x, y) - logreg_loss(down, x, y)) / (2 * h);
  EXPECT_LT(std::abs(fd - g.bias), 1e-5 * std::max(1.0, std::abs(fd)));
}

TEST(LogReg, ZeroEpochsAndLossAtOrigin) {
  const auto x = dense_rows({{1, 0}, {0, 1}});
  LogRegParams p;
  p.epochs = 0;
  const auto fit = fit_logreg(x, Labels{0, 1}, p);
  EXPECT_EQ(fit.model.weights, Eigen::Vector2d::Zero());
  ASSERT_EQ(fit.loss_history.size(), 1u);
  EXPECT_DOUBLE_EQ(fit.loss_history[0], std::log(2.0));
  SparseVector v(2);
  v.insert(0) = 3.0;
  EXPECT_DOUBLE_EQ(predict_probability(fit.model, v), 0.5);
}

TEST(LogReg, LossNonIncreasingAndIdenticalDocsUseBiasOnly) {
  const auto docs = docs_from_texts({"storm hits coast", "storm hits the coast", "market rally stocks",
                                     "stocks rally", "storm coast", "storm hits coast"});
  const auto tfidf = fit_tfidf(docs);
  const PairCollection pairs = {make_pair_record("d0", "d1"), make_pair_record("d0", "d2"),
                                make_pair_record("d2", "d3"), make_pair_record("d1", "d3"),
                                make_pair_record("d4", "d0")};
  const Labels y = {1, 0, 1, 0, 1};
  const auto fit = fit_logreg_absdiff(pairs, docs, tfidf, y);
  for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
    EXPECT_LE(fit.loss_history[i], fit.loss_history[i - 1] + 1e-15);
  }
  const auto same = absdiff_features({make_pair_record("d0", "d5")}, docs, tfidf);
  EXPECT_EQ(same.nonZeros(), 0);
  const SparseVector row = same.row(0).transpose();
  EXPECT_DOUBLE_EQ(predict_probability(fit.model, row), 1.0 / (1.0 + std::exp(-fit.model.bias)));
}

TEST(Persistence, RoundTripsBothKinds) {
  StumpBoosterModel booster;
  booster.base_score = -0.3;
  booster.learning_rate = 0.3;
  booster.stumps = {{0.1 + 0.2, -1.0 / 3.0, 2.0 / 7.0, 0.5}};
  LogRegModel logreg;
  logreg.weights = Eigen::Vector3d(1e-300, -2.5, 1.0 / 3.0);
  logreg.bias = 0.1;
  logreg.l2 = 1e-4;
  for (const ClassifierModel& model : {ClassifierModel(booster), ClassifierModel(logreg)}) {
    std::ostringstream out;
    write_model(out, model);
    std::istringstream in(out.str());
    const auto back = read_model(in);
    std::ostringstream again;
    write_model(again, back);
    EXPECT_EQ(out.str(), again.str());
  }
  std::ostringstream out;
  write_model(out, ClassifierModel(booster));
  EXPECT_EQ(out.str().rfind("kind stump_booster", 0), 0u);
  std::istringstream in(out.str());
  const auto back = std::get<StumpBoosterModel>(read_model(in));
  EXPECT_EQ(back.stumps[0].threshold, 0.1 + 0.2);
  EXPECT_EQ(back.stumps[0].left_value, -1.0 / 3.0);
}

TEST(Persistence, Rejections) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_model(in);
  };
  EXPECT_THROW(parse("kind forest\n"), DataError);
  EXPECT_THROW(parse(""), DataError);
  EXPECT_THROW(parse("kind logreg\nbias x\n"), DataError);
}

TEST(Metrics, Examples) {
  const auto perfect = evaluate(Labels{1, 0, 1}, Labels{1, 0, 1});
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  const auto all_pos = evaluate(Labels{1, 1, 1, 1}, Labels{1, 1, 0, 0});
  EXPECT_EQ(all_pos.precision, 0.5);
  EXPECT_EQ(all_pos.recall, 1.0);
  EXPECT_NEAR(all_pos.f1, 2.0 / 3.0, 1e-15);
  const auto all_neg = evaluate(Labels{0, 0, 0}, Labels{1, 0, 0});
  EXPECT_EQ(all_neg.recall, 0.0);
  EXPECT_EQ(all_neg.f1, 0.0);
  EXPECT_THROW(evaluate(Labels{}, Labels{}), DataError);
}

TEST(Metrics, AgreesWithDefinitionsOnRandomInput) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Labels p(30), y(30);
    for (auto& v : p) v = rng.uniform() < 0.5;
    for (auto& v : y) v = rng.uniform() < 0.5;
    const auto m = evaluate(p, y);
    const auto& c = m.confusion;
    EXPECT_EQ(c.total(), 30u);
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(c.true_positive + c.true_negative) / 30);
    if (m.precision + m.recall > 0) {
      EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-15);
    }
  }
}

TEST(Metrics, RelativeImprovement) {
  EXPECT_NEAR(rel_improvement(0.90, 0.66), 0.36363636363636365, 1e-15);
  EXPECT_NEAR(rel_improvement(0.90, 0.85), 0.058823529411764705, 1e-15);
  EXPECT_EQ(rel_improvement(0.5, 0.5), 0.0);
  EXPECT_THROW(rel_improvement(0.5, 0.0), UsageError);
}

TEST(Sweep, EndpointsEqualSingleFeatureRuns) {
  Rng rng(10);
  LabeledScores train, test;
  for (auto* s : {&train, &test}) {
    for (int i = 0; i < 80; ++i) {
      const int y = rng.uniform() < 0.3;
      s->labels.push_back(y);
      s->lexical.push_back(std::clamp(0.3 * y + 0.4 * rng.uniform(), -1.0, 1.0));
      s->contextual.push_back(std::clamp(0.2 * y + 0.5 * rng.uniform(), -1.0, 1.0));
    }
  }
  const auto rows = sweep_weights(train, test, {0.0, 0.5, 1.0});
  const auto lexical = fit_and_evaluate(train.lexical, train.labels, test.lexical, test.labels, {});
  const auto contextual = fit_and_evaluate(train.contextual, train.labels, test.contextual, test.labels, {});
  EXPECT_EQ(rows[2].metrics.f1, lexical.f1);
  EXPECT_EQ(rows[2].metrics.accuracy, lexical.accuracy);
  EXPECT_EQ(rows[0].metrics.f1, contextual.f1);
  EXPECT_EQ(rows[0].metrics.accuracy, contextual.accuracy);
}

TEST(Sweep, TableLayout) {
  Metrics m;
  m.f1 = 0.756;
  m.accuracy = 0.5;
  const std::vector<SweepTable> tables = {{"granular", "ND", {{0.0, m}, {0.5, m}, {1.0, m}}},
                                          {"abstract", "ND", {{0.0, m}, {0.5, m}, {1.0, m}}}};
  const std::string text = format_sweep_table(tables);
  std::istringstream in(text);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_NE(header.find("w=0.5"), std::string::npos);
  EXPECT_NE(first.find("granular"), std::string::npos);
  EXPECT_NE(first.find("0.76"), std::string::npos);
  EXPECT_NE(second.find("abstract"), std::string::npos);
  EXPECT_EQ(header.size(), first.size());
  EXPECT_NE(format_sweep_table(tables, Headline::kAccuracy).find("0.50"), std::string::npos);
}
