#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "granusim/corpus.hpp"
#include "granusim/linalg.hpp"
#include "granusim/similarity.hpp"
#include "granusim/tfidf.hpp"

namespace granusim {

/// Binary labels, 1 = similar.
using Labels = std::vector<int>;

// ---------------------------------------------------------------------------
// Gradient-boosted decision stumps over one real feature.

/// x < threshold takes left_value, otherwise right_value.
struct Stump {
  double threshold = 0.0;
  double left_value = 0.0;
  double right_value = 0.0;
  double gain = 0.0;  // split gain when the stump was fitted

  double operator()(double x) const { return x < threshold ? left_value : right_value; }
};

struct StumpBoosterModel {
  std::vector<Stump> stumps;
  double learning_rate = 0.3;
  double base_score = 0.0;  // log-odds

  double margin(double feature) const;
};

struct BoosterParams {
  std::size_t rounds = 50;
  double learning_rate = 0.3;
  double min_gain = 0.0;
  double leaf_l2 = 1.0;  // lambda in the leaf weight -G / (H + lambda)
};

struct SplitChoice {
  double threshold = 0.0;
  double gain = 0.0;
  double left_value = 0.0;
  double right_value = 0.0;
};

/// Best split of one logistic-loss boosting round: candidate thresholds are
/// midpoints between consecutive distinct feature values and the gain is
/// ½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)]. Nullopt if all features tie.
std::optional<SplitChoice> best_split(std::span<const double> features, std::span<const double> gradients,
                                      std::span<const double> hessians, double leaf_l2);

/// Rounds stop early when no split gains more than min_gain.
StumpBoosterModel fit_stump_booster(std::span<const double> features, std::span<const int> labels,
                                    const BoosterParams& params = {});

struct Prediction {
  double probability = 0.5;
  int label = 1;  // 1 iff probability >= 0.5
};

Prediction predict(const StumpBoosterModel& model, double feature);

// ---------------------------------------------------------------------------
// Logistic regression over absolute TF-IDF differences.

struct LogRegModel {
  DenseVector weights;
  double bias = 0.0;
  double l2 = 0.0;
};

struct LogRegParams {
  double l2 = 1e-4;
  std::size_t epochs = 500;
  double step = 0.1;
};

/// Rows |tfidf(d1) − tfidf(d2)|, one per pair.
SparseRowMatrix<double> absdiff_features(const PairCollection& pairs, const DocumentCollection& docs,
                                         const TfIdfModel& tfidf);

/// Mean logistic loss plus (l2/2)‖w‖²; the bias is not penalized.
double logreg_loss(const LogRegModel& model, const SparseRowMatrix<double>& features, std::span<const int> labels);

struct LogRegGradient {
  DenseVector weights;
  double bias = 0.0;
};

LogRegGradient logreg_gradient(const LogRegModel& model, const SparseRowMatrix<double>& features,
                               std::span<const int> labels);

struct LogRegFit {
  LogRegModel model;
  std::vector<double> loss_history;  // loss before each epoch, then final
};

/// Full-batch gradient descent from zero weights with a fixed step.
LogRegFit fit_logreg(const SparseRowMatrix<double>& features, std::span<const int> labels,
                     const LogRegParams& params = {});

LogRegFit fit_logreg_absdiff(const PairCollection& pairs, const DocumentCollection& docs, const TfIdfModel& tfidf,
                             std::span<const int> labels, const LogRegParams& params = {});

double predict_probability(const LogRegModel& model, const SparseVector& features);

// ---------------------------------------------------------------------------
// Persistence.

using ClassifierModel = std::variant<StumpBoosterModel, LogRegModel>;

// `key value...` lines with a leading `kind stump_booster|logreg`.
void write_model(std::ostream& out, const ClassifierModel& model);
ClassifierModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Metrics and the interpolation-weight sweep.

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  std::size_t total() const { return true_positive + false_positive + true_negative + false_negative; }
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// Positive class is "similar". Precision, recall and F1 are 0 when their
/// denominators are.
Metrics evaluate(std::span<const int> predictions, std::span<const int> labels);

/// (candidate − baseline) / baseline; baseline must be positive.
double rel_improvement(double candidate, double baseline);

/// Labelled lexical and contextual scores for one task.
struct LabeledScores {
  std::vector<double> lexical;
  std::vector<double> contextual;
  Labels labels;
};

/// Keeps pairs labelled for `task`; each must carry g_t and g_r.
LabeledScores labeled_scores(const std::vector<ScoredPair>& scored, Task task);

/// Fits the booster on one training feature and evaluates on test.
Metrics fit_and_evaluate(std::span<const double> train_features, std::span<const int> train_labels,
                         std::span<const double> test_features, std::span<const int> test_labels,
                         const BoosterParams& params);

inline const std::vector<double> kDefaultSweepWeights = {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};

struct SweepRow {
  double weight = 0.0;
  Metrics metrics;
};

/// For each w: g_i = w·g_t + (1 − w)·g_r, booster fitted on train g_i and
/// evaluated on test g_i.
std::vector<SweepRow> sweep_weights(const LabeledScores& train, const LabeledScores& test,
                                    const std::vector<double>& weights = kDefaultSweepWeights,
                                    const BoosterParams& params = {});

enum class Headline { kF1, kAccuracy, kPrecision, kRecall };

double headline_value(const Metrics& m, Headline headline);

struct SweepTable {
  std::string task;
  std::string dataset;
  std::vector<SweepRow> rows;
};

/// One row per task/dataset, one column per weight, values to 2 decimals.
std::string format_sweep_table(const std::vector<SweepTable>& tables, Headline headline = Headline::kF1);

}  // namespace granusim
