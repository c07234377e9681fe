#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "granusim/error.hpp"
#include "granusim/io.hpp"
#include "granusim/model_lab.hpp"

namespace granusim {

Metrics evaluate(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw DataError("predictions and labels differ in length");
  if (labels.empty()) throw DataError("cannot evaluate zero predictions");
  Metrics m;
  auto& c = m.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool y = labels[i] != 0;
    if (p && y) ++c.true_positive;
    else if (p) ++c.false_positive;
    else if (y) ++c.false_negative;
    else ++c.true_negative;
  }
  const auto n = static_cast<double>(c.total());
  m.accuracy = static_cast<double>(c.true_positive + c.true_negative) / n;
  const auto predicted_pos = c.true_positive + c.false_positive;
  const auto actual_pos = c.true_positive + c.false_negative;
  m.precision = predicted_pos ? static_cast<double>(c.true_positive) / static_cast<double>(predicted_pos) : 0.0;
  m.recall = actual_pos ? static_cast<double>(c.true_positive) / static_cast<double>(actual_pos) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

double rel_improvement(double candidate, double baseline) {
  if (!(baseline > 0.0)) throw UsageError("relative improvement needs a positive baseline");
  return (candidate - baseline) / baseline;
}

LabeledScores labeled_scores(const std::vector<ScoredPair>& scored, Task task) {
  LabeledScores out;
  for (const auto& s : scored) {
    const auto label = s.pair.label(task);
    if (!label) continue;
    if (!s.g_t || !s.g_r) {
      throw DataError("pair (" + s.pair.id1 + ", " + s.pair.id2 + ") lacks g_t or g_r");
    }
    out.lexical.push_back(*s.g_t);
    out.contextual.push_back(*s.g_r);
    out.labels.push_back(*label ? 1 : 0);
  }
  return out;
}

Metrics fit_and_evaluate(std::span<const double> train_features, std::span<const int> train_labels,
                         std::span<const double> test_features, std::span<const int> test_labels,
                         const BoosterParams& params) {
  const StumpBoosterModel model = fit_stump_booster(train_features, train_labels, params);
  std::vector<int> predicted;
  predicted.reserve(test_features.size());
  for (double x : test_features) predicted.push_back(predict(model, x).label);
  return evaluate(predicted, test_labels);
}

namespace {

std::vector<double> interpolated(const LabeledScores& s, double w) {
  std::vector<double> out(s.lexical.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = interpolate(s.lexical[i], s.contextual[i], w);
  return out;
}

}  // namespace

std::vector<SweepRow> sweep_weights(const LabeledScores& train, const LabeledScores& test,
                                    const std::vector<double>& weights, const BoosterParams& params) {
  std::vector<SweepRow> rows;
  rows.reserve(weights.size());
  for (double w : weights) {
    const auto train_f = interpolated(train, w);
    const auto test_f = interpolated(test, w);
    rows.push_back({w, fit_and_evaluate(train_f, train.labels, test_f, test.labels, params)});
  }
  return rows;
}

double headline_value(const Metrics& m, Headline headline) {
  switch (headline) {
    case Headline::kAccuracy: return m.accuracy;
    case Headline::kPrecision: return m.precision;
    case Headline::kRecall: return m.recall;
    case Headline::kF1: break;
  }
  return m.f1;
}

std::string format_sweep_table(const std::vector<SweepTable>& tables, Headline headline) {
  if (tables.empty()) return {};
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"task", "dataset"};
  for (const auto& row : tables.front().rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w=%g", row.weight);
    header.push_back(buf);
  }
  cells.push_back(header);
  for (const auto& t : tables) {
    std::vector<std::string> line = {t.task, t.dataset};
    for (const auto& row : t.rows) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", headline_value(row.metrics, headline));
      line.push_back(buf);
    }
    cells.push_back(line);
  }
  std::vector<std::size_t> width;
  for (const auto& line : cells) {
    width.resize(std::max(width.size(), line.size()), 0);
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out += "  ";
      if (i >= 2) out.append(width[i] - line[i].size(), ' ');
      out += line[i];
      if (i < 2 && i + 1 < line.size()) out.append(width[i] - line[i].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

void write_model(std::ostream& out, const ClassifierModel& model) {
  if (const auto* booster = std::get_if<StumpBoosterModel>(&model)) {
    out << "kind stump_booster\n";
    out << "learning_rate " << format_real(booster->learning_rate) << '\n';
    out << "base_score " << format_real(booster->base_score) << '\n';
    out << "stumps " << booster->stumps.size() << '\n';
    for (const auto& s : booster->stumps) {
      out << "stump " << format_real(s.threshold) << ' ' << format_real(s.left_value) << ' '
          << format_real(s.right_value) << ' ' << format_real(s.gain) << '\n';
    }
    return;
  }
  const auto& lr = std::get<LogRegModel>(model);
  out << "kind logreg\n";
  out << "bias " << format_real(lr.bias) << '\n';
  out << "l2 " << format_real(lr.l2) << '\n';
  out << "dimension " << lr.weights.size() << '\n';
  out << "weights";
  for (double w : lr.weights) out << ' ' << format_real(w);
  out << '\n';
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::istringstream expect(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string k;
      fields >> k;
      if (k != key) fail("expected '" + key + "', found '" + k + "'");
      return fields;
    }
    fail("unexpected end of file, expected '" + key + "'");
  }

  double real(std::istringstream& fields) {
    std::string f;
    if (!(fields >> f)) fail("missing value");
    auto v = parse_real(f);
    if (!v || !std::isfinite(*v)) fail("bad real '" + f + "'");
    return *v;
  }

  std::size_t count(std::istringstream& fields) {
    long long n = -1;
    if (!(fields >> n) || n < 0) fail("bad count");
    return static_cast<std::size_t>(n);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

ClassifierModel read_model(std::istream& in) {
  ModelReader reader(in);
  auto kind_fields = reader.expect("kind");
  std::string kind;
  kind_fields >> kind;
  if (kind == "stump_booster") {
    StumpBoosterModel m;
    auto f = reader.expect("learning_rate");
    m.learning_rate = reader.real(f);
    f = reader.expect("base_score");
    m.base_score = reader.real(f);
    f = reader.expect("stumps");
    const std::size_t n = reader.count(f);
    for (std::size_t i = 0; i < n; ++i) {
      f = reader.expect("stump");
      Stump s;
      s.threshold = reader.real(f);
      s.left_value = reader.real(f);
      s.right_value = reader.real(f);
      s.gain = reader.real(f);
      m.stumps.push_back(s);
    }
    return m;
  }
  if (kind == "logreg") {
    LogRegModel m;
    auto f = reader.expect("bias");
    m.bias = reader.real(f);
    f = reader.expect("l2");
    m.l2 = reader.real(f);
    f = reader.expect("dimension");
    const std::size_t dim = reader.count(f);
    f = reader.expect("weights");
    m.weights.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) m.weights[static_cast<Eigen::Index>(i)] = reader.real(f);
    return m;
  }
  reader.fail("unknown model kind '" + kind + "'");
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model) {
  std::ostringstream out;
  write_model(out, model);
  write_file(path, out.str());
}

ClassifierModel load_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_model(in);
}

}  // namespace granusim
