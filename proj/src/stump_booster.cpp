#include <algorithm>
#include <cmath>
#include <numeric>

#include "granusim/error.hpp"
#include "granusim/model_lab.hpp"

namespace granusim {

double StumpBoosterModel::margin(double feature) const {
  double sum = 0.0;
  for (const auto& s : stumps) sum += s(feature);
  return base_score + learning_rate * sum;
}

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace

std::optional<SplitChoice> best_split(std::span<const double> features, std::span<const double> gradients,
                                      std::span<const double> hessians, double leaf_l2) {
  const std::size_t n = features.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return features[a] < features[b]; });

  const double g_total = std::accumulate(gradients.begin(), gradients.end(), 0.0);
  const double h_total = std::accumulate(hessians.begin(), hessians.end(), 0.0);
  const double parent = leaf_score(g_total, h_total, leaf_l2);

  std::optional<SplitChoice> best;
  double g_left = 0.0, h_left = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    g_left += gradients[order[k]];
    h_left += hessians[order[k]];
    const double lo = features[order[k]];
    const double hi = features[order[k + 1]];
    if (!(lo < hi)) continue;
    const double g_right = g_total - g_left;
    const double h_right = h_total - h_left;
    const double gain =
        0.5 * (leaf_score(g_left, h_left, leaf_l2) + leaf_score(g_right, h_right, leaf_l2) - parent);
    if (!best || gain > best->gain) {
      best = SplitChoice{lo + (hi - lo) / 2.0, gain, -g_left / (h_left + leaf_l2), -g_right / (h_right + leaf_l2)};
    }
  }
  return best;
}

StumpBoosterModel fit_stump_booster(std::span<const double> features, std::span<const int> labels,
                                    const BoosterParams& params) {
  if (features.empty()) throw DataError("booster needs at least one training example");
  if (features.size() != labels.size()) throw DataError("booster features and labels differ in length");
  if (features.size() < 2) throw DataError("booster needs at least two training examples");
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == labels.size()) throw DataError("booster needs both classes in its labels");
  for (double x : features) {
    if (!std::isfinite(x)) throw NumericError("booster feature is not finite");
  }

  StumpBoosterModel model;
  model.learning_rate = params.learning_rate;
  const double rate = static_cast<double>(positives) / static_cast<double>(labels.size());
  model.base_score = std::log(rate / (1.0 - rate));

  const std::size_t n = features.size();
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  for (std::size_t round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - labels[i];
      hess[i] = p * (1.0 - p);
    }
    const auto split = best_split(features, grad, hess, params.leaf_l2);
    if (!split || !(split->gain > params.min_gain)) break;
    const Stump stump{split->threshold, split->left_value, split->right_value, split->gain};
    model.stumps.push_back(stump);
    for (std::size_t i = 0; i < n; ++i) margin[i] += params.learning_rate * stump(features[i]);
  }
  return model;
}

Prediction predict(const StumpBoosterModel& model, double feature) {
  const double p = sigmoid(model.margin(feature));
  return {p, p >= 0.5 ? 1 : 0};
}

}  // namespace granusim
