#include <cmath>
#include <vector>

#include "granusim/error.hpp"
#include "granusim/model_lab.hpp"

namespace granusim {

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_labels(const SparseRowMatrix<double>& features, std::span<const int> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("logistic regression features and labels differ in length");
  }
  if (labels.empty()) throw DataError("logistic regression needs at least one example");
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
  }
}

}  // namespace

SparseRowMatrix<double> absdiff_features(const PairCollection& pairs, const DocumentCollection& docs,
                                         const TfIdfModel& tfidf) {
  SparseRowMatrix<double> x(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(tfidf.dimension()));
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const SparseVector a = transform(tfidf, docs.at(pairs[r].id1));
    const SparseVector b = transform(tfidf, docs.at(pairs[r].id2));
    const SparseVector diff = a - b;
    for (SparseVector::InnerIterator it(diff); it; ++it) {
      if (it.value() != 0.0) triplets.emplace_back(static_cast<Eigen::Index>(r), it.index(), std::abs(it.value()));
    }
  }
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

double logreg_loss(const LogRegModel& model, const SparseRowMatrix<double>& features, std::span<const int> labels) {
  check_labels(features, labels);
  const DenseVector z = (features * model.weights).array() + model.bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += softplus(z[i]) - labels[static_cast<std::size_t>(i)] * z[i];
  }
  return loss / static_cast<double>(labels.size()) + 0.5 * model.l2 * model.weights.squaredNorm();
}

LogRegGradient logreg_gradient(const LogRegModel& model, const SparseRowMatrix<double>& features,
                               std::span<const int> labels) {
  check_labels(features, labels);
  const DenseVector z = (features * model.weights).array() + model.bias;
  DenseVector residual(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) residual[i] = sigmoid(z[i]) - labels[static_cast<std::size_t>(i)];
  const double n = static_cast<double>(labels.size());
  LogRegGradient g;
  g.weights = (features.transpose() * residual) / n + model.l2 * model.weights;
  g.bias = residual.sum() / n;
  return g;
}

LogRegFit fit_logreg(const SparseRowMatrix<double>& features, std::span<const int> labels,
                     const LogRegParams& params) {
  check_labels(features, labels);
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw DataError("logistic regression needs both classes in its labels");
  if (!(params.step > 0.0) || params.l2 < 0.0) throw UsageError("logistic regression needs step > 0 and l2 >= 0");

  LogRegFit fit;
  fit.model.weights = DenseVector::Zero(features.cols());
  fit.model.l2 = params.l2;
  fit.loss_history.reserve(params.epochs + 1);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    fit.loss_history.push_back(logreg_loss(fit.model, features, labels));
    const LogRegGradient g = logreg_gradient(fit.model, features, labels);
    fit.model.weights -= params.step * g.weights;
    fit.model.bias -= params.step * g.bias;
  }
  fit.loss_history.push_back(logreg_loss(fit.model, features, labels));
  if (!fit.model.weights.allFinite() || !std::isfinite(fit.model.bias)) {
    throw NumericError("logistic regression diverged");
  }
  return fit;
}

LogRegFit fit_logreg_absdiff(const PairCollection& pairs, const DocumentCollection& docs, const TfIdfModel& tfidf,
                             std::span<const int> labels, const LogRegParams& params) {
  return fit_logreg(absdiff_features(pairs, docs, tfidf), labels, params);
}

double predict_probability(const LogRegModel& model, const SparseVector& features) {
  if (features.size() != model.weights.size()) throw DataError("feature dimension differs from model dimension");
  return sigmoid(features.dot(model.weights) + model.bias);
}

}  // namespace granusim
