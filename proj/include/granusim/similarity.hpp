#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "granusim/corpus.hpp"
#include "granusim/error.hpp"
#include "granusim/linalg.hpp"

namespace granusim {

/// uᵀv / (‖u‖‖v‖), 0 when either norm is 0, clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw DataError("cosine: dimension mismatch");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

template <typename Scalar>
Scalar cosine(const SparseVec<Scalar>& u, const SparseVec<Scalar>& v) {
  if (u.size() != v.size()) throw DataError("cosine: dimension mismatch");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// w·g_t + (1 − w)·g_r, with w in [0, 1].
template <typename Scalar>
Scalar interpolate(Scalar g_t, Scalar g_r, Scalar w) {
  if (!(w >= Scalar(0) && w <= Scalar(1))) throw UsageError("interpolation weight must lie in [0, 1]");
  return w * g_t + (Scalar(1) - w) * g_r;
}

/// Supplies the pair score for one embedding type.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string tag() const = 0;
  /// Throws DataError when either document has no embedding.
  virtual double similarity(const std::string& id1, const std::string& id2) const = 0;
};

/// Precomputed embeddings keyed by document id, compared by cosine.
template <typename Vec>
class EmbeddingTable : public EmbeddingProvider {
 public:
  EmbeddingTable(std::string tag, std::map<std::string, Vec> vectors)
      : tag_(std::move(tag)), vectors_(std::move(vectors)) {}

  std::string tag() const override { return tag_; }

  double similarity(const std::string& id1, const std::string& id2) const override {
    return cosine(lookup(id1), lookup(id2));
  }

  const Vec& lookup(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) throw DataError("no " + tag_ + " embedding for document '" + id + "'");
    return it->second;
  }

  const std::map<std::string, Vec>& vectors() const { return vectors_; }

 private:
  std::string tag_;
  std::map<std::string, Vec> vectors_;
};

using SparseEmbeddingTable = EmbeddingTable<SparseVector>;
using DenseEmbeddingTable = EmbeddingTable<DenseVector>;

struct ScoredPair {
  PairRecord pair;
  std::optional<double> g_t;  // lexical
  std::optional<double> g_r;  // contextual
  std::optional<double> g_i;  // interpolated
  std::vector<std::string> method_tags;
};

/// Scores pairs in input order. g_i is filled only when both providers and
/// a weight are given.
std::vector<ScoredPair> score_pairs(const PairCollection& pairs, const EmbeddingProvider& lexical,
                                    const EmbeddingProvider* contextual = nullptr,
                                    std::optional<double> w = std::nullopt);

// Pairs format plus g_t, g_r, g_i and method_tags keys.
void write_scored_pairs(std::ostream& out, const std::vector<ScoredPair>& scored);
std::vector<ScoredPair> read_scored_pairs(std::istream& in);
void save_scored_pairs(const std::filesystem::path& path, const std::vector<ScoredPair>& scored);
std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path);

}  // namespace granusim
