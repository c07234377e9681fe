#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "granusim/linalg.hpp"
#include "granusim/word_vectors.hpp"

namespace granusim {

/// Normalized bag of words over distinct in-store words.
struct WordDistribution {
  std::vector<std::string> words;
  DenseVector weights;

  std::size_t size() const { return words.size(); }
  bool empty() const { return words.empty(); }
};

/// Distribution of the in-store tokens, weights proportional to counts,
/// words in first-seen order. Empty if no token is in the store.
WordDistribution make_distribution(const WordVectorStore& store, const Tokens& tokens);

struct TransportPlan {
  DenseMatrix flow;  // flow(i, j) = mass moved from source i to target j
  double cost = 0.0;
};

/// Exact minimum-cost plan for a balanced transportation problem, solved by
/// the transportation simplex (northwest-corner start, MODI pricing). Supply
/// and demand must be non-negative with equal totals within 1e-9.
TransportPlan solve_transport(const DenseVector& supply, const DenseVector& demand, const DenseMatrix& cost);

/// Pairwise Euclidean distances between the words of two distributions.
DenseMatrix ground_distances(const WordVectorStore& store, const WordDistribution& from,
                             const WordDistribution& to);

struct WmdOptions {
  std::size_t max_support = 64;
};

/// Word Mover's Distance with Euclidean ground cost, solved exactly.
TransportPlan wmd(const WordVectorStore& store, const WordDistribution& d1, const WordDistribution& d2,
                  const WmdOptions& options = {});

/// exp(-gamma * distance): the direct kernel similarity variant.
double wmd_similarity(double distance, double gamma);

struct WmeOptions {
  std::size_t n_references = 128;  // R
  double gamma = 1.0;
  std::size_t max_reference_length = 6;  // d_max
  std::uint64_t seed = 0;
  WmdOptions wmd;
  std::size_t threads = 1;
};

/// Reference documents drawn for the random features, deterministic in seed.
std::vector<WordDistribution> sample_reference_documents(const WordVectorStore& store, const WmeOptions& options);

/// Word Mover's Embedding: feature j of a document is
/// exp(-gamma * WMD(doc, reference_j)) / sqrt(R). Documents without in-store
/// tokens map to the zero vector.
EmbeddingMap wme_embed(const WordVectorStore& store, const DocumentCollection& docs,
                       const TokenizerConfig& config, const WmeOptions& options = {});

}  // namespace granusim
