#pragma once

#include "granusim/corpus.hpp"
#include "granusim/textrank.hpp"
#include "granusim/word_vectors.hpp"

namespace granusim {

/// Proxy embedding of one document: the mean vector of its TextRank
/// keywords. Zero when no keyword is in the store.
DenseVector keyword_embedding(const WordVectorStore& store, const std::string& text, const TokenizerConfig& config,
                              const KeywordParams& keyword_params);

/// All unordered document pairs, canonical and sorted by (id1, id2), with
/// proxy_score set to the cosine of the keyword embeddings.
PairCollection proxy_score(const DocumentCollection& docs, const WordVectorStore& store,
                           const TokenizerConfig& config, const KeywordParams& keyword_params = {},
                           std::size_t threads = 1);

struct BinnedPairs {
  PairCollection positives;
  PairCollection easy_negatives;
  PairCollection hard_negatives;
  PairCollection unassigned;  // high proxy score, no label: annotation candidates
};

inline constexpr double kDefaultEasyThreshold = 0.25;

/// Below the threshold: easy negative. At or above: positive or hard
/// negative by granular label, unassigned without one (or when
/// `labels_available` is false). Throws DataError on a missing proxy score.
BinnedPairs bin_pairs(const PairCollection& scored, double easy_threshold = kDefaultEasyThreshold,
                      bool labels_available = true);

/// Removes edges until no three documents are pairwise connected. Each step
/// deletes, among edges lying on some triangle, the one with the lowest
/// proxy score (missing scores count as lowest; ties go to the
/// lexicographically smallest edge). Survivors keep their input order.
PairCollection transitivity_filter(const PairCollection& pairs);

}  // namespace granusim
