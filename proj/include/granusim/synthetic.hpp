#pragma once

#include <cstdint>

#include "granusim/corpus.hpp"
#include "granusim/word_vectors.hpp"

namespace granusim {

/// Shape of the generated corpus. Events are grouped into blocks; a block
/// mixes two topics and every pair inside a block is emitted, so blocks are
/// the connected components of the pair graph. Consecutive events in a block
/// sit in different topics and share `shared_entities` entity names, which
/// makes them lexically close but topically apart.
struct SyntheticProfile {
  std::size_t topic_lexicon = 30;    // words per topic
  std::size_t common_lexicon = 150;  // topic-neutral filler words
  std::size_t entity_pool = 150;     // rare names and numbers shared corpus-wide
  std::size_t entities_per_event = 4;
  std::size_t shared_entities = 3;
  std::size_t topic_words_per_doc = 10;
  std::size_t common_words_per_doc = 12;
  std::size_t entity_mentions_per_doc = 5;
  std::size_t noise_entities_per_doc = 2;
  std::size_t events_per_block = 4;
  std::size_t embedding_dim = 16;
  double topic_centroid_norm = 3.0;  // word vectors: topic centroid length
  double word_noise = 1.0;           // per-coordinate noise of every word vector
};

struct SyntheticCorpus {
  DocumentCollection docs;
  PairCollection pairs;  // granular = same event, abstract = same topic
};

/// Deterministic in `seed`. Throws UsageError unless n_events >= 2,
/// docs_per_event >= 2 and n_topics >= 2.
SyntheticCorpus generate_synthetic(std::uint64_t seed, std::size_t n_events, std::size_t docs_per_event,
                                   std::size_t n_topics, const SyntheticProfile& profile = {});

/// Static word vectors for the synthetic vocabulary: topic words cluster
/// around a per-topic centroid, entity and filler words are pure noise.
WordVectorStore synthetic_word_vectors(std::uint64_t seed, std::size_t n_topics,
                                       const SyntheticProfile& profile = {});

}  // namespace granusim
