#pragma once

#include <memory>
#include <optional>
#include <string>

#include "granusim/corpus.hpp"
#include "granusim/gateway.hpp"
#include "granusim/similarity.hpp"
#include "granusim/tfidf.hpp"
#include "granusim/transport.hpp"
#include "granusim/word_vectors.hpp"

namespace granusim::cli {

struct ProviderSettings {
  TokenizerConfig tokenizer;
  std::size_t min_df = 1;
  SifOptions sif;
  WmeOptions wme;
  std::size_t threads = 1;
};

/// Inputs a provider may draw from; absent members are reported by name.
struct ProviderInputs {
  const DocumentCollection* docs = nullptr;      // documents to embed
  const DocumentCollection* fit_docs = nullptr;  // training documents (TF-IDF, SIF probabilities)
  const WordVectorStore* vectors = nullptr;
  const EmbeddingStore* embeddings = nullptr;
  const TfIdfModel* tfidf = nullptr;  // prefitted; used instead of fitting on fit_docs
};

/// Method names: tfidf, average, sif, wme, contextual:<tag>.
bool is_known_method(const std::string& method);

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& method, const ProviderInputs& inputs,
                                                 const ProviderSettings& settings);

/// Dense per-document vectors for the embedding-records export.
EmbeddingMap embed_documents(const std::string& method, const ProviderInputs& inputs,
                             const ProviderSettings& settings);

}  // namespace granusim::cli
