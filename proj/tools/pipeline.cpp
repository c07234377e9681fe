#include "pipeline.hpp"

#include "granusim/error.hpp"

namespace granusim::cli {

namespace {

constexpr std::string_view kContextualPrefix = "contextual:";

const DocumentCollection& need_docs(const ProviderInputs& in) {
  if (!in.docs) throw UsageError("missing input: --docs");
  return *in.docs;
}

const WordVectorStore& need_vectors(const ProviderInputs& in, const std::string& method) {
  if (!in.vectors) throw UsageError("method '" + method + "' needs word vectors: missing input --vectors");
  return *in.vectors;
}

TfIdfModel tfidf_model(const ProviderInputs& in, const ProviderSettings& s) {
  if (in.tfidf) return *in.tfidf;
  return fit_tfidf(in.fit_docs ? *in.fit_docs : need_docs(in), s.tokenizer, s.min_df);
}

}  // namespace

bool is_known_method(const std::string& method) {
  return method == "tfidf" || method == "average" || method == "sif" || method == "wme" ||
         (method.starts_with(kContextualPrefix) && method.size() > kContextualPrefix.size());
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& method, const ProviderInputs& inputs,
                                                 const ProviderSettings& settings) {
  if (!is_known_method(method)) {
    throw UsageError("unknown method '" + method + "' (expected tfidf, average, sif, wme or contextual:<tag>)");
  }
  if (method == "tfidf") {
    const auto& docs = need_docs(inputs);
    const TfIdfModel model = tfidf_model(inputs, settings);
    std::map<std::string, SparseVector> vectors;
    for (const auto& doc : docs) vectors.emplace(doc.id, transform(model, doc));
    return std::make_unique<SparseEmbeddingTable>("tfidf", std::move(vectors));
  }
  if (method.starts_with(kContextualPrefix)) {
    if (!inputs.embeddings) throw UsageError("method '" + method + "' needs missing input --embeddings");
    return std::make_unique<DenseEmbeddingTable>(inputs.embeddings->table(method.substr(kContextualPrefix.size())));
  }
  return std::make_unique<DenseEmbeddingTable>(method, embed_documents(method, inputs, settings));
}

EmbeddingMap embed_documents(const std::string& method, const ProviderInputs& inputs,
                             const ProviderSettings& settings) {
  const auto& docs = need_docs(inputs);
  EmbeddingMap out;
  if (method == "tfidf") {
    const TfIdfModel model = tfidf_model(inputs, settings);
    for (const auto& doc : docs) out.emplace(doc.id, DenseVector(transform(model, doc)));
  } else if (method == "average") {
    const auto& vectors = need_vectors(inputs, method);
    for (const auto& doc : docs) out.emplace(doc.id, average_embed(vectors, tokenize(doc.text, settings.tokenizer)));
  } else if (method == "sif") {
    const auto& vectors = need_vectors(inputs, method);
    const auto probs = unigram_probabilities(inputs.fit_docs ? *inputs.fit_docs : docs, settings.tokenizer);
    out = sif_embed_corpus(vectors, docs, settings.tokenizer, probs, settings.sif).embeddings;
  } else if (method == "wme") {
    WmeOptions wme = settings.wme;
    wme.threads = settings.threads;
    out = wme_embed(need_vectors(inputs, method), docs, settings.tokenizer, wme);
  } else if (method.starts_with(kContextualPrefix)) {
    if (!inputs.embeddings) throw UsageError("method '" + method + "' needs missing input --embeddings");
    const std::string tag = method.substr(kContextualPrefix.size());
    for (const auto& doc : docs) out.emplace(doc.id, inputs.embeddings->lookup(tag, doc.id));
  } else {
    throw UsageError("unknown method '" + method + "'");
  }
  return out;
}

}  // namespace granusim::cli
