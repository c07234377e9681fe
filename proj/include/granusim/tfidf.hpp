#pragma once

#include <filesystem>
#include <string_view>

#include "granusim/linalg.hpp"
#include "granusim/text.hpp"

namespace granusim {

/// Smoothed inverse document frequency over a training vocabulary:
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfIdfModel {
  Vocabulary vocabulary;
  DenseVector idf;
  TokenizerConfig tokenizer;

  std::size_t dimension() const { return vocabulary.size(); }
};

TfIdfModel fit_tfidf(const DocumentCollection& docs, const TokenizerConfig& config = {},
                     std::size_t min_df = 1);

/// Raw term counts times idf, L2-normalized unless `normalize` is false.
/// Out-of-vocabulary tokens are ignored; such documents map to zero.
SparseVector transform(const TfIdfModel& model, std::string_view text, bool normalize = true);

inline SparseVector transform(const TfIdfModel& model, const Document& doc, bool normalize = true) {
  return transform(model, doc.text, normalize);
}

/// Writes `vocab.tsv` and `idf.tsv` into `dir`.
void save_tfidf(const std::filesystem::path& dir, const TfIdfModel& model);
TfIdfModel load_tfidf(const std::filesystem::path& dir, const TokenizerConfig& config = {});

}  // namespace granusim
