#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "granusim/linalg.hpp"
#include "granusim/text.hpp"

namespace granusim {

/// Pretrained static word vectors, one row per word.
class WordVectorStore {
 public:
  WordVectorStore() = default;
  /// Throws DataError on duplicate words, row/word count mismatch,
  /// zero dimension or non-finite entries.
  WordVectorStore(std::vector<std::string> words, DenseMatrix vectors);

  std::size_t size() const { return words_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(vectors_.cols()); }
  std::optional<std::size_t> index_of(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.contains(word); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  auto vector(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const DenseMatrix& matrix() const { return vectors_; }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  DenseMatrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Optional `count dimension` header, then `word v1 ... vd` per line.
WordVectorStore read_word_vectors(std::istream& in);
WordVectorStore load_word_vectors(const std::filesystem::path& path);
void write_word_vectors(std::ostream& out, const WordVectorStore& store);

using EmbeddingMap = std::map<std::string, DenseVector>;

/// Mean of in-store token vectors, counting repeats; zero if none are known.
DenseVector average_embed(const WordVectorStore& store, const Tokens& tokens);

using WordProbabilities = std::unordered_map<std::string, double>;

/// Empirical unigram frequencies of the tokenized corpus.
WordProbabilities unigram_probabilities(const DocumentCollection& docs, const TokenizerConfig& config);

struct SifOptions {
  double a = 1e-3;
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct SifResult {
  EmbeddingMap embeddings;
  /// Absent when the embedding matrix is all zero and no removal happened.
  std::optional<DenseVector> principal_direction;
};

/// Smooth-inverse-frequency weighted averages, a / (a + p(w)), followed by
/// removal of the first principal direction of the document matrix. Words
/// missing from `word_probs` count as p = 0.
SifResult sif_embed_corpus(const WordVectorStore& store, const DocumentCollection& docs,
                           const TokenizerConfig& config, const WordProbabilities& word_probs,
                           const SifOptions& options = {});

/// Dominant right singular vector of `rows` (unit norm) by power iteration
/// on rowsᵀ·rows, started from the normalized all-ones vector.
std::optional<DenseVector> first_principal_direction(const DenseMatrix& rows, double tolerance = 1e-8,
                                                     std::size_t max_iterations = 10000);

}  // namespace granusim
