#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "granusim/corpus.hpp"

namespace granusim {

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::size_t min_token_length = 1;  // in code points, >= 1
};

using Tokens = std::vector<std::string>;

/// Splits on Unicode whitespace. Punctuation (general category P*) acts as a
/// separator when stripping is on; lowercasing uses simple case mapping.
/// Ill-formed UTF-8 sequences become U+FFFD.
Tokens tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Dense term index with document frequencies over the fitting documents.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  std::optional<std::size_t> index_of(const std::string& term) const;
  const std::string& term(std::size_t index) const { return terms_[index]; }
  std::size_t document_frequency(std::size_t index) const { return df_[index]; }
  const std::vector<std::string>& terms() const { return terms_; }

  /// Validates the index bijection and df bounds; throws DataError.
  static Vocabulary from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                               std::size_t n_documents);

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_documents_ = 0;
};

/// Terms with document frequency >= min_df, indexed in first-seen order.
Vocabulary build_vocabulary(const DocumentCollection& docs, const TokenizerConfig& config,
                            std::size_t min_df = 1);

// Header line `n_documents<TAB>N`, then `term<TAB>index<TAB>df` per term.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

}  // namespace granusim
