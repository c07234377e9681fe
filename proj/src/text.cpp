#include "granusim/text.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "granusim/error.hpp"

namespace granusim {

Tokens tokenize(std::string_view text, const TokenizerConfig& config) {
  Tokens tokens;
  std::string current;
  std::size_t current_len = 0;
  auto flush = [&] {
    if (current_len >= std::max<std::size_t>(config.min_token_length, 1)) tokens.push_back(current);
    current.clear();
    current_len = 0;
  };

  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    if (u_isUWhiteSpace(c) || (config.strip_punctuation && u_ispunct(c))) {
      flush();
      continue;
    }
    if (config.lowercase) c = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    current.append(buf, static_cast<std::size_t>(n));
    ++current_len;
  }
  flush();
  return tokens;
}

std::optional<std::size_t> Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                                  std::size_t n_documents) {
  if (terms.size() != df.size()) throw DataError("vocabulary terms and frequencies differ in length");
  Vocabulary v;
  v.n_documents_ = n_documents;
  v.index_.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!v.index_.emplace(terms[i], i).second) throw DataError("duplicate vocabulary term '" + terms[i] + "'");
    if (df[i] < 1 || df[i] > n_documents) {
      throw DataError("document frequency of '" + terms[i] + "' outside [1, n_documents]");
    }
  }
  v.terms_ = std::move(terms);
  v.df_ = std::move(df);
  return v;
}

Vocabulary build_vocabulary(const DocumentCollection& docs, const TokenizerConfig& config,
                            std::size_t min_df) {
  if (docs.empty()) throw DataError("cannot build a vocabulary from zero documents");
  std::vector<std::string> seen_order;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    Tokens tokens = tokenize(doc.text, config);
    std::unordered_map<std::string, bool> in_doc;
    for (auto& tok : tokens) {
      if (!in_doc.emplace(tok, true).second) continue;
      auto [it, inserted] = df.emplace(tok, 0);
      if (inserted) seen_order.push_back(tok);
      ++it->second;
    }
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (auto& term : seen_order) {
    const std::size_t f = df.at(term);
    if (f >= min_df) {
      terms.push_back(term);
      freqs.push_back(f);
    }
  }
  if (terms.empty()) throw DataError("vocabulary is empty after min_df filtering");
  return Vocabulary::from_parts(std::move(terms), std::move(freqs), docs.size());
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  out << "n_documents\t" << vocab.n_documents() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.term(i) << '\t' << i << '\t' << vocab.document_frequency(i) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("vocabulary file is empty");
  std::size_t n_documents = 0;
  {
    std::istringstream header(line);
    std::string key;
    if (!(header >> key >> n_documents) || key != "n_documents") {
      throw DataError("vocabulary header must be 'n_documents<TAB>N'");
    }
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw DataError("vocabulary line " + std::to_string(line_no) + " malformed");
    try {
      const std::size_t index = std::stoul(line.substr(t1 + 1, t2 - t1 - 1));
      if (index != terms.size()) {
        throw DataError("vocabulary line " + std::to_string(line_no) + " index out of sequence");
      }
      terms.push_back(line.substr(0, t1));
      df.push_back(std::stoul(line.substr(t2 + 1)));
    } catch (const std::logic_error&) {
      throw DataError("vocabulary line " + std::to_string(line_no) + " has a non-numeric field");
    }
  }
  return Vocabulary::from_parts(std::move(terms), std::move(df), n_documents);
}

}  // namespace granusim
