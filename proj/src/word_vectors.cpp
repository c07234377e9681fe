#include "granusim/word_vectors.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "granusim/error.hpp"
#include "granusim/io.hpp"
#include "granusim/log.hpp"

namespace granusim {

WordVectorStore::WordVectorStore(std::vector<std::string> words, DenseMatrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows()) {
    throw DataError("word count does not match vector row count");
  }
  if (vectors_.cols() < 1) throw DataError("word vectors must have dimension >= 1");
  if (!vectors_.allFinite()) throw DataError("word vectors contain non-finite values");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) throw DataError("duplicate word '" + words_[i] + "'");
  }
}

std::optional<std::size_t> WordVectorStore::index_of(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> fields;
  std::string f;
  while (in >> f) fields.push_back(f);
  return fields;
}

bool is_count(const std::string& field) {
  return !field.empty() && field.find_first_not_of("0123456789") == std::string::npos;
}

}  // namespace

WordVectorStore read_word_vectors(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> header_count;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && is_count(fields[0]) && is_count(fields[1])) {
      header_count = std::stoul(fields[0]);
      dim = std::stoul(fields[1]);
      if (dim == 0) throw DataError("line 1: header declares dimension 0");
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < 2) throw DataError(where + "word without vector values");
    const std::size_t row_dim = fields.size() - 1;
    if (dim == 0) dim = row_dim;
    if (row_dim != dim) {
      throw DataError(where + "dimension mismatch (expected " + std::to_string(dim) + ", got " +
                      std::to_string(row_dim) + ")");
    }
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      auto v = parse_real(fields[j + 1]);
      if (!v) throw DataError(where + "non-numeric value '" + fields[j + 1] + "'");
      if (!std::isfinite(*v)) throw DataError(where + "non-finite value");
      row[j] = *v;
    }
    words.push_back(std::move(fields[0]));
    rows.push_back(std::move(row));
  }
  if (header_count && *header_count != words.size()) {
    throw DataError("header declares " + std::to_string(*header_count) + " words but file has " +
                    std::to_string(words.size()));
  }
  if (words.empty()) throw DataError("word-vector file has no rows");
  DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return WordVectorStore(std::move(words), std::move(m));
}

WordVectorStore load_word_vectors(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_word_vectors(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_word_vectors(std::ostream& out, const WordVectorStore& store) {
  out << store.size() << ' ' << store.dimension() << '\n';
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.word(i);
    for (double v : store.vector(i)) out << ' ' << format_real(v);
    out << '\n';
  }
}

DenseVector average_embed(const WordVectorStore& store, const Tokens& tokens) {
  DenseVector sum = DenseVector::Zero(static_cast<Eigen::Index>(store.dimension()));
  std::size_t n = 0;
  for (const auto& tok : tokens) {
    if (auto i = store.index_of(tok)) {
      sum += store.vector(*i);
      ++n;
    }
  }
  if (n > 0) sum /= static_cast<double>(n);
  return sum;
}

WordProbabilities unigram_probabilities(const DocumentCollection& docs, const TokenizerConfig& config) {
  WordProbabilities probs;
  std::size_t total = 0;
  for (const auto& doc : docs) {
    for (auto& tok : tokenize(doc.text, config)) {
      probs[tok] += 1.0;
      ++total;
    }
  }
  if (total > 0) {
    for (auto& [word, p] : probs) p /= static_cast<double>(total);
  }
  return probs;
}

std::optional<DenseVector> first_principal_direction(const DenseMatrix& rows, double tolerance,
                                                     std::size_t max_iterations) {
  const Eigen::Index dim = rows.cols();
  if (dim == 0 || rows.rows() == 0 || rows.isZero(0.0)) return std::nullopt;
  const DenseMatrix gram = rows.transpose() * rows;

  DenseVector v = DenseVector::Ones(dim).normalized();
  // An all-ones start can be orthogonal to the row space; fall back to axes.
  for (Eigen::Index axis = 0; (gram * v).norm() == 0.0; ++axis) {
    if (axis == dim) return std::nullopt;
    v = DenseVector::Unit(dim, axis);
  }
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    DenseVector next = gram * v;
    next.normalize();
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < tolerance) return v;
  }
  log_warning("power iteration did not reach tolerance; using last iterate");
  return v;
}

SifResult sif_embed_corpus(const WordVectorStore& store, const DocumentCollection& docs,
                           const TokenizerConfig& config, const WordProbabilities& word_probs,
                           const SifOptions& options) {
  if (docs.empty()) throw DataError("SIF embedding needs a non-empty corpus");
  if (!(options.a > 0.0)) throw UsageError("SIF parameter a must be positive");
  for (const auto& [word, p] : word_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("word probability of '" + word + "' outside [0, 1]");
  }

  const auto dim = static_cast<Eigen::Index>(store.dimension());
  DenseMatrix rows = DenseMatrix::Zero(static_cast<Eigen::Index>(docs.size()), dim);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::size_t n = 0;
    for (const auto& tok : tokenize(docs[d].text, config)) {
      const auto i = store.index_of(tok);
      if (!i) continue;
      auto it = word_probs.find(tok);
      const double p = it == word_probs.end() ? 0.0 : it->second;
      rows.row(static_cast<Eigen::Index>(d)) += (options.a / (options.a + p)) * store.vector(*i).transpose();
      ++n;
    }
    if (n > 0) rows.row(static_cast<Eigen::Index>(d)) /= static_cast<double>(n);
  }

  SifResult result;
  result.principal_direction = first_principal_direction(rows, options.tolerance, options.max_iterations);
  if (const auto& u = result.principal_direction) {
    rows -= (rows * *u) * u->transpose();
  } else {
    log_warning("SIF embedding matrix is all zero; skipping principal component removal");
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    result.embeddings.emplace(docs[d].id, rows.row(static_cast<Eigen::Index>(d)).transpose());
  }
  return result;
}

}  // namespace granusim
