#include "granusim/tfidf.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "granusim/error.hpp"
#include "granusim/io.hpp"

namespace granusim {

TfIdfModel fit_tfidf(const DocumentCollection& docs, const TokenizerConfig& config, std::size_t min_df) {
  TfIdfModel model;
  model.tokenizer = config;
  model.vocabulary = build_vocabulary(docs, config, min_df);
  const double n = static_cast<double>(model.vocabulary.n_documents());
  model.idf.resize(static_cast<Eigen::Index>(model.vocabulary.size()));
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) {
    const double df = static_cast<double>(model.vocabulary.document_frequency(i));
    model.idf[static_cast<Eigen::Index>(i)] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
  }
  return model;
}

SparseVector transform(const TfIdfModel& model, std::string_view text, bool normalize) {
  std::map<std::size_t, double> counts;
  for (const auto& tok : tokenize(text, model.tokenizer)) {
    if (auto idx = model.vocabulary.index_of(tok)) counts[*idx] += 1.0;
  }
  SparseVector vec(static_cast<Eigen::Index>(model.dimension()));
  vec.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [idx, count] : counts) {
    const auto i = static_cast<Eigen::Index>(idx);
    vec.insertBack(i) = count * model.idf[i];
  }
  if (normalize) {
    const double norm = vec.norm();
    if (norm > 0.0) vec /= norm;
  }
  return vec;
}

void save_tfidf(const std::filesystem::path& dir, const TfIdfModel& model) {
  std::ostringstream vocab;
  write_vocabulary(vocab, model.vocabulary);
  write_file(dir / "vocab.tsv", vocab.str());
  std::ostringstream idf;
  for (Eigen::Index i = 0; i < model.idf.size(); ++i) idf << i << '\t' << format_real(model.idf[i]) << '\n';
  write_file(dir / "idf.tsv", idf.str());
}

TfIdfModel load_tfidf(const std::filesystem::path& dir, const TokenizerConfig& config) {
  TfIdfModel model;
  model.tokenizer = config;
  {
    auto in = open_input(dir / "vocab.tsv");
    model.vocabulary = read_vocabulary(in);
  }
  model.idf = DenseVector::Zero(static_cast<Eigen::Index>(model.vocabulary.size()));
  std::vector<char> seen(model.vocabulary.size(), 0);
  auto in = open_input(dir / "idf.tsv");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const auto malformed = [&] { return DataError("idf line " + std::to_string(line_no) + " malformed"); };
    if (tab == std::string::npos) throw malformed();
    const auto value = parse_real(std::string_view(line).substr(tab + 1));
    std::size_t index = 0;
    try {
      index = std::stoul(line.substr(0, tab));
    } catch (const std::logic_error&) {
      throw malformed();
    }
    if (!value.has_value() || index >= seen.size() || seen[index]) throw malformed();
    const double idf = *value;
    if (!(idf > 0.0)) throw malformed();
    seen[index] = 1;
    model.idf[static_cast<Eigen::Index>(index)] = idf;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw DataError("idf file lacks index " + std::to_string(i));
  }
  return model;
}

}  // namespace granusim
