#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "granusim/corpus.hpp"
#include "granusim/word_vectors.hpp"

namespace granusim::testing {

inline DocumentCollection docs_from_texts(const std::vector<std::string>& texts) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({"d" + std::to_string(i), texts[i], {}, {}, {}});
  return DocumentCollection(std::move(docs));
}

inline DocumentCollection docs_with_ids(const std::vector<std::string>& ids) {
  std::vector<Document> docs;
  for (const auto& id : ids) docs.push_back({id, "text of " + id, {}, {}, {}});
  return DocumentCollection(std::move(docs));
}

inline WordVectorStore store_from(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::vector<std::string> words;
  DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().second.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    words.push_back(rows[i].first);
    for (std::size_t j = 0; j < rows[i].second.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].second[j];
    }
  }
  return WordVectorStore(std::move(words), std::move(m));
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("granusim-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace granusim::testing
