#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "granusim/io.hpp"

namespace granusim {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> source;
  std::optional<Timestamp> timestamp;
  std::optional<std::string> topic;
};

/// Immutable, id-indexed collection. Ids are non-empty and unique.
class DocumentCollection {
 public:
  DocumentCollection() = default;
  explicit DocumentCollection(std::vector<Document> docs);

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  auto begin() const { return docs_.begin(); }
  auto end() const { return docs_.end(); }
  std::span<const Document> documents() const { return docs_; }

  bool contains(const std::string& id) const { return index_.contains(id); }
  const Document* find(const std::string& id) const;
  /// Throws DataError for an unknown id.
  const Document& at(const std::string& id) const;

  /// Documents whose id is in `ids`, in collection order.
  DocumentCollection subset(const std::vector<std::string>& ids) const;

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Task { kGranular, kAbstract };

const char* task_name(Task task);
/// "granular" or "abstract"; throws UsageError otherwise.
Task parse_task(const std::string& name);

/// A document pair, stored with id1 < id2.
struct PairRecord {
  std::string id1;
  std::string id2;
  std::optional<bool> granular;
  std::optional<bool> abstract;
  std::optional<double> proxy_score;

  std::optional<bool> label(Task task) const {
    return task == Task::kGranular ? granular : abstract;
  }
};

/// Builds a canonical record from ids in either order. Throws on self-pairs.
PairRecord make_pair_record(std::string a, std::string b);

using PairCollection = std::vector<PairRecord>;

struct DatasetSplit {
  PairCollection train;
  PairCollection test;
  PairCollection dropped;
};

struct LabelCounts {
  std::size_t similar = 0;
  std::size_t not_similar = 0;
};

struct CorpusStats {
  std::size_t n_pairs_train = 0;
  std::size_t n_pairs_test = 0;
  std::optional<LabelCounts> granular_train, granular_test;
  std::optional<LabelCounts> abstract_train, abstract_test;
  double avg_words = 0.0;
};

// Documents and pairs are stored one JSON object per line.
DocumentCollection read_documents(std::istream& in, bool allow_empty = false);
DocumentCollection load_documents(const std::filesystem::path& path, bool allow_empty = false);
void write_documents(std::ostream& out, const DocumentCollection& docs);

PairCollection read_pairs(std::istream& in, const DocumentCollection& docs);
PairCollection load_pairs(const std::filesystem::path& path, const DocumentCollection& docs);
void write_pairs(std::ostream& out, const PairCollection& pairs);
void save_pairs(const std::filesystem::path& path, const PairCollection& pairs);

/// Ids referenced by the pairs, sorted and unique.
std::vector<std::string> referenced_ids(const PairCollection& pairs);

/// Whitespace-token count of the raw text.
std::size_t word_count(const std::string& text);

/// Assigns connected components of the pair graph wholesale to train or
/// test. In temporal mode components are ordered by earliest timestamp and
/// the latest ones form the test side; train components reaching past the
/// earliest test timestamp are moved to `dropped`.
DatasetSplit make_disjoint_split(const PairCollection& pairs, const DocumentCollection& docs,
                                 double test_fraction, bool temporal, std::uint64_t seed);

CorpusStats summarize(const DatasetSplit& split, const DocumentCollection& docs);

/// Train/test x granular/abstract table, one row for `dataset`.
std::string format_stats_table(const CorpusStats& stats, const std::string& dataset);

}  // namespace granusim
