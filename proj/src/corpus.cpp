#include "granusim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "granusim/error.hpp"
#include "granusim/random.hpp"

namespace granusim {

using nlohmann::json;

DocumentCollection::DocumentCollection(std::vector<Document> docs) : docs_(std::move(docs)) {
  index_.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (docs_[i].id.empty()) throw DataError("document at position " + std::to_string(i) + " has an empty id");
    if (!index_.emplace(docs_[i].id, i).second) {
      throw DataError("duplicate document id '" + docs_[i].id + "'");
    }
  }
}

const Document* DocumentCollection::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &docs_[it->second];
}

const Document& DocumentCollection::at(const std::string& id) const {
  if (const Document* doc = find(id)) return *doc;
  throw DataError("unknown document id '" + id + "'");
}

DocumentCollection DocumentCollection::subset(const std::vector<std::string>& ids) const {
  const std::set<std::string> wanted(ids.begin(), ids.end());
  std::vector<Document> out;
  for (const auto& doc : docs_) {
    if (wanted.contains(doc.id)) out.push_back(doc);
  }
  return DocumentCollection(std::move(out));
}

const char* task_name(Task task) { return task == Task::kGranular ? "granular" : "abstract"; }

Task parse_task(const std::string& name) {
  if (name == "granular") return Task::kGranular;
  if (name == "abstract") return Task::kAbstract;
  throw UsageError("unknown task '" + name + "' (expected granular or abstract)");
}

PairRecord make_pair_record(std::string a, std::string b) {
  if (a == b) throw DataError("self-pair on document '" + a + "'");
  PairRecord rec;
  if (b < a) std::swap(a, b);
  rec.id1 = std::move(a);
  rec.id2 = std::move(b);
  return rec;
}

namespace {

std::string line_context(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

json parse_line(const std::string& line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(line_context(line_no) + "malformed record (" + e.what() + ")");
  }
  if (!obj.is_object()) throw DataError(line_context(line_no) + "record is not an object");
  return obj;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string required_string(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DataError(line_context(line_no) + "missing or non-string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(line_context(line_no) + "field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<bool> optional_label(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number_integer() || it->is_number_unsigned()) {
    const auto v = it->get<long long>();
    if (v == 0 || v == 1) return v == 1;
  }
  throw DataError(line_context(line_no) + "field '" + key + "' must be 0 or 1");
}

std::optional<double> optional_number(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(line_context(line_no) + "field '" + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

DocumentCollection read_documents(std::istream& in, bool allow_empty) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json obj = parse_line(line, line_no);
    Document doc;
    doc.id = required_string(obj, "id", line_no);
    doc.text = required_string(obj, "text", line_no);
    doc.source = optional_string(obj, "source", line_no);
    doc.topic = optional_string(obj, "topic", line_no);
    if (auto ts = optional_string(obj, "timestamp", line_no)) {
      doc.timestamp = parse_iso8601(*ts);
      if (!doc.timestamp) throw DataError(line_context(line_no) + "bad ISO-8601 timestamp '" + *ts + "'");
    }
    if (doc.id.empty()) throw DataError(line_context(line_no) + "empty document id");
    if (doc.text.empty() && !allow_empty) {
      throw DataError(line_context(line_no) + "document '" + doc.id + "' has empty text");
    }
    if (!seen.insert(doc.id).second) {
      throw DataError(line_context(line_no) + "duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return DocumentCollection(std::move(docs));
}

DocumentCollection load_documents(const std::filesystem::path& path, bool allow_empty) {
  auto in = open_input(path);
  try {
    return read_documents(in, allow_empty);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_documents(std::ostream& out, const DocumentCollection& docs) {
  for (const auto& doc : docs) {
    json obj = json::object();
    obj["id"] = doc.id;
    obj["text"] = doc.text;
    if (doc.source) obj["source"] = *doc.source;
    if (doc.timestamp) obj["timestamp"] = format_iso8601(*doc.timestamp);
    if (doc.topic) obj["topic"] = *doc.topic;
    out << obj.dump() << '\n';
  }
}

PairCollection read_pairs(std::istream& in, const DocumentCollection& docs) {
  PairCollection pairs;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json obj = parse_line(line, line_no);
    std::string a = required_string(obj, "id1", line_no);
    std::string b = required_string(obj, "id2", line_no);
    for (const auto* id : {&a, &b}) {
      if (!docs.contains(*id)) throw DataError(line_context(line_no) + "unknown document id '" + *id + "'");
    }
    if (a == b) throw DataError(line_context(line_no) + "self-pair on document '" + a + "'");
    PairRecord rec = make_pair_record(std::move(a), std::move(b));
    rec.granular = optional_label(obj, "granular", line_no);
    rec.abstract = optional_label(obj, "abstract", line_no);
    rec.proxy_score = optional_number(obj, "proxy_score", line_no);
    if (rec.proxy_score && !(*rec.proxy_score >= -1.0 && *rec.proxy_score <= 1.0)) {
      throw DataError(line_context(line_no) + "proxy_score outside [-1, 1]");
    }
    if (!seen.emplace(rec.id1, rec.id2).second) {
      throw DataError(line_context(line_no) + "duplicate pair (" + rec.id1 + ", " + rec.id2 + ")");
    }
    pairs.push_back(std::move(rec));
  }
  return pairs;
}

PairCollection load_pairs(const std::filesystem::path& path, const DocumentCollection& docs) {
  auto in = open_input(path);
  try {
    return read_pairs(in, docs);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_pairs(std::ostream& out, const PairCollection& pairs) {
  for (const auto& p : pairs) {
    std::string line = "{\"id1\":" + json(p.id1).dump() + ",\"id2\":" + json(p.id2).dump();
    if (p.granular) line += ",\"granular\":" + std::string(*p.granular ? "1" : "0");
    if (p.abstract) line += ",\"abstract\":" + std::string(*p.abstract ? "1" : "0");
    if (p.proxy_score) line += ",\"proxy_score\":" + format_real(*p.proxy_score);
    out << line << "}\n";
  }
}

void save_pairs(const std::filesystem::path& path, const PairCollection& pairs) {
  std::ostringstream out;
  write_pairs(out, pairs);
  write_file(path, out.str());
}

std::vector<std::string> referenced_ids(const PairCollection& pairs) {
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    ids.insert(p.id1);
    ids.insert(p.id2);
  }
  return {ids.begin(), ids.end()};
}

std::size_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  std::string token;
  while (in >> token) ++n;
  return n;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Component {
  std::vector<std::size_t> pair_indices;
  std::string min_id;
  Timestamp earliest = Timestamp::max();
  Timestamp latest = Timestamp::min();
};

}  // namespace

DatasetSplit make_disjoint_split(const PairCollection& pairs, const DocumentCollection& docs,
                                 double test_fraction, bool temporal, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test_fraction must lie in (0, 1)");
  }
  const std::vector<std::string> ids = referenced_ids(pairs);
  std::unordered_map<std::string, std::size_t> node;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!docs.contains(ids[i])) throw DataError("pair references unknown document id '" + ids[i] + "'");
    node.emplace(ids[i], i);
  }
  if (temporal) {
    for (const auto& id : ids) {
      if (!docs.at(id).timestamp) {
        throw DataError("temporal split requires timestamps; document '" + id + "' has none");
      }
    }
  }

  DisjointSets sets(ids.size());
  for (const auto& p : pairs) sets.unite(node.at(p.id1), node.at(p.id2));

  // Roots are the smallest node index, so ordering by root orders by min id.
  std::map<std::size_t, Component> by_root;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Component& c = by_root[sets.find(node.at(pairs[i].id1))];
    c.pair_indices.push_back(i);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Component& c = by_root[sets.find(i)];
    if (c.min_id.empty()) c.min_id = ids[i];
    if (temporal) {
      const Timestamp ts = *docs.at(ids[i]).timestamp;
      c.earliest = std::min(c.earliest, ts);
      c.latest = std::max(c.latest, ts);
    }
  }
  std::vector<Component> components;
  components.reserve(by_root.size());
  for (auto& [root, c] : by_root) components.push_back(std::move(c));

  const double target = test_fraction * static_cast<double>(pairs.size());
  std::vector<char> in_test(components.size(), 0);
  std::vector<char> dropped(components.size(), 0);
  double test_pairs = 0.0;
  auto closer = [&](std::size_t n) {
    return std::abs(test_pairs + static_cast<double>(n) - target) < std::abs(test_pairs - target);
  };

  if (temporal) {
    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (components[a].earliest != components[b].earliest) {
        return components[a].earliest < components[b].earliest;
      }
      return components[a].min_id < components[b].min_id;
    });
    // The test side is a suffix of the chronological order.
    Timestamp cutoff = Timestamp::max();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Component& c = components[*it];
      if (!closer(c.pair_indices.size())) break;
      in_test[*it] = 1;
      test_pairs += static_cast<double>(c.pair_indices.size());
      cutoff = std::min(cutoff, c.earliest);
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (!in_test[i] && components[i].latest >= cutoff) dropped[i] = 1;
    }
  } else {
    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    for (std::size_t idx : order) {
      if (closer(components[idx].pair_indices.size())) {
        in_test[idx] = 1;
        test_pairs += static_cast<double>(components[idx].pair_indices.size());
      }
    }
  }

  std::vector<int> side(pairs.size(), 0);  // 0 train, 1 test, 2 dropped
  for (std::size_t c = 0; c < components.size(); ++c) {
    const int s = dropped[c] ? 2 : (in_test[c] ? 1 : 0);
    for (std::size_t i : components[c].pair_indices) side[i] = s;
  }
  DatasetSplit split;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (side[i] == 0 ? split.train : side[i] == 1 ? split.test : split.dropped).push_back(pairs[i]);
  }
  return split;
}

namespace {

std::optional<LabelCounts> count_labels(const PairCollection& pairs, Task task) {
  LabelCounts counts;
  bool any = false;
  for (const auto& p : pairs) {
    if (auto label = p.label(task)) {
      any = true;
      (*label ? counts.similar : counts.not_similar)++;
    }
  }
  if (!any) return std::nullopt;
  return counts;
}

}  // namespace

CorpusStats summarize(const DatasetSplit& split, const DocumentCollection& docs) {
  CorpusStats stats;
  stats.n_pairs_train = split.train.size();
  stats.n_pairs_test = split.test.size();
  stats.granular_train = count_labels(split.train, Task::kGranular);
  stats.granular_test = count_labels(split.test, Task::kGranular);
  stats.abstract_train = count_labels(split.train, Task::kAbstract);
  stats.abstract_test = count_labels(split.test, Task::kAbstract);
  if (!docs.empty()) {
    std::size_t words = 0;
    for (const auto& doc : docs) words += word_count(doc.text);
    stats.avg_words = static_cast<double>(words) / static_cast<double>(docs.size());
  }
  return stats;
}

std::string format_stats_table(const CorpusStats& stats, const std::string& dataset) {
  auto counts = [](const std::optional<LabelCounts>& c) {
    return c ? std::to_string(c->similar) + "/" + std::to_string(c->not_similar) : std::string("-");
  };
  char avg[32];
  std::snprintf(avg, sizeof(avg), "%.1f", stats.avg_words);
  const std::vector<std::vector<std::string>> rows = {
      {"dataset", "avg_words", "train", "test", "granular_train", "granular_test", "abstract_train",
       "abstract_test"},
      {dataset, avg, std::to_string(stats.n_pairs_train), std::to_string(stats.n_pairs_test),
       counts(stats.granular_train), counts(stats.granular_test), counts(stats.abstract_train),
       counts(stats.abstract_test)},
  };
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += "  ";
      out += row[i];
      if (i + 1 < row.size()) out.append(width[i] - row[i].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace granusim
