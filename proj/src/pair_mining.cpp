#include "granusim/pair_mining.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "granusim/error.hpp"
#include "granusim/parallel.hpp"
#include "granusim/similarity.hpp"

namespace granusim {

DenseVector keyword_embedding(const WordVectorStore& store, const std::string& text, const TokenizerConfig& config,
                              const KeywordParams& keyword_params) {
  Tokens keywords;
  for (const auto& kw : textrank_keywords(tokenize(text, config), keyword_params)) keywords.push_back(kw.term);
  return average_embed(store, keywords);
}

PairCollection proxy_score(const DocumentCollection& docs, const WordVectorStore& store,
                           const TokenizerConfig& config, const KeywordParams& keyword_params,
                           std::size_t threads) {
  std::vector<DenseVector> embeddings(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t i) {
    embeddings[i] = keyword_embedding(store, docs[i].text, config, keyword_params);
  });
  PairCollection pairs;
  pairs.reserve(docs.size() * (docs.size() - (docs.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j) {
      PairRecord rec = make_pair_record(docs[i].id, docs[j].id);
      rec.proxy_score = cosine(embeddings[i], embeddings[j]);
      pairs.push_back(std::move(rec));
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairRecord& a, const PairRecord& b) {
    return std::tie(a.id1, a.id2) < std::tie(b.id1, b.id2);
  });
  return pairs;
}

BinnedPairs bin_pairs(const PairCollection& scored, double easy_threshold, bool labels_available) {
  BinnedPairs bins;
  for (const auto& p : scored) {
    if (!p.proxy_score) throw DataError("pair (" + p.id1 + ", " + p.id2 + ") has no proxy_score");
    if (*p.proxy_score < easy_threshold) {
      bins.easy_negatives.push_back(p);
    } else if (!labels_available || !p.granular) {
      bins.unassigned.push_back(p);
    } else if (*p.granular) {
      bins.positives.push_back(p);
    } else {
      bins.hard_negatives.push_back(p);
    }
  }
  return bins;
}

namespace {

using Edge = std::pair<std::string, std::string>;

double score_key(const PairRecord& p) {
  return p.proxy_score.value_or(-std::numeric_limits<double>::infinity());
}

}  // namespace

PairCollection transitivity_filter(const PairCollection& pairs) {
  std::map<std::string, std::set<std::string>> adjacency;
  std::map<Edge, std::size_t> edge_index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    adjacency[p.id1].insert(p.id2);
    adjacency[p.id2].insert(p.id1);
    edge_index.emplace(Edge{p.id1, p.id2}, i);
  }
  std::vector<char> removed(pairs.size(), 0);

  auto on_triangle = [&](const Edge& e) {
    const auto& a = adjacency[e.first];
    const auto& b = adjacency[e.second];
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia == *ib) return true;
      (*ia < *ib) ? ++ia : ++ib;
    }
    return false;
  };

  // Removing an edge never creates a triangle, so one ascending pass over
  // (score, id1, id2) removes exactly the edges the restart-from-lowest rule
  // would.
  std::set<std::tuple<double, std::string, std::string>> order;
  for (const auto& [edge, i] : edge_index) order.emplace(score_key(pairs[i]), edge.first, edge.second);
  for (const auto& [score, id1, id2] : order) {
    const Edge e{id1, id2};
    if (!on_triangle(e)) continue;
    adjacency[e.first].erase(e.second);
    adjacency[e.second].erase(e.first);
    removed[edge_index.at(e)] = 1;
  }

  PairCollection out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!removed[i]) out.push_back(pairs[i]);
  }
  return out;
}

}  // namespace granusim
