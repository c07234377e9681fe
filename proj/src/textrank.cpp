#include "granusim/textrank.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "granusim/error.hpp"

namespace granusim {

CooccurrenceGraph build_cooccurrence_graph(const Tokens& tokens, std::size_t window) {
  if (window < 2) throw UsageError("TextRank window must be at least 2");
  CooccurrenceGraph graph;
  std::unordered_map<std::string, std::size_t> node_of;
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto [it, inserted] = node_of.emplace(tok, graph.nodes.size());
    if (inserted) graph.nodes.push_back(tok);
    ids.push_back(it->second);
  }
  std::vector<std::set<std::size_t>> adjacency(graph.nodes.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size() && j < i + window; ++j) {
      if (ids[i] == ids[j]) continue;
      adjacency[ids[i]].insert(ids[j]);
      adjacency[ids[j]].insert(ids[i]);
    }
  }
  graph.neighbors.reserve(adjacency.size());
  for (auto& adj : adjacency) graph.neighbors.emplace_back(adj.begin(), adj.end());
  return graph;
}

DenseVector textrank_scores(const CooccurrenceGraph& graph, const KeywordParams& params) {
  if (!(params.damping > 0.0 && params.damping < 1.0)) throw UsageError("TextRank damping must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(graph.nodes.size());
  DenseVector score = DenseVector::Ones(n);
  DenseVector next(n);
  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    for (Eigen::Index v = 0; v < n; ++v) {
      double sum = 0.0;
      for (std::size_t u : graph.neighbors[static_cast<std::size_t>(v)]) {
        sum += score[static_cast<Eigen::Index>(u)] / static_cast<double>(graph.neighbors[u].size());
      }
      next[v] = (1.0 - params.damping) + params.damping * sum;
    }
    const double change = n == 0 ? 0.0 : (next - score).cwiseAbs().maxCoeff();
    score.swap(next);
    if (change < params.tolerance) break;
  }
  return score;
}

RankedKeywords textrank_keywords(const Tokens& tokens, const KeywordParams& params) {
  const CooccurrenceGraph graph = build_cooccurrence_graph(tokens, params.window);
  const DenseVector score = textrank_scores(graph, params);
  std::vector<std::size_t> order(graph.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = score[static_cast<Eigen::Index>(a)];
    const double sb = score[static_cast<Eigen::Index>(b)];
    if (sa != sb) return sa > sb;
    return graph.nodes[a] < graph.nodes[b];
  });
  RankedKeywords out;
  for (std::size_t k = 0; k < order.size() && k < params.top_k; ++k) {
    out.push_back({graph.nodes[order[k]], score[static_cast<Eigen::Index>(order[k])]});
  }
  return out;
}

}  // namespace granusim
