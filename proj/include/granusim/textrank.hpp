#pragma once

#include <string>
#include <vector>

#include "granusim/linalg.hpp"
#include "granusim/text.hpp"

namespace granusim {

struct KeywordParams {
  std::size_t window = 4;
  double damping = 0.85;
  std::size_t top_k = 10;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
};

struct Keyword {
  std::string term;
  double score = 0.0;
};

/// Non-increasing by score; equal scores ordered lexicographically.
using RankedKeywords = std::vector<Keyword>;

/// Undirected, unweighted co-occurrence graph. Distinct tokens are nodes in
/// first-seen order; tokens fewer than `window` positions apart are linked.
struct CooccurrenceGraph {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::size_t>> neighbors;  // sorted, no self loops
};

CooccurrenceGraph build_cooccurrence_graph(const Tokens& tokens, std::size_t window);

/// Jacobi iteration of S(v) = (1 - d) + d * sum_{u in N(v)} S(u) / deg(u)
/// from S = 1 until the largest change drops below the tolerance.
DenseVector textrank_scores(const CooccurrenceGraph& graph, const KeywordParams& params);

RankedKeywords textrank_keywords(const Tokens& tokens, const KeywordParams& params = {});

}  // namespace granusim
