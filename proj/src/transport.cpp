#include "granusim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "granusim/error.hpp"
#include "granusim/parallel.hpp"
#include "granusim/random.hpp"

namespace granusim {

WordDistribution make_distribution(const WordVectorStore& store, const Tokens& tokens) {
  WordDistribution dist;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<double> counts;
  double total = 0.0;
  for (const auto& tok : tokens) {
    if (!store.contains(tok)) continue;
    auto [it, inserted] = slot.emplace(tok, dist.words.size());
    if (inserted) {
      dist.words.push_back(tok);
      counts.push_back(0.0);
    }
    counts[it->second] += 1.0;
    total += 1.0;
  }
  dist.weights.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) dist.weights[static_cast<Eigen::Index>(i)] = counts[i] / total;
  return dist;
}

namespace {

struct Cell {
  Eigen::Index row;
  Eigen::Index col;
};

// Spanning tree over m row nodes [0, m) and n column nodes [m, m + n).
class BasisTree {
 public:
  BasisTree(Eigen::Index m, Eigen::Index n, const std::vector<Cell>& cells)
      : m_(m), adjacency_(static_cast<std::size_t>(m + n)) {
    for (std::size_t e = 0; e < cells.size(); ++e) {
      adjacency_[static_cast<std::size_t>(cells[e].row)].push_back(e);
      adjacency_[static_cast<std::size_t>(m + cells[e].col)].push_back(e);
    }
  }

  std::size_t other(const std::vector<Cell>& cells, std::size_t edge, std::size_t node) const {
    const auto row = static_cast<std::size_t>(cells[edge].row);
    return node == row ? static_cast<std::size_t>(m_ + cells[edge].col) : row;
  }

  const std::vector<std::size_t>& edges(std::size_t node) const { return adjacency_[node]; }
  std::size_t n_nodes() const { return adjacency_.size(); }

 private:
  Eigen::Index m_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// Flows on a spanning-tree basis are fixed by the marginals; peel leaves.
std::vector<double> tree_flows(const std::vector<Cell>& cells, const DenseVector& supply,
                               const DenseVector& demand) {
  const Eigen::Index m = supply.size();
  const Eigen::Index n = demand.size();
  BasisTree tree(m, n, cells);
  std::vector<double> remaining(static_cast<std::size_t>(m + n));
  for (Eigen::Index i = 0; i < m; ++i) remaining[static_cast<std::size_t>(i)] = supply[i];
  for (Eigen::Index j = 0; j < n; ++j) remaining[static_cast<std::size_t>(m + j)] = demand[j];
  std::vector<std::size_t> degree(tree.n_nodes());
  for (std::size_t v = 0; v < tree.n_nodes(); ++v) degree[v] = tree.edges(v).size();
  std::vector<char> done(cells.size(), 0);
  std::vector<double> flows(cells.size(), 0.0);
  std::deque<std::size_t> leaves;
  for (std::size_t v = 0; v < tree.n_nodes(); ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  while (!leaves.empty()) {
    const std::size_t v = leaves.front();
    leaves.pop_front();
    if (degree[v] != 1) continue;
    std::size_t edge = cells.size();
    for (std::size_t e : tree.edges(v)) {
      if (!done[e]) {
        edge = e;
        break;
      }
    }
    done[edge] = 1;
    flows[edge] = remaining[v];
    const std::size_t w = tree.other(cells, edge, v);
    remaining[w] -= remaining[v];
    remaining[v] = 0.0;
    --degree[v];
    if (--degree[w] == 1) leaves.push_back(w);
  }
  return flows;
}

}  // namespace

TransportPlan solve_transport(const DenseVector& supply, const DenseVector& demand, const DenseMatrix& cost) {
  const Eigen::Index m = supply.size();
  const Eigen::Index n = demand.size();
  if (m == 0 || n == 0) throw UsageError("transport problem needs non-empty supply and demand");
  if (cost.rows() != m || cost.cols() != n) throw UsageError("cost matrix shape does not match marginals");
  if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any()) {
    throw UsageError("transport marginals must be non-negative");
  }
  if (std::abs(supply.sum() - demand.sum()) > 1e-9) throw UsageError("transport marginals are unbalanced");
  if (!cost.allFinite()) throw NumericError("transport cost matrix has non-finite entries");

  // Northwest corner: a staircase of m + n - 1 cells, always a spanning tree.
  std::vector<Cell> basis;
  basis.reserve(static_cast<std::size_t>(m + n - 1));
  {
    DenseVector rs = supply;
    DenseVector cs = demand;
    Eigen::Index i = 0, j = 0;
    while (true) {
      basis.push_back({i, j});
      const double x = std::min(rs[i], cs[j]);
      rs[i] -= x;
      cs[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (rs[i] <= cs[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const std::size_t max_pivots = static_cast<std::size_t>(50 * (m + n) * (m + n) + 1000);
  const std::size_t bland_after = static_cast<std::size_t>(2 * (m + n) + 10);
  std::size_t degenerate_run = 0;

  std::vector<double> flows = tree_flows(basis, supply, demand);
  DenseMatrix in_basis = DenseMatrix::Zero(m, n);
  for (const auto& c : basis) in_basis(c.row, c.col) = 1.0;

  for (std::size_t pivot = 0;; ++pivot) {
    if (pivot == max_pivots) throw NumericError("transportation simplex exceeded its pivot limit");
    BasisTree tree(m, n, basis);

    // Potentials u (rows) and v (columns) with u_0 = 0 and u_i + v_j = c_ij on basis cells.
    std::vector<double> potential(tree.n_nodes(), 0.0);
    std::vector<char> visited(tree.n_nodes(), 0);
    std::vector<std::size_t> stack{0};
    visited[0] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : tree.edges(v)) {
        const std::size_t w = tree.other(basis, e, v);
        if (visited[w]) continue;
        visited[w] = 1;
        potential[w] = cost(basis[e].row, basis[e].col) - potential[v];
        stack.push_back(w);
      }
    }

    // Pricing: Dantzig's rule, switching to Bland's after a run of degenerate pivots.
    const bool bland = degenerate_run >= bland_after;
    Cell entering{-1, -1};
    double best = -eps;
    for (Eigen::Index i = 0; i < m && !(bland && entering.row >= 0); ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (in_basis(i, j) != 0.0) continue;
        const double reduced = cost(i, j) - potential[static_cast<std::size_t>(i)] -
                               potential[static_cast<std::size_t>(m + j)];
        if (reduced < best) {
          best = reduced;
          entering = {i, j};
          if (bland) break;
        }
      }
    }
    if (entering.row < 0) break;

    // Tree path from row node `entering.row` to column node `entering.col`.
    const std::size_t source = static_cast<std::size_t>(entering.row);
    const std::size_t target = static_cast<std::size_t>(m + entering.col);
    std::vector<std::size_t> parent_edge(tree.n_nodes(), basis.size());
    std::fill(visited.begin(), visited.end(), 0);
    stack.assign(1, source);
    visited[source] = 1;
    while (!stack.empty() && !visited[target]) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : tree.edges(v)) {
        const std::size_t w = tree.other(basis, e, v);
        if (visited[w]) continue;
        visited[w] = 1;
        parent_edge[w] = e;
        stack.push_back(w);
      }
    }
    // Walking back from the target column, path cells alternate -, +, -, ...
    std::vector<std::size_t> minus_cells, plus_cells;
    std::size_t node = target;
    bool minus = true;
    while (node != source) {
      const std::size_t e = parent_edge[node];
      (minus ? minus_cells : plus_cells).push_back(e);
      minus = !minus;
      node = tree.other(basis, e, node);
    }

    // Ratio test; ties leave by smallest cell index.
    std::size_t leaving = basis.size();
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t e : minus_cells) {
      const double f = std::max(flows[e], 0.0);
      const auto key = [&](std::size_t k) { return basis[k].row * n + basis[k].col; };
      if (f < theta || (f == theta && key(e) < key(leaving))) {
        theta = f;
        leaving = e;
      }
    }
    degenerate_run = theta <= 1e-15 ? degenerate_run + 1 : 0;

    in_basis(basis[leaving].row, basis[leaving].col) = 0.0;
    in_basis(entering.row, entering.col) = 1.0;
    basis[leaving] = entering;
    flows = tree_flows(basis, supply, demand);
  }

  TransportPlan plan;
  plan.flow = DenseMatrix::Zero(m, n);
  for (std::size_t e = 0; e < basis.size(); ++e) {
    plan.flow(basis[e].row, basis[e].col) = std::max(flows[e], 0.0);
  }
  plan.cost = (plan.flow.array() * cost.array()).sum();
  return plan;
}

DenseMatrix ground_distances(const WordVectorStore& store, const WordDistribution& from,
                             const WordDistribution& to) {
  const auto m = static_cast<Eigen::Index>(from.size());
  const auto n = static_cast<Eigen::Index>(to.size());
  DenseMatrix source(m, static_cast<Eigen::Index>(store.dimension()));
  DenseMatrix target(n, static_cast<Eigen::Index>(store.dimension()));
  auto fill = [&](const WordDistribution& dist, DenseMatrix& rows) {
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const auto idx = store.index_of(dist.words[i]);
      if (!idx) throw DataError("word '" + dist.words[i] + "' is not in the word-vector store");
      rows.row(static_cast<Eigen::Index>(i)) = store.vector(*idx).transpose();
    }
  };
  fill(from, source);
  fill(to, target);
  DenseMatrix dist(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) dist(i, j) = (source.row(i) - target.row(j)).norm();
  }
  return dist;
}

namespace {

void check_distribution(const WordDistribution& d, const WmdOptions& options, const char* name) {
  if (d.empty()) throw DataError(std::string("WMD: distribution ") + name + " has empty support");
  if (d.size() > options.max_support) {
    throw DataError(std::string("WMD: support of ") + name + " (" + std::to_string(d.size()) +
                    ") exceeds the solver limit " + std::to_string(options.max_support));
  }
  if (static_cast<std::size_t>(d.weights.size()) != d.size()) {
    throw DataError(std::string("WMD: distribution ") + name + " has mismatched weights");
  }
  if ((d.weights.array() <= 0.0).any() || std::abs(d.weights.sum() - 1.0) > 1e-9) {
    throw DataError(std::string("WMD: weights of ") + name + " must be positive and sum to 1");
  }
}

}  // namespace

TransportPlan wmd(const WordVectorStore& store, const WordDistribution& d1, const WordDistribution& d2,
                  const WmdOptions& options) {
  check_distribution(d1, options, "d1");
  check_distribution(d2, options, "d2");
  const DenseMatrix dist = ground_distances(store, d1, d2);
  // Rescale the demand total onto the supply total so rounding in the
  // normalized weights never reads as imbalance.
  const DenseVector demand = d2.weights * (d1.weights.sum() / d2.weights.sum());
  return solve_transport(d1.weights, demand, dist);
}

double wmd_similarity(double distance, double gamma) { return std::exp(-gamma * distance); }

std::vector<WordDistribution> sample_reference_documents(const WordVectorStore& store, const WmeOptions& options) {
  if (store.size() == 0) throw DataError("WME needs a non-empty word-vector store");
  if (options.n_references < 1) throw UsageError("WME needs R >= 1");
  if (options.max_reference_length < 1) throw UsageError("WME needs d_max >= 1");
  Rng rng(options.seed);
  std::vector<WordDistribution> refs;
  refs.reserve(options.n_references);
  for (std::size_t r = 0; r < options.n_references; ++r) {
    const std::size_t len = 1 + rng.uniform_index(options.max_reference_length);
    Tokens words;
    for (std::size_t k = 0; k < len; ++k) words.push_back(store.word(rng.uniform_index(store.size())));
    refs.push_back(make_distribution(store, words));
  }
  return refs;
}

EmbeddingMap wme_embed(const WordVectorStore& store, const DocumentCollection& docs,
                       const TokenizerConfig& config, const WmeOptions& options) {
  if (!(options.gamma > 0.0)) throw UsageError("WME needs gamma > 0");
  const auto refs = sample_reference_documents(store, options);
  const auto r = static_cast<Eigen::Index>(refs.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(refs.size()));

  std::vector<DenseVector> features(docs.size());
  parallel_for(docs.size(), options.threads, [&](std::size_t d) {
    DenseVector f = DenseVector::Zero(r);
    const WordDistribution dist = make_distribution(store, tokenize(docs[d].text, config));
    if (!dist.empty()) {
      for (Eigen::Index j = 0; j < r; ++j) {
        const double distance = wmd(store, dist, refs[static_cast<std::size_t>(j)], options.wmd).cost;
        f[j] = scale * std::exp(-options.gamma * distance);
      }
    }
    features[d] = std::move(f);
  });

  EmbeddingMap out;
  for (std::size_t d = 0; d < docs.size(); ++d) out.emplace(docs[d].id, std::move(features[d]));
  return out;
}

}  // namespace granusim
