// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "granusim/error.hpp"
#include "granusim/model_lab.hpp"
#include "granusim/pair_mining.hpp"
#include "granusim/random.hpp"
#include "granusim/synthetic.hpp"
#include "granusim/textrank.hpp"
#include "granusim/transport.hpp"
#include "granusim/word_vectors.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace granusim;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Same defaults as `granusim sweep-w` without --docs.
constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kEvents = 72, kDocsPerEvent = 3, kTopics = 6;
constexpr double kTestFraction = 0.3;

struct SweepFixture {
  SyntheticCorpus corpus;
  LabeledScores train, test;
};

SweepFixture synthetic_sweep_inputs() {
  SweepFixture f;
  f.corpus = generate_synthetic(kSeed, kEvents, kDocsPerEvent, kTopics);
  const auto split = make_disjoint_split(f.corpus.pairs, f.corpus.docs, kTestFraction, false, kSeed);
  const auto fit_docs = f.corpus.docs.subset(referenced_ids(split.train));
  const auto vectors = synthetic_word_vectors(kSeed, kTopics);
  cli::ProviderInputs in;
  in.docs = &f.corpus.docs;
  in.fit_docs = &fit_docs;
  in.vectors = &vectors;
  const auto lexical = cli::make_provider("tfidf", in, {});
  const auto contextual = cli::make_provider("average", in, {});
  f.train = labeled_scores(score_pairs(split.train, *lexical, contextual.get()), Task::kGranular);
  f.test = labeled_scores(score_pairs(split.test, *lexical, contextual.get()), Task::kGranular);
  return f;
}

bool same_bits(const Metrics& a, const Metrics& b) {
  return std::memcmp(&a.f1, &b.f1, sizeof(double)) == 0 && std::memcmp(&a.accuracy, &b.accuracy, sizeof(double)) == 0 &&
         std::memcmp(&a.precision, &b.precision, sizeof(double)) == 0 &&
         std::memcmp(&a.recall, &b.recall, sizeof(double)) == 0;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Verdict rel_improvement_arithmetic() {
  const double big = 100 * rel_improvement(0.90, 0.66);
  const double small = 100 * rel_improvement(0.90, 0.85);
  return {std::abs(big - 36.4) <= 0.1 && std::abs(small - 5.9) <= 0.1, fmt("%.2f%% and %.2f%%", big, small)};
}

Verdict endpoint_equivalence() {
  const auto f = synthetic_sweep_inputs();
  const auto rows = sweep_weights(f.train, f.test, {0.0, 1.0});
  const auto lexical = fit_and_evaluate(f.train.lexical, f.train.labels, f.test.lexical, f.test.labels, {});
  const auto contextual =
      fit_and_evaluate(f.train.contextual, f.train.labels, f.test.contextual, f.test.labels, {});
  const bool ok = same_bits(rows[1].metrics, lexical) && same_bits(rows[0].metrics, contextual);
  return {ok, fmt("w=1 f1 %.4f vs tfidf %.4f; w=0 f1 %.4f", rows[1].metrics.f1, lexical.f1, rows[0].metrics.f1) +
                  fmt(" vs average %.4f", contextual.f1)};
}

Verdict sweep_shape() {
  const auto f = synthetic_sweep_inputs();
  const auto rows = sweep_weights(f.train, f.test);
  double w0 = NAN, w1 = NAN, best_interior = -1, best_w = NAN;
  for (const auto& r : rows) {
    if (r.weight == 0.0) w0 = r.metrics.f1;
    if (r.weight == 1.0) w1 = r.metrics.f1;
    if ((r.weight == 0.3 || r.weight == 0.5 || r.weight == 0.7) && r.metrics.f1 > best_interior) {
      best_interior = r.metrics.f1;
      best_w = r.weight;
    }
  }
  const bool big_enough = f.corpus.docs.size() >= 200 && f.corpus.pairs.size() >= 500;
  const bool ok = big_enough && best_interior >= std::max(w0, w1) + 0.01 && w1 > w0;
  return {ok, std::to_string(f.corpus.docs.size()) + " docs, " + std::to_string(f.corpus.pairs.size()) +
                  " pairs; granular F1 " + fmt("w0 %.3f, w%.1f ", w0, best_w) + fmt("%.3f, w1 %.3f", best_interior, w1)};
}

Verdict wmd_exactness() {
  Rng rng(4);
  const std::size_t vocab = 12, dim = 3;
  std::vector<std::string> words;
  DenseMatrix m(vocab, dim);
  for (std::size_t i = 0; i < vocab; ++i) {
    words.push_back("v" + std::to_string(i));
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rng.normal();
  }
  const WordVectorStore store(words, m);
  auto random_dist = [&](std::size_t max_len) {
    Tokens t;
    const std::size_t len = 1 + rng.uniform_index(max_len);
    for (std::size_t k = 0; k < len; ++k) t.push_back(words[rng.uniform_index(vocab)]);
    return make_distribution(store, t);
  };
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    auto a = random_dist(3), b = random_dist(3);
    while (a.size() > 3) a = random_dist(3);
    while (b.size() > 3) b = random_dist(3);
    const double solver = wmd(store, a, b).cost;
    const double brute = oracle::brute_force_transport(a.weights, b.weights, ground_distances(store, a, b));
    worst = std::max(worst, std::abs(solver - brute));
  }
  double asym = 0, self = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_dist(8), b = random_dist(8);
    asym = std::max(asym, std::abs(wmd(store, a, b).cost - wmd(store, b, a).cost));
    self = std::max(self, std::abs(wmd(store, a, a).cost));
  }
  return {worst <= 1e-9 && asym <= 1e-9 && self <= 1e-9,
          fmt("max |solver-brute| %.1e, asymmetry %.1e, self %.1e", worst, asym, self)};
}

Verdict stump_oracle() {
  Rng rng(5);
  double worst = 0;
  int compared = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_index(99);
    std::vector<double> x(n);
    Labels y(n);
    for (auto& v : x) v = t % 2 ? rng.normal() : std::round(rng.uniform() * 10);
    for (auto& v : y) v = rng.uniform() < 0.5;
    y[0] = 0;
    y[1] = 1;
    BoosterParams p;
    p.rounds = 1;
    const auto model = fit_stump_booster(x, y, p);
    const double rate = static_cast<double>(std::count(y.begin(), y.end(), 1)) / n;
    std::vector<double> g(n), h(n, rate * (1 - rate));
    for (std::size_t i = 0; i < n; ++i) g[i] = rate - y[i];
    const double best = oracle::exhaustive_stump_gain(x, g, h, p.leaf_l2);
    if (std::isinf(best)) {
      if (!model.stumps.empty()) return {false, "split fitted on a constant feature"};
      continue;
    }
    if (model.stumps.empty()) {
      if (best > p.min_gain) return {false, "no stump although a positive gain exists"};
      continue;
    }
    worst = std::max(worst, std::abs(model.stumps[0].gain - best) / std::max(1.0, std::abs(best)));
    ++compared;
  }
  return {worst <= 1e-12, std::to_string(compared) + " datasets, max gain deviation " + fmt("%.1e", worst)};
}

Verdict sif_residual() {
  Rng rng(6);
  std::vector<std::string> words;
  DenseMatrix m(40, 10);
  for (int i = 0; i < 40; ++i) {
    words.push_back("s" + std::to_string(i));
    for (int j = 0; j < 10; ++j) m(i, j) = rng.normal() + (j == 0 ? 2.0 : 0.0);
  }
  const WordVectorStore store(words, m);
  std::vector<Document> raw;
  for (int d = 0; d < 50; ++d) {
    std::string text;
    for (int k = 0, len = 3 + static_cast<int>(rng.uniform_index(10)); k < len; ++k) {
      text += words[rng.uniform_index(words.size())] + " ";
    }
    raw.push_back({"doc" + std::to_string(d), text, {}, {}, {}});
  }
  const DocumentCollection docs(raw);
  const auto result = sif_embed_corpus(store, docs, {}, unigram_probabilities(docs, {}));
  if (!result.principal_direction) return {false, "no principal direction removed"};
  double worst = 0;
  for (const auto& [id, e] : result.embeddings) worst = std::max(worst, std::abs(result.principal_direction->dot(e)));
  return {worst <= 1e-8, fmt("max |u.e| %.1e over 50 documents", worst)};
}

Verdict logreg_gradient_check() {
  std::vector<Document> raw = {{"a", "flood warning river city", {}, {}, {}},
                               {"b", "river flood city evacuated", {}, {}, {}},
                               {"c", "election results announced today", {}, {}, {}},
                               {"d", "election turnout city record", {}, {}, {}},
                               {"e", "storm warning coast", {}, {}, {}},
                               {"f", "coast storm damage river", {}, {}, {}}};
  const DocumentCollection docs(raw);
  const auto tfidf = fit_tfidf(docs);
  const PairCollection pairs = {make_pair_record("a", "b"), make_pair_record("a", "c"), make_pair_record("c", "d"),
                                make_pair_record("b", "e"), make_pair_record("e", "f")};
  const Labels y = {1, 0, 1, 0, 1};
  const auto x = absdiff_features(pairs, docs, tfidf);
  LogRegModel model;
  Rng rng(7);
  model.weights = DenseVector(x.cols());
  for (auto& w : model.weights) w = rng.normal();
  model.bias = 0.3;
  model.l2 = 0.01;
  const auto grad = logreg_gradient(model, x, y);
  const double h = 1e-6;
  double worst = 0;
  auto check = [&](double analytic, auto&& perturb) {
    LogRegModel up = model, down = model;
    perturb(up, h);
    perturb(down, -h);
    const double fd = (logreg_loss(up, x, y) - logreg_loss(down, x, y)) / (2 * h);
    worst = std::max(worst, std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-8}));
  };
  for (Eigen::Index j = 0; j < x.cols(); ++j) check(grad.weights(j), [j](LogRegModel& m, double d) { m.weights(j) += d; });
  check(grad.bias, [](LogRegModel& m, double d) { m.bias += d; });
  return {worst <= 1e-5, std::to_string(x.cols() + 1) + " coordinates, max relative error " + fmt("%.1e", worst)};
}

Verdict transitivity() {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.uniform_index(48);
    const double density = 0.05 + 0.4 * rng.uniform();
    PairCollection pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.uniform() >= density) continue;
        auto p = make_pair_record("n" + std::to_string(i), "n" + std::to_string(j));
        if (rng.uniform() < 0.9) p.proxy_score = std::round(rng.uniform() * 20) / 20;
        pairs.push_back(p);
      }
    }
    const auto once = transitivity_filter(pairs);
    if (!oracle::triangles(once).empty()) return {false, "triangle survives in graph " + std::to_string(t)};
    const auto twice = transitivity_filter(once);
    if (twice.size() != once.size()) return {false, "not idempotent on graph " + std::to_string(t)};
    for (std::size_t i = 0; i < once.size(); ++i) {
      if (once[i].id1 != twice[i].id1 || once[i].id2 != twice[i].id2) {
        return {false, "not idempotent on graph " + std::to_string(t)};
      }
    }
  }
  return {true, "50 graphs triangle-free and idempotent"};
}

Verdict split_disjointness() {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng.uniform_index(60);
    std::vector<Document> raw;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ts = Timestamp{} + std::chrono::seconds(86400 * static_cast<long>(rng.uniform_index(30)));
      raw.push_back({"n" + std::to_string(i), "text", {}, ts, {}});
    }
    const DocumentCollection docs(raw);
    std::set<std::pair<std::string, std::string>> seen;
    PairCollection pairs;
    for (std::size_t e = 0; e < n; ++e) {
      const auto a = rng.uniform_index(n), b = rng.uniform_index(n);
      if (a == b) continue;
      auto p = make_pair_record(raw[a].id, raw[b].id);
      if (seen.insert({p.id1, p.id2}).second) pairs.push_back(p);
    }
    if (pairs.empty()) pairs.push_back(make_pair_record(raw[0].id, raw[1].id));
    for (bool temporal : {false, true}) {
      const auto split = make_disjoint_split(pairs, docs, 0.3, temporal, t);
      const auto train = referenced_ids(split.train);
      const auto test = referenced_ids(split.test);
      const std::set<std::string> test_set(test.begin(), test.end());
      for (const auto& id : train) {
        if (test_set.contains(id)) return {false, "document " + id + " on both sides in corpus " + std::to_string(t)};
      }
      if (split.train.size() + split.test.size() + split.dropped.size() != pairs.size()) {
        return {false, "pairs lost in corpus " + std::to_string(t)};
      }
      if (!temporal || train.empty() || test.empty()) continue;
      Timestamp latest_train = Timestamp::min(), earliest_test = Timestamp::max();
      for (const auto& id : train) latest_train = std::max(latest_train, *docs.at(id).timestamp);
      for (const auto& id : test) earliest_test = std::min(earliest_test, *docs.at(id).timestamp);
      if (!(latest_train < earliest_test)) return {false, "temporal order violated in corpus " + std::to_string(t)};
    }
  }
  return {true, "100 corpora disjoint; temporal train strictly precedes test"};
}

Verdict textrank_checks() {
  KeywordParams p;
  const auto pair_graph = build_cooccurrence_graph({"alpha", "beta"}, p.window);
  const DenseVector two = textrank_scores(pair_graph, p);
  const double gap = two.size() == 2 ? std::abs(two(0) - two(1)) : 1.0;
  Rng rng(10);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    Tokens tokens;
    for (std::size_t i = 0, len = 5 + rng.uniform_index(80); i < len; ++i) {
      tokens.push_back("k" + std::to_string(rng.uniform_index(25)));
    }
    const auto g = build_cooccurrence_graph(tokens, 2 + rng.uniform_index(4));
    const DenseVector s = textrank_scores(g, p);
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
      double sum = 0;
      for (std::size_t u : g.neighbors[v]) sum += s(u) / static_cast<double>(g.neighbors[u].size());
      worst = std::max(worst, std::abs((1 - p.damping) + p.damping * sum - s(v)));
    }
  }
  return {gap <= 1e-6 && worst < 10 * p.tolerance, fmt("two-node gap %.1e, max residual %.1e", gap, worst)};
}

Verdict sweep_determinism() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("granusim-acceptance-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::filesystem::create_directories(dir);
  auto once = [&](const std::string& name) {
    std::ostringstream out, err;
    const int code = cli::run({"sweep-w", "--seed", std::to_string(kSeed), "--out", (dir / name).string()}, out, err);
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return std::pair{code, text.str()};
  };
  const auto a = once("a.txt");
  const auto b = once("b.txt");
  std::filesystem::remove_all(dir);
  const bool ok = a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second;
  return {ok, std::to_string(a.second.size()) + " bytes, exit codes " + std::to_string(a.first) + "/" +
                  std::to_string(b.first)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"relative improvement arithmetic", rel_improvement_arithmetic},
      {"interpolation endpoint equivalence", endpoint_equivalence},
      {"sweep shape on the synthetic corpus", sweep_shape},
      {"WMD exactness", wmd_exactness},
      {"stump gain oracle", stump_oracle},
      {"SIF residual", sif_residual},
      {"logistic regression gradient", logreg_gradient_check},
      {"transitivity filter", transitivity},
      {"split disjointness", split_disjointness},
      {"TextRank fixed point", textrank_checks},
      {"sweep-w determinism", sweep_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << (i + 1 < 10 ? " " : "") << i + 1 << ' ' << criteria[i].first
              << ": " << v.detail << fmt(" (%.2fs)", secs) << std::endl;
  }
  std::cout << criteria.size() - failed << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
