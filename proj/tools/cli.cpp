#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "granusim/corpus.hpp"
#include "granusim/error.hpp"
#include "granusim/gateway.hpp"
#include "granusim/io.hpp"
#include "granusim/log.hpp"
#include "granusim/model_lab.hpp"
#include "granusim/pair_mining.hpp"
#include "granusim/synthetic.hpp"
#include "granusim/tfidf.hpp"
#include "pipeline.hpp"

namespace granusim::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  // Inputs.
  std::string docs, pairs, split, vectors, embeddings, scored, model, tfidf;
  // Selectors.
  std::string method = "tfidf";
  std::string contextual;
  std::string task;
  std::string classifier = "stump_booster";
  std::string feature = "g_i";
  std::string headline = "f1";
  std::string dataset = "synthetic";
  std::vector<double> weights = kDefaultSweepWeights;
  double w = 0.5;
  // Run control.
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  std::string out;
  // Embedding service.
  std::string endpoint, model_tag;
  std::size_t batch_size = 32;
  std::size_t timeout_ms = 30000;
  std::size_t retries = 3;
  // Split.
  double test_fraction = 0.3;
  bool temporal = false;
  // Tokenizer and vectorizer.
  bool keep_case = false;
  bool keep_punctuation = false;
  std::size_t min_token_length = 1;
  std::size_t min_df = 1;
  // Static embeddings and transport.
  double sif_a = 1e-3;
  std::size_t wme_references = 128;
  double wme_gamma = 1.0;
  std::size_t wme_max_length = 6;
  std::size_t wmd_max_support = 64;
  // Classifiers.
  BoosterParams booster;
  LogRegParams logreg;
  // Pair mining.
  double easy_threshold = kDefaultEasyThreshold;
  KeywordParams keywords;
  // Synthetic corpus.
  std::size_t n_events = 72, docs_per_event = 3, n_topics = 6;

  bool w_given = false;  // set after parsing

  TokenizerConfig tokenizer() const {
    return {.lowercase = !keep_case, .strip_punctuation = !keep_punctuation, .min_token_length = min_token_length};
  }

  ProviderSettings provider_settings() const {
    ProviderSettings s;
    s.tokenizer = tokenizer();
    s.min_df = min_df;
    s.sif.a = sif_a;
    s.wme.n_references = wme_references;
    s.wme.gamma = wme_gamma;
    s.wme.max_reference_length = wme_max_length;
    s.wme.seed = seed;
    s.wme.wmd.max_support = wmd_max_support;
    s.threads = threads;
    return s;
  }

  GatewayOptions gateway() const {
    GatewayOptions g;
    g.batch_size = batch_size;
    g.timeout = std::chrono::milliseconds(timeout_ms);
    g.max_retries = retries;
    return g;
  }
};

std::string require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing input: " + flag);
  return value;
}

fs::path require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw UsageError("missing output: --out");
  return cfg.out;
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
  return dir;
}

Task task_or(const RunConfig& cfg, Task fallback) { return cfg.task.empty() ? fallback : parse_task(cfg.task); }

Headline parse_headline(const std::string& name) {
  if (name == "f1") return Headline::kF1;
  if (name == "accuracy") return Headline::kAccuracy;
  if (name == "precision") return Headline::kPrecision;
  if (name == "recall") return Headline::kRecall;
  throw UsageError("unknown headline metric '" + name + "' (expected f1, accuracy, precision or recall)");
}

// Writes the resolved configuration next to an output file, or inside an
// output directory.
class Sidecar {
 public:
  // Unset string options are left out so the file loads back through --config.
  explicit Sidecar(const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      if (!line.ends_with("=\"\"")) text_ += line + '\n';
    }
  }
  void for_file(const fs::path& file) const { write_file(fs::path(file.string() + ".config.ini"), text_); }
  void for_dir(const fs::path& dir) const { write_file(dir / "resolved_config.ini", text_); }

 private:
  std::string text_;
};

struct Context {
  RunConfig& cfg;
  std::ostream& out;
  const Sidecar& sidecar;
};

// ---------------------------------------------------------------------------
// Shared loading steps.

DocumentCollection docs_of(const RunConfig& cfg) { return load_documents(require(cfg.docs, "--docs")); }

DatasetSplit split_of(const RunConfig& cfg, const DocumentCollection& docs) {
  if (!cfg.split.empty()) {
    const fs::path dir = cfg.split;
    DatasetSplit s;
    s.train = load_pairs(dir / "train.jsonl", docs);
    s.test = load_pairs(dir / "test.jsonl", docs);
    if (fs::exists(dir / "dropped.jsonl")) s.dropped = load_pairs(dir / "dropped.jsonl", docs);
    return s;
  }
  if (cfg.pairs.empty()) throw UsageError("missing input: --split or --pairs");
  log_info("no --split given; splitting --pairs with seed " + std::to_string(cfg.seed));
  return make_disjoint_split(load_pairs(cfg.pairs, docs), docs, cfg.test_fraction, cfg.temporal, cfg.seed);
}

std::optional<WordVectorStore> vectors_of(const RunConfig& cfg) {
  if (cfg.vectors.empty()) return std::nullopt;
  return load_word_vectors(cfg.vectors);
}

bool is_contextual(const std::string& method) { return method.starts_with("contextual:"); }

// Contextual vectors come from an embedding-records file, or from the
// service for every document when only --endpoint is given.
std::optional<EmbeddingStore> embeddings_of(const RunConfig& cfg, const DocumentCollection& docs,
                                            const std::vector<std::string>& methods) {
  if (!cfg.embeddings.empty()) return import_embeddings(cfg.embeddings);
  if (cfg.endpoint.empty()) return std::nullopt;
  EmbeddingStore store;
  for (const auto& method : methods) {
    if (!is_contextual(method)) continue;
    const std::string tag = method.substr(std::string_view("contextual:").size());
    std::vector<std::string> texts;
    for (const auto& doc : docs) texts.push_back(doc.text);
    log_info("requesting " + std::to_string(texts.size()) + " '" + tag + "' embeddings from " + cfg.endpoint);
    auto vectors = request_embeddings(cfg.endpoint, tag, texts, cfg.gateway());
    for (std::size_t i = 0; i < docs.size(); ++i) store.add({docs[i].id, tag, std::move(vectors[i])});
  }
  return store;
}

DocumentCollection train_documents(const DocumentCollection& docs, const DatasetSplit& split) {
  return docs.subset(referenced_ids(split.train));
}

struct Providers {
  std::unique_ptr<EmbeddingProvider> lexical;
  std::unique_ptr<EmbeddingProvider> contextual;
};

// Lexical (`--method`) and optional contextual (`--contextual`) providers;
// fitted parts (TF-IDF, SIF probabilities) see only `fit_docs`.
Providers providers_of(const RunConfig& cfg, const DocumentCollection& docs, const DocumentCollection& fit_docs,
                       const WordVectorStore* preset_vectors = nullptr) {
  std::vector<std::string> methods = {cfg.method};
  if (!cfg.contextual.empty()) methods.push_back(cfg.contextual);
  for (const auto& m : methods) {
    if (!is_known_method(m)) {
      throw UsageError("unknown method '" + m + "' (expected tfidf, average, sif, wme or contextual:<tag>)");
    }
  }
  const bool needs_vectors = std::ranges::any_of(methods, [](const std::string& m) {
    return m == "average" || m == "sif" || m == "wme";
  });
  std::optional<WordVectorStore> vectors;
  if (needs_vectors && !preset_vectors) vectors = load_word_vectors(require(cfg.vectors, "--vectors"));
  std::optional<EmbeddingStore> embeddings;
  if (std::ranges::any_of(methods, is_contextual)) embeddings = embeddings_of(cfg, docs, methods);
  std::optional<TfIdfModel> tfidf;
  if (!cfg.tfidf.empty()) tfidf = load_tfidf(cfg.tfidf, cfg.tokenizer());

  ProviderInputs inputs;
  inputs.docs = &docs;
  inputs.fit_docs = &fit_docs;
  inputs.vectors = vectors ? &*vectors : preset_vectors;
  inputs.embeddings = embeddings ? &*embeddings : nullptr;
  inputs.tfidf = tfidf ? &*tfidf : nullptr;
  const ProviderSettings settings = cfg.provider_settings();

  Providers p;
  log_info("embedding " + std::to_string(docs.size()) + " documents with " + cfg.method);
  p.lexical = make_provider(cfg.method, inputs, settings);
  if (!cfg.contextual.empty()) {
    log_info("embedding " + std::to_string(docs.size()) + " documents with " + cfg.contextual);
    p.contextual = make_provider(cfg.contextual, inputs, settings);
  }
  return p;
}

std::string format_metrics(const Metrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f tp=%zu fp=%zu tn=%zu fn=%zu",
                m.accuracy, m.precision, m.recall, m.f1, m.confusion.true_positive, m.confusion.false_positive,
                m.confusion.true_negative, m.confusion.false_negative);
  return buf;
}

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"tp", m.confusion.true_positive},
          {"fp", m.confusion.false_positive},
          {"tn", m.confusion.true_negative},
          {"fn", m.confusion.false_negative}};
}

std::vector<double> feature_column(const LabeledScores& s, const std::string& feature, double w) {
  if (feature == "g_t") return s.lexical;
  if (feature == "g_r") return s.contextual;
  if (feature == "g_i") {
    std::vector<double> out(s.lexical.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = interpolate(s.lexical[i], s.contextual[i], w);
    return out;
  }
  throw UsageError("unknown feature '" + feature + "' (expected g_t, g_r or g_i)");
}

// g_t/g_r-only scored files are accepted when the feature needs just one.
LabeledScores scored_features(const std::vector<ScoredPair>& scored, Task task, const std::string& feature) {
  std::vector<ScoredPair> filled = scored;
  for (auto& s : filled) {
    if (feature == "g_t" && !s.g_r) s.g_r = 0.0;
    if (feature == "g_r" && !s.g_t) s.g_t = 0.0;
  }
  return labeled_scores(filled, task);
}

Labels task_labels(const PairCollection& pairs, Task task, PairCollection& kept) {
  Labels labels;
  for (const auto& p : pairs) {
    if (auto l = p.label(task)) {
      kept.push_back(p);
      labels.push_back(*l ? 1 : 0);
    }
  }
  if (kept.empty()) throw DataError(std::string("no pairs carry a ") + task_name(task) + " label");
  return labels;
}

// ---------------------------------------------------------------------------
// Commands.

void cmd_synth(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path dir = ensure_dir(require_out(cfg));
  const auto corpus = generate_synthetic(cfg.seed, cfg.n_events, cfg.docs_per_event, cfg.n_topics);
  const auto vectors = synthetic_word_vectors(cfg.seed, cfg.n_topics);
  {
    auto f = open_output(dir / "documents.jsonl");
    write_documents(f, corpus.docs);
  }
  save_pairs(dir / "pairs.jsonl", corpus.pairs);
  {
    auto f = open_output(dir / "vectors.txt");
    write_word_vectors(f, vectors);
  }
  c.sidecar.for_dir(dir);
  c.out << "synth: " << corpus.docs.size() << " documents, " << corpus.pairs.size() << " pairs, " << vectors.size()
        << " word vectors -> " << dir.string() << '\n';
}

void cmd_ingest(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path dir = ensure_dir(require_out(cfg));
  const auto docs = docs_of(cfg);
  {
    auto f = open_output(dir / "documents.jsonl");
    write_documents(f, docs);
  }
  std::size_t n_pairs = 0;
  if (!cfg.pairs.empty()) {
    const auto pairs = load_pairs(cfg.pairs, docs);
    save_pairs(dir / "pairs.jsonl", pairs);
    n_pairs = pairs.size();
  }
  c.sidecar.for_dir(dir);
  c.out << "ingest: " << docs.size() << " documents, " << n_pairs << " pairs -> " << dir.string() << '\n';
}

void cmd_split(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path dir = ensure_dir(require_out(cfg));
  const auto docs = docs_of(cfg);
  const auto pairs = load_pairs(require(cfg.pairs, "--pairs"), docs);
  const auto split = make_disjoint_split(pairs, docs, cfg.test_fraction, cfg.temporal, cfg.seed);
  save_pairs(dir / "train.jsonl", split.train);
  save_pairs(dir / "test.jsonl", split.test);
  save_pairs(dir / "dropped.jsonl", split.dropped);
  c.sidecar.for_dir(dir);
  c.out << "split: " << split.train.size() << " train, " << split.test.size() << " test, " << split.dropped.size()
        << " dropped -> " << dir.string() << '\n';
}

void cmd_stats(Context& c) {
  const auto& cfg = c.cfg;
  const auto docs = docs_of(cfg);
  const auto split = split_of(cfg, docs);
  const std::string table = format_stats_table(summarize(split, docs), cfg.dataset);
  if (cfg.out.empty()) {
    c.out << table;
    return;
  }
  write_file(cfg.out, table);
  c.sidecar.for_file(cfg.out);
  c.out << "stats: " << split.train.size() << " train, " << split.test.size() << " test pairs -> " << cfg.out << '\n';
}

void cmd_fit_tfidf(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path dir = ensure_dir(require_out(cfg));
  const auto docs = docs_of(cfg);
  DocumentCollection fit_docs = docs;
  if (!cfg.split.empty() || !cfg.pairs.empty()) fit_docs = train_documents(docs, split_of(cfg, docs));
  const auto model = fit_tfidf(fit_docs, cfg.tokenizer(), cfg.min_df);
  save_tfidf(dir, model);
  c.sidecar.for_dir(dir);
  c.out << "fit-tfidf: " << model.dimension() << " terms from " << fit_docs.size() << " documents -> "
        << dir.string() << '\n';
}

void cmd_embed(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path out = require_out(cfg);
  const auto docs = docs_of(cfg);
  if (!is_known_method(cfg.method)) {
    throw UsageError("unknown method '" + cfg.method + "' (expected tfidf, average, sif, wme or contextual:<tag>)");
  }
  std::string tag = cfg.model_tag;
  if (tag.empty()) tag = is_contextual(cfg.method) ? cfg.method.substr(11) : cfg.method;

  std::vector<EmbeddingRecord> records;
  if (is_contextual(cfg.method) && cfg.embeddings.empty()) {
    require(cfg.endpoint, "--endpoint or --embeddings");
    std::vector<std::string> texts;
    for (const auto& doc : docs) texts.push_back(doc.text);
    log_info("requesting " + std::to_string(texts.size()) + " embeddings from " + cfg.endpoint);
    auto vectors = request_embeddings(cfg.endpoint, cfg.method.substr(11), texts, cfg.gateway());
    for (std::size_t i = 0; i < docs.size(); ++i) records.push_back({docs[i].id, tag, std::move(vectors[i])});
  } else {
    std::optional<WordVectorStore> vectors = vectors_of(cfg);
    std::optional<EmbeddingStore> embeddings;
    if (!cfg.embeddings.empty()) embeddings = import_embeddings(cfg.embeddings);
    std::optional<TfIdfModel> tfidf;
    if (!cfg.tfidf.empty()) tfidf = load_tfidf(cfg.tfidf, cfg.tokenizer());
    ProviderInputs inputs;
    inputs.docs = &docs;
    inputs.vectors = vectors ? &*vectors : nullptr;
    inputs.embeddings = embeddings ? &*embeddings : nullptr;
    inputs.tfidf = tfidf ? &*tfidf : nullptr;
    auto map = embed_documents(cfg.method, inputs, cfg.provider_settings());
    for (const auto& doc : docs) records.push_back({doc.id, tag, std::move(map.at(doc.id))});
  }
  for (const auto& r : records) {
    if (r.vector.size() == 0) throw DataError("method '" + cfg.method + "' produced an empty vector");
  }
  {
    auto f = open_output(out);
    write_embedding_records(f, records);
  }
  c.sidecar.for_file(out);
  c.out << "embed: " << records.size() << " records, model '" << tag << "', dimension "
        << (records.empty() ? 0 : records.front().vector.size()) << " -> " << out.string() << '\n';
}

void cmd_score(Context& c) {
  const auto& cfg = c.cfg;
  if (cfg.w_given && cfg.contextual.empty()) {
    throw UsageError("interpolation weight --w needs a contextual (g_r) source: missing input --contextual");
  }
  const fs::path out = require_out(cfg);
  const auto docs = docs_of(cfg);
  const std::optional<double> w = cfg.w_given ? std::optional<double>(cfg.w) : std::nullopt;

  if (!cfg.split.empty()) {
    const auto split = split_of(cfg, docs);
    const auto providers = providers_of(cfg, docs, train_documents(docs, split));
    ensure_dir(out);
    const auto train = score_pairs(split.train, *providers.lexical, providers.contextual.get(), w);
    const auto test = score_pairs(split.test, *providers.lexical, providers.contextual.get(), w);
    save_scored_pairs(out / "train.jsonl", train);
    save_scored_pairs(out / "test.jsonl", test);
    c.sidecar.for_dir(out);
    c.out << "score: " << train.size() << " train, " << test.size() << " test pairs -> " << out.string() << '\n';
    return;
  }
  const auto pairs = load_pairs(require(cfg.pairs, "--pairs or --split"), docs);
  const auto providers = providers_of(cfg, docs, docs);
  const auto scored = score_pairs(pairs, *providers.lexical, providers.contextual.get(), w);
  save_scored_pairs(out, scored);
  c.sidecar.for_file(out);
  c.out << "score: " << scored.size() << " pairs -> " << out.string() << '\n';
}

void cmd_train(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path out = require_out(cfg);
  const Task task = task_or(cfg, Task::kGranular);
  ClassifierModel model;
  std::size_t n = 0;
  if (cfg.classifier == "stump_booster") {
    const auto scored = load_scored_pairs(require(cfg.scored, "--scored"));
    const auto s = scored_features(scored, task, cfg.feature);
    const auto x = feature_column(s, cfg.feature, cfg.w);
    model = fit_stump_booster(x, s.labels, cfg.booster);
    n = x.size();
  } else if (cfg.classifier == "logreg") {
    const auto docs = docs_of(cfg);
    const auto pairs = load_pairs(require(cfg.pairs, "--pairs"), docs);
    const auto tfidf = load_tfidf(require(cfg.tfidf, "--tfidf"), cfg.tokenizer());
    PairCollection kept;
    const auto labels = task_labels(pairs, task, kept);
    const auto fit = fit_logreg_absdiff(kept, docs, tfidf, labels, cfg.logreg);
    log_info("logreg loss " + format_real(fit.loss_history.front()) + " -> " + format_real(fit.loss_history.back()));
    model = fit.model;
    n = kept.size();
  } else {
    throw UsageError("unknown classifier '" + cfg.classifier + "' (expected stump_booster or logreg)");
  }
  save_model(out, model);
  c.sidecar.for_file(out);
  c.out << "train: " << cfg.classifier << " on " << n << " " << task_name(task) << " pairs -> " << out.string()
        << '\n';
}

void cmd_evaluate(Context& c) {
  const auto& cfg = c.cfg;
  const Task task = task_or(cfg, Task::kGranular);
  const auto model = load_model(require(cfg.model, "--model"));
  std::vector<int> predictions;
  Labels labels;
  if (const auto* booster = std::get_if<StumpBoosterModel>(&model)) {
    const auto scored = load_scored_pairs(require(cfg.scored, "--scored"));
    const auto s = scored_features(scored, task, cfg.feature);
    labels = s.labels;
    for (double x : feature_column(s, cfg.feature, cfg.w)) predictions.push_back(predict(*booster, x).label);
  } else {
    const auto& logreg = std::get<LogRegModel>(model);
    const auto docs = docs_of(cfg);
    const auto pairs = load_pairs(require(cfg.pairs, "--pairs"), docs);
    const auto tfidf = load_tfidf(require(cfg.tfidf, "--tfidf"), cfg.tokenizer());
    PairCollection kept;
    labels = task_labels(pairs, task, kept);
    const auto features = absdiff_features(kept, docs, tfidf);
    if (static_cast<std::size_t>(features.cols()) != static_cast<std::size_t>(logreg.weights.size())) {
      throw DataError("model has " + std::to_string(logreg.weights.size()) + " weights but the TF-IDF model has " +
                      std::to_string(features.cols()) + " terms");
    }
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      const SparseVector row = features.row(i).transpose();
      predictions.push_back(predict_probability(logreg, row) >= 0.5 ? 1 : 0);
    }
  }
  const Metrics m = evaluate(predictions, labels);
  if (!cfg.out.empty()) {
    nlohmann::ordered_json j = metrics_json(m);
    j["task"] = task_name(task);
    j["n"] = labels.size();
    write_file(cfg.out, j.dump(2) + "\n");
    c.sidecar.for_file(cfg.out);
  }
  c.out << "evaluate: " << task_name(task) << " n=" << labels.size() << ' ' << format_metrics(m) << '\n';
}

void cmd_sweep(Context& c) {
  RunConfig& cfg = c.cfg;
  if (cfg.contextual.empty()) cfg.contextual = "average";
  const Headline headline = parse_headline(cfg.headline);
  for (double w : cfg.weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw UsageError("--weights entries must lie in [0, 1], got " + format_real(w));
  }

  DocumentCollection docs;
  DatasetSplit split;
  std::optional<WordVectorStore> synthetic_vectors;
  if (cfg.docs.empty()) {
    // No corpus given: run on the seeded synthetic corpus and its vectors.
    log_info("no --docs given; generating the synthetic corpus with seed " + std::to_string(cfg.seed));
    const auto corpus = generate_synthetic(cfg.seed, cfg.n_events, cfg.docs_per_event, cfg.n_topics);
    docs = corpus.docs;
    split = make_disjoint_split(corpus.pairs, docs, cfg.test_fraction, cfg.temporal, cfg.seed);
    if (cfg.vectors.empty()) synthetic_vectors = synthetic_word_vectors(cfg.seed, cfg.n_topics);
  } else {
    docs = docs_of(cfg);
    split = split_of(cfg, docs);
  }

  const auto providers =
      providers_of(cfg, docs, train_documents(docs, split), synthetic_vectors ? &*synthetic_vectors : nullptr);
  const auto train = score_pairs(split.train, *providers.lexical, providers.contextual.get());
  const auto test = score_pairs(split.test, *providers.lexical, providers.contextual.get());

  std::vector<Task> tasks;
  if (cfg.task.empty()) {
    tasks = {Task::kGranular, Task::kAbstract};
  } else {
    tasks = {parse_task(cfg.task)};
  }
  std::vector<SweepTable> tables;
  for (Task task : tasks) {
    const auto has = [task](const ScoredPair& s) { return s.pair.label(task).has_value(); };
    if (!std::ranges::any_of(train, has) || !std::ranges::any_of(test, has)) {
      if (!cfg.task.empty()) throw DataError(std::string("no ") + task_name(task) + " labels in train or test");
      log_warning(std::string("skipping ") + task_name(task) + ": no labels");
      continue;
    }
    log_info(std::string("sweeping ") + std::to_string(cfg.weights.size()) + " weights on " + task_name(task));
    tables.push_back({task_name(task), cfg.dataset,
                      sweep_weights(labeled_scores(train, task), labeled_scores(test, task), cfg.weights,
                                    cfg.booster)});
  }
  if (tables.empty()) throw DataError("no labelled task to sweep");
  const std::string table = format_sweep_table(tables, headline);
  if (cfg.out.empty()) {
    c.out << table;
    return;
  }
  write_file(cfg.out, table);
  c.sidecar.for_file(cfg.out);
  c.out << "sweep-w: " << tables.size() << " task(s) x " << cfg.weights.size() << " weights, " << split.train.size()
        << " train / " << split.test.size() << " test pairs -> " << cfg.out << '\n';
}

void cmd_mine_pairs(Context& c) {
  const auto& cfg = c.cfg;
  const fs::path dir = ensure_dir(require_out(cfg));
  const auto docs = docs_of(cfg);
  const auto vectors = load_word_vectors(require(cfg.vectors, "--vectors"));

  log_info("scoring " + std::to_string(docs.size() * (docs.size() - std::min<std::size_t>(docs.size(), 1)) / 2) +
           " candidate pairs");
  PairCollection scored = proxy_score(docs, vectors, cfg.tokenizer(), cfg.keywords, cfg.threads);
  const bool labelled = !cfg.pairs.empty();
  if (labelled) {
    std::map<std::pair<std::string, std::string>, const PairRecord*> known;
    const auto pairs = load_pairs(cfg.pairs, docs);
    for (const auto& p : pairs) known.emplace(std::pair{p.id1, p.id2}, &p);
    for (auto& p : scored) {
      if (auto it = known.find({p.id1, p.id2}); it != known.end()) {
        p.granular = it->second->granular;
        p.abstract = it->second->abstract;
      }
    }
  }
  BinnedPairs bins = bin_pairs(scored, cfg.easy_threshold, labelled);

  // Triangles are broken among the high-score pairs only; easy negatives
  // are never linked as similar.
  PairCollection high;
  for (const auto* bin : {&bins.positives, &bins.hard_negatives, &bins.unassigned}) {
    high.insert(high.end(), bin->begin(), bin->end());
  }
  const PairCollection kept = transitivity_filter(high);
  std::map<std::pair<std::string, std::string>, bool> survivors;
  for (const auto& p : kept) survivors.emplace(std::pair{p.id1, p.id2}, true);
  const std::size_t removed = high.size() - kept.size();
  for (auto* bin : {&bins.positives, &bins.hard_negatives, &bins.unassigned}) {
    std::erase_if(*bin, [&](const PairRecord& p) { return !survivors.contains({p.id1, p.id2}); });
  }

  save_pairs(dir / "scored.jsonl", scored);
  save_pairs(dir / "positives.jsonl", bins.positives);
  save_pairs(dir / "easy_negatives.jsonl", bins.easy_negatives);
  save_pairs(dir / "hard_negatives.jsonl", bins.hard_negatives);
  save_pairs(dir / "unassigned.jsonl", bins.unassigned);
  c.sidecar.for_dir(dir);
  c.out << "mine-pairs: " << scored.size() << " scored; " << bins.positives.size() << " positives, "
        << bins.easy_negatives.size() << " easy negatives, " << bins.hard_negatives.size() << " hard negatives, "
        << bins.unassigned.size() << " unassigned; " << removed << " removed by the transitivity filter -> "
        << dir.string() << '\n';
}

const std::map<std::string, std::pair<std::string, void (*)(Context&)>>& commands() {
  static const std::map<std::string, std::pair<std::string, void (*)(Context&)>> table = {
      {"synth", {"Generate the seeded synthetic corpus and word vectors into --out", cmd_synth}},
      {"ingest", {"Validate and normalize --docs (and --pairs) into --out", cmd_ingest}},
      {"split", {"Split --pairs into document-disjoint train/test files under --out", cmd_split}},
      {"stats", {"Print the train/test label table", cmd_stats}},
      {"fit-tfidf", {"Fit TF-IDF on the training documents and save it to --out", cmd_fit_tfidf}},
      {"embed", {"Write embedding records for --docs with --method", cmd_embed}},
      {"score", {"Score pairs with --method (g_t) and optionally --contextual (g_r)", cmd_score}},
      {"train", {"Fit a classifier on scored or labelled training pairs", cmd_train}},
      {"evaluate", {"Evaluate a saved classifier on held-out pairs", cmd_evaluate}},
      {"sweep-w", {"Sweep the interpolation weight and write the results table", cmd_sweep}},
      {"mine-pairs", {"Proxy-score all document pairs and bin them", cmd_mine_pairs}},
  };
  return table;
}

std::string env_name(const std::string& long_name) {
  std::string env = "GRANUSIM_";
  for (char ch : long_name) env += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return env;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Document similarity toolkit: lexical, static and contextual scores and their interpolation",
               "granusim"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);
  app.footer(
      "Exit status: 0 success, 2 usage or configuration error, 3 data error, 4 numeric or solver error, "
      "5 embedding-service error, 1 internal error.\n"
      "Every option can also be set through GRANUSIM_<OPTION> (e.g. GRANUSIM_SEED); command-line flags take "
      "precedence over the config file, which takes precedence over the environment.");

  // Inputs.
  app.add_option("--docs", cfg.docs, "Documents JSONL")->check(CLI::ExistingFile)->group("Inputs");
  app.add_option("--pairs", cfg.pairs, "Pairs JSONL")->check(CLI::ExistingFile)->group("Inputs");
  app.add_option("--split", cfg.split, "Directory with train.jsonl and test.jsonl")
      ->check(CLI::ExistingDirectory)
      ->group("Inputs");
  app.add_option("--vectors", cfg.vectors, "Static word vectors (word2vec text format)")
      ->check(CLI::ExistingFile)
      ->group("Inputs");
  app.add_option("--embeddings", cfg.embeddings, "Contextual embedding records JSONL")
      ->check(CLI::ExistingFile)
      ->group("Inputs");
  app.add_option("--scored", cfg.scored, "Scored pairs JSONL")->check(CLI::ExistingFile)->group("Inputs");
  app.add_option("--model", cfg.model, "Saved classifier")->check(CLI::ExistingFile)->group("Inputs");
  app.add_option("--tfidf", cfg.tfidf, "Saved TF-IDF model directory")
      ->check(CLI::ExistingDirectory)
      ->group("Inputs");

  // Selection.
  app.add_option("--method", cfg.method, "Lexical (g_t) method: tfidf, average, sif, wme or contextual:<tag>")
      ->capture_default_str();
  app.add_option("--contextual", cfg.contextual, "Contextual (g_r) method, same choices as --method (sweep-w default: average)");
  app.add_option("--task", cfg.task, "granular or abstract (sweep-w: both when unset)");
  app.add_option("--weights", cfg.weights, "Comma-separated interpolation weights")
      ->delimiter(',')
      ->capture_default_str();
  auto* w_opt = app.add_option("--w", cfg.w, "Interpolation weight for g_i = w*g_t + (1-w)*g_r")
                    ->check(CLI::Range(0.0, 1.0));
  app.add_option("--classifier", cfg.classifier, "stump_booster or logreg")->capture_default_str();
  app.add_option("--feature", cfg.feature, "Booster input: g_t, g_r or g_i")->capture_default_str();
  app.add_option("--headline", cfg.headline, "Metric shown in the sweep table")->capture_default_str();
  app.add_option("--dataset", cfg.dataset, "Dataset name used in tables")->capture_default_str();

  // Run control.
  app.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", cfg.out, "Output file or directory");

  // Embedding service.
  app.add_option("--endpoint", cfg.endpoint, "Embedding service base URL")->group("Service");
  app.add_option("--model-tag", cfg.model_tag, "Model tag written to embedding records")->group("Service");
  app.add_option("--batch-size", cfg.batch_size, "Texts per request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->group("Service");
  app.add_option("--timeout-ms", cfg.timeout_ms, "Per-request timeout")->capture_default_str()->group("Service");
  app.add_option("--retries", cfg.retries, "Retries after transport failures")
      ->capture_default_str()
      ->group("Service");

  // Parameters.
  const std::string params = "Parameters";
  app.add_option("--test-fraction", cfg.test_fraction, "Target share of test pairs")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str()
      ->group(params);
  app.add_flag("--temporal", cfg.temporal, "Put the most recent components in the test side")->group(params);
  app.add_flag("--keep-case", cfg.keep_case, "Do not lowercase tokens")->group(params);
  app.add_flag("--keep-punctuation", cfg.keep_punctuation, "Do not strip punctuation")->group(params);
  app.add_option("--min-token-length", cfg.min_token_length, "Shortest token kept")
      ->capture_default_str()
      ->group(params);
  app.add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str()->group(params);
  app.add_option("--sif-a", cfg.sif_a, "SIF smoothing constant")->capture_default_str()->group(params);
  app.add_option("--wme-references", cfg.wme_references, "WME random documents")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->group(params);
  app.add_option("--wme-gamma", cfg.wme_gamma, "WME kernel width")->capture_default_str()->group(params);
  app.add_option("--wme-max-length", cfg.wme_max_length, "Longest WME random document")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->group(params);
  app.add_option("--wmd-max-support", cfg.wmd_max_support, "Distinct words kept per document in WMD")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->group(params);
  app.add_option("--rounds", cfg.booster.rounds, "Boosting rounds")->capture_default_str()->group(params);
  app.add_option("--learning-rate", cfg.booster.learning_rate, "Boosting shrinkage")
      ->capture_default_str()
      ->group(params);
  app.add_option("--min-gain", cfg.booster.min_gain, "Smallest split gain that adds a stump")
      ->capture_default_str()
      ->group(params);
  app.add_option("--leaf-l2", cfg.booster.leaf_l2, "Leaf weight L2 penalty")->capture_default_str()->group(params);
  app.add_option("--epochs", cfg.logreg.epochs, "Logistic regression epochs")->capture_default_str()->group(params);
  app.add_option("--step", cfg.logreg.step, "Logistic regression step size")->capture_default_str()->group(params);
  app.add_option("--l2", cfg.logreg.l2, "Logistic regression L2 penalty")->capture_default_str()->group(params);
  app.add_option("--easy-threshold", cfg.easy_threshold, "Proxy score below which pairs are easy negatives")
      ->capture_default_str()
      ->group(params);
  app.add_option("--window", cfg.keywords.window, "TextRank co-occurrence window")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str()
      ->group(params);
  app.add_option("--damping", cfg.keywords.damping, "TextRank damping")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str()
      ->group(params);
  app.add_option("--top-k", cfg.keywords.top_k, "Keywords per document")->capture_default_str()->group(params);
  app.add_option("--n-events", cfg.n_events, "Synthetic events")->capture_default_str()->group(params);
  app.add_option("--docs-per-event", cfg.docs_per_event, "Synthetic documents per event")
      ->capture_default_str()
      ->group(params);
  app.add_option("--n-topics", cfg.n_topics, "Synthetic topics")->capture_default_str()->group(params);

  for (CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    opt->envname(env_name(name));
  }

  for (const auto& [name, entry] : commands()) app.add_subcommand(name, entry.first)->fallthrough();

  if (!args.empty() && !args.front().starts_with('-') && !commands().contains(args.front())) {
    err << "granusim: error: unknown command '" << args.front() << "'\nRun with --help for the command list.\n";
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  cfg.w_given = w_opt->count() > 0;
  const Sidecar sidecar(app.config_to_str(true, false));
  Context ctx{cfg, out, sidecar};
  try {
    commands().at(command).second(ctx);
    return kExitOk;
  } catch (const Error& e) {
    err << "granusim " << command << ": error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "granusim " << command << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace granusim::cli
