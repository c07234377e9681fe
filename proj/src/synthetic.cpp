#include "granusim/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "granusim/error.hpp"
#include "granusim/random.hpp"

namespace granusim {

namespace {

std::string topic_word(std::size_t topic, std::size_t i) {
  return "t" + std::to_string(topic) + "w" + std::to_string(i);
}
std::string common_word(std::size_t i) { return "c" + std::to_string(i); }
std::string entity_word(std::size_t i) { return "e" + std::to_string(i); }

std::string doc_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "d%05zu", i);
  return buf;
}

void check_profile(const SyntheticProfile& p) {
  if (p.topic_lexicon == 0 || p.common_lexicon == 0 || p.entity_pool == 0 || p.embedding_dim == 0) {
    throw UsageError("synthetic profile needs non-empty lexicons and a positive embedding dimension");
  }
  if (p.entities_per_event == 0 || p.entities_per_event > p.entity_pool) {
    throw UsageError("entities_per_event must lie in [1, entity_pool]");
  }
  if (p.shared_entities > p.entities_per_event) throw UsageError("shared_entities exceeds entities_per_event");
  if (p.events_per_block < 2) throw UsageError("events_per_block must be at least 2");
}

}  // namespace

SyntheticCorpus generate_synthetic(std::uint64_t seed, std::size_t n_events, std::size_t docs_per_event,
                                   std::size_t n_topics, const SyntheticProfile& profile) {
  if (n_events < 2 || docs_per_event < 2 || n_topics < 2) {
    throw UsageError("synthetic corpus needs n_events >= 2, docs_per_event >= 2 and n_topics >= 2");
  }
  check_profile(profile);
  Rng rng(seed);

  struct Event {
    std::size_t topic;
    std::size_t block;
    std::vector<std::size_t> entities;
  };
  std::vector<Event> events(n_events);
  const std::size_t n_blocks = (n_events + profile.events_per_block - 1) / profile.events_per_block;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t topic_a = rng.uniform_index(n_topics);
    const std::size_t topic_b = (topic_a + 1 + rng.uniform_index(n_topics - 1)) % n_topics;
    const std::size_t first = b * profile.events_per_block;
    const std::size_t last = std::min(n_events, first + profile.events_per_block);
    for (std::size_t e = first; e < last; ++e) {
      Event& ev = events[e];
      const bool odd = (e - first) % 2 == 1;
      ev.topic = odd ? topic_b : topic_a;
      ev.block = b;
      // Odd events reuse the first `shared_entities` names of their sister.
      if (odd) {
        const auto& sister = events[e - 1].entities;
        ev.entities.assign(sister.begin(), sister.begin() + static_cast<std::ptrdiff_t>(profile.shared_entities));
      }
      while (ev.entities.size() < profile.entities_per_event) {
        const std::size_t cand = rng.uniform_index(profile.entity_pool);
        if (std::find(ev.entities.begin(), ev.entities.end(), cand) == ev.entities.end()) ev.entities.push_back(cand);
      }
    }
  }

  using namespace std::chrono;
  const sys_days base{year{2019} / September / 1};
  std::vector<Document> docs;
  std::vector<std::size_t> doc_event;
  for (std::size_t e = 0; e < n_events; ++e) {
    const Event& ev = events[e];
    for (std::size_t k = 0; k < docs_per_event; ++k) {
      std::vector<std::string> words;
      for (std::size_t i = 0; i < profile.entity_mentions_per_doc; ++i) {
        words.push_back(entity_word(ev.entities[rng.uniform_index(ev.entities.size())]));
      }
      for (std::size_t i = 0; i < profile.noise_entities_per_doc; ++i) {
        words.push_back(entity_word(rng.uniform_index(profile.entity_pool)));
      }
      for (std::size_t i = 0; i < profile.topic_words_per_doc; ++i) {
        words.push_back(topic_word(ev.topic, rng.uniform_index(profile.topic_lexicon)));
      }
      for (std::size_t i = 0; i < profile.common_words_per_doc; ++i) {
        words.push_back(common_word(rng.uniform_index(profile.common_lexicon)));
      }
      rng.shuffle(words);
      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      text += '.';
      Document doc;
      doc.id = doc_id(docs.size());
      doc.text = std::move(text);
      doc.source = "synthetic";
      doc.topic = "topic" + std::to_string(ev.topic);
      doc.timestamp = time_point_cast<seconds>(base + days{static_cast<int>(ev.block)}) +
                      hours{static_cast<int>(e % profile.events_per_block) * 4 + static_cast<int>(k)};
      docs.push_back(std::move(doc));
      doc_event.push_back(e);
    }
  }

  PairCollection pairs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j) {
      const Event& a = events[doc_event[i]];
      const Event& b = events[doc_event[j]];
      if (a.block != b.block) continue;
      PairRecord rec = make_pair_record(docs[i].id, docs[j].id);
      rec.granular = doc_event[i] == doc_event[j];
      rec.abstract = a.topic == b.topic;
      pairs.push_back(std::move(rec));
    }
  }
  return {DocumentCollection(std::move(docs)), std::move(pairs)};
}

WordVectorStore synthetic_word_vectors(std::uint64_t seed, std::size_t n_topics, const SyntheticProfile& profile) {
  check_profile(profile);
  if (n_topics < 2) throw UsageError("synthetic vectors need n_topics >= 2");
  // Separate stream so vectors do not shift when corpus sampling changes.
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  const auto dim = static_cast<Eigen::Index>(profile.embedding_dim);
  auto noise = [&] {
    DenseVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = profile.word_noise * rng.normal();
    return v;
  };

  std::vector<std::string> words;
  std::vector<DenseVector> rows;
  for (std::size_t t = 0; t < n_topics; ++t) {
    DenseVector centroid(dim);
    for (Eigen::Index i = 0; i < dim; ++i) centroid[i] = rng.normal();
    centroid *= profile.topic_centroid_norm / centroid.norm();
    for (std::size_t i = 0; i < profile.topic_lexicon; ++i) {
      words.push_back(topic_word(t, i));
      rows.push_back(centroid + noise());
    }
  }
  for (std::size_t i = 0; i < profile.common_lexicon; ++i) {
    words.push_back(common_word(i));
    rows.push_back(noise());
  }
  for (std::size_t i = 0; i < profile.entity_pool; ++i) {
    words.push_back(entity_word(i));
    rows.push_back(noise());
  }
  DenseMatrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return WordVectorStore(std::move(words), std::move(m));
}

}  // namespace granusim
