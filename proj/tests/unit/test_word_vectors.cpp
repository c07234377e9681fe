#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "granusim/error.hpp"
#include "granusim/random.hpp"
#include "granusim/word_vectors.hpp"

using namespace granusim;
using granusim::testing::docs_from_texts;
using granusim::testing::store_from;

namespace {

WordVectorStore parse_vectors(const std::string& text) {
  std::istringstream in(text);
  return read_word_vectors(in);
}

WordVectorStore random_store(std::size_t n_words, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t i = 0; i < n_words; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    rows.emplace_back("w" + std::to_string(i), v);
  }
  return store_from(rows);
}

}  // namespace

TEST(WordVectors, LoadsWithAndWithoutHeader) {
  const auto a = parse_vectors("x 1 2 3\ny 4 5 6\n");
  EXPECT_EQ(a.dimension(), 3u);
  EXPECT_EQ(a.size(), 2u);
  const auto b = parse_vectors("2 3\nx 1 2 3\ny 4 5 6\n");
  EXPECT_EQ(b.matrix(), a.matrix());
  EXPECT_EQ(b.vector(*b.index_of("y"))(2), 6.0);
}

TEST(WordVectors, Rejections) {
  EXPECT_THROW(parse_vectors("x 1 2 3\ny 4 5 6 7\n"), DataError);
  EXPECT_THROW(parse_vectors("x 1 2 3\ny 4 five 6\n"), DataError);
  EXPECT_THROW(parse_vectors("x 1 nan 3\n"), DataError);
  EXPECT_THROW(parse_vectors("3 3\nx 1 2 3\n"), DataError);
  EXPECT_THROW(parse_vectors("x 1\nx 2\n"), DataError);
  EXPECT_THROW(parse_vectors(""), DataError);
  try {
    parse_vectors("x 1 2\ny 4 bad\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(WordVectors, WriteReadRoundTrip) {
  const auto store = random_store(5, 4, 3);
  std::ostringstream out;
  write_word_vectors(out, store);
  const auto back = parse_vectors(out.str());
  EXPECT_EQ(back.words(), store.words());
  EXPECT_EQ(back.matrix(), store.matrix());
}

TEST(AverageEmbed, Examples) {
  const auto store = store_from({{"a", {1, 0}}, {"b", {0, 1}}});
  EXPECT_EQ(average_embed(store, {"a", "b"}), Eigen::Vector2d(0.5, 0.5));
  const DenseVector v = average_embed(store, {"a", "a", "b"});
  EXPECT_NEAR(v(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(v(1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(average_embed(store, {"z"}), Eigen::Vector2d::Zero());
  EXPECT_EQ(average_embed(store, {}), Eigen::Vector2d::Zero());
}

TEST(AverageEmbed, PermutationAndRepetitionInvariance) {
  const auto store = random_store(10, 6, 11);
  Rng rng(5);
  Tokens tokens;
  for (int i = 0; i < 12; ++i) tokens.push_back("w" + std::to_string(rng.uniform_index(12)));
  const DenseVector base = average_embed(store, tokens);
  Tokens shuffled = tokens;
  rng.shuffle(shuffled);
  EXPECT_LT((average_embed(store, shuffled) - base).norm(), 1e-12);
  Tokens doubled = tokens;
  doubled.insert(doubled.end(), tokens.begin(), tokens.end());
  EXPECT_LT((average_embed(store, doubled) - base).norm(), 1e-12);
}

TEST(Sif, WordWeights) {
  // Orthogonal word vectors: removing the dominant direction (q) leaves
  // the p row untouched, so its SIF weight a / (a + a) = 0.5 shows through.
  const auto store = store_from({{"p", {1.0, 0.0}}, {"q", {0.0, 1.0}}});
  const auto docs = docs_from_texts({"p", "q"});
  const WordProbabilities probs = {{"p", 1e-3}, {"q", 0.0}};
  const auto result = sif_embed_corpus(store, docs, {}, probs);
  ASSERT_TRUE(result.principal_direction);
  // Rows before removal: (0.5, 0) and (0, 1). The dominant direction is q.
  EXPECT_NEAR(std::abs((*result.principal_direction)(1)), 1.0, 1e-9);
  EXPECT_NEAR(result.embeddings.at("d0")(0), 0.5, 1e-9);
  EXPECT_NEAR(result.embeddings.at("d1").norm(), 0.0, 1e-9);
}

TEST(Sif, ResidualAlongRemovedDirection) {
  const auto store = random_store(30, 8, 21);
  Rng rng(4);
  std::vector<std::string> texts;
  for (int d = 0; d < 20; ++d) {
    std::string t;
    for (int k = 0; k < 7; ++k) t += "w" + std::to_string(rng.uniform_index(30)) + " ";
    texts.push_back(t);
  }
  const auto docs = docs_from_texts(texts);
  const auto result = sif_embed_corpus(store, docs, {}, unigram_probabilities(docs, {}));
  ASSERT_TRUE(result.principal_direction);
  const DenseVector& u = *result.principal_direction;
  EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  for (const auto& [id, e] : result.embeddings) EXPECT_LE(std::abs(u.dot(e)), 1e-8) << id;
}

TEST(Sif, PrincipalDirectionMatchesSvd) {
  Rng rng(8);
  DenseMatrix rows(15, 5);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = rng.normal() + (j == 2 ? 3.0 : 0.0);
  }
  const auto u = first_principal_direction(rows, 1e-12, 100000);
  ASSERT_TRUE(u);
  Eigen::JacobiSVD<DenseMatrix> svd(rows, Eigen::ComputeThinV);
  const DenseVector v = svd.matrixV().col(0);
  EXPECT_NEAR(std::abs(u->dot(v)), 1.0, 1e-9);
}

TEST(Sif, AllZeroMatrixSkipsRemoval) {
  const auto store = store_from({{"p", {1.0, 0.0}}});
  const auto result = sif_embed_corpus(store, docs_from_texts({"zzz", "yyy"}), {}, {});
  EXPECT_FALSE(result.principal_direction);
  EXPECT_EQ(result.embeddings.at("d0"), Eigen::Vector2d::Zero());
}

TEST(Sif, OnesStartOrthogonalToRowSpace) {
  DenseMatrix rows(2, 2);
  rows << 1, -1, 2, -2;
  const auto u = first_principal_direction(rows);
  ASSERT_TRUE(u);
  EXPECT_NEAR(std::abs((*u)(0)), std::sqrt(0.5), 1e-9);
  EXPECT_NEAR((*u)(0), -(*u)(1), 1e-9);
}

TEST(Sif, Rejections) {
  const auto store = store_from({{"p", {1.0}}});
  EXPECT_THROW(sif_embed_corpus(store, DocumentCollection{}, {}, {}), DataError);
  SifOptions bad;
  bad.a = 0.0;
  EXPECT_THROW(sif_embed_corpus(store, docs_from_texts({"p"}), {}, {}, bad), UsageError);
  EXPECT_THROW(sif_embed_corpus(store, docs_from_texts({"p"}), {}, {{"p", 1.5}}), UsageError);
}

TEST(UnigramProbabilities, SumToOne) {
  const auto probs = unigram_probabilities(docs_from_texts({"a b a", "c a"}), {});
  EXPECT_DOUBLE_EQ(probs.at("a"), 0.6);
  double total = 0;
  for (const auto& [w, p] : probs) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}
