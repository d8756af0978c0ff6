#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "retsel/corpus.hpp"
#include "retsel/errors.hpp"
#include "retsel/vecindex.hpp"

using namespace retsel;

namespace {

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot_of(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> random_unit(std::mt19937_64& gen, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n = 0.0;
  while (n == 0.0) {
    for (double& x : v) x = normal(gen);
    n = norm_of(v);
  }
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

TEST_CASE("hashing is deterministic and unit length") {
  auto a = hash_embed("i went to the gym", 64, 42);
  auto b = hash_embed("i went to the gym", 64, 42);
  CHECK(a == b);
  CHECK(norm_of(a) == doctest::Approx(1.0).epsilon(1e-12));
  auto c = hash_embed("i went to the gym", 64, 43);
  CHECK(a != c);
}

TEST_CASE("empty text maps to the first basis vector") {
  auto v = hash_embed("", 8, 42);
  REQUIRE(v.size() == 8);
  CHECK(v[0] == 1.0);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] == 0.0);
  CHECK(hash_embed(",.!", 8, 42) == v);
}

TEST_CASE("unrelated token pairs have small cosine at dim 4096") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> letter(0, 25);
  for (int i = 0; i < 100; ++i) {
    std::string t1, t2;
    for (int j = 0; j < 7; ++j) t1.push_back(static_cast<char>('a' + letter(gen)));
    for (int j = 0; j < 9; ++j) t2.push_back(static_cast<char>('a' + letter(gen)));
    auto a = hash_embed(t1, 4096, 42);
    auto b = hash_embed(t2, 4096, 42);
    CHECK(std::abs(dot_of(a, b)) < 0.2);
  }
}

TEST_CASE("matrix add validates dimension, zero vectors, and duplicates") {
  EmbeddingMatrix m(3, "test");
  CHECK_FALSE(m.add("d1", {1.0, 0.0, 0.0}));
  CHECK_THROWS_AS(m.add("d2", {1.0, 0.0}), DataError);
  CHECK_THROWS_AS(m.add("d2", {0.0, 0.0, 0.0}), DataError);
  CHECK_THROWS_AS(m.add("d1", {0.0, 1.0, 0.0}), DataError);
  // off-unit input is renormalized and reported
  CHECK(m.add("d3", {0.0, 2.0, 0.0}));
  const double* row = m.find("d3");
  REQUIRE(row != nullptr);
  CHECK(row[1] == doctest::Approx(1.0));
  CHECK(m.find("zz") == nullptr);
  CHECK(m.size() == 2);
}

TEST_CASE("knn finds an exact match first") {
  std::mt19937_64 gen(7);
  EmbeddingMatrix m(16, "test");
  std::vector<double> target;
  for (int i = 0; i < 10; ++i) {
    auto v = random_unit(gen, 16);
    char id[16];
    std::snprintf(id, sizeof(id), "d%02d", i);
    m.add(id, v);
    if (i == 4) target = v;
  }
  auto hits = knn_search(m, target, 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].id == "d04");
  CHECK(hits[0].distance == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("k beyond the collection returns everything ascending") {
  std::mt19937_64 gen(8);
  EmbeddingMatrix m(8, "test");
  for (int i = 0; i < 5; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "d%02d", i);
    m.add(id, random_unit(gen, 8));
  }
  auto hits = knn_search(m, random_unit(gen, 8), 50);
  REQUIRE(hits.size() == 5);
  for (std::size_t i = 1; i < hits.size(); ++i)
    CHECK(hits[i - 1].distance <= hits[i].distance);
}

TEST_CASE("distance follows d^2 = 2 - 2cos for unit vectors") {
  EmbeddingMatrix m(2, "test");
  m.add("d1", {1.0, 0.0});
  const double s = std::sqrt(3.0) / 2.0;
  m.add("d2", {0.5, s});  // cosine 0.5 against d1
  std::vector<double> q = {1.0, 0.0};
  auto hits = knn_search(m, q, 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[1].id == "d2");
  CHECK(hits[1].distance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("query vectors are normalized on entry") {
  EmbeddingMatrix m(2, "test");
  m.add("d1", {1.0, 0.0});
  std::vector<double> q = {10.0, 0.0};
  auto hits = knn_search(m, q, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].distance == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(knn_search(m, std::vector<double>{1.0, 0.0, 0.0}, 1), DataError);
}

TEST_CASE("top-k is a prefix of top-(k+1)") {
  std::mt19937_64 gen(21);
  EmbeddingMatrix m(12, "test");
  for (int i = 0; i < 40; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "d%02d", i);
    m.add(id, random_unit(gen, 12));
  }
  auto q = random_unit(gen, 12);
  for (std::size_t k = 1; k < 12; ++k) {
    auto small = knn_search(m, q, k);
    auto big = knn_search(m, q, k + 1);
    REQUIRE(big.size() == k + 1);
    for (std::size_t i = 0; i < k; ++i) CHECK(small[i].id == big[i].id);
  }
}

TEST_CASE("restriction limits candidates") {
  std::mt19937_64 gen(31);
  EmbeddingMatrix m(8, "test");
  for (int i = 0; i < 10; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "d%02d", i);
    m.add(id, random_unit(gen, 8));
  }
  std::set<std::string> allow = {"d03", "d07"};
  auto hits = knn_search(m, random_unit(gen, 8), 10, &allow);
  REQUIRE(hits.size() == 2);
  for (const auto& h : hits) CHECK(allow.count(h.id) == 1);
}

TEST_CASE("euclidean order equals descending cosine order") {
  std::mt19937_64 gen(55);
  std::uniform_int_distribution<std::size_t> count(2, 200);
  const std::size_t n = count(gen);
  EmbeddingMatrix m(24, "test");
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "d%03u", static_cast<unsigned>(i));
    auto v = random_unit(gen, 24);
    m.add(id, v);
    rows.emplace_back(id, v);
  }
  auto q = random_unit(gen, 24);
  auto hits = knn_search(m, q, n);
  auto want = oracles::cosine_order(rows, q);
  REQUIRE(hits.size() == want.size());
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].id == want[i]);
}

TEST_CASE("embedding file round-trips and validates") {
  testutil::TempDir tmp("emb");

  SUBCASE("well-formed file loads") {
    testutil::spit(tmp.file("ok.txt"), "2 3\nd1 1 0 0\nd2 0 1 0\n");
    EmbeddingMatrix m = load_embeddings(tmp.file("ok.txt"));
    CHECK(m.dim() == 3);
    CHECK(m.size() == 2);
  }

  SUBCASE("dimension mismatch names the row") {
    testutil::spit(tmp.file("dim.txt"), "2 3\nd1 1 0 0\nd2 0 1\n");
    CHECK_THROWS_WITH_AS(load_embeddings(tmp.file("dim.txt")), doctest::Contains(":3"),
                         DataError);
  }

  SUBCASE("zero vectors are rejected by id") {
    testutil::spit(tmp.file("zero.txt"), "1 3\nd9 0 0 0\n");
    CHECK_THROWS_WITH_AS(load_embeddings(tmp.file("zero.txt")), doctest::Contains("d9"),
                         DataError);
  }

  SUBCASE("off-unit rows are renormalized and counted") {
    testutil::spit(tmp.file("norm.txt"), "2 2\nd1 3 4\nd2 1 0\n");
    EmbeddingLoadSummary summary;
    EmbeddingMatrix m = load_embeddings(tmp.file("norm.txt"), &summary);
    CHECK(summary.renormalized == 1);
    const double* row = m.find("d1");
    REQUIRE(row != nullptr);
    CHECK(row[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(row[1] == doctest::Approx(0.8).epsilon(1e-12));
  }

  SUBCASE("save then load then save is byte identical") {
    std::mt19937_64 gen(3);
    EmbeddingMatrix m(6, "hash dim=6 seed=1");
    for (int i = 0; i < 7; ++i) {
      char id[16];
      std::snprintf(id, sizeof(id), "d%02d", i);
      m.add(id, random_unit(gen, 6));
    }
    save_embeddings(m, tmp.file("a.txt"));
    EmbeddingMatrix back = load_embeddings(tmp.file("a.txt"));
    save_embeddings(back, tmp.file("b.txt"));
    CHECK(testutil::slurp(tmp.file("a.txt")) == testutil::slurp(tmp.file("b.txt")));
  }
}

TEST_CASE("embed_query joins terms with single spaces") {
  HashEmbedder emb(32, 42);
  CHECK(embed_query(emb, {"friend"}) == emb.embed("friend"));
  CHECK(embed_query(emb, {"health", "weight", "gym", "exercise"}) ==
        emb.embed("health weight gym exercise"));
  CHECK(embed_query(emb, {"alone", "myself"}) == emb.embed("alone myself"));
  CHECK_THROWS_AS(embed_query(emb, {}), UsageError);
}

TEST_CASE("corpus embedding covers every document") {
  Corpus c = testutil::make_corpus({{"d1", "cat sat"}, {"d2", "dog ran"}});
  HashEmbedder emb(16, 42);
  EmbeddingMatrix m = embed_corpus(c, emb);
  CHECK(m.size() == 2);
  CHECK(m.dim() == 16);
  CHECK(m.find("d1") != nullptr);
  CHECK(m.find("d2") != nullptr);
  CHECK(m.provider_tag() == emb.tag());
}

TEST_CASE("file-backed query embedder looks up by plus-joined key") {
  testutil::TempDir tmp("emb");
  testutil::spit(tmp.file("q.txt"), "2 3\nalone+myself 1 0 0\nfriend 0 1 0\n");
  FileEmbedder emb(tmp.file("q.txt"));
  CHECK(emb.dim() == 3);
  auto v = emb.embed("alone myself");
  CHECK(v == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(emb.embed("health"), DataError);
}
