#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "retsel/corpus.hpp"
#include "retsel/errors.hpp"
#include "retsel/lexindex.hpp"

using namespace retsel;

namespace {

Corpus three_docs() {
  return testutil::make_corpus({{"d1", "cat sat"}, {"d2", "cat cat sat"}, {"d3", "dog"}});
}

}  // namespace

TEST_CASE("postings and collection statistics match hand counts") {
  InvertedIndex idx = build_index(three_docs());
  CHECK(idx.doc_count() == 3);
  CHECK(idx.avgdl() == doctest::Approx(2.0));
  CHECK(idx.term_count() == 3);

  const auto* cat = idx.postings("cat");
  REQUIRE(cat != nullptr);
  REQUIRE(cat->size() == 2);
  CHECK(idx.doc_id((*cat)[0].doc) == "d1");
  CHECK((*cat)[0].tf == 1);
  CHECK(idx.doc_id((*cat)[1].doc) == "d2");
  CHECK((*cat)[1].tf == 2);
  CHECK(idx.doc_length((*cat)[1].doc) == 3);
  CHECK(idx.postings("fish") == nullptr);
}

TEST_CASE("empty corpus builds an empty index") {
  Corpus c = testutil::make_corpus({});
  InvertedIndex idx = build_index(c);
  CHECK(idx.doc_count() == 0);
  CHECK(idx.term_count() == 0);
  CHECK(bm25_search(idx, {"cat"}, 5).empty());
}

TEST_CASE("absent query terms return nothing") {
  InvertedIndex idx = build_index(three_docs());
  CHECK(bm25_search(idx, {"fish"}, 10).empty());
}

TEST_CASE("hand-evaluated bm25 score") {
  InvertedIndex idx = build_index(three_docs());
  auto hits = bm25_search(idx, {"cat"}, 10);
  // idf = ln(1 + (3 - 2 + 0.5)/(2 + 0.5)) = ln(1.6); d3 scores zero and drops
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].id == "d2");
  CHECK(hits[1].id == "d1");
  const double idf = std::log(1.6);
  CHECK(hits[1].score == doctest::Approx(idf).epsilon(1e-12));
  CHECK(hits[1].score == doctest::Approx(0.47000362924573563).epsilon(1e-12));
  const double d2 = idf * 2.0 * 2.2 / (2.0 + 1.2 * (0.25 + 0.75 * 1.5));
  CHECK(hits[0].score == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("duplicate query terms collapse") {
  InvertedIndex idx = build_index(three_docs());
  auto once = bm25_search(idx, {"cat"}, 10);
  auto twice = bm25_search(idx, {"cat", "cat"}, 10);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].id == twice[i].id);
    CHECK(once[i].score == twice[i].score);
  }
}

TEST_CASE("k must be positive") {
  InvertedIndex idx = build_index(three_docs());
  CHECK_THROWS_AS(bm25_search(idx, {"cat"}, 0), UsageError);
}

TEST_CASE("ties break by ascending doc id") {
  Corpus c = testutil::make_corpus({{"b", "cat"}, {"a", "cat"}, {"c", "dog"}});
  auto hits = bm25_search(build_index(c), {"cat"}, 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].id == "a");
  CHECK(hits[1].id == "b");
  CHECK(hits[0].score == hits[1].score);
}

TEST_CASE("higher tf scores strictly higher at equal length") {
  Corpus c = testutil::make_corpus(
      {{"d1", "cat cat dog"}, {"d2", "cat dog dog"}, {"d3", "pad pad pad"}});
  auto hits = bm25_search(build_index(c), {"cat"}, 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].id == "d1");
  CHECK(hits[0].score > hits[1].score);
}

TEST_CASE("result length respects k and score positivity") {
  InvertedIndex idx = build_index(three_docs());
  CHECK(bm25_search(idx, {"cat"}, 1).size() == 1);
  CHECK(bm25_search(idx, {"cat"}, 10).size() == 2);
  for (const auto& h : bm25_search(idx, {"cat", "sat"}, 10)) CHECK(h.score > 0.0);
}

TEST_CASE("subset index takes statistics from the subset") {
  Corpus c = three_docs();
  InvertedIndex idx = build_index(c, {"d1", "d3"});
  CHECK(idx.doc_count() == 2);
  CHECK(idx.avgdl() == doctest::Approx(1.5));
  auto hits = bm25_search(idx, {"cat"}, 10);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].id == "d1");
  // df=1 of N=2 now: idf = ln(1 + 1.5/1.5) = ln 2
  const double idf = std::log(2.0);
  const double score = idf * 1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * (2.0 / 1.5)));
  CHECK(hits[0].score == doctest::Approx(score).epsilon(1e-12));
}

TEST_CASE("randomized corpora agree with the brute-force scorer") {
  std::mt19937_64 gen(4242);
  for (int round = 0; round < 3; ++round) {
    std::uniform_int_distribution<std::size_t> ndocs(2, 50);
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    const std::size_t n = ndocs(gen);
    for (std::size_t i = 0; i < n; ++i) {
      char id[16];
      std::snprintf(id, sizeof(id), "d%03u", static_cast<unsigned>(i));
      docs.emplace_back(id, testutil::random_tokens(gen, 30, 1, 15));
    }
    std::vector<std::pair<std::string, std::string>> texts;
    for (const auto& [id, toks] : docs) texts.emplace_back(id, testutil::join(toks));
    Corpus c = testutil::make_corpus(texts);
    InvertedIndex idx = build_index(c);

    std::vector<std::string> query = testutil::random_tokens(gen, 30, 1, 4);
    auto got = bm25_search(idx, query, n);
    auto want = oracles::bm25_brute(docs, query, 1.2, 0.75, n);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == want[i].id);
      CHECK(std::abs(got[i].score - want[i].score) <= 1e-9);
    }
  }
}
