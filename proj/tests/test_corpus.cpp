#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "retsel/corpus.hpp"
#include "retsel/errors.hpp"

using namespace retsel;

TEST_CASE("document frequencies match a hand count") {
  Corpus c = testutil::make_corpus({{"d1", "cat sat"}, {"d2", "cat cat sat"}, {"d3", "dog"}});
  REQUIRE(c.size() == 3);
  auto cat = c.vocab.id_of("cat");
  auto sat = c.vocab.id_of("sat");
  auto dog = c.vocab.id_of("dog");
  REQUIRE(cat);
  REQUIRE(sat);
  REQUIRE(dog);
  CHECK(c.vocab.df(*cat) == 2);
  CHECK(c.vocab.df(*sat) == 2);
  CHECK(c.vocab.df(*dog) == 1);
  CHECK_FALSE(c.vocab.id_of("fish"));
  CHECK(c.stats.n_docs == 3);
  CHECK(c.stats.avgdl == doctest::Approx(2.0));
}

TEST_CASE("document frequencies survive a brute-force recount") {
  std::mt19937_64 gen(2024);
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 100; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "d%03d", i);
    docs.emplace_back(id, testutil::join(testutil::random_tokens(gen, 40, 1, 12)));
  }
  Corpus c = testutil::make_corpus(docs);

  std::map<std::string, int> df;
  for (const auto& d : c.docs) {
    std::map<std::string, bool> seen;
    for (const auto& t : d.tokens)
      if (!seen[t]) {
        seen[t] = true;
        ++df[t];
      }
  }
  CHECK(df.size() == c.vocab.size());
  for (const auto& [term, n] : df) {
    auto id = c.vocab.id_of(term);
    REQUIRE(id);
    CHECK(c.vocab.df(*id) == static_cast<std::uint32_t>(n));
  }
}

TEST_CASE("single-term document gets a unit tf-idf entry") {
  Corpus c = testutil::make_corpus({{"d1", "cat"}});
  const SparseVec& v = c.features_of("d1");
  REQUIRE(v.entries.size() == 1);
  // N=1, df=1: idf = ln(2/2) + 1 = 1, and normalization leaves 1.0
  CHECK(v.entries[0].second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tf-idf is scale invariant under L2 normalization") {
  Corpus c = testutil::make_corpus({{"d1", "cat cat"}, {"d2", "cat"}});
  const SparseVec& a = c.features_of("d1");
  const SparseVec& b = c.features_of("d2");
  REQUIRE(a.entries.size() == 1);
  REQUIRE(b.entries.size() == 1);
  CHECK(a.entries[0].first == b.entries[0].first);
  CHECK(a.entries[0].second == doctest::Approx(b.entries[0].second).epsilon(1e-12));
}

TEST_CASE("out-of-vocabulary tokens yield the zero vector") {
  Corpus c = testutil::make_corpus({{"d1", "cat sat"}});
  SparseVec v = tfidf_vector({"unseen", "words"}, c.vocab, c.stats);
  CHECK(v.entries.empty());
  CHECK(v.norm() == 0.0);
}

TEST_CASE("every feature vector has unit norm or is zero") {
  std::mt19937_64 gen(77);
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 30; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "d%03d", i);
    docs.emplace_back(id, testutil::join(testutil::random_tokens(gen, 25, 1, 20)));
  }
  Corpus c = testutil::make_corpus(docs);
  for (const auto& d : c.docs) {
    const double n = c.features_of(d.id).norm();
    CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sparse dot ignores entries past the dense vector") {
  SparseVec v;
  v.entries = {{0, 0.5}, {3, 2.0}, {9, 1.0}};
  CHECK(v.dot({2.0, 0.0, 0.0, 1.0}) == doctest::Approx(3.0));
  CHECK(v.at(3) == doctest::Approx(2.0));
  CHECK(v.at(4) == 0.0);
}

TEST_CASE("lookup helpers distinguish absent ids") {
  Corpus c = testutil::make_corpus({{"d1", "cat"}});
  CHECK(c.find("d1") != nullptr);
  CHECK(c.find("nope") == nullptr);
  CHECK_THROWS_AS(c.at("nope"), DataError);
  CHECK(c.ids() == std::vector<std::string>{"d1"});
}

TEST_CASE("labeled and unlabeled ids partition the corpus") {
  std::vector<RawDoc> raw = {
      {"d1", "cat", {{"health", 1}}},
      {"d2", "dog", {}},
      {"d3", "sat", {{"health", 0}}},
  };
  Corpus c = build_corpus(raw, {"health"});
  CHECK(c.labeled_ids() == std::vector<std::string>{"d1", "d3"});
  CHECK(c.unlabeled_ids() == std::vector<std::string>{"d2"});
}

TEST_CASE("jsonl ingest handles an empty file") {
  testutil::TempDir tmp("corpus");
  testutil::spit(tmp.file("empty.jsonl"), "");
  Corpus c = ingest_jsonl(tmp.file("empty.jsonl"), {"health"});
  CHECK(c.size() == 0);
  CHECK(c.vocab.size() == 0);
}

TEST_CASE("jsonl ingest rejects duplicate ids by name") {
  testutil::TempDir tmp("corpus");
  testutil::spit(tmp.file("dup.jsonl"),
                 "{\"id\":\"c1\",\"text\":\"a\"}\n{\"id\":\"c1\",\"text\":\"b\"}\n");
  CHECK_THROWS_WITH_AS(ingest_jsonl(tmp.file("dup.jsonl"), {"health"}),
                       doctest::Contains("c1"), DataError);
}

TEST_CASE("jsonl ingest reports the malformed line number") {
  testutil::TempDir tmp("corpus");
  testutil::spit(tmp.file("bad.jsonl"), "{\"id\":\"c1\",\"text\":\"a\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(ingest_jsonl(tmp.file("bad.jsonl"), {"health"}),
                       doctest::Contains(":2"), DataError);
}

TEST_CASE("jsonl ingest rejects labels outside 0/1") {
  testutil::TempDir tmp("corpus");
  testutil::spit(tmp.file("lab.jsonl"),
                 "{\"id\":\"c1\",\"text\":\"a\",\"labels\":{\"health\":2}}\n");
  CHECK_THROWS_AS(ingest_jsonl(tmp.file("lab.jsonl"), {"health"}), DataError);
}

TEST_CASE("jsonl ingest drops labels of undeclared categories") {
  testutil::TempDir tmp("corpus");
  testutil::spit(tmp.file("extra.jsonl"),
                 "{\"id\":\"c1\",\"text\":\"a\",\"labels\":{\"health\":1,\"mood\":0}}\n");
  Corpus c = ingest_jsonl(tmp.file("extra.jsonl"), {"health"});
  REQUIRE(c.size() == 1);
  CHECK(c.docs[0].labels == std::map<std::string, int>{{"health", 1}});
}

TEST_CASE("jsonl write then ingest preserves content and bytes") {
  std::vector<RawDoc> raw = {
      {"d1", "cat \"quoted\" sat", {{"health", 1}, {"alone", 0}}},
      {"d2", "unicode caf\xC3\xA9 line", {}},
      {"d3", "tab\tand\\backslash", {{"alone", 1}}},
  };
  Corpus orig = build_corpus(raw, {"alone", "health"});
  testutil::TempDir tmp("corpus");
  write_jsonl(orig, tmp.file("one.jsonl"));
  Corpus back = ingest_jsonl(tmp.file("one.jsonl"), {"alone", "health"});
  REQUIRE(back.size() == orig.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.docs[i].id == orig.docs[i].id);
    CHECK(back.docs[i].text == orig.docs[i].text);
    CHECK(back.docs[i].labels == orig.docs[i].labels);
  }
  write_jsonl(back, tmp.file("two.jsonl"));
  CHECK(testutil::slurp(tmp.file("one.jsonl")) == testutil::slurp(tmp.file("two.jsonl")));
}
