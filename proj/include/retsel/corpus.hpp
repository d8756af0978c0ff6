#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retsel/text.hpp"

namespace retsel {

// One corpus text. `labels` maps category name to 0/1; a missing entry means
// the document is unlabeled for that category.
struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::map<std::string, int> labels;
};

class Vocabulary {
 public:
  // Returns the id for `term`, inserting it if new.
  std::uint32_t intern(const std::string& term);
  std::optional<std::uint32_t> id_of(std::string_view term) const;
  const std::string& term(std::uint32_t id) const { return terms_[id]; }
  std::uint32_t df(std::uint32_t id) const { return df_[id]; }
  void bump_df(std::uint32_t id) { ++df_[id]; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  double avgdl = 0.0;
  std::vector<double> mean_feature;  // per-term mean of the tf-idf feature
};

// Sparse vector over term ids, entries ascending by id.
struct SparseVec {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double dot(const std::vector<double>& dense) const;
  double norm() const;
  double at(std::uint32_t id) const;  // 0 when absent
};

struct RawDoc {
  std::string id;
  std::string text;
  std::map<std::string, int> labels;
};

struct Corpus {
  std::vector<Document> docs;
  std::vector<std::string> categories;
  Vocabulary vocab;
  CorpusStats stats;
  TokenizerConfig tokenizer;
  std::vector<SparseVec> features;  // unit-norm tf-idf per doc
  std::unordered_map<std::string, std::size_t> slot_of;

  std::size_t size() const { return docs.size(); }
  const Document* find(std::string_view id) const;
  const Document& at(std::string_view id) const;          // throws DataError
  const SparseVec& features_of(std::string_view id) const;
  std::vector<std::string> ids() const;

  // Ids of documents carrying at least one declared-category label.
  std::vector<std::string> labeled_ids() const;
  std::vector<std::string> unlabeled_ids() const;
};

// Tokenizes, builds the vocabulary with document frequencies, computes
// collection stats and unit-norm tf-idf features.
Corpus build_corpus(std::vector<RawDoc> raw, std::vector<std::string> categories,
                    const TokenizerConfig& tok = {});

// JSON Lines: {"id": str, "text": str, "labels": {"<category>": 0|1}?}.
// Unknown fields are ignored; labels outside `categories` are dropped.
Corpus ingest_jsonl(const std::string& path, std::vector<std::string> categories,
                    const TokenizerConfig& tok = {});
void write_jsonl(const Corpus& corpus, const std::string& path);

// tf(t) * (ln((N+1)/(df(t)+1)) + 1), L2-normalized. Unknown terms dropped;
// a document with no in-vocabulary terms yields the zero vector.
SparseVec tfidf_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                       const CorpusStats& stats);

}  // namespace retsel
