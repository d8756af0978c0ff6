#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retsel/corpus.hpp"

namespace retsel {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::uint32_t doc;  // slot in the index's doc table, insertion order
  std::uint32_t tf;
};

// Term -> postings with collection statistics. Immutable after build;
// pools are rebuilt rather than updated incrementally.
class InvertedIndex {
 public:
  const std::vector<Posting>* postings(std::string_view term) const;
  std::size_t doc_count() const { return doc_ids_.size(); }
  double avgdl() const { return avgdl_; }
  std::uint32_t doc_length(std::uint32_t slot) const { return doc_len_[slot]; }
  const std::string& doc_id(std::uint32_t slot) const { return doc_ids_[slot]; }
  const Bm25Params& params() const { return params_; }
  std::size_t term_count() const { return postings_.size(); }

 private:
  friend InvertedIndex build_index(const Corpus&, const std::vector<std::string>&,
                                   const Bm25Params&);
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_len_;
  double avgdl_ = 0.0;
  Bm25Params params_;
};

InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params = {});
// Index over a subset of documents; collection statistics come from the
// subset only.
InvertedIndex build_index(const Corpus& corpus, const std::vector<std::string>& ids,
                          const Bm25Params& params = {});

struct ScoredDoc {
  std::string id;
  double score;
};

// Okapi BM25 with the non-negative idf ln(1 + (N - df + 0.5)/(df + 0.5)).
// Query terms are a bag of OR'd terms; duplicates collapse. Only documents
// with score > 0 are returned, sorted by score descending, ties by
// ascending id.
std::vector<ScoredDoc> bm25_search(const InvertedIndex& index,
                                   const std::vector<std::string>& query_terms,
                                   std::size_t k);

}  // namespace retsel
