#include "retsel/lexindex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "retsel/errors.hpp"

namespace retsel {

const std::vector<Posting>* InvertedIndex::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? nullptr : &it->second;
}

InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params) {
  return build_index(corpus, corpus.ids(), params);
}

InvertedIndex build_index(const Corpus& corpus, const std::vector<std::string>& ids,
                          const Bm25Params& params) {
  InvertedIndex idx;
  idx.params_ = params;
  std::size_t total_len = 0;
  for (const auto& id : ids) {
    const Document& d = corpus.at(id);
    auto slot = static_cast<std::uint32_t>(idx.doc_ids_.size());
    idx.doc_ids_.push_back(d.id);
    idx.doc_len_.push_back(static_cast<std::uint32_t>(d.tokens.size()));
    total_len += d.tokens.size();
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : d.tokens) ++tf[t];
    for (const auto& [term, count] : tf) idx.postings_[term].push_back({slot, count});
  }
  idx.avgdl_ = idx.doc_ids_.empty()
                   ? 0.0
                   : static_cast<double>(total_len) / static_cast<double>(idx.doc_ids_.size());
  return idx;
}

std::vector<ScoredDoc> bm25_search(const InvertedIndex& index,
                                   const std::vector<std::string>& query_terms,
                                   std::size_t k) {
  if (k < 1) throw UsageError("bm25_search: k must be >= 1");

  // collapse duplicate terms, keeping first-occurrence order
  std::vector<std::string> terms;
  for (const auto& t : query_terms) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }

  const double n = static_cast<double>(index.doc_count());
  const double k1 = index.params().k1;
  const double b = index.params().b;
  const double avgdl = index.avgdl();

  std::vector<double> scores(index.doc_count(), 0.0);
  std::vector<bool> touched(index.doc_count(), false);
  for (const auto& term : terms) {
    const auto* plist = index.postings(term);
    if (!plist) continue;
    const double df = static_cast<double>(plist->size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const Posting& p : *plist) {
      const double tf = static_cast<double>(p.tf);
      const double len_norm =
          avgdl > 0.0 ? static_cast<double>(index.doc_length(p.doc)) / avgdl : 0.0;
      scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len_norm));
      touched[p.doc] = true;
    }
  }

  std::vector<ScoredDoc> out;
  for (std::uint32_t slot = 0; slot < index.doc_count(); ++slot) {
    if (touched[slot] && scores[slot] > 0.0) out.push_back({index.doc_id(slot), scores[slot]});
  }
  std::sort(out.begin(), out.end(), [](const ScoredDoc& lhs, const ScoredDoc& rhs) {
    if (lhs.score != rhs.score) return lhs.score > rhs.score;
    return lhs.id < rhs.id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace retsel
