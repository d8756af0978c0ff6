#include "retsel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "retsel/errors.hpp"

namespace retsel {

std::uint32_t Vocabulary::intern(const std::string& term) {
  auto it = ids_.find(term);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(terms_.size());
  ids_.emplace(term, id);
  terms_.push_back(term);
  df_.push_back(0);
  return id;
}

std::optional<std::uint32_t> Vocabulary::id_of(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  return it == ids_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
}

double SparseVec::dot(const std::vector<double>& dense) const {
  // Entries beyond the dense vector (terms a loaded model never saw)
  // contribute zero.
  double s = 0.0;
  for (const auto& [id, v] : entries)
    if (id < dense.size()) s += dense[id] * v;
  return s;
}

double SparseVec::norm() const {
  double s = 0.0;
  for (const auto& [id, v] : entries) s += v * v;
  return std::sqrt(s);
}

double SparseVec::at(std::uint32_t id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const auto& e, std::uint32_t k) { return e.first < k; });
  return (it != entries.end() && it->first == id) ? it->second : 0.0;
}

const Document* Corpus::find(std::string_view id) const {
  auto it = slot_of.find(std::string(id));
  return it == slot_of.end() ? nullptr : &docs[it->second];
}

const Document& Corpus::at(std::string_view id) const {
  const Document* d = find(id);
  if (!d) throw DataError("unknown document id \"" + std::string(id) + "\"");
  return *d;
}

const SparseVec& Corpus::features_of(std::string_view id) const {
  auto it = slot_of.find(std::string(id));
  if (it == slot_of.end())
    throw DataError("unknown document id \"" + std::string(id) + "\"");
  return features[it->second];
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.id);
  return out;
}

std::vector<std::string> Corpus::labeled_ids() const {
  std::vector<std::string> out;
  for (const auto& d : docs)
    if (!d.labels.empty()) out.push_back(d.id);
  return out;
}

std::vector<std::string> Corpus::unlabeled_ids() const {
  std::vector<std::string> out;
  for (const auto& d : docs)
    if (d.labels.empty()) out.push_back(d.id);
  return out;
}

SparseVec tfidf_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                       const CorpusStats& stats) {
  std::map<std::uint32_t, double> tf;
  for (const auto& t : tokens) {
    if (auto id = vocab.id_of(t)) tf[*id] += 1.0;
  }
  SparseVec v;
  v.entries.reserve(tf.size());
  const double n = static_cast<double>(stats.n_docs);
  for (const auto& [id, count] : tf) {
    double idf = std::log((n + 1.0) / (vocab.df(id) + 1.0)) + 1.0;
    v.entries.emplace_back(id, count * idf);
  }
  double norm = v.norm();
  if (norm > 0.0) {
    for (auto& [id, val] : v.entries) val /= norm;
  }
  return v;
}

Corpus build_corpus(std::vector<RawDoc> raw, std::vector<std::string> categories,
                    const TokenizerConfig& tok) {
  Corpus c;
  c.categories = std::move(categories);
  c.tokenizer = tok;
  const std::set<std::string> declared(c.categories.begin(), c.categories.end());

  c.docs.reserve(raw.size());
  std::size_t total_len = 0;
  for (auto& r : raw) {
    if (r.id.empty()) throw DataError("document with empty id");
    if (c.slot_of.count(r.id)) throw DataError("duplicate document id \"" + r.id + "\"");
    Document d;
    d.id = std::move(r.id);
    d.text = std::move(r.text);
    d.tokens = tokenize(d.text, tok);
    for (const auto& [cat, val] : r.labels) {
      if (!declared.count(cat)) continue;
      if (val != 0 && val != 1)
        throw DataError("label for \"" + d.id + "\" category \"" + cat +
                        "\" outside {0,1}");
      d.labels[cat] = val;
    }
    total_len += d.tokens.size();
    c.slot_of.emplace(d.id, c.docs.size());
    c.docs.push_back(std::move(d));

    // document frequencies: each distinct term once per doc
    std::set<std::string> seen(c.docs.back().tokens.begin(), c.docs.back().tokens.end());
    for (const auto& t : seen) c.vocab.bump_df(c.vocab.intern(t));
  }

  c.stats.n_docs = c.docs.size();
  c.stats.avgdl =
      c.docs.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(c.docs.size());

  c.features.reserve(c.docs.size());
  c.stats.mean_feature.assign(c.vocab.size(), 0.0);
  for (const auto& d : c.docs) {
    SparseVec v = tfidf_vector(d.tokens, c.vocab, c.stats);
    for (const auto& [id, val] : v.entries) c.stats.mean_feature[id] += val;
    c.features.push_back(std::move(v));
  }
  if (!c.docs.empty()) {
    for (double& m : c.stats.mean_feature) m /= static_cast<double>(c.docs.size());
  }
  return c;
}

Corpus ingest_jsonl(const std::string& path, std::vector<std::string> categories,
                    const TokenizerConfig& tok) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  std::vector<RawDoc> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON record");
    RawDoc r;
    if (!j.contains("id") || !j["id"].is_string())
      throw DataError(path + ":" + std::to_string(lineno) + ": missing string field \"id\"");
    r.id = j["id"].get<std::string>();
    if (!j.contains("text") || !j["text"].is_string())
      throw DataError(path + ":" + std::to_string(lineno) + ": missing string field \"text\"");
    r.text = j["text"].get<std::string>();
    if (j.contains("labels")) {
      const auto& labels = j["labels"];
      if (!labels.is_object())
        throw DataError(path + ":" + std::to_string(lineno) + ": \"labels\" must be an object");
      for (auto it = labels.begin(); it != labels.end(); ++it) {
        if (!it.value().is_number_integer())
          throw DataError(path + ":" + std::to_string(lineno) + ": label \"" + it.key() +
                          "\" must be integer 0 or 1");
        int v = it.value().get<int>();
        if (v != 0 && v != 1)
          throw DataError(path + ":" + std::to_string(lineno) + ": label \"" + it.key() +
                          "\" outside {0,1}");
        r.labels[it.key()] = v;
      }
    }
    raw.push_back(std::move(r));
  }
  return build_corpus(std::move(raw), std::move(categories), tok);
}

void write_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path);
  for (const auto& d : corpus.docs) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["text"] = d.text;
    if (!d.labels.empty()) {
      nlohmann::ordered_json labels;
      for (const auto& [cat, v] : d.labels) labels[cat] = v;  // std::map: sorted keys
      j["labels"] = labels;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace retsel
