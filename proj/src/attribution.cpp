#include "retsel/attribution.hpp"

#include <algorithm>
#include <fstream>

#include "retsel/errors.hpp"
#include "retsel/strfmt.hpp"

namespace retsel {

Attribution shap_linear(const LinearModel& model, const SparseVec& x) {
  const std::size_t v = model.weights.size();
  if (model.background_mean.size() != v)
    throw DataError("shap_linear: background mean dimension mismatch");
  for (const auto& [id, val] : x.entries) {
    if (id >= v) throw DataError("shap_linear: feature id out of model range");
  }
  Attribution a;
  a.phi.assign(v, 0.0);
  double base = model.bias;
  for (std::size_t i = 0; i < v; ++i) {
    base += model.weights[i] * model.background_mean[i];
    a.phi[i] = -model.weights[i] * model.background_mean[i];
  }
  for (const auto& [id, val] : x.entries) {
    a.phi[id] = model.weights[id] * (val - model.background_mean[id]);
  }
  a.base_value = base;
  return a;
}

QuerySuggestion suggest_query_terms(const LinearModel& model, const Corpus& corpus,
                                    const std::vector<std::string>& ids,
                                    const std::string& category, std::size_t top_m,
                                    double threshold) {
  std::vector<const SparseVec*> candidates;
  for (const auto& id : ids) {
    const Document& d = corpus.at(id);
    bool positive = false;
    auto it = d.labels.find(category);
    if (it != d.labels.end() && it->second == 1) positive = true;
    if (!positive) {
      positive = predict(model, corpus.features_of(id), threshold).label == 1;
    }
    if (positive) candidates.push_back(&corpus.features_of(id));
  }
  if (candidates.empty())
    throw DataError("suggest_query_terms: no positive documents available for category \"" +
                    category + "\"");

  const std::size_t v = model.weights.size();
  std::vector<double> total(v, 0.0);
  for (const SparseVec* x : candidates) {
    Attribution a = shap_linear(model, *x);
    for (std::size_t i = 0; i < v; ++i) {
      if (a.phi[i] > 0.0) total[i] += a.phi[i];
    }
  }

  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < v; ++i) {
    if (total[i] > 0.0)
      ranked.emplace_back(corpus.vocab.term(static_cast<std::uint32_t>(i)),
                          total[i] / static_cast<double>(candidates.size()));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& lhs, const auto& rhs) {
    if (lhs.second != rhs.second) return lhs.second > rhs.second;
    return lhs.first < rhs.first;
  });
  if (ranked.size() > top_m) ranked.resize(top_m);

  QuerySuggestion s;
  s.category = category;
  s.ranked_terms = std::move(ranked);
  s.model_fingerprint = model.train_fingerprint;
  return s;
}

QueryFile read_query_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open query file " + path);
  QueryFile queries;
  std::string line;
  std::string current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed category header");
      current = trim(t.substr(1, t.size() - 2));
      queries[current];  // category may legitimately end up empty in the file
    } else {
      if (current.empty())
        throw DataError(path + ":" + std::to_string(lineno) + ": term before any category");
      for (const auto& term : split_ws(t)) queries[current].push_back(term);
    }
  }
  return queries;
}

void write_query_file(const QueryFile& queries, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write query file " + path);
  for (const auto& [category, terms] : queries) {
    out << '[' << category << "]\n";
    for (const auto& term : terms) out << term << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

void write_suggestion_file(const std::vector<QuerySuggestion>& suggestions,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write suggestion file " + path);
  out << "# ranked query-term suggestions; edit freely, then pass this file back\n";
  out << "# lines starting with '#' are ignored\n";
  std::vector<const QuerySuggestion*> ordered;
  for (const auto& s : suggestions) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->category < b->category; });
  for (const auto* s : ordered) {
    out << '[' << s->category << "]";
    out << "  # round " << s->round_index << "; " << s->model_fingerprint << '\n';
    for (const auto& [term, score] : s->ranked_terms)
      out << term << "  # " << format_double(score) << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

std::vector<std::string> query_for(const QueryFile& queries, const std::string& category) {
  auto it = queries.find(category);
  if (it == queries.end() || it->second.empty())
    throw DataError("query file has no terms for category \"" + category + "\"");
  return it->second;
}

}  // namespace retsel
