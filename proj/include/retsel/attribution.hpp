#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "retsel/classify.hpp"
#include "retsel/corpus.hpp"

namespace retsel {

// Per-term Shapley contribution on the linear margin, relative to the
// background mean. Local accuracy: sum(phi) + base_value == margin(x).
struct Attribution {
  std::vector<double> phi;
  double base_value = 0.0;
};

// Exact closed form for linear models: phi_i = w_i * (x_i - mu_i),
// base = w.mu + bias.
Attribution shap_linear(const LinearModel& model, const SparseVec& x);

struct QuerySuggestion {
  std::string category;
  std::vector<std::pair<std::string, double>> ranked_terms;  // score desc, term asc
  int round_index = 0;
  std::string model_fingerprint;
};

// Candidate documents are those in `ids` that are labeled positive or that
// the model predicts positive. Per term, the score is the mean over
// candidates of the positive part of its attribution; terms with no
// positive evidence are dropped. Throws when no candidate exists.
QuerySuggestion suggest_query_terms(const LinearModel& model, const Corpus& corpus,
                                    const std::vector<std::string>& ids,
                                    const std::string& category, std::size_t top_m,
                                    double threshold = 0.5);

// Category -> ordered query terms.
using QueryFile = std::map<std::string, std::vector<std::string>>;

// Plain text, one "[category]" block per category, one term per line,
// '#' starts a comment. The writer is canonical: sorted categories, terms
// in stored order, no comments.
QueryFile read_query_file(const std::string& path);
void write_query_file(const QueryFile& queries, const std::string& path);

// Human-review variant with scores and provenance as comments; parses back
// through read_query_file identically to the canonical form.
void write_suggestion_file(const std::vector<QuerySuggestion>& suggestions,
                           const std::string& path);

// Terms for one category; throws when the category is missing or empty.
std::vector<std::string> query_for(const QueryFile& queries, const std::string& category);

}  // namespace retsel
