#include "retsel/selection.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "retsel/errors.hpp"
#include "retsel/rng.hpp"
#include "retsel/strfmt.hpp"

namespace retsel {

std::vector<std::string> fuse_topk(const std::vector<std::string>& lex_ranked,
                                   const std::vector<std::string>& vec_ranked,
                                   std::size_t k) {
  if (k == 0) throw UsageError("fuse_topk: k must be positive");
  std::unordered_map<std::string, std::size_t> lex_rank;  // 1-based
  for (std::size_t i = 0; i < lex_ranked.size() && i < k; ++i)
    lex_rank.emplace(lex_ranked[i], i + 1);

  struct Fused {
    std::string id;
    std::size_t rank_sum;
    std::size_t rank_lex;
  };
  std::vector<Fused> both;
  for (std::size_t i = 0; i < vec_ranked.size() && i < k; ++i) {
    auto it = lex_rank.find(vec_ranked[i]);
    if (it == lex_rank.end()) continue;
    both.push_back({vec_ranked[i], it->second + i + 1, it->second});
  }
  std::sort(both.begin(), both.end(), [](const Fused& a, const Fused& b) {
    if (a.rank_sum != b.rank_sum) return a.rank_sum < b.rank_sum;
    if (a.rank_lex != b.rank_lex) return a.rank_lex < b.rank_lex;
    return a.id < b.id;
  });
  std::vector<std::string> out;
  out.reserve(both.size());
  for (auto& f : both) out.push_back(std::move(f.id));
  return out;
}

CampaignState initial_state(const Corpus& corpus, std::size_t budget) {
  CampaignState state;
  state.budget_remaining = budget;
  state.categories = corpus.categories;
  for (const auto& doc : corpus.docs) {
    if (doc.labels.empty())
      state.pool.insert(doc.id);
    else
      state.labeled[doc.id] = doc.labels;
  }
  return state;
}

SelectionBatch select_batch(const Corpus& corpus, const CampaignState& state,
                            const EmbeddingMatrix& vectors,
                            const EmbeddingProvider& query_embedder,
                            const Bm25Params& bm25, const std::string& category,
                            const std::vector<std::string>& query_terms,
                            std::size_t k_lex, std::size_t k_vec, std::size_t cap) {
  if (k_lex == 0 || k_vec == 0) throw UsageError("select_batch: leg depths must be positive");
  if (state.budget_remaining == 0) throw UsageError("select_batch: no annotation budget remains");
  if (cap > state.budget_remaining)
    throw UsageError("select_batch: cap " + std::to_string(cap) +
                     " exceeds remaining budget " + std::to_string(state.budget_remaining));
  if (query_terms.empty())
    throw DataError("select_batch: empty query for category " + category);

  SelectionBatch batch;
  batch.category = category;
  batch.query_terms = query_terms;
  if (state.pool.empty() || cap == 0) return batch;

  std::vector<std::string> pool_ids(state.pool.begin(), state.pool.end());
  InvertedIndex pool_index = build_index(corpus, pool_ids, bm25);
  for (const auto& hit : bm25_search(pool_index, query_terms, k_lex))
    batch.lex_ids.push_back(hit.id);

  std::vector<double> q = embed_query(query_embedder, query_terms);
  for (const auto& nb : knn_search(vectors, q, k_vec, &state.pool))
    batch.vec_ids.push_back(nb.id);

  std::size_t k_fuse = std::max(k_lex, k_vec);
  batch.ids = fuse_topk(batch.lex_ids, batch.vec_ids, k_fuse);
  if (batch.ids.size() > cap) batch.ids.resize(cap);
  return batch;
}

void annotate(CampaignState& state, const SelectionBatch& batch,
              const AnnotationOracle& oracle, const std::vector<std::string>& categories) {
  if (batch.ids.size() > state.budget_remaining)
    throw UsageError("annotate: batch of " + std::to_string(batch.ids.size()) +
                     " exceeds remaining budget of " +
                     std::to_string(state.budget_remaining));
  for (const auto& id : batch.ids) {
    if (!state.pool.count(id)) throw UsageError("annotate: " + id + " is not in the pool");
    if (!oracle.lookup(id, batch.category))
      throw DataError("annotate: oracle has no " + batch.category + " label for " + id);
  }
  for (const auto& id : batch.ids) {
    auto& labels = state.labeled[id];
    for (const auto& cat : categories)
      if (auto label = oracle.lookup(id, cat)) labels[cat] = *label;
    state.pool.erase(id);
  }
  state.budget_remaining -= batch.ids.size();
}

std::vector<std::string> random_baseline_batch(const CampaignState& state, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<std::string> pool_ids(state.pool.begin(), state.pool.end());
  Rng rng(seed);
  return rng.sample(pool_ids, n);
}

// ---- file-exchange annotation mode -----------------------------------

void write_pending_jsonl(const std::vector<PendingAnnotation>& pending,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pending file " + path);
  for (const auto& p : pending) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["text"] = p.text;
    j["category"] = p.category;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

std::vector<PendingAnnotation> read_pending_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pending file " + path);
  std::vector<PendingAnnotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw DataError(ctx + ": malformed JSON record");
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("text") ||
        !j["text"].is_string() || !j.contains("category") || !j["category"].is_string())
      throw DataError(ctx + ": expected {\"id\", \"text\", \"category\"}");
    out.push_back({j["id"].get<std::string>(), j["text"].get<std::string>(),
                   j["category"].get<std::string>()});
  }
  return out;
}

std::vector<ImportedLabel> read_import_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open import file " + path);
  std::vector<ImportedLabel> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw DataError(ctx + ": malformed JSON record");
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("category") ||
        !j["category"].is_string() || !j.contains("label") ||
        !j["label"].is_number_integer())
      throw DataError(ctx + ": expected {\"id\", \"category\", \"label\"}");
    int label = j["label"].get<int>();
    if (label != 0 && label != 1) throw DataError(ctx + ": label outside {0,1}");
    out.push_back({j["id"].get<std::string>(), j["category"].get<std::string>(), label});
  }
  return out;
}

std::size_t apply_imports(Corpus& corpus, const std::vector<PendingAnnotation>& pending,
                          const std::vector<ImportedLabel>& imports) {
  std::unordered_set<std::string> allowed;
  for (const auto& p : pending) allowed.insert(p.id + "\x1f" + p.category);
  std::unordered_set<std::string> seen;
  std::size_t applied = 0;
  for (const auto& imp : imports) {
    const std::string key = imp.id + "\x1f" + imp.category;
    if (!allowed.count(key))
      throw DataError("import for " + imp.id + "/" + imp.category +
                      " does not match any pending request");
    if (!seen.insert(key).second)
      throw DataError("duplicate import for " + imp.id + "/" + imp.category);
    if (std::find(corpus.categories.begin(), corpus.categories.end(), imp.category) ==
        corpus.categories.end())
      throw DataError("import category " + imp.category + " is not declared");
    auto slot = corpus.slot_of.find(imp.id);
    if (slot == corpus.slot_of.end())
      throw DataError("import id " + imp.id + " is not in the corpus");
    corpus.docs[slot->second].labels[imp.category] = imp.label;
    ++applied;
  }
  return applied;
}

// ---- multi-round campaign --------------------------------------------

namespace {

std::vector<std::string> with_label(const Corpus& corpus, const std::vector<std::string>& ids,
                                    const std::string& category) {
  std::vector<std::string> out;
  for (const auto& id : ids)
    if (corpus.at(id).labels.count(category)) out.push_back(id);
  return out;
}

std::size_t labeled_for(const CampaignState& state, const std::string& category) {
  std::size_t n = 0;
  for (const auto& [id, labels] : state.labeled) n += labels.count(category);
  return n;
}

// One arm's mutable campaign data. The corpus copy accumulates the arm's
// annotations so training sees them.
struct Arm {
  std::string name;
  Corpus corpus;
  CampaignState state;
  std::vector<std::string> added;  // annotation order
};

void absorb_batch(Arm& arm, const std::vector<std::string>& batch_ids,
                  const std::string& category, const AnnotationOracle& oracle,
                  const std::vector<std::string>& categories) {
  SelectionBatch shim;
  shim.category = category;
  shim.ids = batch_ids;
  annotate(arm.state, shim, oracle, categories);
  for (const auto& id : batch_ids) {
    arm.corpus.docs[arm.corpus.slot_of.at(id)].labels = arm.state.labeled.at(id);
    arm.added.push_back(id);
  }
}

void record_round(Arm& arm, std::size_t round, const SelectionBatch& batch,
                  std::size_t k_lex, std::size_t k_vec, const EvalReport& post) {
  SelectionRound rec;
  rec.round = round;
  rec.category = batch.category;
  rec.query_terms = batch.query_terms;
  rec.k_lex = k_lex;
  rec.k_vec = k_vec;
  rec.lex_ids = batch.lex_ids;
  rec.vec_ids = batch.vec_ids;
  rec.fused_ids = batch.ids;
  for (const auto& id : batch.ids) rec.labels[id] = arm.state.labeled.at(id).at(batch.category);
  rec.post_eval = post;
  arm.state.rounds.push_back(std::move(rec));
}

double batch_precision_of(const CampaignState& state, const std::vector<std::string>& ids,
                          const std::string& category) {
  if (ids.empty()) return -1.0;
  std::size_t hits = 0;
  for (const auto& id : ids) hits += state.labeled.at(id).at(category) == 1;
  return static_cast<double>(hits) / static_cast<double>(ids.size());
}

}  // namespace

CampaignReport run_campaign(const Corpus& corpus, const EmbeddingMatrix& vectors,
                            const EmbeddingProvider& query_embedder,
                            const AnnotationOracle& oracle,
                            const std::vector<std::string>& categories,
                            const CampaignConfig& cfg) {
  if (categories.empty()) throw UsageError("run_campaign: no categories");
  if (cfg.k_lex == 0 || cfg.k_vec == 0)
    throw UsageError("run_campaign: leg depths must be positive");
  if (cfg.query_top == 0) throw UsageError("run_campaign: query_top must be positive");

  std::vector<std::string> seed_ids = corpus.labeled_ids();
  if (seed_ids.empty())
    throw DataError("run_campaign: the corpus has no labeled documents to start from");

  // The test split is carved out of the initially labeled documents and
  // frozen; only the train portion grows.
  SplitResult parts = split(corpus, seed_ids, categories, cfg.split);
  std::map<std::string, std::vector<std::string>> test_for;
  for (const auto& cat : categories) {
    test_for[cat] = with_label(corpus, parts.test, cat);
    if (test_for[cat].empty())
      throw DataError("run_campaign: no test documents labeled for " + cat);
  }

  Arm fused{"fused", corpus, initial_state(corpus, cfg.budget), {}};
  Arm random{"random", corpus, initial_state(corpus, cfg.budget), {}};

  CampaignReport report;
  report.categories = categories;
  report.rounds = cfg.rounds;

  auto train_ids_for = [&](const Arm& arm, const std::string& cat) {
    std::vector<std::string> ids = with_label(arm.corpus, parts.train, cat);
    for (const auto& id : arm.added)
      if (arm.state.labeled.at(id).count(cat)) ids.push_back(id);
    return ids;
  };
  auto train_arm = [&](const Arm& arm, const std::string& cat, std::size_t round,
                       std::vector<std::string>* ids_out = nullptr) {
    TrainConfig tc = cfg.trainer;
    tc.seed = derive_seed(cfg.seed, "train/" + cat + "/r" + std::to_string(round));
    std::vector<std::string> ids = train_ids_for(arm, cat);
    if (ids_out) *ids_out = ids;
    return train_linear(arm.corpus, ids, cat, tc);
  };
  auto emit = [&](std::size_t round, const std::string& cat, const Arm& arm,
                  const EvalReport& ev, double precision, std::size_t batch_size) {
    report.rows.push_back({round, cat, arm.name, labeled_for(arm.state, cat), ev.minority_f1,
                           ev.macro_f1, precision, batch_size});
  };

  // Cached models carry over: the model trained after round r issues round
  // r+1's query.
  std::map<std::string, LinearModel> fused_model, random_model;
  std::map<std::string, EvalReport> fused_eval, random_eval;
  std::map<std::string, std::vector<std::string>> fused_train_ids;

  for (const auto& cat : categories) {
    LinearModel base = train_arm(fused, cat, 0, &fused_train_ids[cat]);
    EvalReport ev = evaluate(base, corpus, test_for[cat], cat, cfg.trainer.threshold);
    fused_model[cat] = base;
    random_model[cat] = base;
    fused_eval[cat] = ev;
    random_eval[cat] = ev;
    emit(0, cat, fused, ev, -1.0, 0);
    emit(0, cat, random, ev, -1.0, 0);
  }

  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    for (const auto& cat : categories) {
      std::vector<std::string> query;
      if (cfg.query_mode == QueryMode::file) {
        query = query_for(cfg.fixed_queries, cat);
      } else {
        QuerySuggestion sug =
            suggest_query_terms(fused_model[cat], fused.corpus, fused_train_ids[cat], cat,
                                cfg.suggest_top_m, cfg.trainer.threshold);
        for (std::size_t i = 0; i < sug.ranked_terms.size() && i < cfg.query_top; ++i)
          query.push_back(sug.ranked_terms[i].first);
        if (query.empty())
          throw DataError("run_campaign: no positive-attribution terms for " + cat);
      }

      std::size_t cap = std::min(cfg.cap, fused.state.budget_remaining);
      SelectionBatch batch;
      if (cap > 0)
        batch = select_batch(fused.corpus, fused.state, vectors, query_embedder, cfg.bm25,
                             cat, query, cfg.k_lex, cfg.k_vec, cap);
      else
        batch.category = cat;

      if (!batch.ids.empty()) {
        absorb_batch(fused, batch.ids, cat, oracle, categories);
        fused_model[cat] = train_arm(fused, cat, round, &fused_train_ids[cat]);
        fused_eval[cat] =
            evaluate(fused_model[cat], corpus, test_for[cat], cat, cfg.trainer.threshold);
      }
      record_round(fused, round, batch, cfg.k_lex, cfg.k_vec, fused_eval[cat]);
      emit(round, cat, fused, fused_eval[cat],
           batch_precision_of(fused.state, batch.ids, cat), batch.ids.size());

      SelectionBatch rnd;
      rnd.category = cat;
      rnd.ids = random_baseline_batch(
          random.state, batch.ids.size(),
          derive_seed(cfg.seed, "random/" + cat + "/r" + std::to_string(round)));
      if (!rnd.ids.empty()) {
        absorb_batch(random, rnd.ids, cat, oracle, categories);
        random_model[cat] = train_arm(random, cat, round);
        random_eval[cat] =
            evaluate(random_model[cat], corpus, test_for[cat], cat, cfg.trainer.threshold);
      }
      record_round(random, round, rnd, 0, 0, random_eval[cat]);
      emit(round, cat, random, random_eval[cat],
           batch_precision_of(random.state, rnd.ids, cat), rnd.ids.size());
    }
  }
  report.fused_final = std::move(fused.state);
  report.random_final = std::move(random.state);
  return report;
}

std::string render_report_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "round,category,arm,n_labeled,minority_f1,macro_f1,precision_at_k,batch_size\n";
  for (const auto& row : report.rows) {
    out << row.round << ',' << row.category << ',' << row.arm << ',' << row.n_labeled << ','
        << format_double(row.minority_f1) << ',' << format_double(row.macro_f1) << ',';
    if (row.batch_size > 0) out << format_double(row.batch_precision);
    out << ',' << row.batch_size << '\n';
  }
  return out.str();
}

void write_report_csv(const CampaignReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report " + path);
  out << render_report_csv(report);
  if (!out) throw DataError("write failed for " + path);
}

std::string format_summary_table(const CampaignReport& report) {
  // rows keyed by (round, category, arm)
  std::map<std::size_t, std::map<std::string, std::map<std::string, const CampaignRow*>>> by;
  for (const auto& row : report.rows) by[row.round][row.category][row.arm] = &row;

  std::ostringstream out;
  bool first = true;
  for (const auto& cat : report.categories) {
    if (!first) out << '\n';
    first = false;
    out << "category " << cat << '\n';
    out << "  " << std::left << std::setw(10) << "labels" << std::right << std::setw(8)
        << "n" << std::setw(12) << "fused-F1" << std::setw(12) << "random-F1" << '\n';
    std::size_t base_n = 0;
    for (std::size_t round = 0; round <= report.rounds; ++round) {
      auto rit = by.find(round);
      if (rit == by.end()) continue;
      const auto& arms = rit->second.at(cat);
      const CampaignRow* f = arms.at("fused");
      const CampaignRow* r = arms.at("random");
      std::string tag;
      if (round == 0) {
        base_n = f->n_labeled;
        tag = "base";
      } else {
        tag = "+" + std::to_string(f->n_labeled - base_n);
      }
      out << "  " << std::left << std::setw(10) << tag << std::right << std::setw(8)
          << f->n_labeled << std::setw(12) << std::fixed << std::setprecision(4)
          << f->minority_f1 << std::setw(12) << r->minority_f1 << '\n';
      out.unsetf(std::ios::fixed);
    }
  }
  return out.str();
}

}  // namespace retsel
