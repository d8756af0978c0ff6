#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "retsel/attribution.hpp"
#include "retsel/classify.hpp"
#include "retsel/corpus.hpp"
#include "retsel/lexindex.hpp"
#include "retsel/oracle.hpp"
#include "retsel/vecindex.hpp"

namespace retsel {

// Intersection of the two top-k prefixes, ordered by ascending rank sum;
// ties by ascending lexical rank, then ascending id.
std::vector<std::string> fuse_topk(const std::vector<std::string>& lex_ranked,
                                   const std::vector<std::string>& vec_ranked,
                                   std::size_t k);

struct SelectionBatch {
  std::string category;
  std::vector<std::string> query_terms;
  std::vector<std::string> lex_ids;  // lexical top-k prefix
  std::vector<std::string> vec_ids;  // dense top-k prefix
  std::vector<std::string> ids;      // fused order, truncated to cap
};

// One completed selection round, kept as history on the state.
struct SelectionRound {
  std::size_t round = 0;
  std::string category;
  std::vector<std::string> query_terms;
  std::size_t k_lex = 0, k_vec = 0;
  std::vector<std::string> lex_ids;
  std::vector<std::string> vec_ids;
  std::vector<std::string> fused_ids;
  std::map<std::string, int> labels;  // id -> label received for `category`
  EvalReport post_eval;
};

// Labeled/pool bookkeeping for one campaign arm. labeled and pool always
// partition the corpus ids.
struct CampaignState {
  std::map<std::string, std::map<std::string, int>> labeled;  // id -> labels
  std::set<std::string> pool;
  std::vector<std::string> categories;
  std::vector<SelectionRound> rounds;
  std::size_t budget_remaining = 0;
};

CampaignState initial_state(const Corpus& corpus, std::size_t budget);

// Runs both retrieval legs over the pool only (the lexical index is rebuilt
// on the pool, the dense scan is restricted to it), fuses, truncates to cap.
// Requires budget_remaining > 0 and cap within it; cap == 0 yields a legal
// empty batch.
SelectionBatch select_batch(const Corpus& corpus, const CampaignState& state,
                            const EmbeddingMatrix& vectors,
                            const EmbeddingProvider& query_embedder,
                            const Bm25Params& bm25, const std::string& category,
                            const std::vector<std::string>& query_terms,
                            std::size_t k_lex, std::size_t k_vec, std::size_t cap);

// Attaches oracle labels for every declared category that the oracle covers,
// moves the documents from pool to labeled, decrements the budget. The
// batch's own category must be covered for every id.
void annotate(CampaignState& state, const SelectionBatch& batch,
              const AnnotationOracle& oracle, const std::vector<std::string>& categories);

// Uniform sample without replacement from the pool, seeded.
std::vector<std::string> random_baseline_batch(const CampaignState& state, std::size_t n,
                                               std::uint64_t seed);

// ---- file-exchange annotation mode -----------------------------------

struct PendingAnnotation {
  std::string id;
  std::string text;
  std::string category;
};

struct ImportedLabel {
  std::string id;
  std::string category;
  int label;
};

void write_pending_jsonl(const std::vector<PendingAnnotation>& pending,
                         const std::string& path);
std::vector<PendingAnnotation> read_pending_jsonl(const std::string& path);
std::vector<ImportedLabel> read_import_jsonl(const std::string& path);

// Validates every import against the pending set and attaches the labels to
// the corpus documents. Returns the number of labels applied.
std::size_t apply_imports(Corpus& corpus, const std::vector<PendingAnnotation>& pending,
                          const std::vector<ImportedLabel>& imports);

// ---- multi-round campaign --------------------------------------------

enum class QueryMode { suggest, file };

struct CampaignConfig {
  std::size_t rounds = 2;
  std::size_t k_lex = 80;
  std::size_t k_vec = 80;
  std::size_t cap = 50;
  std::size_t budget = 3000;
  std::uint64_t seed = 1;
  QueryMode query_mode = QueryMode::suggest;
  std::size_t query_top = 4;       // suggested terms used as the round query
  std::size_t suggest_top_m = 10;
  QueryFile fixed_queries;         // binding when query_mode == file
  TrainConfig trainer;
  SplitSpec split;
  Bm25Params bm25;
};

struct CampaignRow {
  std::size_t round = 0;
  std::string category;
  std::string arm;  // "fused" | "random"
  std::size_t n_labeled = 0;
  double minority_f1 = 0.0;
  double macro_f1 = 0.0;
  double batch_precision = -1.0;  // fraction of the batch truly positive; -1 = no batch
  std::size_t batch_size = 0;
};

struct CampaignReport {
  std::vector<CampaignRow> rows;
  std::vector<std::string> categories;
  std::size_t rounds = 0;
  CampaignState fused_final;   // end-of-campaign states with round history
  CampaignState random_final;
};

// Train -> suggest/confirm query -> search both legs -> fuse -> annotate ->
// retrain -> evaluate on a test split frozen before round 1, for a fused arm
// and a random-selection arm with matched batch sizes. Fully deterministic
// under the config seeds.
CampaignReport run_campaign(const Corpus& corpus, const EmbeddingMatrix& vectors,
                            const EmbeddingProvider& query_embedder,
                            const AnnotationOracle& oracle,
                            const std::vector<std::string>& categories,
                            const CampaignConfig& cfg);

void write_report_csv(const CampaignReport& report, const std::string& path);
std::string render_report_csv(const CampaignReport& report);

// Plain-text per-category table: base, +first batch, +cumulative rows.
std::string format_summary_table(const CampaignReport& report);

}  // namespace retsel
