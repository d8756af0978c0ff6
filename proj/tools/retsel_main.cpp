// retsel command-line front end: configuration resolution plus the
// generate / index / search / suggest / select / annotate / train / eval /
// campaign workflow. All randomness flows from config seeds; repeated runs
// with the same inputs produce byte-identical outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retsel/attribution.hpp"
#include "retsel/benchgen.hpp"
#include "retsel/classify.hpp"
#include "retsel/config.hpp"
#include "retsel/corpus.hpp"
#include "retsel/errors.hpp"
#include "retsel/lexindex.hpp"
#include "retsel/oracle.hpp"
#include "retsel/selection.hpp"
#include "retsel/strfmt.hpp"
#include "retsel/vecindex.hpp"

namespace fs = std::filesystem;
using namespace retsel;

namespace {

struct CliArgs {
  std::string command;
  std::vector<std::string> positionals;
  std::optional<std::string> config_file;
  std::optional<std::string> category;
  std::optional<std::string> pending_file;
  std::optional<std::string> import_file;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool help = false;
};

const char* kUsage =
    "usage: retsel <command> [options] [--<config.key> <value> ...]\n"
    "\n"
    "commands:\n"
    "  generate   write a synthetic labeled corpus and its held-out oracle\n"
    "  index      build the lexical index and report collection statistics\n"
    "  search     run one query against the lexical and dense legs\n"
    "  suggest    train per-category models and write query suggestions\n"
    "  select     produce one fused selection batch (pending or oracle mode)\n"
    "  annotate   apply an annotation import file to the corpus\n"
    "  train      train a category model and save it\n"
    "  eval       evaluate a saved category model on the test split\n"
    "  campaign   run the multi-round selection simulation (fused vs random)\n"
    "\n"
    "options:\n"
    "  --config FILE    config file (default: ./retsel.conf when present)\n"
    "  --category NAME  category for search/suggest/select/train/eval\n"
    "  --pending FILE   pending-annotation file for annotate\n"
    "  --import FILE    annotation import file for annotate\n"
    "  --help           show this message\n";

void print_help() {
  std::cout << kUsage << "\nconfig keys (defaults in brackets):\n" << config_help();
}

CliArgs parse_args(const std::vector<std::string>& args) {
  CliArgs cli;
  std::size_t i = 0;
  auto take_value = [&](const std::string& flag) -> std::string {
    if (i + 1 >= args.size()) throw UsageError(flag + " requires a value");
    return args[++i];
  };
  for (; i < args.size(); ++i) {
    std::string arg = args[i];
    if (arg == "--help" || arg == "-h") {
      cli.help = true;
      continue;
    }
    if (arg.rfind("--", 0) == 0) {
      std::string key = arg.substr(2);
      std::string value;
      bool inline_value = false;
      if (auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
        inline_value = true;
      }
      auto fetch = [&] { return inline_value ? value : take_value(arg); };
      if (key == "config")
        cli.config_file = fetch();
      else if (key == "category")
        cli.category = fetch();
      else if (key == "pending")
        cli.pending_file = fetch();
      else if (key == "import")
        cli.import_file = fetch();
      else
        cli.overrides.emplace_back(key, fetch());
      continue;
    }
    if (cli.command.empty())
      cli.command = arg;
    else
      cli.positionals.push_back(arg);
  }
  return cli;
}

Config resolve_config(const CliArgs& cli) {
  auto values = default_config_values();
  if (cli.config_file)
    apply_config_file(values, *cli.config_file);
  else if (fs::exists("retsel.conf"))
    apply_config_file(values, "retsel.conf");
  for (const auto& [key, value] : cli.overrides) apply_override(values, key, value);
  return materialize_config(values);
}

// Every command leaves a resolved-config snapshot next to its outputs.
void write_snapshot(const Config& cfg) {
  fs::create_directories(cfg.output_dir);
  fs::path path = fs::path(cfg.output_dir) / "config.used";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << render_config(cfg.values);
}

Corpus load_corpus(const Config& cfg) {
  return ingest_jsonl(cfg.corpus_path, cfg.categories, cfg.tokenizer);
}

std::string require_category(const CliArgs& cli, const Config& cfg) {
  if (!cli.category) throw UsageError("this command requires --category");
  for (const auto& cat : cfg.categories)
    if (cat == *cli.category) return cat;
  throw UsageError("category \"" + *cli.category + "\" is not declared in corpus.categories");
}

std::unique_ptr<EmbeddingProvider> make_query_embedder(const Config& cfg) {
  if (cfg.embedding_provider == "hash")
    return std::make_unique<HashEmbedder>(cfg.embedding_dim, cfg.embedding_seed);
  if (cfg.embedding_query_file.empty())
    throw UsageError("embedding.provider file requires embedding.query_file");
  return std::make_unique<FileEmbedder>(cfg.embedding_query_file);
}

EmbeddingMatrix build_matrix(const Config& cfg, const Corpus& corpus) {
  if (cfg.embedding_provider == "hash") {
    HashEmbedder embedder(cfg.embedding_dim, cfg.embedding_seed);
    return embed_corpus(corpus, embedder);
  }
  EmbeddingLoadSummary summary;
  EmbeddingMatrix matrix = load_embeddings(cfg.embedding_file, &summary);
  if (summary.renormalized > 0)
    std::cout << "note: renormalized " << summary.renormalized << " embedding rows from "
              << cfg.embedding_file << "\n";
  return matrix;
}

void require_coverage(const EmbeddingMatrix& matrix, const Corpus& corpus) {
  for (const auto& doc : corpus.docs)
    if (!matrix.find(doc.id))
      throw DataError("no embedding for document " + doc.id);
}

std::vector<std::string> query_terms_for(const CliArgs& cli, const Config& cfg) {
  if (!cli.positionals.empty()) return cli.positionals;
  if (!cli.category)
    throw UsageError("search needs query terms or --category with a query file");
  return query_for(read_query_file(cfg.queries_path), *cli.category);
}

// Retrieval quality at the fixed depths, when truth labels cover the
// evaluated prefix. Recall is measured against all positives in the corpus.
void print_depth_metrics(const std::string& leg, const std::vector<std::string>& ranked,
                         const Corpus& corpus, const std::string& category) {
  std::size_t total_pos = 0;
  for (const auto& doc : corpus.docs) {
    auto it = doc.labels.find(category);
    if (it != doc.labels.end() && it->second == 1) ++total_pos;
  }
  if (total_pos == 0) {
    std::cout << leg << " no positive labels for " << category << "; metrics skipped\n";
    return;
  }
  auto truth = [&](const std::string& id) -> std::optional<int> {
    auto it = corpus.at(id).labels.find(category);
    if (it == corpus.at(id).labels.end()) return std::nullopt;
    return it->second;
  };
  for (std::size_t k : {20, 40, 60, 80}) {
    std::size_t depth = std::min(k, ranked.size());
    bool covered = true;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth; ++i) {
      auto label = truth(ranked[i]);
      if (!label) {
        covered = false;
        break;
      }
      hits += *label == 1;
    }
    std::cout << leg << " precision@" << k << ' ';
    if (!covered || depth == 0) {
      std::cout << "n/a\n";
      continue;
    }
    std::cout << format_double(static_cast<double>(hits) / static_cast<double>(depth))
              << " recall@" << k << ' '
              << format_double(static_cast<double>(hits) / static_cast<double>(total_pos))
              << '\n';
  }
}

void print_eval(const EvalReport& ev) {
  std::cout << "n_test " << ev.n_test << " tp " << ev.tp << " fp " << ev.fp << " tn "
            << ev.tn << " fn " << ev.fn << '\n';
  for (int cls = 0; cls < 2; ++cls) {
    const ClassMetrics& m = ev.per_class[cls];
    std::cout << "class" << cls << " precision " << format_double(m.precision) << " recall "
              << format_double(m.recall) << " f1 " << format_double(m.f1);
    if (m.zero_support) std::cout << " (no support)";
    std::cout << '\n';
  }
  std::cout << "macro_f1 " << format_double(ev.macro_f1) << '\n';
  std::cout << "minority_f1 " << format_double(ev.minority_f1) << " (class "
            << ev.minority_class << ")\n";
}

fs::path model_path_for(const Config& cfg, const std::string& category) {
  if (!cfg.model_path.empty()) return cfg.model_path;
  return fs::path(cfg.output_dir) / ("model_" + category + ".txt");
}

// Split the labeled documents and keep only ids carrying the category label.
struct TrainEvalSets {
  std::vector<std::string> train, val, test;
};

TrainEvalSets split_for(const Corpus& corpus, const Config& cfg, const std::string& category) {
  SplitResult parts = split(corpus, corpus.labeled_ids(), cfg.categories, cfg.split);
  auto filter = [&](const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids)
      if (corpus.at(id).labels.count(category)) out.push_back(id);
    return out;
  };
  return {filter(parts.train), filter(parts.val), filter(parts.test)};
}

int cmd_generate(const Config& cfg) {
  GeneratorConfig gen = cfg.generator;
  Corpus truth = generate(gen, cfg.tokenizer);
  HoldOut held = hold_out_truth(truth, cfg.visible_fraction, gen.seed);
  write_jsonl(held.corpus, cfg.corpus_path);
  held.oracle.write_jsonl(cfg.oracle_path);

  std::cout << "generated " << truth.size() << " documents, vocabulary "
            << truth.vocab.size() << " terms\n";
  for (const auto& cat : truth.categories) {
    std::size_t pos = 0;
    for (const auto& doc : truth.docs) pos += doc.labels.at(cat) == 1;
    std::cout << "  " << cat << " positives " << pos << '\n';
  }
  std::cout << "visible labels on " << held.corpus.labeled_ids().size() << " documents -> "
            << cfg.corpus_path << '\n';
  std::cout << "oracle holds " << held.oracle.size() << " documents -> " << cfg.oracle_path
            << '\n';
  return 0;
}

int cmd_index(const Config& cfg) {
  Corpus corpus = load_corpus(cfg);
  InvertedIndex index = build_index(corpus, cfg.bm25);

  std::size_t postings = 0;
  std::vector<std::pair<std::string, std::uint32_t>> by_df;
  for (std::uint32_t t = 0; t < corpus.vocab.size(); ++t) {
    by_df.emplace_back(corpus.vocab.term(t), corpus.vocab.df(t));
    postings += corpus.vocab.df(t);
  }
  std::sort(by_df.begin(), by_df.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::ostringstream out;
  out << "documents " << index.doc_count() << '\n';
  out << "distinct_terms " << index.term_count() << '\n';
  out << "postings " << postings << '\n';
  out << "avgdl " << format_double(index.avgdl()) << '\n';
  for (const auto& cat : cfg.categories) {
    std::size_t labeled = 0;
    for (const auto& doc : corpus.docs) labeled += doc.labels.count(cat);
    out << "labeled_" << cat << ' ' << labeled << '\n';
  }
  for (std::size_t i = 0; i < by_df.size() && i < 10; ++i)
    out << "top_df " << by_df[i].first << ' ' << by_df[i].second << '\n';

  fs::path path = fs::path(cfg.output_dir) / "index_summary.txt";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path.string());
  file << out.str();
  std::cout << out.str();
  std::cout << "summary -> " << path.string() << '\n';
  return 0;
}

int cmd_search(const CliArgs& cli, const Config& cfg) {
  Corpus corpus = load_corpus(cfg);
  std::vector<std::string> terms = query_terms_for(cli, cfg);
  std::cout << "query";
  for (const auto& t : terms) std::cout << ' ' << t;
  std::cout << '\n';

  const bool want_lex = cfg.search_leg != "vec";
  const bool want_vec = cfg.search_leg != "lex";
  const bool want_fused = cfg.search_leg == "fused";
  const std::size_t metric_depth = 80;
  const std::size_t depth = std::max(cfg.search_k, want_fused ? metric_depth : std::size_t{0});

  std::vector<std::string> lex_ids, vec_ids;
  if (want_lex) {
    InvertedIndex index = build_index(corpus, cfg.bm25);
    auto hits = bm25_search(index, terms, std::max(depth, metric_depth));
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (i < cfg.search_k)
        std::cout << "lex " << i + 1 << ' ' << hits[i].id << ' '
                  << format_double(hits[i].score) << '\n';
      lex_ids.push_back(hits[i].id);
    }
  }
  if (want_vec) {
    EmbeddingMatrix matrix = build_matrix(cfg, corpus);
    auto embedder = make_query_embedder(cfg);
    auto neighbors = knn_search(matrix, embed_query(*embedder, terms),
                                std::max(depth, metric_depth));
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      if (i < cfg.search_k)
        std::cout << "vec " << i + 1 << ' ' << neighbors[i].id << ' '
                  << format_double(neighbors[i].distance) << '\n';
      vec_ids.push_back(neighbors[i].id);
    }
  }
  std::vector<std::string> fused_ids;
  if (want_fused) {
    fused_ids = fuse_topk(lex_ids, vec_ids, metric_depth);
    for (std::size_t i = 0; i < fused_ids.size() && i < cfg.search_k; ++i)
      std::cout << "fused " << i + 1 << ' ' << fused_ids[i] << '\n';
  }

  if (cli.category) {
    const std::string& cat = *cli.category;
    if (want_lex) print_depth_metrics("lex", lex_ids, corpus, cat);
    if (want_vec) print_depth_metrics("vec", vec_ids, corpus, cat);
    if (want_fused) print_depth_metrics("fused", fused_ids, corpus, cat);
  }
  return 0;
}

int cmd_suggest(const CliArgs& cli, const Config& cfg) {
  Corpus corpus = load_corpus(cfg);
  std::vector<std::string> wanted =
      cli.category ? std::vector<std::string>{require_category(cli, cfg)} : cfg.categories;

  std::vector<QuerySuggestion> suggestions;
  for (const auto& cat : wanted) {
    TrainEvalSets sets = split_for(corpus, cfg, cat);
    LinearModel model = train_linear(corpus, sets.train, cat, cfg.classifier);
    suggestions.push_back(suggest_query_terms(model, corpus, sets.train, cat,
                                              cfg.suggest_top_m, cfg.classifier.threshold));
    const auto& sug = suggestions.back();
    std::cout << sug.category << ':';
    for (const auto& [term, score] : sug.ranked_terms) std::cout << ' ' << term;
    std::cout << '\n';
  }
  fs::path path = fs::path(cfg.output_dir) / "suggestions.txt";
  write_suggestion_file(suggestions, path.string());
  std::cout << "suggestions -> " << path.string() << '\n';
  return 0;
}

int cmd_select(const CliArgs& cli, const Config& cfg) {
  const std::string cat = require_category(cli, cfg);
  Corpus corpus = load_corpus(cfg);
  CampaignState state = initial_state(corpus, cfg.campaign.budget);

  std::vector<std::string> query;
  if (cfg.campaign.query_mode == QueryMode::file) {
    query = query_for(read_query_file(cfg.queries_path), cat);
  } else {
    TrainEvalSets sets = split_for(corpus, cfg, cat);
    LinearModel model = train_linear(corpus, sets.train, cat, cfg.classifier);
    QuerySuggestion sug = suggest_query_terms(model, corpus, sets.train, cat,
                                              cfg.suggest_top_m, cfg.classifier.threshold);
    for (std::size_t i = 0; i < sug.ranked_terms.size() && i < cfg.campaign.query_top; ++i)
      query.push_back(sug.ranked_terms[i].first);
    if (query.empty()) throw DataError("no positive-attribution terms for " + cat);
  }

  EmbeddingMatrix matrix = build_matrix(cfg, corpus);
  require_coverage(matrix, corpus);
  auto embedder = make_query_embedder(cfg);
  SelectionBatch batch =
      select_batch(corpus, state, matrix, *embedder, cfg.bm25, cat, query,
                   cfg.campaign.k_lex, cfg.campaign.k_vec,
                   std::min(cfg.campaign.cap, state.budget_remaining));

  std::cout << "query";
  for (const auto& t : batch.query_terms) std::cout << ' ' << t;
  std::cout << '\n';
  std::cout << "lex_hits " << batch.lex_ids.size() << " vec_hits " << batch.vec_ids.size()
            << " fused " << batch.ids.size() << '\n';
  for (std::size_t i = 0; i < batch.ids.size(); ++i)
    std::cout << "selected " << i + 1 << ' ' << batch.ids[i] << '\n';

  if (cfg.select_mode == "oracle") {
    LabelMapOracle oracle = LabelMapOracle::from_jsonl(cfg.oracle_path);
    annotate(state, batch, oracle, cfg.categories);
    for (const auto& id : batch.ids)
      corpus.docs[corpus.slot_of.at(id)].labels = state.labeled.at(id);
    fs::path path = fs::path(cfg.output_dir) / "corpus_annotated.jsonl";
    write_jsonl(corpus, path.string());
    std::size_t positives = 0;
    for (const auto& id : batch.ids) positives += state.labeled.at(id).at(cat) == 1;
    std::cout << "annotated " << batch.ids.size() << " documents (" << positives
              << " positive for " << cat << ") -> " << path.string() << '\n';
  } else {
    std::vector<PendingAnnotation> pending;
    for (const auto& id : batch.ids) pending.push_back({id, corpus.at(id).text, cat});
    fs::path path =
        cli.pending_file ? fs::path(*cli.pending_file) : fs::path(cfg.output_dir) / "pending.jsonl";
    write_pending_jsonl(pending, path.string());
    std::cout << "pending " << pending.size() << " annotation requests -> " << path.string()
              << '\n';
  }
  return 0;
}

int cmd_annotate(const CliArgs& cli, const Config& cfg) {
  fs::path pending_path =
      cli.pending_file ? fs::path(*cli.pending_file) : fs::path(cfg.output_dir) / "pending.jsonl";
  fs::path import_path =
      cli.import_file ? fs::path(*cli.import_file) : fs::path(cfg.output_dir) / "import.jsonl";
  Corpus corpus = load_corpus(cfg);
  auto pending = read_pending_jsonl(pending_path.string());
  auto imports = read_import_jsonl(import_path.string());
  std::size_t applied = apply_imports(corpus, pending, imports);
  fs::path out_path = fs::path(cfg.output_dir) / "corpus_annotated.jsonl";
  write_jsonl(corpus, out_path.string());
  std::cout << "applied " << applied << " labels -> " << out_path.string() << '\n';
  return 0;
}

int cmd_train(const CliArgs& cli, const Config& cfg) {
  const std::string cat = require_category(cli, cfg);
  Corpus corpus = load_corpus(cfg);
  TrainEvalSets sets = split_for(corpus, cfg, cat);
  LinearModel model = train_linear(corpus, sets.train, cat, cfg.classifier);

  std::cout << "category " << cat << " train " << sets.train.size() << " val "
            << sets.val.size() << " test " << sets.test.size() << '\n';
  for (std::size_t e = 0; e < model.epoch_losses.size(); ++e)
    std::cout << "epoch " << e + 1 << " loss " << format_double(model.epoch_losses[e])
              << '\n';
  if (!sets.val.empty()) {
    EvalReport ev = evaluate(model, corpus, sets.val, cat, cfg.classifier.threshold);
    std::cout << "val macro_f1 " << format_double(ev.macro_f1) << " minority_f1 "
              << format_double(ev.minority_f1) << '\n';
  }
  fs::path path = model_path_for(cfg, cat);
  save_model(model, path.string());
  std::cout << "model -> " << path.string() << '\n';
  return 0;
}

int cmd_eval(const CliArgs& cli, const Config& cfg) {
  const std::string cat = require_category(cli, cfg);
  Corpus corpus = load_corpus(cfg);
  LinearModel model = load_model(model_path_for(cfg, cat).string());
  if (model.category != cat)
    throw DataError("model file is for category \"" + model.category + "\", not \"" + cat +
                    "\"");
  TrainEvalSets sets = split_for(corpus, cfg, cat);
  if (sets.test.empty()) throw DataError("no test documents labeled for " + cat);
  EvalReport ev = evaluate(model, corpus, sets.test, cat, cfg.classifier.threshold);
  std::cout << "category " << cat << '\n';
  print_eval(ev);
  return 0;
}

int cmd_campaign(const Config& cfg) {
  Corpus corpus = load_corpus(cfg);
  EmbeddingMatrix matrix = build_matrix(cfg, corpus);
  require_coverage(matrix, corpus);
  auto embedder = make_query_embedder(cfg);
  LabelMapOracle oracle = LabelMapOracle::from_jsonl(cfg.oracle_path);

  CampaignConfig camp = cfg.campaign;
  if (camp.query_mode == QueryMode::file)
    camp.fixed_queries = read_query_file(cfg.queries_path);

  CampaignReport report = run_campaign(corpus, matrix, *embedder, oracle, cfg.categories, camp);

  fs::path csv_path = fs::path(cfg.output_dir) / "campaign.csv";
  write_report_csv(report, csv_path.string());
  std::string table = format_summary_table(report);
  fs::path table_path = fs::path(cfg.output_dir) / "summary.txt";
  std::ofstream table_file(table_path, std::ios::binary);
  if (!table_file) throw DataError("cannot write " + table_path.string());
  table_file << table;

  std::cout << table;
  std::cout << "report -> " << csv_path.string() << '\n';
  std::cout << "summary -> " << table_path.string() << '\n';
  return 0;
}

int run(const std::vector<std::string>& args) {
  CliArgs cli = parse_args(args);
  if (cli.help || (cli.command.empty() && args.empty())) {
    print_help();
    return cli.help ? 0 : 1;
  }
  if (cli.command.empty()) throw UsageError("no command given; see --help");

  const std::set<std::string> commands = {"generate", "index",    "search",
                                          "suggest",  "select",   "annotate",
                                          "train",    "eval",     "campaign"};
  if (!commands.count(cli.command))
    throw UsageError("unknown command \"" + cli.command + "\"; see --help");
  if (cli.command != "search" && !cli.positionals.empty())
    throw UsageError("unexpected argument \"" + cli.positionals.front() + "\"");

  Config cfg = resolve_config(cli);
  write_snapshot(cfg);

  if (cli.command == "generate") return cmd_generate(cfg);
  if (cli.command == "index") return cmd_index(cfg);
  if (cli.command == "search") return cmd_search(cli, cfg);
  if (cli.command == "suggest") return cmd_suggest(cli, cfg);
  if (cli.command == "select") return cmd_select(cli, cfg);
  if (cli.command == "annotate") return cmd_annotate(cli, cfg);
  if (cli.command == "train") return cmd_train(cli, cfg);
  if (cli.command == "eval") return cmd_eval(cli, cfg);
  return cmd_campaign(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
