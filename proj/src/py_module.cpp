// pybind11 surface over the core library. Mirrors the C++ contracts;
// UsageError maps to ValueError, DataError to RuntimeError.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "retsel/attribution.hpp"
#include "retsel/benchgen.hpp"
#include "retsel/classify.hpp"
#include "retsel/corpus.hpp"
#include "retsel/errors.hpp"
#include "retsel/lexindex.hpp"
#include "retsel/oracle.hpp"
#include "retsel/selection.hpp"
#include "retsel/text.hpp"
#include "retsel/vecindex.hpp"

namespace py = pybind11;
using namespace retsel;

namespace {

TokenizerConfig tok_config(bool remove_stopwords) {
  TokenizerConfig tok;
  tok.remove_stopwords = remove_stopwords;
  return tok;
}

Corpus make_corpus_py(
    const std::vector<std::tuple<std::string, std::string, std::map<std::string, int>>>& docs,
    const std::vector<std::string>& categories, bool remove_stopwords) {
  std::vector<RawDoc> raw;
  raw.reserve(docs.size());
  for (const auto& [id, text, labels] : docs) raw.push_back({id, text, labels});
  return build_corpus(std::move(raw), categories, tok_config(remove_stopwords));
}

GeneratorConfig generator_config(
    std::size_t n_docs,
    const std::optional<std::vector<std::tuple<std::string, double, std::vector<std::string>>>>&
        categories,
    double p_plant, double p_leak, std::size_t background_vocab, std::size_t doc_len_min,
    std::size_t doc_len_max, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n_docs = n_docs;
  if (categories) {
    cfg.categories.clear();
    for (const auto& [name, prevalence, planted] : *categories)
      cfg.categories.push_back({name, prevalence, planted});
  }
  cfg.p_plant = p_plant;
  cfg.p_leak = p_leak;
  cfg.background_vocab = background_vocab;
  cfg.doc_len_min = doc_len_min;
  cfg.doc_len_max = doc_len_max;
  cfg.seed = seed;
  return cfg;
}

TrainConfig train_config(int epochs, double learning_rate, double l2, double threshold,
                         std::uint64_t seed, const std::string& loss) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.learning_rate = learning_rate;
  cfg.l2 = l2;
  cfg.threshold = threshold;
  cfg.seed = seed;
  if (loss == "logistic")
    cfg.loss = LossKind::logistic;
  else if (loss == "hinge")
    cfg.loss = LossKind::hinge;
  else
    throw UsageError("loss must be \"logistic\" or \"hinge\", got \"" + loss + "\"");
  return cfg;
}

py::dict eval_to_dict(const EvalReport& ev) {
  py::dict out;
  py::list per_class;
  for (const auto& m : ev.per_class) {
    py::dict cls;
    cls["precision"] = m.precision;
    cls["recall"] = m.recall;
    cls["f1"] = m.f1;
    cls["zero_support"] = m.zero_support;
    per_class.append(cls);
  }
  out["per_class"] = per_class;
  out["macro_f1"] = ev.macro_f1;
  out["minority_f1"] = ev.minority_f1;
  out["minority_class"] = ev.minority_class;
  out["tp"] = ev.tp;
  out["fp"] = ev.fp;
  out["tn"] = ev.tn;
  out["fn"] = ev.fn;
  out["n_test"] = ev.n_test;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Retrieval-driven text selection: BM25 + dense fusion, exact linear "
            "SHAP queries, and annotation-campaign simulation.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DataError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  // ---- text ------------------------------------------------------------
  m.def(
      "tokenize",
      [](const std::string& text, bool remove_stopwords) {
        return tokenize(text, tok_config(remove_stopwords));
      },
      py::arg("text"), py::arg("remove_stopwords") = false,
      "Unicode-aware lowercase word tokens.");
  m.def("is_stopword", &is_stopword, py::arg("term"));

  // ---- corpus ----------------------------------------------------------
  py::class_<Document>(m, "Document")
      .def_readonly("id", &Document::id)
      .def_readonly("text", &Document::text)
      .def_readonly("tokens", &Document::tokens)
      .def_readonly("labels", &Document::labels)
      .def("__repr__", [](const Document& d) {
        return "Document(id=" + d.id + ", tokens=" + std::to_string(d.tokens.size()) + ")";
      });

  py::class_<Corpus>(m, "Corpus")
      .def("__len__", &Corpus::size)
      .def_readonly("categories", &Corpus::categories)
      .def("ids", &Corpus::ids)
      .def("labeled_ids", &Corpus::labeled_ids)
      .def("unlabeled_ids", &Corpus::unlabeled_ids)
      .def(
          "doc", [](const Corpus& c, const std::string& id) { return c.at(id); },
          py::arg("id"), py::return_value_policy::copy)
      .def("vocab_size", [](const Corpus& c) { return c.vocab.size(); })
      .def("avgdl", [](const Corpus& c) { return c.stats.avgdl; })
      .def("__repr__", [](const Corpus& c) {
        return "Corpus(docs=" + std::to_string(c.size()) + ", vocab=" +
               std::to_string(c.vocab.size()) + ")";
      });

  m.def("make_corpus", &make_corpus_py, py::arg("docs"), py::arg("categories"),
        py::arg("remove_stopwords") = false,
        "Build a corpus from (id, text, labels) triples.");
  m.def(
      "ingest_jsonl",
      [](const std::string& path, const std::vector<std::string>& categories,
         bool remove_stopwords) {
        return ingest_jsonl(path, categories, tok_config(remove_stopwords));
      },
      py::arg("path"), py::arg("categories"), py::arg("remove_stopwords") = false);
  m.def("write_jsonl", &write_jsonl, py::arg("corpus"), py::arg("path"));

  // ---- synthetic benchmark --------------------------------------------
  m.def(
      "generate",
      [](std::size_t n_docs,
         const std::optional<
             std::vector<std::tuple<std::string, double, std::vector<std::string>>>>& categories,
         double p_plant, double p_leak, std::size_t background_vocab, std::size_t doc_len_min,
         std::size_t doc_len_max, std::uint64_t seed) {
        return generate(generator_config(n_docs, categories, p_plant, p_leak,
                                         background_vocab, doc_len_min, doc_len_max, seed));
      },
      py::arg("n_docs") = 5000, py::arg("categories") = py::none(),
      py::arg("p_plant") = 0.8, py::arg("p_leak") = 0.02,
      py::arg("background_vocab") = 2000, py::arg("doc_len_min") = 15,
      py::arg("doc_len_max") = 60, py::arg("seed") = 97,
      "Deterministic labeled corpus with planted class-indicative terms. "
      "categories: list of (name, prevalence, planted_terms); defaults to the "
      "built-in three-category benchmark.");

  py::class_<LabelMapOracle>(m, "Oracle")
      .def(py::init<>())
      .def("set", &LabelMapOracle::set, py::arg("id"), py::arg("category"), py::arg("label"))
      .def(
          "lookup",
          [](const LabelMapOracle& o, const std::string& id, const std::string& category) {
            return o.lookup(id, category);
          },
          py::arg("id"), py::arg("category"))
      .def("__len__", &LabelMapOracle::size)
      .def("write_jsonl", &LabelMapOracle::write_jsonl, py::arg("path"))
      .def_static("from_jsonl", &LabelMapOracle::from_jsonl, py::arg("path"));

  m.def(
      "hold_out",
      [](const Corpus& corpus, double visible_fraction, std::uint64_t seed) {
        HoldOut h = hold_out_truth(corpus, visible_fraction, seed);
        return py::make_tuple(std::move(h.corpus), std::move(h.oracle));
      },
      py::arg("corpus"), py::arg("visible_fraction"), py::arg("seed"),
      "Keep labels on a seeded fraction of documents; move the rest into an "
      "annotation oracle. Returns (corpus, oracle).");

  // ---- lexical retrieval ----------------------------------------------
  py::class_<InvertedIndex>(m, "InvertedIndex")
      .def_property_readonly("doc_count", &InvertedIndex::doc_count)
      .def_property_readonly("avgdl", &InvertedIndex::avgdl)
      .def_property_readonly("term_count", &InvertedIndex::term_count);

  m.def(
      "build_index",
      [](const Corpus& corpus, double k1, double b,
         const std::optional<std::vector<std::string>>& ids) {
        Bm25Params params{k1, b};
        return ids ? build_index(corpus, *ids, params) : build_index(corpus, params);
      },
      py::arg("corpus"), py::arg("k1") = 1.2, py::arg("b") = 0.75,
      py::arg("ids") = py::none(),
      "BM25 inverted index; pass ids to index a document subset.");
  m.def(
      "bm25_search",
      [](const InvertedIndex& index, const std::vector<std::string>& query, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& hit : bm25_search(index, query, k))
          out.emplace_back(hit.id, hit.score);
        return out;
      },
      py::arg("index"), py::arg("query_terms"), py::arg("k"),
      "Top-k (id, score) pairs; only positive scores are returned.");

  // ---- dense retrieval -------------------------------------------------
  m.def(
      "hash_embed",
      [](const std::string& text, std::size_t dim, std::uint64_t seed) {
        return hash_embed(text, dim, seed);
      },
      py::arg("text"), py::arg("dim") = 768, py::arg("seed") = 42,
      "Signed feature-hashing unit embedding of the token multiset.");

  py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def(py::init<std::size_t, std::string>(), py::arg("dim"), py::arg("provider_tag"))
      .def_property_readonly("dim", &EmbeddingMatrix::dim)
      .def("__len__", &EmbeddingMatrix::size)
      .def("ids", &EmbeddingMatrix::ids)
      .def_property_readonly("provider_tag", &EmbeddingMatrix::provider_tag)
      .def("add", &EmbeddingMatrix::add, py::arg("id"), py::arg("vector"),
           "Store a unit vector; returns True when the input was renormalized.")
      .def(
          "row",
          [](const EmbeddingMatrix& mat, const std::string& id) {
            const double* p = mat.find(id);
            if (!p) throw DataError("no embedding for document " + id);
            return std::vector<double>(p, p + mat.dim());
          },
          py::arg("id"));

  m.def(
      "embed_corpus",
      [](const Corpus& corpus, std::size_t dim, std::uint64_t seed) {
        HashEmbedder embedder(dim, seed);
        return embed_corpus(corpus, embedder);
      },
      py::arg("corpus"), py::arg("dim") = 768, py::arg("seed") = 42,
      "Hash-embed every document into a matrix.");
  m.def(
      "embed_query",
      [](const std::vector<std::string>& terms, std::size_t dim, std::uint64_t seed) {
        HashEmbedder embedder(dim, seed);
        return embed_query(embedder, terms);
      },
      py::arg("terms"), py::arg("dim") = 768, py::arg("seed") = 42);
  m.def(
      "load_embeddings",
      [](const std::string& path) {
        EmbeddingLoadSummary summary;
        EmbeddingMatrix matrix = load_embeddings(path, &summary);
        return py::make_tuple(std::move(matrix), summary.renormalized);
      },
      py::arg("path"), "Returns (matrix, rows_renormalized).");
  m.def("save_embeddings", &save_embeddings, py::arg("matrix"), py::arg("path"));
  m.def(
      "knn_search",
      [](const EmbeddingMatrix& matrix, const std::vector<double>& query, std::size_t k,
         const std::optional<std::vector<std::string>>& restrict_to) {
        std::vector<std::pair<std::string, double>> out;
        if (restrict_to) {
          std::set<std::string> allowed(restrict_to->begin(), restrict_to->end());
          for (const auto& n : knn_search(matrix, query, k, &allowed))
            out.emplace_back(n.id, n.distance);
        } else {
          for (const auto& n : knn_search(matrix, query, k)) out.emplace_back(n.id, n.distance);
        }
        return out;
      },
      py::arg("matrix"), py::arg("query"), py::arg("k"), py::arg("restrict_to") = py::none(),
      "Exact Euclidean top-k as (id, distance), ascending distance.");

  // ---- classification --------------------------------------------------
  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("category", &LinearModel::category)
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("bias", &LinearModel::bias)
      .def_readonly("background_mean", &LinearModel::background_mean)
      .def_readonly("epoch_losses", &LinearModel::epoch_losses)
      .def("__repr__", [](const LinearModel& model) {
        return "LinearModel(category=" + model.category +
               ", features=" + std::to_string(model.weights.size()) + ")";
      });

  m.def(
      "split",
      [](const Corpus& corpus, const std::vector<std::string>& ids,
         const std::vector<std::string>& categories, double train, double val, double test,
         std::uint64_t seed, bool stratified) {
        SplitSpec spec;
        spec.train = train;
        spec.val = val;
        spec.test = test;
        spec.seed = seed;
        spec.stratified = stratified;
        SplitResult r = split(corpus, ids, categories, spec);
        return py::make_tuple(r.train, r.val, r.test);
      },
      py::arg("corpus"), py::arg("ids"), py::arg("categories"), py::arg("train") = 0.7,
      py::arg("val") = 0.1, py::arg("test") = 0.2, py::arg("seed") = 11,
      py::arg("stratified") = true,
      "Deterministic (train, val, test) partition of ids.");
  m.def(
      "train",
      [](const Corpus& corpus, const std::vector<std::string>& train_ids,
         const std::string& category, int epochs, double learning_rate, double l2,
         double threshold, std::uint64_t seed, const std::string& loss) {
        return train_linear(corpus, train_ids, category,
                            train_config(epochs, learning_rate, l2, threshold, seed, loss));
      },
      py::arg("corpus"), py::arg("train_ids"), py::arg("category"), py::arg("epochs") = 10,
      py::arg("learning_rate") = 0.1, py::arg("l2") = 1e-4, py::arg("threshold") = 0.5,
      py::arg("seed") = 7, py::arg("loss") = "logistic",
      "Seeded SGD linear classifier on tf-idf features.");
  m.def(
      "predict",
      [](const LinearModel& model, const Corpus& corpus, const std::string& doc_id,
         double threshold) {
        Prediction p = predict(model, corpus.features_of(doc_id), threshold);
        return py::make_tuple(p.probability, p.label);
      },
      py::arg("model"), py::arg("corpus"), py::arg("doc_id"), py::arg("threshold") = 0.5,
      "Returns (probability, label) for one document.");
  m.def(
      "evaluate",
      [](const LinearModel& model, const Corpus& corpus,
         const std::vector<std::string>& test_ids, const std::string& category,
         double threshold) {
        return eval_to_dict(evaluate(model, corpus, test_ids, category, threshold));
      },
      py::arg("model"), py::arg("corpus"), py::arg("test_ids"), py::arg("category"),
      py::arg("threshold") = 0.5, "Confusion metrics as a dict.");
  m.def(
      "precision_at_k",
      [](const std::vector<std::string>& ranked, const std::map<std::string, int>& truth,
         std::size_t k) {
        return precision_at_k(
            ranked,
            [&](const std::string& id) -> std::optional<int> {
              auto it = truth.find(id);
              if (it == truth.end()) return std::nullopt;
              return it->second;
            },
            k);
      },
      py::arg("ranked"), py::arg("truth"), py::arg("k"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  // ---- attribution -----------------------------------------------------
  m.def(
      "shap_values",
      [](const LinearModel& model, const Corpus& corpus, const std::string& doc_id) {
        Attribution a = shap_linear(model, corpus.features_of(doc_id));
        return py::make_tuple(a.phi, a.base_value);
      },
      py::arg("model"), py::arg("corpus"), py::arg("doc_id"),
      "Exact per-term Shapley contributions for one document: (phi, base). "
      "phi is indexed by vocabulary term id.");
  m.def(
      "suggest_query_terms",
      [](const LinearModel& model, const Corpus& corpus, const std::vector<std::string>& ids,
         const std::string& category, std::size_t top_m, double threshold) {
        return suggest_query_terms(model, corpus, ids, category, top_m, threshold)
            .ranked_terms;
      },
      py::arg("model"), py::arg("corpus"), py::arg("ids"), py::arg("category"),
      py::arg("top_m") = 10, py::arg("threshold") = 0.5,
      "Top positively attributed terms over the model's predicted positives, "
      "as (term, mean_shap) pairs.");
  m.def("read_query_file", &read_query_file, py::arg("path"));
  m.def("write_query_file", &write_query_file, py::arg("queries"), py::arg("path"));

  // ---- fusion and campaign --------------------------------------------
  m.def("fuse_topk", &fuse_topk, py::arg("lex_ranked"), py::arg("vec_ranked"), py::arg("k"),
        "Rank-sum-ordered intersection of the two top-k prefixes.");
  m.def(
      "run_campaign",
      [](const Corpus& corpus, const LabelMapOracle& oracle,
         const std::optional<std::vector<std::string>>& categories, std::size_t rounds,
         std::size_t k_lex, std::size_t k_vec, std::size_t cap, std::size_t budget,
         std::uint64_t seed, std::size_t query_top, std::size_t suggest_top_m,
         std::size_t embed_dim, std::uint64_t embed_seed,
         const std::optional<std::map<std::string, std::vector<std::string>>>& queries,
         int epochs) {
        CampaignConfig cfg;
        cfg.rounds = rounds;
        cfg.k_lex = k_lex;
        cfg.k_vec = k_vec;
        cfg.cap = cap;
        cfg.budget = budget;
        cfg.seed = seed;
        cfg.query_top = query_top;
        cfg.suggest_top_m = suggest_top_m;
        cfg.trainer.epochs = epochs;
        if (queries) {
          cfg.query_mode = QueryMode::file;
          cfg.fixed_queries = *queries;
        }
        HashEmbedder embedder(embed_dim, embed_seed);
        EmbeddingMatrix matrix = embed_corpus(corpus, embedder);
        CampaignReport report =
            run_campaign(corpus, matrix, embedder, oracle,
                         categories ? *categories : corpus.categories, cfg);

        py::list rows;
        for (const auto& row : report.rows) {
          py::dict r;
          r["round"] = row.round;
          r["category"] = row.category;
          r["arm"] = row.arm;
          r["n_labeled"] = row.n_labeled;
          r["minority_f1"] = row.minority_f1;
          r["macro_f1"] = row.macro_f1;
          r["batch_precision"] = row.batch_precision;
          r["batch_size"] = row.batch_size;
          rows.append(r);
        }
        py::dict out;
        out["rows"] = rows;
        out["csv"] = render_report_csv(report);
        out["summary"] = format_summary_table(report);
        return out;
      },
      py::arg("corpus"), py::arg("oracle"), py::arg("categories") = py::none(),
      py::arg("rounds") = 2, py::arg("k_lex") = 80, py::arg("k_vec") = 80,
      py::arg("cap") = 50, py::arg("budget") = 3000, py::arg("seed") = 1,
      py::arg("query_top") = 4, py::arg("suggest_top_m") = 10, py::arg("embed_dim") = 768,
      py::arg("embed_seed") = 42, py::arg("queries") = py::none(), py::arg("epochs") = 10,
      "Simulate the fused-vs-random annotation campaign with hash embeddings. "
      "Pass queries={category: [terms]} to pin round queries instead of "
      "deriving them from attributions.");
}
