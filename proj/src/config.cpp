#include "retsel/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "retsel/errors.hpp"
#include "retsel/strfmt.hpp"

namespace retsel {

const std::vector<ConfigKeyDef>& config_schema() {
  static const std::vector<ConfigKeyDef> schema = {
      {"corpus.path", "corpus.jsonl", "corpus JSON Lines file"},
      {"corpus.categories", "alone,friends,health", "declared categories, comma-separated"},
      {"tokenizer.stopwords", "false", "drop built-in English stopwords"},
      {"tokenizer.stemmer", "none", "stemming hook; only \"none\" is implemented"},
      {"bm25.k1", "1.2", "BM25 term-frequency saturation"},
      {"bm25.b", "0.75", "BM25 length normalization"},
      {"embedding.provider", "hash", "document embedder: hash | file"},
      {"embedding.dim", "768", "embedding dimension (hash provider)"},
      {"embedding.seed", "42", "hashing seed (hash provider)"},
      {"embedding.file", "", "precomputed document embeddings (file provider)"},
      {"embedding.query_file", "", "precomputed query embeddings (file provider)"},
      {"classifier.loss", "logistic", "training loss: logistic | hinge"},
      {"classifier.epochs", "10", "SGD epochs"},
      {"classifier.learning_rate", "0.1", "base learning rate, decayed 1/sqrt(t)"},
      {"classifier.l2", "0.0001", "L2 regularization strength"},
      {"classifier.threshold", "0.5", "positive-class probability threshold"},
      {"classifier.seed", "7", "SGD shuffle seed"},
      {"split.train", "0.7", "train fraction"},
      {"split.val", "0.1", "validation fraction"},
      {"split.test", "0.2", "test fraction"},
      {"split.stratified", "true", "stratify by label tuple"},
      {"split.seed", "11", "split shuffle seed"},
      {"suggest.top_m", "10", "suggested terms kept per category"},
      {"campaign.rounds", "2", "selection rounds after the baseline"},
      {"campaign.k_lex", "80", "lexical leg depth"},
      {"campaign.k_vec", "80", "dense leg depth"},
      {"campaign.cap", "50", "max annotations per round per category"},
      {"campaign.budget", "3000", "total annotation budget per arm"},
      {"campaign.seed", "1", "campaign master seed"},
      {"campaign.query_mode", "suggest", "round queries: suggest | file"},
      {"campaign.query_top", "4", "suggested terms used as the round query"},
      {"generator.n_docs", "5000", "synthetic corpus size"},
      {"generator.prevalence", "alone=0.18,friends=0.375,health=0.275",
       "per-category positive rate, name=rate pairs"},
      {"generator.planted", "alone=alone+myself,friends=friend,health=health+weight+gym+exercise",
       "per-category planted terms, name=t1+t2 pairs"},
      {"generator.p_plant", "0.8", "planted-term probability in positives"},
      {"generator.p_leak", "0.02", "planted-term probability in negatives"},
      {"generator.background_vocab", "2000", "background vocabulary size"},
      {"generator.doc_len_min", "15", "min document length (tokens)"},
      {"generator.doc_len_max", "60", "max document length (tokens)"},
      {"generator.seed", "97", "generator seed"},
      {"generator.visible_fraction", "0.32", "fraction of docs keeping labels on generate"},
      {"search.k", "20", "result count for the search command"},
      {"search.leg", "both", "search command legs: lex | vec | both | fused"},
      {"select.mode", "pending", "select command sink: pending | oracle"},
      {"paths.queries", "queries.txt", "query file (file query mode)"},
      {"paths.oracle", "oracle.jsonl", "held-out oracle labels"},
      {"paths.output", "out", "output directory"},
      {"paths.model", "", "model file for eval; empty = <output>/model_<category>.txt"},
  };
  return schema;
}

std::map<std::string, std::string> default_config_values() {
  std::map<std::string, std::string> values;
  for (const auto& def : config_schema()) values[def.key] = def.def;
  return values;
}

namespace {

bool known_key(const std::string& key) {
  for (const auto& def : config_schema())
    if (key == def.key) return true;
  return false;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw UsageError("config key " + key + ": expected " + expected + ", got \"" + value +
                   "\"");
}

std::uint64_t parse_u64(const std::map<std::string, std::string>& values,
                        const std::string& key) {
  const std::string& v = values.at(key);
  std::uint64_t x = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    bad_value(key, v, "a non-negative integer");
  return x;
}

std::size_t parse_count(const std::map<std::string, std::string>& values,
                        const std::string& key) {
  return static_cast<std::size_t>(parse_u64(values, key));
}

int parse_int(const std::map<std::string, std::string>& values, const std::string& key) {
  const std::string& v = values.at(key);
  int x = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    bad_value(key, v, "an integer");
  return x;
}

double parse_real(const std::map<std::string, std::string>& values, const std::string& key) {
  const std::string& v = values.at(key);
  double x = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return x;
}

bool parse_bool(const std::map<std::string, std::string>& values, const std::string& key) {
  const std::string& v = values.at(key);
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, "true or false");
}

std::string parse_choice(const std::map<std::string, std::string>& values,
                         const std::string& key, const std::vector<std::string>& allowed) {
  const std::string& v = values.at(key);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string expected = "one of";
    for (const auto& a : allowed) expected += " " + a;
    bad_value(key, v, expected);
  }
  return v;
}

std::vector<std::string> parse_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  for (const auto& part : split_on(value, ',')) {
    std::string item = trim(part);
    if (item.empty()) bad_value(key, value, "a comma-separated list without empty items");
    out.push_back(item);
  }
  return out;
}

// "name=payload,name=payload" pairs, validated against the declared
// categories (each exactly once).
std::map<std::string, std::string> parse_pairs(const std::string& key,
                                               const std::string& value,
                                               const std::vector<std::string>& categories) {
  std::map<std::string, std::string> out;
  for (const auto& part : parse_list(key, value)) {
    auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 > part.size())
      bad_value(key, value, "name=value pairs");
    std::string name = part.substr(0, eq);
    if (!out.emplace(name, part.substr(eq + 1)).second)
      throw UsageError("config key " + key + ": duplicate entry for " + name);
  }
  for (const auto& cat : categories)
    if (!out.count(cat))
      throw UsageError("config key " + key + ": missing entry for category " + cat);
  for (const auto& [name, payload] : out)
    if (std::find(categories.begin(), categories.end(), name) == categories.end())
      throw UsageError("config key " + key + ": unknown category " + name);
  return out;
}

}  // namespace

void apply_config_file(std::map<std::string, std::string>& values, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string ctx = path + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    bool indented = line[0] == ' ' || line[0] == '\t';
    if (!indented) {
      section = trim(line);
      if (section.find(' ') != std::string::npos)
        throw UsageError(ctx + ": section name must be a single word");
      continue;
    }
    if (section.empty()) throw UsageError(ctx + ": key before any section");
    std::string body = trim(line);
    auto sp = body.find_first_of(" \t");
    std::string key = section + "." + (sp == std::string::npos ? body : body.substr(0, sp));
    std::string value = sp == std::string::npos ? "" : trim(body.substr(sp + 1));
    if (!known_key(key)) throw UsageError(ctx + ": unknown config key " + key);
    values[key] = value;
  }
}

void apply_override(std::map<std::string, std::string>& values, const std::string& key,
                    const std::string& value) {
  if (!known_key(key)) throw UsageError("unknown config key " + key);
  values[key] = value;
}

std::string render_config(const std::map<std::string, std::string>& values) {
  std::ostringstream out;
  std::string section;
  for (const auto& def : config_schema()) {
    std::string key = def.key;
    auto dot = key.find('.');
    std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << sec << '\n';
      section = sec;
    }
    auto it = values.find(key);
    out << "  " << key.substr(dot + 1) << ' ' << (it == values.end() ? def.def : it->second)
        << '\n';
  }
  return out.str();
}

std::string config_help() {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto& def : config_schema()) width = std::max(width, std::string(def.key).size());
  for (const auto& def : config_schema()) {
    std::string key = def.key;
    out << "  --" << key << std::string(width - key.size() + 2, ' ') << def.help
        << " [" << (std::string(def.def).empty() ? "unset" : def.def) << "]\n";
  }
  return out.str();
}

Config materialize_config(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values)
    if (!known_key(key)) throw UsageError("unknown config key " + key);

  Config cfg;
  cfg.values = values;

  cfg.corpus_path = values.at("corpus.path");
  cfg.categories = parse_list("corpus.categories", values.at("corpus.categories"));
  {
    std::set<std::string> seen(cfg.categories.begin(), cfg.categories.end());
    if (seen.size() != cfg.categories.size())
      throw UsageError("config key corpus.categories: duplicate category");
  }
  cfg.tokenizer.remove_stopwords = parse_bool(values, "tokenizer.stopwords");
  parse_choice(values, "tokenizer.stemmer", {"none"});

  cfg.bm25.k1 = parse_real(values, "bm25.k1");
  cfg.bm25.b = parse_real(values, "bm25.b");
  if (cfg.bm25.k1 < 0) bad_value("bm25.k1", values.at("bm25.k1"), "a non-negative number");
  if (cfg.bm25.b < 0 || cfg.bm25.b > 1)
    bad_value("bm25.b", values.at("bm25.b"), "a number in [0,1]");

  cfg.embedding_provider = parse_choice(values, "embedding.provider", {"hash", "file"});
  cfg.embedding_dim = parse_count(values, "embedding.dim");
  if (cfg.embedding_dim < 2)
    bad_value("embedding.dim", values.at("embedding.dim"), "an integer >= 2");
  cfg.embedding_seed = parse_u64(values, "embedding.seed");
  cfg.embedding_file = values.at("embedding.file");
  cfg.embedding_query_file = values.at("embedding.query_file");
  if (cfg.embedding_provider == "file" && cfg.embedding_file.empty())
    throw UsageError("embedding.provider file requires embedding.file");

  cfg.classifier.loss = parse_choice(values, "classifier.loss", {"logistic", "hinge"}) ==
                                "logistic"
                            ? LossKind::logistic
                            : LossKind::hinge;
  cfg.classifier.epochs = parse_int(values, "classifier.epochs");
  if (cfg.classifier.epochs < 1)
    bad_value("classifier.epochs", values.at("classifier.epochs"), "a positive integer");
  cfg.classifier.learning_rate = parse_real(values, "classifier.learning_rate");
  if (cfg.classifier.learning_rate <= 0)
    bad_value("classifier.learning_rate", values.at("classifier.learning_rate"),
              "a positive number");
  cfg.classifier.l2 = parse_real(values, "classifier.l2");
  if (cfg.classifier.l2 < 0)
    bad_value("classifier.l2", values.at("classifier.l2"), "a non-negative number");
  cfg.classifier.threshold = parse_real(values, "classifier.threshold");
  if (cfg.classifier.threshold < 0 || cfg.classifier.threshold > 1)
    bad_value("classifier.threshold", values.at("classifier.threshold"), "a number in [0,1]");
  cfg.classifier.seed = parse_u64(values, "classifier.seed");

  cfg.split.train = parse_real(values, "split.train");
  cfg.split.val = parse_real(values, "split.val");
  cfg.split.test = parse_real(values, "split.test");
  cfg.split.stratified = parse_bool(values, "split.stratified");
  cfg.split.seed = parse_u64(values, "split.seed");

  cfg.suggest_top_m = parse_count(values, "suggest.top_m");
  if (cfg.suggest_top_m == 0)
    bad_value("suggest.top_m", values.at("suggest.top_m"), "a positive integer");

  cfg.campaign.rounds = parse_count(values, "campaign.rounds");
  cfg.campaign.k_lex = parse_count(values, "campaign.k_lex");
  cfg.campaign.k_vec = parse_count(values, "campaign.k_vec");
  if (cfg.campaign.k_lex == 0 || cfg.campaign.k_vec == 0)
    throw UsageError("campaign leg depths must be positive");
  cfg.campaign.cap = parse_count(values, "campaign.cap");
  cfg.campaign.budget = parse_count(values, "campaign.budget");
  cfg.campaign.seed = parse_u64(values, "campaign.seed");
  cfg.campaign.query_mode =
      parse_choice(values, "campaign.query_mode", {"suggest", "file"}) == "suggest"
          ? QueryMode::suggest
          : QueryMode::file;
  cfg.campaign.query_top = parse_count(values, "campaign.query_top");
  if (cfg.campaign.query_top == 0)
    bad_value("campaign.query_top", values.at("campaign.query_top"), "a positive integer");
  cfg.campaign.suggest_top_m = cfg.suggest_top_m;
  cfg.campaign.trainer = cfg.classifier;
  cfg.campaign.split = cfg.split;
  cfg.campaign.bm25 = cfg.bm25;

  cfg.generator.n_docs = parse_count(values, "generator.n_docs");
  cfg.generator.p_plant = parse_real(values, "generator.p_plant");
  cfg.generator.p_leak = parse_real(values, "generator.p_leak");
  cfg.generator.background_vocab = parse_count(values, "generator.background_vocab");
  cfg.generator.doc_len_min = parse_count(values, "generator.doc_len_min");
  cfg.generator.doc_len_max = parse_count(values, "generator.doc_len_max");
  cfg.generator.seed = parse_u64(values, "generator.seed");
  {
    auto prevalence =
        parse_pairs("generator.prevalence", values.at("generator.prevalence"), cfg.categories);
    auto planted =
        parse_pairs("generator.planted", values.at("generator.planted"), cfg.categories);
    cfg.generator.categories.clear();
    for (const auto& cat : cfg.categories) {
      PlantedCategory pc;
      pc.name = cat;
      const std::string& raw = prevalence.at(cat);
      double rate = 0.0;
      auto res = std::from_chars(raw.data(), raw.data() + raw.size(), rate);
      if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
        bad_value("generator.prevalence", raw, "a number");
      pc.prevalence = rate;
      for (const auto& term : split_on(planted.at(cat), '+')) {
        if (term.empty())
          bad_value("generator.planted", planted.at(cat), "'+'-separated terms");
        pc.planted.push_back(term);
      }
      cfg.generator.categories.push_back(std::move(pc));
    }
  }
  cfg.generator.validate();
  cfg.visible_fraction = parse_real(values, "generator.visible_fraction");
  if (cfg.visible_fraction < 0 || cfg.visible_fraction > 1)
    bad_value("generator.visible_fraction", values.at("generator.visible_fraction"),
              "a number in [0,1]");

  cfg.search_k = parse_count(values, "search.k");
  if (cfg.search_k == 0) bad_value("search.k", values.at("search.k"), "a positive integer");
  cfg.search_leg = parse_choice(values, "search.leg", {"lex", "vec", "both", "fused"});
  cfg.select_mode = parse_choice(values, "select.mode", {"pending", "oracle"});

  cfg.queries_path = values.at("paths.queries");
  cfg.oracle_path = values.at("paths.oracle");
  cfg.output_dir = values.at("paths.output");
  cfg.model_path = values.at("paths.model");
  if (cfg.output_dir.empty()) throw UsageError("paths.output must not be empty");

  return cfg;
}

}  // namespace retsel
