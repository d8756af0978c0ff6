#include "retsel/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "retsel/errors.hpp"
#include "retsel/rng.hpp"

namespace retsel {

std::vector<PlantedCategory> GeneratorConfig::default_planted_categories() {
  return {
      {"alone", 0.18, {"alone", "myself"}},
      {"friends", 0.375, {"friend"}},
      {"health", 0.275, {"health", "weight", "gym", "exercise"}},
  };
}

void GeneratorConfig::validate() const {
  if (categories.empty()) throw UsageError("generator: no categories configured");
  for (const auto& c : categories) {
    if (c.name.empty()) throw UsageError("generator: empty category name");
    if (!(c.prevalence > 0.0 && c.prevalence < 1.0))
      throw UsageError("generator: prevalence for \"" + c.name + "\" must be in (0,1)");
    if (c.planted.empty())
      throw UsageError("generator: category \"" + c.name + "\" has no planted terms");
  }
  if (!(p_plant > 0.0 && p_plant <= 1.0))
    throw UsageError("generator: p_plant must be in (0,1]");
  if (p_leak < 0.0 || p_leak > 1.0) throw UsageError("generator: p_leak must be in [0,1]");
  if (background_vocab < 1) throw UsageError("generator: background_vocab must be >= 1");
  if (doc_len_min > doc_len_max)
    throw UsageError("generator: doc_len_min must be <= doc_len_max");
}

Corpus generate(const GeneratorConfig& cfg, const TokenizerConfig& tok) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "benchgen"));

  // background vocabulary w0000, w0001, ...
  std::size_t bg_width = std::to_string(cfg.background_vocab - 1).size();
  std::vector<std::string> background;
  background.reserve(cfg.background_vocab);
  for (std::size_t i = 0; i < cfg.background_vocab; ++i) {
    std::string n = std::to_string(i);
    background.push_back("w" + std::string(bg_width - n.size(), '0') + n);
  }

  std::size_t id_width = std::max<std::size_t>(4, std::to_string(cfg.n_docs).size());
  std::vector<RawDoc> raw;
  raw.reserve(cfg.n_docs);
  std::vector<std::string> category_names;
  for (const auto& c : cfg.categories) category_names.push_back(c.name);

  for (std::size_t i = 0; i < cfg.n_docs; ++i) {
    RawDoc d;
    std::string n = std::to_string(i + 1);
    d.id = "d" + std::string(id_width - n.size(), '0') + n;

    std::size_t len = cfg.doc_len_min + static_cast<std::size_t>(rng.below(
                                            cfg.doc_len_max - cfg.doc_len_min + 1));
    std::vector<std::string> tokens;
    tokens.reserve(len + 8);
    for (std::size_t j = 0; j < len; ++j)
      tokens.push_back(background[static_cast<std::size_t>(rng.below(background.size()))]);

    for (const auto& cat : cfg.categories) {
      bool positive = rng.bernoulli(cat.prevalence);
      d.labels[cat.name] = positive ? 1 : 0;
      double p_include = positive ? cfg.p_plant : cfg.p_leak;
      for (const auto& term : cat.planted) {
        if (rng.bernoulli(p_include)) tokens.push_back(term);
      }
    }
    rng.shuffle(tokens);

    d.text = join_terms(tokens);
    raw.push_back(std::move(d));
  }
  return build_corpus(std::move(raw), category_names, tok);
}

HoldOut hold_out_truth(const Corpus& corpus, double visible_fraction, std::uint64_t seed) {
  if (visible_fraction < 0.0 || visible_fraction > 1.0)
    throw UsageError("hold_out_truth: visible_fraction must be in [0,1]");
  auto n_visible = static_cast<std::size_t>(
      std::floor(static_cast<double>(corpus.size()) * visible_fraction + 1e-9));

  Rng rng(derive_seed(seed, "holdout"));
  std::vector<std::string> ids = corpus.ids();
  rng.shuffle(ids);
  std::set<std::string> visible(ids.begin(),
                                ids.begin() + static_cast<std::ptrdiff_t>(n_visible));

  HoldOut out;
  std::vector<RawDoc> raw;
  raw.reserve(corpus.size());
  for (const auto& d : corpus.docs) {
    RawDoc r{d.id, d.text, {}};
    if (visible.count(d.id)) {
      r.labels = d.labels;
    } else {
      for (const auto& [category, label] : d.labels)
        out.oracle.set(d.id, category, label);
    }
    raw.push_back(std::move(r));
  }
  out.corpus = build_corpus(std::move(raw), corpus.categories, corpus.tokenizer);
  return out;
}

}  // namespace retsel
