#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"
#include "retsel/oracle.hpp"

namespace retsel {

struct PlantedCategory {
  std::string name;
  double prevalence;                 // in (0, 1)
  std::vector<std::string> planted;  // class-indicative terms
};

struct GeneratorConfig {
  std::size_t n_docs = 5000;
  std::vector<PlantedCategory> categories = default_planted_categories();
  double p_plant = 0.8;   // planted-term inclusion probability for positives
  double p_leak = 0.02;   // and for negatives
  std::size_t background_vocab = 2000;
  std::size_t doc_len_min = 15;
  std::size_t doc_len_max = 60;
  std::uint64_t seed = 97;

  static std::vector<PlantedCategory> default_planted_categories();
  void validate() const;  // throws UsageError on bad fields
};

// Deterministic imbalanced corpus with planted class vocabulary. Every
// document carries a ground-truth label for every category.
Corpus generate(const GeneratorConfig& cfg, const TokenizerConfig& tok = {});

struct HoldOut {
  Corpus corpus;          // labels kept on the visible sample only
  LabelMapOracle oracle;  // labels of everything else
};

// Keeps labels on a seeded sample of floor(visible_fraction * N) documents
// and moves the rest into the oracle; the two label sets are disjoint and
// jointly exhaustive.
HoldOut hold_out_truth(const Corpus& corpus, double visible_fraction, std::uint64_t seed);

}  // namespace retsel
