#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"

namespace retsel {

enum class LossKind { logistic, hinge };

struct TrainConfig {
  int epochs = 10;
  // base step; each coordinate decays as lr / sqrt(its accumulated squared
  // gradient), so rare informative terms keep large steps
  double learning_rate = 0.1;
  double l2 = 1e-4;
  double threshold = 0.5;
  std::uint64_t seed = 7;
  LossKind loss = LossKind::logistic;
};

// Linear hyperplane over tf-idf features. `background_mean` is the per-term
// feature mean of the corpus the model was trained under (the attribution
// baseline).
struct LinearModel {
  std::string category;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> background_mean;
  std::string train_fingerprint;
  std::vector<double> epoch_losses;  // diagnostics, not serialized

  double margin(const SparseVec& x) const { return x.dot(weights) + bias; }
};

struct SplitSpec {
  double train = 0.7, val = 0.1, test = 0.2;
  std::uint64_t seed = 11;
  bool stratified = true;
};

struct SplitResult {
  std::vector<std::string> train, val, test;
};

// Disjoint exhaustive partition of `ids`, deterministic under the seed.
// Sizes follow floor(n * ratio) per part with the remainder assigned to
// train. Stratification groups documents by their label tuple across
// `categories`; each class of each category must be present.
SplitResult split(const Corpus& corpus, const std::vector<std::string>& ids,
                  const std::vector<std::string>& categories, const SplitSpec& spec);

// Seeded SGD on tf-idf features; logistic loss by default, hinge by config.
LinearModel train_linear(const Corpus& corpus, const std::vector<std::string>& train_ids,
                         const std::string& category, const TrainConfig& cfg = {});

struct Prediction {
  double probability;
  int label;
};

// probability = sigmoid(w.x + b); label = 1 iff probability >= threshold.
Prediction predict(const LinearModel& model, const SparseVec& x, double threshold = 0.5);

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  // true when the class had zero actual and zero predicted instances
  bool zero_support = false;
};

struct EvalReport {
  std::array<ClassMetrics, 2> per_class;
  double macro_f1 = 0.0;
  double minority_f1 = 0.0;
  int minority_class = 1;  // class with fewer test instances; ties -> 1
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t n_test = 0;
};

EvalReport evaluate(const LinearModel& model, const Corpus& corpus,
                    const std::vector<std::string>& test_ids, const std::string& category,
                    double threshold = 0.5);

// Fraction of the first min(k, |ranked|) ids whose truth label is 1.
// Throws when an id in the evaluated prefix has no truth label.
double precision_at_k(const std::vector<std::string>& ranked,
                      const std::function<std::optional<int>(const std::string&)>& truth,
                      std::size_t k);

// Versioned plain-text model format, exact decimal round-trip.
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace retsel
