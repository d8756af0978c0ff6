#include "retsel/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "retsel/errors.hpp"
#include "retsel/rng.hpp"
#include "retsel/strfmt.hpp"

namespace retsel {
namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

int label_or_throw(const Document& d, const std::string& category) {
  auto it = d.labels.find(category);
  if (it == d.labels.end())
    throw DataError("document \"" + d.id + "\" has no label for category \"" + category +
                    "\"");
  return it->second;
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn,
                           std::size_t actual, std::size_t predicted) {
  ClassMetrics m;
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.zero_support = (actual == 0 && predicted == 0);
  return m;
}

}  // namespace

SplitResult split(const Corpus& corpus, const std::vector<std::string>& ids,
                  const std::vector<std::string>& categories, const SplitSpec& spec) {
  if (spec.train <= 0.0 || spec.val <= 0.0 || spec.test <= 0.0)
    throw UsageError("split: ratios must be positive");
  if (std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-9)
    throw UsageError("split: ratios must sum to 1");

  // group by label tuple; one stratum when stratification is off
  std::map<std::vector<int>, std::vector<std::string>> strata;
  for (const auto& id : ids) {
    const Document& d = corpus.at(id);
    std::vector<int> key;
    if (spec.stratified) {
      key.reserve(categories.size());
      for (const auto& cat : categories) {
        auto it = d.labels.find(cat);
        key.push_back(it == d.labels.end() ? -1 : it->second);
      }
    }
    strata[key].push_back(id);
  }
  if (spec.stratified) {
    for (std::size_t c = 0; c < categories.size(); ++c) {
      bool has[2] = {false, false};
      for (const auto& [key, members] : strata) {
        if (key[c] == 0) has[0] = true;
        if (key[c] == 1) has[1] = true;
      }
      if (!has[0] || !has[1])
        throw DataError("split: class " + std::string(has[0] ? "1" : "0") +
                        " absent for category \"" + categories[c] + "\"");
    }
  }

  Rng rng(derive_seed(spec.seed, "split"));
  SplitResult out;
  for (auto& [key, members] : strata) {
    rng.shuffle(members);
    const auto n = members.size();
    auto n_train = static_cast<std::size_t>(std::floor(n * spec.train + 1e-9));
    auto n_val = static_cast<std::size_t>(std::floor(n * spec.val + 1e-9));
    auto n_test = static_cast<std::size_t>(std::floor(n * spec.test + 1e-9));
    n_train += n - n_train - n_val - n_test;  // remainder to train
    std::size_t i = 0;
    for (std::size_t j = 0; j < n_train; ++j) out.train.push_back(members[i++]);
    for (std::size_t j = 0; j < n_val; ++j) out.val.push_back(members[i++]);
    for (std::size_t j = 0; j < n_test; ++j) out.test.push_back(members[i++]);
  }
  return out;
}

LinearModel train_linear(const Corpus& corpus, const std::vector<std::string>& train_ids,
                         const std::string& category, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw UsageError("train_linear: epochs must be >= 1");
  if (train_ids.empty()) throw DataError("train_linear: empty training set");

  std::vector<const SparseVec*> xs;
  std::vector<int> ys;
  xs.reserve(train_ids.size());
  for (const auto& id : train_ids) {
    xs.push_back(&corpus.features_of(id));
    ys.push_back(label_or_throw(corpus.at(id), category));
  }
  if (std::find(ys.begin(), ys.end(), 0) == ys.end() ||
      std::find(ys.begin(), ys.end(), 1) == ys.end())
    throw DataError("train_linear: single-class training set for category \"" + category +
                    "\"");

  const std::size_t v = corpus.vocab.size();
  std::vector<double> w(v, 0.0);
  std::vector<double> grad_sq(v, 0.0);  // per-coordinate accumulated g^2
  double bias = 0.0;
  double bias_sq = 0.0;

  auto margin_of = [&](const SparseVec& x) {
    double s = bias;
    for (const auto& [id, val] : x.entries) s += w[id] * val;
    return s;
  };
  auto full_loss = [&] {
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double m = margin_of(*xs[i]);
      if (cfg.loss == LossKind::logistic) {
        double p = sigmoid(m);
        p = std::min(1.0 - 1e-15, std::max(1e-15, p));
        loss += ys[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
      } else {
        double y = ys[i] == 1 ? 1.0 : -1.0;
        loss += std::max(0.0, 1.0 - y * m);
      }
    }
    loss /= static_cast<double>(xs.size());
    double w2 = 0.0;
    for (double wi : w) w2 += wi * wi;
    return loss + 0.5 * cfg.l2 * w2;
  };

  Rng rng(derive_seed(cfg.seed, "sgd"));
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);

  // Per-coordinate steps lr / sqrt(sum of squared gradients): rare features
  // keep large steps while frequent ones decay as 1/sqrt(t). Plain global
  // decay starves the rare class-indicative terms this pipeline feeds on.
  // L2 is applied lazily, on the coordinates present in each sample.
  LinearModel model;
  model.category = category;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const SparseVec& x = *xs[i];
      const double m = margin_of(x);
      double g;  // d loss / d margin
      if (cfg.loss == LossKind::logistic) {
        g = sigmoid(m) - static_cast<double>(ys[i]);
      } else {
        const double y = ys[i] == 1 ? 1.0 : -1.0;
        g = (y * m < 1.0) ? -y : 0.0;
      }
      for (const auto& [id, val] : x.entries) {
        const double gi = g * val + cfg.l2 * w[id];
        grad_sq[id] += gi * gi;
        if (grad_sq[id] > 0.0) w[id] -= cfg.learning_rate * gi / std::sqrt(grad_sq[id]);
      }
      bias_sq += g * g;
      if (bias_sq > 0.0) bias -= cfg.learning_rate * g / std::sqrt(bias_sq);
    }
    model.epoch_losses.push_back(full_loss());
  }

  model.weights = std::move(w);
  model.bias = bias;
  model.background_mean = corpus.stats.mean_feature;

  std::ostringstream fp;
  fp << "cat=" << category << " loss=" << (cfg.loss == LossKind::logistic ? "logistic" : "hinge")
     << " epochs=" << cfg.epochs << " lr=" << format_double(cfg.learning_rate)
     << " l2=" << format_double(cfg.l2) << " seed=" << cfg.seed << " n=" << train_ids.size();
  model.train_fingerprint = fp.str();
  return model;
}

Prediction predict(const LinearModel& model, const SparseVec& x, double threshold) {
  double p = sigmoid(model.margin(x));
  return {p, p >= threshold ? 1 : 0};
}

EvalReport evaluate(const LinearModel& model, const Corpus& corpus,
                    const std::vector<std::string>& test_ids, const std::string& category,
                    double threshold) {
  if (test_ids.empty()) throw UsageError("evaluate: empty test set");
  EvalReport r;
  for (const auto& id : test_ids) {
    const Document& d = corpus.at(id);
    int y = label_or_throw(d, category);
    int yhat = predict(model, corpus.features_of(id), threshold).label;
    if (yhat == 1 && y == 1) ++r.tp;
    else if (yhat == 1 && y == 0) ++r.fp;
    else if (yhat == 0 && y == 1) ++r.fn;
    else ++r.tn;
  }
  r.n_test = test_ids.size();
  // class 1 treats label 1 as positive, class 0 treats label 0 as positive
  r.per_class[1] = class_metrics(r.tp, r.fp, r.fn, r.tp + r.fn, r.tp + r.fp);
  r.per_class[0] = class_metrics(r.tn, r.fn, r.fp, r.tn + r.fp, r.tn + r.fn);
  r.macro_f1 = 0.5 * (r.per_class[0].f1 + r.per_class[1].f1);
  const std::size_t n1 = r.tp + r.fn;
  const std::size_t n0 = r.tn + r.fp;
  r.minority_class = n1 <= n0 ? 1 : 0;
  r.minority_f1 = r.per_class[r.minority_class].f1;
  return r;
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::function<std::optional<int>(const std::string&)>& truth,
                      std::size_t k) {
  if (k < 1) throw UsageError("precision_at_k: k must be >= 1");
  const std::size_t n = std::min(k, ranked.size());
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto label = truth(ranked[i]);
    if (!label)
      throw DataError("precision_at_k: no truth label for \"" + ranked[i] + "\"");
    hits += (*label == 1) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

void save_model(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  const std::size_t v = model.weights.size();
  out << "linmodel v1 " << model.category << ' ' << v << '\n';
  out << "bias " << format_double(model.bias) << '\n';
  for (std::size_t i = 0; i < v; ++i) {
    if (model.weights[i] != 0.0)
      out << i << ' ' << format_double(model.weights[i]) << '\n';
  }
  for (std::size_t i = 0; i < model.background_mean.size(); ++i) {
    if (model.background_mean[i] != 0.0)
      out << "mean " << i << ' ' << format_double(model.background_mean[i]) << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty model file");
  auto header = split_ws(line);
  if (header.size() != 4 || header[0] != "linmodel" || header[1] != "v1")
    throw DataError(path + ":1: expected header \"linmodel v1 <category> <V>\"");
  LinearModel model;
  model.category = header[2];
  std::size_t v = 0;
  try {
    v = std::stoul(header[3]);
  } catch (const std::exception&) {
    throw DataError(path + ":1: bad vocabulary size \"" + header[3] + "\"");
  }
  model.weights.assign(v, 0.0);
  model.background_mean.assign(v, 0.0);
  model.train_fingerprint = "file:" + path;

  std::size_t lineno = 1;
  bool saw_bias = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto parts = split_ws(line);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (parts[0] == "bias") {
      if (parts.size() != 2) throw DataError(ctx + ": expected \"bias <value>\"");
      model.bias = parse_double(parts[1], ctx);
      saw_bias = true;
    } else if (parts[0] == "mean") {
      if (parts.size() != 3) throw DataError(ctx + ": expected \"mean <term_id> <value>\"");
      std::size_t id = std::stoul(parts[1]);
      if (id >= v) throw DataError(ctx + ": term id out of range");
      model.background_mean[id] = parse_double(parts[2], ctx);
    } else {
      if (parts.size() != 2) throw DataError(ctx + ": expected \"<term_id> <weight>\"");
      std::size_t id = 0;
      try {
        id = std::stoul(parts[0]);
      } catch (const std::exception&) {
        throw DataError(ctx + ": bad term id \"" + parts[0] + "\"");
      }
      if (id >= v) throw DataError(ctx + ": term id out of range");
      model.weights[id] = parse_double(parts[1], ctx);
    }
  }
  if (!saw_bias) throw DataError(path + ": missing bias line");
  return model;
}

}  // namespace retsel
