#include "retsel/vecindex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "retsel/errors.hpp"
#include "retsel/rng.hpp"
#include "retsel/strfmt.hpp"

namespace retsel {
namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw UsageError("hash_embed: dim must be >= 2");
  std::vector<double> v(dim, 0.0);
  for (const auto& token : tokenize(text)) {
    std::uint64_t h = splitmix64(fnv1a64(token) ^ seed);
    std::size_t idx = static_cast<std::size_t>(h % dim);
    v[idx] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = l2_norm(v);
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 2) throw UsageError("HashEmbedder: dim must be >= 2");
}

std::vector<double> HashEmbedder::embed(std::string_view text) const {
  return hash_embed(text, dim_, seed_);
}

std::string HashEmbedder::tag() const {
  return "hash(dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_) + ")";
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::string provider_tag)
    : dim_(dim), tag_(std::move(provider_tag)) {
  if (dim < 1) throw UsageError("EmbeddingMatrix: dim must be >= 1");
}

bool EmbeddingMatrix::add(const std::string& id, const std::vector<double>& vec) {
  if (vec.size() != dim_)
    throw DataError("vector for \"" + id + "\" has " + std::to_string(vec.size()) +
                    " components, expected " + std::to_string(dim_));
  if (slot_of_.count(id)) throw DataError("duplicate embedding id \"" + id + "\"");
  double norm = l2_norm(vec);
  if (norm == 0.0) throw DataError("zero vector for id \"" + id + "\"");
  bool off_unit = std::abs(norm - 1.0) > 1e-3;
  slot_of_.emplace(id, ids_.size());
  ids_.push_back(id);
  if (std::abs(norm - 1.0) > 1e-6) {
    for (double x : vec) data_.push_back(x / norm);
  } else {
    data_.insert(data_.end(), vec.begin(), vec.end());
  }
  return off_unit;
}

std::span<const double> EmbeddingMatrix::row(std::size_t slot) const {
  return {data_.data() + slot * dim_, dim_};
}

const double* EmbeddingMatrix::find(std::string_view id) const {
  auto it = slot_of_.find(std::string(id));
  return it == slot_of_.end() ? nullptr : data_.data() + it->second * dim_;
}

EmbeddingMatrix load_embeddings(const std::string& path, EmbeddingLoadSummary* summary) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header line");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  if (!(header >> count >> dim) || dim < 1)
    throw DataError(path + ":1: header must be \"<count> <dim>\"");

  EmbeddingMatrix m(dim, "file:" + path);
  EmbeddingLoadSummary local;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id;
    if (!(row >> id))
      throw DataError(path + ":" + std::to_string(lineno) + ": missing doc id");
    std::vector<double> vec;
    vec.reserve(dim);
    double x;
    while (row >> x) vec.push_back(x);
    if (!row.eof())
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed component");
    if (vec.size() != dim)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(dim) + " components, found " +
                      std::to_string(vec.size()));
    if (m.add(id, vec)) ++local.renormalized;
  }
  if (m.size() != count)
    throw DataError(path + ": header declares " + std::to_string(count) +
                    " rows, found " + std::to_string(m.size()));
  if (summary) *summary = local;
  return m;
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file " + path);
  out << matrix.size() << ' ' << matrix.dim() << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << matrix.ids()[i];
    for (double x : matrix.row(i)) out << ' ' << format_double(x);
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

EmbeddingMatrix embed_corpus(const Corpus& corpus, const EmbeddingProvider& provider) {
  EmbeddingMatrix m(provider.dim(), provider.tag());
  for (const auto& d : corpus.docs) m.add(d.id, provider.embed(d.text));
  return m;
}

std::vector<Neighbor> knn_search(const EmbeddingMatrix& matrix,
                                 std::span<const double> query, std::size_t k,
                                 const std::set<std::string>* restrict_to) {
  if (k < 1) throw UsageError("knn_search: k must be >= 1");
  if (query.size() != matrix.dim())
    throw DataError("query has " + std::to_string(query.size()) +
                    " components, matrix dim is " + std::to_string(matrix.dim()));
  std::vector<double> q(query.begin(), query.end());
  double norm = l2_norm(q);
  if (norm == 0.0) throw UsageError("knn_search: zero query vector");
  for (double& x : q) x /= norm;

  std::vector<Neighbor> all;
  all.reserve(matrix.size());
  for (std::size_t slot = 0; slot < matrix.size(); ++slot) {
    const std::string& id = matrix.ids()[slot];
    if (restrict_to && !restrict_to->count(id)) continue;
    auto row = matrix.row(slot);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double d = q[i] - row[i];
      s += d * d;
    }
    all.push_back({id, std::sqrt(s)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& lhs, const Neighbor& rhs) {
    if (lhs.distance != rhs.distance) return lhs.distance < rhs.distance;
    return lhs.id < rhs.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<double> embed_query(const EmbeddingProvider& provider,
                                const std::vector<std::string>& terms) {
  if (terms.empty()) throw UsageError("embed_query: empty term list");
  return provider.embed(join_terms(terms));
}

FileEmbedder::FileEmbedder(const std::string& query_file)
    : queries_(load_embeddings(query_file)), source_(query_file) {}

std::size_t FileEmbedder::dim() const { return queries_.dim(); }

std::vector<double> FileEmbedder::embed(std::string_view text) const {
  std::string key(text);
  std::replace(key.begin(), key.end(), ' ', '+');
  const double* row = queries_.find(key);
  if (!row)
    throw DataError("no query embedding for \"" + std::string(text) + "\" (key \"" + key +
                    "\") in " + source_);
  return std::vector<double>(row, row + queries_.dim());
}

std::string FileEmbedder::tag() const { return "file:" + source_; }

}  // namespace retsel
