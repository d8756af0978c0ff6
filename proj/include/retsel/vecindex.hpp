#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retsel/corpus.hpp"
#include "retsel/text.hpp"

namespace retsel {

// Seam for external sentence encoders. embed() must be a pure function of
// (text, configuration, seed) and return a unit vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::string tag() const = 0;
};

// Signed feature hashing of the token multiset: each token maps to an
// (index, sign) pair under the seed; accumulate, then L2-normalize. An
// all-zero accumulation maps to the first basis vector.
std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

class HashEmbedder final : public EmbeddingProvider {
 public:
  HashEmbedder(std::size_t dim, std::uint64_t seed);  // dim >= 2
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed(std::string_view text) const override;
  std::string tag() const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Fixed-dimension unit vectors keyed by document id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t dim, std::string provider_tag);

  // Validates dimension, rejects zero vectors, renormalizes off-unit input.
  // Returns true when the vector's norm deviated from 1 by more than 1e-3.
  bool add(const std::string& id, const std::vector<double>& vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t slot) const;
  const double* find(std::string_view id) const;  // nullptr when absent
  const std::string& provider_tag() const { return tag_; }

 private:
  std::size_t dim_ = 0;
  std::string tag_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> slot_of_;
  std::vector<double> data_;  // row-major
};

struct EmbeddingLoadSummary {
  std::size_t renormalized = 0;  // rows with |norm - 1| > 1e-3
};

// Plain-text wire format. First line "<count> <dim>"; each following line
// "<doc_id> <v1> ... <v_dim>".
EmbeddingMatrix load_embeddings(const std::string& path,
                                EmbeddingLoadSummary* summary = nullptr);
void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path);

EmbeddingMatrix embed_corpus(const Corpus& corpus, const EmbeddingProvider& provider);

struct Neighbor {
  std::string id;
  double distance;
};

// Exact scan by Euclidean distance, ascending; ties by ascending id.
// The query is normalized on entry. When `restrict_to` is given, only those
// ids participate.
std::vector<Neighbor> knn_search(const EmbeddingMatrix& matrix,
                                 std::span<const double> query, std::size_t k,
                                 const std::set<std::string>* restrict_to = nullptr);

// Terms joined with single spaces, then embedded by the provider.
std::vector<double> embed_query(const EmbeddingProvider& provider,
                                const std::vector<std::string>& terms);

// Query-side provider backed by externally computed vectors. Lookup key is
// the query text with spaces replaced by '+', matching the id column of the
// embedding wire format.
class FileEmbedder final : public EmbeddingProvider {
 public:
  explicit FileEmbedder(const std::string& query_file);
  std::size_t dim() const override;
  std::vector<double> embed(std::string_view text) const override;
  std::string tag() const override;

 private:
  EmbeddingMatrix queries_;
  std::string source_;
};

}  // namespace retsel
