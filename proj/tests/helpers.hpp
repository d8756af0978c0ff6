#pragma once

// Small builders shared across the test binaries: throwaway corpora, random
// token streams, and a scratch-directory guard for file round-trips.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "retsel/corpus.hpp"

namespace testutil {

inline retsel::Corpus make_corpus(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const std::vector<std::string>& categories = {"health"}) {
  std::vector<retsel::RawDoc> raw;
  for (const auto& [id, text] : docs) raw.push_back({id, text, {}});
  return retsel::build_corpus(std::move(raw), categories);
}

inline retsel::Corpus make_labeled_corpus(
    const std::vector<std::tuple<std::string, std::string, int>>& docs,
    const std::string& category = "health") {
  std::vector<retsel::RawDoc> raw;
  for (const auto& [id, text, label] : docs)
    raw.push_back({id, text, {{category, label}}});
  return retsel::build_corpus(std::move(raw), {category});
}

// Token streams over a tiny vocabulary ("w00".."wNN"), for randomized
// cross-checks. std::mt19937 keeps the tests independent of the library's
// own generator.
inline std::vector<std::string> random_tokens(std::mt19937_64& gen, std::size_t vocab,
                                              std::size_t len_min, std::size_t len_max) {
  std::uniform_int_distribution<std::size_t> len(len_min, len_max);
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::string> out;
  const std::size_t n = len(gen);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "w%02zu", pick(gen));
    out.emplace_back(buf);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& toks) {
  std::ostringstream os;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) os << ' ';
    os << toks[i];
  }
  return os.str();
}

// Unique temp directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    namespace fs = std::filesystem;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (stem + "-" + std::to_string(rd()) + "-" + std::to_string(counter()++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace testutil
