#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "retsel/benchgen.hpp"
#include "retsel/classify.hpp"
#include "retsel/lexindex.hpp"
#include "retsel/selection.hpp"
#include "retsel/text.hpp"

namespace retsel {

// One registered configuration key with its default and help line. The
// schema is the single source of truth for --help, validation, and the
// snapshot layout.
struct ConfigKeyDef {
  const char* key;   // dotted, e.g. "bm25.k1"
  const char* def;
  const char* help;
};

const std::vector<ConfigKeyDef>& config_schema();

// key -> value for every schema key, at defaults.
std::map<std::string, std::string> default_config_values();

// Indented key-value file: an unindented line opens a section, indented
// "key value" lines fill it, '#' starts a comment. Unknown keys error with
// the file position.
void apply_config_file(std::map<std::string, std::string>& values, const std::string& path);

// Single dotted-key override (command line). Unknown keys error.
void apply_override(std::map<std::string, std::string>& values, const std::string& key,
                    const std::string& value);

// Canonical snapshot in the config file syntax, schema order.
std::string render_config(const std::map<std::string, std::string>& values);

// Key/default/help listing for --help.
std::string config_help();

// Fully typed view of a resolved value map.
struct Config {
  std::map<std::string, std::string> values;  // resolved raw map (for snapshots)

  std::string corpus_path;
  std::vector<std::string> categories;
  TokenizerConfig tokenizer;

  Bm25Params bm25;

  std::string embedding_provider;  // "hash" | "file"
  std::size_t embedding_dim = 768;
  std::uint64_t embedding_seed = 42;
  std::string embedding_file;
  std::string embedding_query_file;

  TrainConfig classifier;
  SplitSpec split;
  std::size_t suggest_top_m = 10;

  CampaignConfig campaign;  // trainer/split/bm25 mirrored in

  GeneratorConfig generator;
  double visible_fraction = 0.32;

  std::size_t search_k = 20;
  std::string search_leg;   // "lex" | "vec" | "both" | "fused"
  std::string select_mode;  // "pending" | "oracle"

  std::string queries_path;
  std::string oracle_path;
  std::string output_dir;
  std::string model_path;  // empty -> <output>/model_<category>.txt
};

// Type-checks and cross-validates the raw map. Throws UsageError naming the
// offending key.
Config materialize_config(const std::map<std::string, std::string>& values);

}  // namespace retsel
