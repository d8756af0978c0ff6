#include "retsel/oracle.hpp"

#include <fstream>

#include <json.hpp>

#include "retsel/errors.hpp"

namespace retsel {

void LabelMapOracle::set(const std::string& id, const std::string& category, int label) {
  if (label != 0 && label != 1) throw DataError("oracle label outside {0,1}");
  labels_[id][category] = label;
}

std::optional<int> LabelMapOracle::lookup(std::string_view id,
                                          std::string_view category) const {
  auto it = labels_.find(std::string(id));
  if (it == labels_.end()) return std::nullopt;
  auto jt = it->second.find(std::string(category));
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

LabelMapOracle LabelMapOracle::from_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open oracle file " + path);
  LabelMapOracle oracle;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw DataError(ctx + ": malformed JSON record");
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("category") ||
        !j["category"].is_string() || !j.contains("label") ||
        !j["label"].is_number_integer())
      throw DataError(ctx + ": expected {\"id\", \"category\", \"label\"}");
    int label = j["label"].get<int>();
    if (label != 0 && label != 1) throw DataError(ctx + ": label outside {0,1}");
    oracle.set(j["id"].get<std::string>(), j["category"].get<std::string>(), label);
  }
  return oracle;
}

void LabelMapOracle::write_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write oracle file " + path);
  for (const auto& [id, cats] : labels_) {
    for (const auto& [category, label] : cats) {
      nlohmann::ordered_json j;
      j["id"] = id;
      j["category"] = category;
      j["label"] = label;
      out << j.dump() << '\n';
    }
  }
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace retsel
