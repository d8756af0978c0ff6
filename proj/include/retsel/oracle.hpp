#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace retsel {

// Held-out ground truth standing in for human annotators. Lookups are
// stable: repeated calls agree.
class AnnotationOracle {
 public:
  virtual ~AnnotationOracle() = default;
  virtual std::optional<int> lookup(std::string_view id, std::string_view category) const = 0;
};

class LabelMapOracle final : public AnnotationOracle {
 public:
  void set(const std::string& id, const std::string& category, int label);
  std::optional<int> lookup(std::string_view id, std::string_view category) const override;
  const std::map<std::string, std::map<std::string, int>>& all() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  // JSON Lines {"id", "category", "label"} per entry.
  static LabelMapOracle from_jsonl(const std::string& path);
  void write_jsonl(const std::string& path) const;

 private:
  std::map<std::string, std::map<std::string, int>> labels_;
};

}  // namespace retsel
