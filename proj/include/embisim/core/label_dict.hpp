#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "embisim/core/types.hpp"

namespace embisim {

/// Bidirectional label string <-> LabelId map, one per graph. Labels are
/// compared as exact byte strings. A dictionary created from a label set
/// numbers labels in lexicographic order; labels added later get the next
/// free ids.
class LabelDictionary {
 public:
  LabelDictionary() = default;

  static LabelDictionary from_labels(const std::set<std::string, std::less<>>& labels);

  std::optional<LabelId> find(std::string_view label) const;
  /// Throws InputError for unknown labels.
  LabelId at(std::string_view label) const;
  const std::string& name(LabelId id) const;
  /// Returns the existing id or appends a new one.
  LabelId intern(std::string_view label);

  std::size_t size() const { return names_.size(); }

  /// Binary layout: u32 count, then count x (u32 byte length, bytes),
  /// in id order.
  void save(const std::filesystem::path& path) const;
  static LabelDictionary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::map<std::string, LabelId, std::less<>> ids_;
};

}  // namespace embisim
