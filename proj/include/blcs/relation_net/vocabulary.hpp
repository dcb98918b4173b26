#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "blcs/knowledge_base/knowledge_triple.hpp"

namespace blcs::rn {

/// Token <-> row index of the embedding table. Index 0 is the reserved
/// unknown token; the three base tags follow it.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();

  int add(std::string_view token);
  int index_of(std::string_view token) const noexcept;
  bool contains(std::string_view token) const noexcept;
  const std::string& token(int index) const;
  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// Number of reserved leading entries (unknown + base tags).
  static constexpr int reserved() noexcept { return 4; }
  static std::string_view tag(kb::Base base) noexcept;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace blcs::rn
