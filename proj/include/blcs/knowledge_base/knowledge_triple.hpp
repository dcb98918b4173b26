#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "blcs/common/types.hpp"

namespace blcs::kb {

/// The three knowledge bases an entity token can be registered in.
enum class Base { identification, status, behavior };

inline std::string_view to_string(Base base) noexcept {
  switch (base) {
    case Base::identification: return "identification";
    case Base::status: return "status";
    case Base::behavior: return "behavior";
  }
  return "?";
}

/// Token-only view of an observation; the unit the relation network scores.
struct TokenTriple {
  std::string identification;
  std::string status;
  std::string behavior;

  friend auto operator<=>(const TokenTriple&, const TokenTriple&) = default;
};

/// One (identification, status, behavior) observation.
struct KnowledgeTriple {
  std::string identification;
  std::string status;
  std::string behavior;
  Tick timestamp = 0;
  DomainId origin_domain = 0;

  TokenTriple tokens() const { return {identification, status, behavior}; }

  friend auto operator<=>(const KnowledgeTriple&, const KnowledgeTriple&) = default;
};

}  // namespace blcs::kb
