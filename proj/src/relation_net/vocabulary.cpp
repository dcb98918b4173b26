#include "blcs/relation_net/vocabulary.hpp"

#include "blcs/common/error.hpp"

namespace blcs::rn {

Vocabulary::Vocabulary() {
  add(kUnknownToken);
  add(tag(kb::Base::identification));
  add(tag(kb::Base::status));
  add(tag(kb::Base::behavior));
}

int Vocabulary::add(std::string_view token) {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  int id = size();
  tokens_.emplace_back(token);
  index_.emplace(std::string(token), id);
  return id;
}

int Vocabulary::index_of(std::string_view token) const noexcept {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocabulary::contains(std::string_view token) const noexcept { return index_.find(token) != index_.end(); }

const std::string& Vocabulary::token(int index) const {
  if (index < 0 || index >= size()) throw InvalidInput("token index out of range");
  return tokens_[static_cast<std::size_t>(index)];
}

std::string_view Vocabulary::tag(kb::Base base) noexcept {
  switch (base) {
    case kb::Base::identification: return "<I>";
    case kb::Base::status: return "<S>";
    case kb::Base::behavior: return "<B>";
  }
  return kUnknownToken;
}

}  // namespace blcs::rn
