#include "mlcvm/vocabulary.hpp"

#include "mlcvm/error.hpp"

namespace mlcvm {

TokenId Vocabulary::add(std::string_view token) {
  std::string key(token);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  if (tokens_.size() >= kUnknownToken) throw ContractError("vocabulary is full");
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw LookupError("token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences) {
  Vocabulary vocab;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) vocab.add(token);
  return vocab;
}

}  // namespace mlcvm
