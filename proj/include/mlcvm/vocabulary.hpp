#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mlcvm {

using TokenId = std::uint32_t;

// Placeholder id for tokens outside a frozen vocabulary. Never indexes a
// table; composition at evaluation time skips it.
inline constexpr TokenId kUnknownToken = std::numeric_limits<TokenId>::max();

// Bijection between token strings and dense ids [0, size()).
class Vocabulary {
 public:
  // Returns the existing id, or assigns the next one.
  TokenId add(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Ids in first-occurrence order; no frequency cutoff.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences);

}  // namespace mlcvm
