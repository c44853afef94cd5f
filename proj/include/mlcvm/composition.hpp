#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mlcvm/linalg.hpp"

namespace mlcvm {

// Compositional vector models: map an ordered sequence of d-vectors (words
// of a sentence, or sentence vectors of a document) to a single d-vector.
enum class CompositionKind {
  Add,  // sum of inputs
  Bi,   // sum over i of tanh(x_{i-1} + x_i), x_0 = 0
};

std::string_view to_string(CompositionKind kind);
// Accepts "add" / "bi" (case-insensitive). Throws ConfigError otherwise.
CompositionKind parse_composition_kind(std::string_view text);

struct CompositionResult {
  CompositionKind kind = CompositionKind::Add;
  Vec output;
  // Bi: one tanh output per bigram, activations[i] belongs to the bigram
  // ending at input i. Empty for Add.
  std::vector<Vec> activations;
  std::size_t n_inputs = 0;
};

CompositionResult compose_add(std::span<const ConstRow> inputs);
CompositionResult compose_bi(std::span<const ConstRow> inputs);
CompositionResult compose(CompositionKind kind, std::span<const ConstRow> inputs);

// Second-stage composition over sentence vectors, same family as the
// sentence stage.
CompositionResult compose_document(std::span<const ConstRow> sentence_vectors,
                                   CompositionKind kind);

// Input gradients given the gradient of the composed output.
std::vector<Vec> backprop_add(ConstRow grad_output, std::size_t n_inputs);
std::vector<Vec> backprop_bi(ConstRow grad_output, const CompositionResult& result,
                             std::size_t n_inputs);
std::vector<Vec> backprop(ConstRow grad_output, const CompositionResult& result);

std::vector<ConstRow> as_rows(const std::vector<Vec>& vectors);

}  // namespace mlcvm
