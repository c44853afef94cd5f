#include "mlcvm/composition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "mlcvm/error.hpp"

namespace mlcvm {

namespace {

std::size_t check_inputs(std::span<const ConstRow> inputs) {
  if (inputs.empty()) throw CompositionError("cannot compose an empty input sequence");
  const std::size_t dim = inputs.front().size();
  for (const auto& x : inputs)
    if (x.size() != dim) throw CompositionError("composition inputs differ in dimensionality");
  return dim;
}

}  // namespace

std::string_view to_string(CompositionKind kind) {
  return kind == CompositionKind::Add ? "add" : "bi";
}

CompositionKind parse_composition_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "add") return CompositionKind::Add;
  if (lower == "bi") return CompositionKind::Bi;
  throw ConfigError("unknown composition '" + std::string(text) + "' (expected add or bi)");
}

CompositionResult compose_add(std::span<const ConstRow> inputs) {
  const std::size_t dim = check_inputs(inputs);
  CompositionResult result;
  result.kind = CompositionKind::Add;
  result.n_inputs = inputs.size();
  result.output.assign(dim, 0.0);
  for (const auto& x : inputs) axpy(1.0, x, result.output);
  return result;
}

CompositionResult compose_bi(std::span<const ConstRow> inputs) {
  const std::size_t dim = check_inputs(inputs);
  CompositionResult result;
  result.kind = CompositionKind::Bi;
  result.n_inputs = inputs.size();
  result.output.assign(dim, 0.0);
  result.activations.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Vec t(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const double previous = i == 0 ? 0.0 : inputs[i - 1][c];
      t[c] = std::tanh(previous + inputs[i][c]);
      result.output[c] += t[c];
    }
    result.activations.push_back(std::move(t));
  }
  return result;
}

CompositionResult compose(CompositionKind kind, std::span<const ConstRow> inputs) {
  return kind == CompositionKind::Add ? compose_add(inputs) : compose_bi(inputs);
}

CompositionResult compose_document(std::span<const ConstRow> sentence_vectors,
                                   CompositionKind kind) {
  return compose(kind, sentence_vectors);
}

std::vector<Vec> backprop_add(ConstRow grad_output, std::size_t n_inputs) {
  if (n_inputs == 0) throw ContractError("backprop_add needs at least one input");
  return std::vector<Vec>(n_inputs, Vec(grad_output.begin(), grad_output.end()));
}

std::vector<Vec> backprop_bi(ConstRow grad_output, const CompositionResult& result,
                             std::size_t n_inputs) {
  if (result.kind != CompositionKind::Bi || n_inputs == 0 ||
      result.activations.size() != n_inputs || result.n_inputs != n_inputs)
    throw ContractError("backprop_bi: result does not belong to a BI composition of " +
                        std::to_string(n_inputs) + " inputs");
  const std::size_t dim = grad_output.size();
  // delta_i = g * (1 - t_i^2); bigram i feeds inputs i-1 and i. The zero
  // pad before input 0 takes no gradient.
  std::vector<Vec> grads(n_inputs, Vec(dim, 0.0));
  for (std::size_t i = 0; i < n_inputs; ++i) {
    const Vec& t = result.activations[i];
    if (t.size() != dim) throw ContractError("backprop_bi: gradient dimensionality mismatch");
    for (std::size_t c = 0; c < dim; ++c) {
      const double delta = grad_output[c] * (1.0 - t[c] * t[c]);
      grads[i][c] += delta;
      if (i > 0) grads[i - 1][c] += delta;
    }
  }
  return grads;
}

std::vector<Vec> backprop(ConstRow grad_output, const CompositionResult& result) {
  if (result.kind == CompositionKind::Add) return backprop_add(grad_output, result.n_inputs);
  return backprop_bi(grad_output, result, result.n_inputs);
}

std::vector<ConstRow> as_rows(const std::vector<Vec>& vectors) {
  return {vectors.begin(), vectors.end()};
}

}  // namespace mlcvm
