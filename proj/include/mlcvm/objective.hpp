#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlcvm/composition.hpp"
#include "mlcvm/corpus.hpp"
#include "mlcvm/embeddings.hpp"
#include "mlcvm/linalg.hpp"

namespace mlcvm {

struct ParamKey {
  std::string language;
  TokenId token = 0;
  auto operator<=>(const ParamKey&) const = default;
};

// d-vectors of partial derivatives keyed by (language, token). A missing key
// is a zero gradient. Iteration order is deterministic.
class SparseGradient {
 public:
  void accumulate(const std::string& language, TokenId token, ConstRow grad, double scale = 1.0);
  void merge(const SparseGradient& other);

  const Vec* find(const std::string& language, TokenId token) const;
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<ParamKey, Vec>& entries() const { return entries_; }

 private:
  std::map<ParamKey, Vec> entries_;
};

struct LossBreakdown {
  double hinge_total = 0.0;
  std::size_t active_noise_count = 0;
  // Filled by the optimizer; the objective leaves it at zero.
  double regularizer = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& other);
};

struct LossAndGradient {
  LossBreakdown loss;
  SparseGradient gradient;
};

struct LanguagePair {
  std::string source;
  std::string target;
};

// Squared Euclidean distance. Throws ContractError on length mismatch.
double energy(ConstRow fa, ConstRow gb);

// max(m + e_pos - e_neg, 0)
double hinge(double margin, double e_pos, double e_neg);

// Contrastive hinge of one aligned pair against k target-side noise
// sentences, with exact gradients (d loss / d parameter) for every word that
// takes part in an active hinge term.
LossAndGradient pair_loss_and_grads(const ParallelPair& pair, std::span<const NoiseSample> noise,
                                    const ModelBundle& bundle, const LanguagePair& languages,
                                    CompositionKind kind, double margin);

struct DocumentPair {
  std::vector<Sentence> source;
  std::vector<Sentence> target;
};

// Document-level hinge: sentence vectors are composed into a document
// vector by a second CVM of the same kind, and the gradient flows through
// both stages down to the words. Noise documents are target-side.
//
// With combine_sentence_signal, every aligned sentence pair j also adds
// pair_loss_and_grads against sentence_noise[j]; the documents must then
// have equal sentence counts.
LossAndGradient doc_loss_and_grads(const DocumentPair& docs,
                                   std::span<const std::vector<Sentence>> noise_docs,
                                   std::span<const std::vector<NoiseSample>> sentence_noise,
                                   const ModelBundle& bundle, const LanguagePair& languages,
                                   CompositionKind kind, double margin,
                                   bool combine_sentence_signal);

}  // namespace mlcvm
