#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlcvm/composition.hpp"
#include "mlcvm/corpus.hpp"
#include "mlcvm/embeddings.hpp"
#include "mlcvm/objective.hpp"

namespace mlcvm {

enum class TrainMode { Single, Joint };
std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view text);

struct TrainConfig {
  std::size_t dim = 128;
  double margin = 128.0;
  std::size_t noise = 50;
  double lambda = 1.0;
  double step = 0.05;
  std::size_t batch = 50;
  std::size_t epochs = 100;
  CompositionKind kind = CompositionKind::Add;
  bool doc_signal = false;
  TrainMode mode = TrainMode::Single;
  std::uint64_t seed = 1;
  double epsilon = 1e-6;
  // 1 = deterministic single-threaded evaluation.
  std::size_t threads = 1;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;
};

// Diagonal AdaGrad accumulators, one matrix per language shaped like its
// table. Rows never touched stay zero.
class AdaGradState {
 public:
  // Zero accumulators for every language in bundle.
  static AdaGradState zeros_like(const ModelBundle& bundle);

  EmbeddingTable& accumulator(const std::string& language);
  const EmbeddingTable& accumulator(const std::string& language) const;
  bool contains(const std::string& language) const { return acc_.count(language) != 0; }
  const std::map<std::string, EmbeddingTable>& all() const { return acc_; }
  void set(const std::string& language, EmbeddingTable acc) { acc_[language] = std::move(acc); }

  bool operator==(const AdaGradState&) const = default;

 private:
  std::map<std::string, EmbeddingTable> acc_;
};

// One AdaGrad step on every parameter row in grads. The L2 term lambda * w
// is added for touched rows only; then G += g^2 and w -= step g / sqrt(G+eps).
// Rejects the whole update (no mutation) if any gradient is non-finite.
// Returns (lambda/2) * sum of squared norms of the touched rows before the step.
double adagrad_apply(ModelBundle& bundle, const SparseGradient& grads, AdaGradState& state,
                     const TrainConfig& config);

struct EpochStats {
  std::size_t epoch = 0;
  double hinge_total = 0.0;
  double regularizer = 0.0;
  // Active hinge terms over all hinge terms evaluated.
  double active_fraction = 0.0;
  std::size_t updates = 0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

// Trains config.epochs epochs, numbered first_epoch, first_epoch+1, ...
// (the epoch number seeds shuffling and noise, so resuming at the right
// number continues the same run).
TrainReport train_single(const ParallelCorpus& corpus, ModelBundle& bundle, AdaGradState& state,
                         const TrainConfig& config, std::size_t first_epoch = 0);
TrainReport train_single(const ParallelCorpus& corpus, ModelBundle& bundle,
                         const TrainConfig& config);

// All sub-corpora must share the source (pivot) language. Minibatches are
// interleaved round-robin across sub-corpora within each epoch.
TrainReport train_joint(std::span<const ParallelCorpus> corpora, ModelBundle& bundle,
                        AdaGradState& state, const TrainConfig& config,
                        std::size_t first_epoch = 0);
TrainReport train_joint(std::span<const ParallelCorpus> corpora, ModelBundle& bundle,
                        const TrainConfig& config);

struct Checkpoint {
  ModelBundle bundle;
  AdaGradState state;
  TrainConfig config;
  std::size_t epochs_done = 0;
};

inline constexpr std::string_view kStateFile = "adagrad.state";
inline constexpr std::string_view kMetaFile = "meta.ini";
inline constexpr std::string_view kEmbeddingSuffix = ".vec";

// Directory layout: <lang>.vec per language, adagrad.state, meta.ini.
void checkpoint(const ModelBundle& bundle, const AdaGradState& state, const TrainConfig& config,
                std::size_t epochs_done, const std::filesystem::path& dir);
Checkpoint resume(const std::filesystem::path& dir);

// Embeddings only (no optimizer state needed), for evaluation and queries.
ModelBundle load_model(const std::filesystem::path& dir);

}  // namespace mlcvm
