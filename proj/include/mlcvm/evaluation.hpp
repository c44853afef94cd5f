#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mlcvm/composition.hpp"
#include "mlcvm/corpus.hpp"
#include "mlcvm/embeddings.hpp"
#include "mlcvm/linalg.hpp"

namespace mlcvm {

enum class ReprLevel {
  SentenceAverage,  // mean of sentence CVM outputs
  DocCvm,           // second-stage CVM over sentence outputs
};
ReprLevel parse_repr_level(std::string_view text);

struct DocVector {
  Vec vector;
  std::string doc_id;
  std::set<std::string> labels;
};

// Unknown tokens and sentences without any known token are skipped. Throws
// RepresentationError if nothing is left.
DocVector doc_representation(const LabeledDocument& doc, const EmbeddingTable& table,
                             CompositionKind kind, ReprLevel level);

// Multiclass averaged perceptron. Features get a constant bias input
// appended, so every weight vector has dim + 1 entries.
class PerceptronModel {
 public:
  PerceptronModel(std::size_t classes, std::size_t dim);

  std::size_t classes() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }

  // Argmax over averaged scores; ties go to the lowest class id.
  std::size_t predict(ConstRow x) const;
  double averaged_score(std::size_t cls, ConstRow x) const;

  const std::vector<Vec>& weights() const { return weights_; }
  const std::vector<Vec>& averaged() const { return averaged_; }
  std::size_t snapshots() const { return snapshots_; }

  // Training internals.
  std::size_t predict_current(ConstRow x) const;
  void update(std::size_t truth, std::size_t predicted, ConstRow x, double rate);
  void snapshot();
  void finalize();
  void scale_averaged(double factor);

 private:
  std::size_t dim_;
  std::vector<Vec> weights_;
  std::vector<Vec> sums_;
  std::vector<Vec> averaged_;
  std::size_t snapshots_ = 0;
};

struct PerceptronOptions {
  std::size_t epochs = 10;
  double learning_rate = 1.0;
  std::uint64_t seed = 1;
};

struct ClassExample {
  Vec x;
  std::size_t label = 0;
};

// Throws DegenerateTaskError if fewer than two distinct classes occur.
PerceptronModel train_multiclass(std::span<const ClassExample> examples,
                                 const PerceptronOptions& options);

// Binary averaged perceptron: positive iff the averaged score is > 0.
class BinaryPerceptron {
 public:
  explicit BinaryPerceptron(std::size_t dim);
  bool predict(ConstRow x) const { return averaged_score(x) > 0.0; }
  double averaged_score(ConstRow x) const;
  const Vec& averaged() const { return averaged_; }

  void train(std::span<const Vec> xs, const std::vector<bool>& ys, const PerceptronOptions& options);

 private:
  std::size_t dim_;
  Vec averaged_;
};

struct MultiLabelExample {
  Vec x;
  std::set<std::string> labels;
};

struct MultiLabelModel {
  std::map<std::string, BinaryPerceptron> models;
  // Labels without a single positive example: their model stays all-zero
  // and always predicts negative.
  std::set<std::string> without_positives;

  std::set<std::string> predict(ConstRow x) const;
};

// One-vs-rest; label l trains with seed derive_seed(options.seed, fnv1a(l)).
MultiLabelModel train_multilabel(std::span<const MultiLabelExample> examples,
                                 const std::set<std::string>& label_universe,
                                 const PerceptronOptions& options);

// Pooled over all (document, label) decisions. 0 when P + R = 0.
double micro_f1(std::span<const std::set<std::string>> predictions,
                std::span<const std::set<std::string>> gold);
// Mean per-label F1 over the labels occurring in predictions or gold.
double macro_f1(std::span<const std::set<std::string>> predictions,
                std::span<const std::set<std::string>> gold);

enum class TaskKind { SingleLabel, MultiLabel };
TaskKind parse_task_kind(std::string_view text);

struct ReprConfig {
  CompositionKind kind = CompositionKind::Add;
  ReprLevel level = ReprLevel::SentenceAverage;
  TaskKind task = TaskKind::SingleLabel;
  // Multi-label only: keep the most frequent training labels.
  std::size_t top_labels = 15;
  PerceptronOptions perceptron;
};

struct EvalEntry {
  std::string train_language;
  std::string test_language;
  std::string metric;
  double value = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  // accuracy (single-label) or micro_f1 (multi-label), one per train/test pair
  std::vector<EvalEntry> primary;
  // majority_baseline, macro_f1, ...
  std::vector<EvalEntry> extra;
  // Multi-label labels that had no positive training example.
  std::set<std::string> flagged_labels;

  void append(const EvalReport& other);
};

// Classifier trained on train_docs (train_language embeddings), tested on
// test_docs (test_language embeddings).
EvalReport cldc_run(const std::string& train_language, std::span<const LabeledDocument> train_docs,
                    const std::string& test_language, std::span<const LabeledDocument> test_docs,
                    const ModelBundle& bundle, const ReprConfig& config);

using DocumentSets = std::map<std::string, std::vector<LabeledDocument>>;

// cldc_run for every ordered pair of distinct languages. Each pair uses a
// seed derived from its language codes, so entries do not depend on order.
EvalReport transfer_matrix(const std::vector<std::string>& languages, const DocumentSets& train_docs,
                           const DocumentSets& test_docs, const ModelBundle& bundle,
                           const ReprConfig& config);

// Header row, then train_lang TAB test_lang TAB metric TAB value TAB support.
void write_report_tsv(std::ostream& out, std::span<const EvalEntry> entries);

}  // namespace mlcvm
