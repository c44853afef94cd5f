#include "mlcvm/evaluation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <numeric>
#include <ostream>

#include "mlcvm/error.hpp"
#include "mlcvm/random.hpp"

namespace mlcvm {

ReprLevel parse_repr_level(std::string_view text) {
  if (text == "avg" || text == "sentence-average") return ReprLevel::SentenceAverage;
  if (text == "doc" || text == "doc-cvm") return ReprLevel::DocCvm;
  throw ConfigError("unknown representation '" + std::string(text) + "' (expected avg or doc)");
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "single") return TaskKind::SingleLabel;
  if (text == "multi") return TaskKind::MultiLabel;
  throw ConfigError("unknown task '" + std::string(text) + "' (expected single or multi)");
}

DocVector doc_representation(const LabeledDocument& doc, const EmbeddingTable& table,
                             CompositionKind kind, ReprLevel level) {
  std::vector<Vec> sentence_vectors;
  std::vector<ConstRow> rows;
  for (const auto& sentence : doc.sentences) {
    rows.clear();
    for (TokenId id : sentence.tokens)
      if (id < table.rows()) rows.push_back(table.row(id));
    if (rows.empty()) continue;
    sentence_vectors.push_back(compose(kind, rows).output);
  }
  if (sentence_vectors.empty())
    throw RepresentationError("document '" + doc.id + "' has no in-vocabulary token");

  DocVector result{{}, doc.id, doc.labels};
  if (level == ReprLevel::SentenceAverage) {
    result.vector.assign(table.dim(), 0.0);
    for (const auto& v : sentence_vectors) axpy(1.0, v, result.vector);
    for (double& v : result.vector) v /= static_cast<double>(sentence_vectors.size());
  } else {
    result.vector = compose_document(as_rows(sentence_vectors), kind).output;
  }
  return result;
}

namespace {

double biased_dot(ConstRow w, ConstRow x) { return dot(w.first(x.size()), x) + w[x.size()]; }

void biased_axpy(double alpha, ConstRow x, Row w) {
  axpy(alpha, x, w.first(x.size()));
  w[x.size()] += alpha;
}

std::size_t argmax_scores(const std::vector<Vec>& weights, ConstRow x) {
  std::size_t best = 0;
  double best_score = biased_dot(weights[0], x);
  for (std::size_t c = 1; c < weights.size(); ++c) {
    const double s = biased_dot(weights[c], x);
    if (s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, epoch));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

}  // namespace

PerceptronModel::PerceptronModel(std::size_t classes, std::size_t dim)
    : dim_(dim),
      weights_(classes, Vec(dim + 1, 0.0)),
      sums_(classes, Vec(dim + 1, 0.0)),
      averaged_(classes, Vec(dim + 1, 0.0)) {}

std::size_t PerceptronModel::predict(ConstRow x) const { return argmax_scores(averaged_, x); }

double PerceptronModel::averaged_score(std::size_t cls, ConstRow x) const {
  return biased_dot(averaged_.at(cls), x);
}

std::size_t PerceptronModel::predict_current(ConstRow x) const { return argmax_scores(weights_, x); }

void PerceptronModel::update(std::size_t truth, std::size_t predicted, ConstRow x, double rate) {
  biased_axpy(rate, x, weights_[truth]);
  biased_axpy(-rate, x, weights_[predicted]);
}

void PerceptronModel::snapshot() {
  for (std::size_t c = 0; c < weights_.size(); ++c) axpy(1.0, weights_[c], sums_[c]);
  ++snapshots_;
}

void PerceptronModel::finalize() {
  for (std::size_t c = 0; c < weights_.size(); ++c)
    for (std::size_t i = 0; i <= dim_; ++i)
      averaged_[c][i] = snapshots_ ? sums_[c][i] / static_cast<double>(snapshots_) : 0.0;
}

void PerceptronModel::scale_averaged(double factor) {
  for (auto& w : averaged_)
    for (double& v : w) v *= factor;
}

PerceptronModel train_multiclass(std::span<const ClassExample> examples,
                                 const PerceptronOptions& options) {
  std::set<std::size_t> classes;
  for (const auto& e : examples) classes.insert(e.label);
  if (classes.size() < 2)
    throw DegenerateTaskError("multiclass training needs at least two classes, found " +
                              std::to_string(classes.size()));
  const std::size_t dim = examples.front().x.size();
  for (const auto& e : examples)
    if (e.x.size() != dim) throw ContractError("training examples differ in dimensionality");

  PerceptronModel model(*classes.rbegin() + 1, dim);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i : shuffled_order(examples.size(), options.seed, epoch)) {
      const auto& e = examples[i];
      const std::size_t predicted = model.predict_current(e.x);
      if (predicted != e.label) model.update(e.label, predicted, e.x, options.learning_rate);
      model.snapshot();
    }
  }
  model.finalize();
  return model;
}

BinaryPerceptron::BinaryPerceptron(std::size_t dim) : dim_(dim), averaged_(dim + 1, 0.0) {}

double BinaryPerceptron::averaged_score(ConstRow x) const { return biased_dot(averaged_, x); }

void BinaryPerceptron::train(std::span<const Vec> xs, const std::vector<bool>& ys,
                             const PerceptronOptions& options) {
  if (xs.size() != ys.size()) throw ContractError("binary perceptron: xs/ys length mismatch");
  Vec w(dim_ + 1, 0.0), sum(dim_ + 1, 0.0);
  std::size_t snapshots = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i : shuffled_order(xs.size(), options.seed, epoch)) {
      const bool predicted = biased_dot(w, xs[i]) > 0.0;
      if (predicted != ys[i]) biased_axpy(ys[i] ? options.learning_rate : -options.learning_rate, xs[i], w);
      axpy(1.0, w, sum);
      ++snapshots;
    }
  }
  for (std::size_t i = 0; i <= dim_; ++i)
    averaged_[i] = snapshots ? sum[i] / static_cast<double>(snapshots) : 0.0;
}

std::set<std::string> MultiLabelModel::predict(ConstRow x) const {
  std::set<std::string> labels;
  for (const auto& [label, model] : models)
    if (model.predict(x)) labels.insert(label);
  return labels;
}

MultiLabelModel train_multilabel(std::span<const MultiLabelExample> examples,
                                 const std::set<std::string>& label_universe,
                                 const PerceptronOptions& options) {
  if (label_universe.empty()) throw ContractError("train_multilabel: empty label universe");
  const std::size_t dim = examples.empty() ? 0 : examples.front().x.size();
  std::vector<Vec> xs;
  for (const auto& e : examples) {
    if (e.x.size() != dim) throw ContractError("training examples differ in dimensionality");
    xs.push_back(e.x);
  }

  MultiLabelModel result;
  for (const auto& label : label_universe) {
    std::vector<bool> ys;
    std::size_t positives = 0;
    for (const auto& e : examples) {
      ys.push_back(e.labels.count(label) != 0);
      positives += ys.back();
    }
    PerceptronOptions per_label = options;
    per_label.seed = derive_seed(options.seed, fnv1a(label));
    BinaryPerceptron model(dim);
    model.train(xs, ys, per_label);
    if (positives == 0) result.without_positives.insert(label);
    result.models.emplace(label, std::move(model));
  }
  return result;
}

namespace {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw ContractError("F1: " + std::to_string(a) + " predictions for " + std::to_string(b) +
                        " gold label sets");
}

}  // namespace

double micro_f1(std::span<const std::set<std::string>> predictions,
                std::span<const std::set<std::string>> gold) {
  check_lengths(predictions.size(), gold.size());
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& l : predictions[i]) (gold[i].count(l) ? tp : fp) += 1;
    for (const auto& l : gold[i])
      if (!predictions[i].count(l)) ++fn;
  }
  return f1_from_counts(tp, fp, fn);
}

double macro_f1(std::span<const std::set<std::string>> predictions,
                std::span<const std::set<std::string>> gold) {
  check_lengths(predictions.size(), gold.size());
  std::map<std::string, std::array<std::size_t, 3>> counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& l : predictions[i]) ++counts[l][gold[i].count(l) ? 0 : 1];
    for (const auto& l : gold[i])
      if (!predictions[i].count(l)) ++counts[l][2];
  }
  if (counts.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [label, c] : counts) total += f1_from_counts(c[0], c[1], c[2]);
  return total / static_cast<double>(counts.size());
}

void EvalReport::append(const EvalReport& other) {
  primary.insert(primary.end(), other.primary.begin(), other.primary.end());
  extra.insert(extra.end(), other.extra.begin(), other.extra.end());
  flagged_labels.insert(other.flagged_labels.begin(), other.flagged_labels.end());
}

namespace {

std::vector<DocVector> represent(std::span<const LabeledDocument> docs, const EmbeddingTable& table,
                                 const ReprConfig& config) {
  std::vector<DocVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(doc_representation(d, table, config.kind, config.level));
  return out;
}

EvalReport run_single_label(const std::string& train_language, const std::vector<DocVector>& train,
                            const std::string& test_language, const std::vector<DocVector>& test,
                            const ReprConfig& config) {
  std::map<std::string, std::size_t> class_ids;
  for (const auto& d : train)
    if (!d.labels.empty()) class_ids.emplace(*d.labels.begin(), 0);
  std::vector<std::string> class_names;
  for (auto& [name, id] : class_ids) {
    id = class_names.size();
    class_names.push_back(name);
  }

  std::vector<ClassExample> examples;
  std::vector<std::size_t> class_counts(class_names.size(), 0);
  for (const auto& d : train) {
    if (d.labels.empty()) continue;
    const std::size_t id = class_ids.at(*d.labels.begin());
    examples.push_back({d.vector, id});
    ++class_counts[id];
  }
  const PerceptronModel model = train_multiclass(examples, config.perceptron);
  const std::size_t majority =
      static_cast<std::size_t>(std::max_element(class_counts.begin(), class_counts.end()) -
                               class_counts.begin());

  std::size_t support = 0, correct = 0, majority_correct = 0;
  for (const auto& d : test) {
    if (d.labels.empty()) continue;
    ++support;
    const std::string& gold = *d.labels.begin();
    if (class_names[model.predict(d.vector)] == gold) ++correct;
    if (class_names[majority] == gold) ++majority_correct;
  }
  const double denom = support ? static_cast<double>(support) : 1.0;
  EvalReport report;
  report.primary.push_back(
      {train_language, test_language, "accuracy", static_cast<double>(correct) / denom, support});
  report.extra.push_back({train_language, test_language, "majority_baseline",
                          static_cast<double>(majority_correct) / denom, support});
  return report;
}

EvalReport run_multi_label(const std::string& train_language, const std::vector<DocVector>& train,
                           const std::string& test_language, const std::vector<DocVector>& test,
                           const ReprConfig& config) {
  std::vector<LabeledDocument> label_carriers(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) label_carriers[i].labels = train[i].labels;
  const TopLabels top = select_top_labels(label_carriers, config.top_labels);
  if (top.labels.empty()) throw DegenerateTaskError("no labels in the training documents");

  auto keep = [&](const std::set<std::string>& labels) {
    std::set<std::string> out;
    for (const auto& l : labels)
      if (top.labels.count(l)) out.insert(l);
    return out;
  };
  std::vector<MultiLabelExample> examples;
  for (const auto& d : train) examples.push_back({d.vector, keep(d.labels)});
  const MultiLabelModel model = train_multilabel(examples, top.labels, config.perceptron);

  std::vector<std::set<std::string>> predictions, gold;
  for (const auto& d : test) {
    predictions.push_back(model.predict(d.vector));
    gold.push_back(keep(d.labels));
  }
  EvalReport report;
  report.primary.push_back(
      {train_language, test_language, "micro_f1", micro_f1(predictions, gold), test.size()});
  report.extra.push_back(
      {train_language, test_language, "macro_f1", macro_f1(predictions, gold), test.size()});
  report.flagged_labels = model.without_positives;
  return report;
}

}  // namespace

EvalReport cldc_run(const std::string& train_language, std::span<const LabeledDocument> train_docs,
                    const std::string& test_language, std::span<const LabeledDocument> test_docs,
                    const ModelBundle& bundle, const ReprConfig& config) {
  const auto train = represent(train_docs, bundle.table(train_language), config);
  const auto test = represent(test_docs, bundle.table(test_language), config);
  if (config.task == TaskKind::SingleLabel)
    return run_single_label(train_language, train, test_language, test, config);
  return run_multi_label(train_language, train, test_language, test, config);
}

EvalReport transfer_matrix(const std::vector<std::string>& languages, const DocumentSets& train_docs,
                           const DocumentSets& test_docs, const ModelBundle& bundle,
                           const ReprConfig& config) {
  if (languages.size() < 2) throw ContractError("transfer matrix needs at least two languages");
  auto docs_for = [](const DocumentSets& sets, const std::string& code) -> const auto& {
    auto it = sets.find(code);
    if (it == sets.end()) throw LookupError("no documents for language '" + code + "'");
    return it->second;
  };
  EvalReport report;
  for (const auto& from : languages) {
    for (const auto& to : languages) {
      if (from == to) continue;
      ReprConfig pair_config = config;
      pair_config.perceptron.seed = derive_seed(config.perceptron.seed, fnv1a(from + ">" + to));
      report.append(cldc_run(from, docs_for(train_docs, from), to, docs_for(test_docs, to), bundle,
                             pair_config));
    }
  }
  return report;
}

void write_report_tsv(std::ostream& out, std::span<const EvalEntry> entries) {
  out << "train_lang\ttest_lang\tmetric\tvalue\tsupport\n";
  std::array<char, 32> buf{};
  for (const auto& e : entries) {
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), e.value);
    out << e.train_language << '\t' << e.test_language << '\t' << e.metric << '\t'
        << std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())) << '\t'
        << e.support << '\n';
  }
}

}  // namespace mlcvm
