#include "mlcvm/objective.hpp"

#include "mlcvm/error.hpp"

namespace mlcvm {

void SparseGradient::accumulate(const std::string& language, TokenId token, ConstRow grad,
                                double scale) {
  auto [it, inserted] = entries_.try_emplace(ParamKey{language, token});
  if (inserted) it->second.assign(grad.size(), 0.0);
  axpy(scale, grad, it->second);
}

void SparseGradient::merge(const SparseGradient& other) {
  for (const auto& [key, grad] : other.entries_) accumulate(key.language, key.token, grad);
}

const Vec* SparseGradient::find(const std::string& language, TokenId token) const {
  auto it = entries_.find(ParamKey{language, token});
  return it == entries_.end() ? nullptr : &it->second;
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& other) {
  hinge_total += other.hinge_total;
  active_noise_count += other.active_noise_count;
  regularizer += other.regularizer;
  return *this;
}

double energy(ConstRow fa, ConstRow gb) {
  if (fa.size() != gb.size())
    throw ContractError("energy: vectors of length " + std::to_string(fa.size()) + " and " +
                        std::to_string(gb.size()));
  return squared_distance(fa, gb);
}

double hinge(double margin, double e_pos, double e_neg) {
  const double v = margin + e_pos - e_neg;
  return v > 0.0 ? v : 0.0;
}

namespace {

struct SentenceEncoding {
  const Sentence* sentence = nullptr;
  CompositionResult result;

  const Vec& output() const { return result.output; }
};

struct DocumentEncoding {
  std::vector<SentenceEncoding> sentences;
  CompositionResult result;

  const Vec& output() const { return result.output; }
};

SentenceEncoding encode(const Sentence& sentence, const EmbeddingTable& table,
                        CompositionKind kind) {
  std::vector<ConstRow> rows;
  rows.reserve(sentence.tokens.size());
  for (TokenId id : sentence.tokens) {
    if (id >= table.rows())
      throw LookupError("token id " + std::to_string(id) + " not in the '" + table.language() +
                        "' table (" + std::to_string(table.rows()) + " rows)");
    rows.push_back(table.row(id));
  }
  return {&sentence, compose(kind, rows)};
}

DocumentEncoding encode(const std::vector<Sentence>& doc, const EmbeddingTable& table,
                        CompositionKind kind) {
  if (doc.empty()) throw CompositionError("document has no sentences");
  DocumentEncoding enc;
  enc.sentences.reserve(doc.size());
  std::vector<ConstRow> vectors;
  for (const auto& s : doc) enc.sentences.push_back(encode(s, table, kind));
  for (const auto& s : enc.sentences) vectors.push_back(s.output());
  enc.result = compose_document(vectors, kind);
  return enc;
}

void scatter(const SentenceEncoding& enc, ConstRow grad_output, const std::string& language,
             SparseGradient& out) {
  const auto grads = backprop(grad_output, enc.result);
  for (std::size_t i = 0; i < grads.size(); ++i)
    out.accumulate(language, enc.sentence->tokens[i], grads[i]);
}

void scatter(const DocumentEncoding& enc, ConstRow grad_output, const std::string& language,
             SparseGradient& out) {
  const auto grads = backprop(grad_output, enc.result);
  for (std::size_t j = 0; j < grads.size(); ++j) scatter(enc.sentences[j], grads[j], language, out);
}

// Sum over noise of [m + |a - b|^2 - |a - n_i|^2]_+ and its gradient with
// respect to the three encodings, pushed down to the words.
template <typename Encoding>
LossBreakdown contrast(const Encoding& a, const Encoding& b, std::span<const Encoding> noise,
                       double margin, const LanguagePair& languages, SparseGradient& out) {
  LossBreakdown loss;
  const Vec& fa = a.output();
  const Vec& gb = b.output();
  const std::size_t dim = fa.size();
  const double e_pos = energy(fa, gb);

  Vec grad_a(dim, 0.0), grad_b(dim, 0.0), grad_n(dim);
  for (const auto& n : noise) {
    const Vec& gn = n.output();
    const double e_neg = energy(fa, gn);
    if (margin + e_pos - e_neg <= 0.0) continue;
    loss.hinge_total += hinge(margin, e_pos, e_neg);
    ++loss.active_noise_count;
    for (std::size_t c = 0; c < dim; ++c) {
      const double pos = 2.0 * (fa[c] - gb[c]);
      const double neg = 2.0 * (fa[c] - gn[c]);
      grad_a[c] += pos - neg;
      grad_b[c] -= pos;
      grad_n[c] = neg;
    }
    scatter(n, grad_n, languages.target, out);
  }
  if (loss.active_noise_count > 0) {
    scatter(a, grad_a, languages.source, out);
    scatter(b, grad_b, languages.target, out);
  }
  return loss;
}

}  // namespace

LossAndGradient pair_loss_and_grads(const ParallelPair& pair, std::span<const NoiseSample> noise,
                                    const ModelBundle& bundle, const LanguagePair& languages,
                                    CompositionKind kind, double margin) {
  const EmbeddingTable& source = bundle.table(languages.source);
  const EmbeddingTable& target = bundle.table(languages.target);
  const auto a = encode(pair.source, source, kind);
  const auto b = encode(pair.target, target, kind);
  std::vector<SentenceEncoding> encoded_noise;
  encoded_noise.reserve(noise.size());
  for (const auto& n : noise) encoded_noise.push_back(encode(n.sentence, target, kind));

  LossAndGradient result;
  result.loss = contrast<SentenceEncoding>(a, b, encoded_noise, margin, languages, result.gradient);
  return result;
}

LossAndGradient doc_loss_and_grads(const DocumentPair& docs,
                                   std::span<const std::vector<Sentence>> noise_docs,
                                   std::span<const std::vector<NoiseSample>> sentence_noise,
                                   const ModelBundle& bundle, const LanguagePair& languages,
                                   CompositionKind kind, double margin,
                                   bool combine_sentence_signal) {
  if (combine_sentence_signal) {
    if (docs.source.size() != docs.target.size())
      throw AlignmentError("cannot combine sentence signal: documents have " +
                           std::to_string(docs.source.size()) + " and " +
                           std::to_string(docs.target.size()) + " sentences");
    if (sentence_noise.size() != docs.source.size())
      throw ContractError("sentence noise given for " + std::to_string(sentence_noise.size()) +
                          " of " + std::to_string(docs.source.size()) + " sentence pairs");
  }
  const EmbeddingTable& source = bundle.table(languages.source);
  const EmbeddingTable& target = bundle.table(languages.target);
  const auto a = encode(docs.source, source, kind);
  const auto b = encode(docs.target, target, kind);
  std::vector<DocumentEncoding> encoded_noise;
  encoded_noise.reserve(noise_docs.size());
  for (const auto& n : noise_docs) encoded_noise.push_back(encode(n, target, kind));

  LossAndGradient result;
  result.loss = contrast<DocumentEncoding>(a, b, encoded_noise, margin, languages, result.gradient);

  if (combine_sentence_signal) {
    for (std::size_t j = 0; j < docs.source.size(); ++j) {
      const ParallelPair pair{docs.source[j], docs.target[j], j};
      auto sentence = pair_loss_and_grads(pair, sentence_noise[j], bundle, languages, kind, margin);
      result.loss += sentence.loss;
      result.gradient.merge(sentence.gradient);
    }
  }
  return result;
}

}  // namespace mlcvm
