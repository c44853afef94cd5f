#pragma once

// In-memory corpora and bundles built from the synthetic generator.

#include <string>
#include <vector>

#include "mlcvm/corpus.hpp"
#include "mlcvm/embeddings.hpp"
#include "mlcvm/random.hpp"
#include "mlcvm/synthetic.hpp"

namespace fixtures {

inline mlcvm::Sentence to_sentence(const std::string& line, mlcvm::Vocabulary& vocab) {
  mlcvm::Sentence s;
  for (const auto& t : mlcvm::tokenize(line)) s.tokens.push_back(vocab.add(t));
  return s;
}

inline mlcvm::ParallelCorpus parallel(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b, const std::string& lang_a,
                                      const std::string& lang_b, mlcvm::Vocabulary& va,
                                      mlcvm::Vocabulary& vb) {
  mlcvm::ParallelCorpus c{lang_a, lang_b, {}, {}};
  for (std::size_t i = 0; i < a.size(); ++i)
    c.pairs.push_back({to_sentence(a[i], va), to_sentence(b[i], vb), i});
  return c;
}

// Tables initialized the way the CLI does it.
inline mlcvm::ModelBundle bundle_for(std::map<std::string, mlcvm::Vocabulary> vocabs, std::size_t dim,
                                     mlcvm::CompositionKind kind, std::uint64_t seed) {
  mlcvm::ModelBundle bundle(dim, kind);
  for (auto& [code, v] : vocabs) {
    auto t = mlcvm::init_table(v.size(), dim, mlcvm::derive_seed(seed, mlcvm::fnv1a(code)), code);
    bundle.add_language(code, std::move(v), std::move(t));
  }
  return bundle;
}

// Small bilingual corpus plus its freshly initialized bundle.
struct Toy {
  mlcvm::ParallelCorpus corpus;
  mlcvm::ModelBundle bundle{1, mlcvm::CompositionKind::Add};
};

inline Toy toy(std::size_t sentences, std::size_t latent_vocab, std::size_t dim,
               mlcvm::CompositionKind kind = mlcvm::CompositionKind::Add, std::uint64_t seed = 1) {
  mlcvm::synthetic::Options o;
  o.sentences = sentences;
  o.latent_vocab = latent_vocab;
  o.train_documents = 0;
  o.test_documents = 0;
  const auto latent = mlcvm::synthetic::generate(o);
  std::map<std::string, mlcvm::Vocabulary> vocabs;
  Toy t;
  t.corpus = parallel(mlcvm::synthetic::sentence_lines(latent, "en"),
                      mlcvm::synthetic::sentence_lines(latent, "de"), "en", "de", vocabs["en"], vocabs["de"]);
  t.bundle = bundle_for(std::move(vocabs), dim, kind, seed);
  return t;
}

}  // namespace fixtures
