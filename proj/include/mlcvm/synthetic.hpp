#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mlcvm::synthetic {

// Generator for desk-scale cross-lingual experiments.
//
// Latent sentences are sequences of latent word ids. Each sentence (and each
// classification document) has one of `topics` labels; a word is drawn from
// its topic's block of the latent vocabulary with probability topic_prob,
// otherwise uniformly from the whole vocabulary. A language renders latent
// word w as "<lang>_<perm_lang(w)>" for a language-specific permutation, so
// surface vocabularies are disjoint and deterministic.
struct Options {
  std::size_t latent_vocab = 200;
  std::size_t topics = 4;
  std::size_t sentences = 500;
  std::size_t min_length = 4;
  std::size_t max_length = 10;
  double topic_prob = 0.7;
  std::size_t train_documents = 200;
  std::size_t test_documents = 200;
  std::size_t sentences_per_document = 3;
  std::uint64_t seed = 2014;
};

struct LatentSentence {
  std::vector<std::size_t> words;
  std::size_t topic = 0;
};

struct LatentDocument {
  std::string id;
  std::vector<std::vector<std::size_t>> sentences;
  std::size_t topic = 0;
};

struct LatentCorpus {
  Options options;
  std::vector<LatentSentence> sentences;
  std::vector<LatentDocument> train_documents;
  std::vector<LatentDocument> test_documents;
};

LatentCorpus generate(const Options& options);

std::string topic_label(std::size_t topic);
// Surface form of every latent word, indexed by latent id.
std::vector<std::string> surface_vocabulary(const LatentCorpus& corpus, const std::string& language);
std::string surface_word(const LatentCorpus& corpus, const std::string& language,
                         std::size_t latent_word);

// One line per latent sentence.
std::vector<std::string> sentence_lines(const LatentCorpus& corpus, const std::string& language);

// Lines in the labeled document format.
std::vector<std::string> document_lines(const LatentCorpus& corpus,
                                        const std::vector<LatentDocument>& documents,
                                        const std::string& language);

}  // namespace mlcvm::synthetic
