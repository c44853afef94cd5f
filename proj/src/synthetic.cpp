#include "mlcvm/synthetic.hpp"

#include <numeric>
#include <span>

#include "mlcvm/error.hpp"
#include "mlcvm/random.hpp"

namespace mlcvm::synthetic {

namespace {

std::vector<std::size_t> draw_sentence(const Options& o, std::size_t topic, Rng& rng) {
  const std::size_t length = o.min_length + rng.below(o.max_length - o.min_length + 1);
  const std::size_t block = o.latent_vocab / o.topics;
  std::vector<std::size_t> words;
  words.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (rng.uniform() < o.topic_prob)
      words.push_back(topic * block + rng.below(block));
    else
      words.push_back(rng.below(o.latent_vocab));
  }
  return words;
}

std::vector<LatentDocument> draw_documents(const Options& o, std::size_t count,
                                           const std::string& prefix, Rng& rng) {
  std::vector<LatentDocument> docs;
  for (std::size_t i = 0; i < count; ++i) {
    LatentDocument doc;
    doc.id = prefix + std::to_string(i);
    doc.topic = i % o.topics;
    for (std::size_t s = 0; s < o.sentences_per_document; ++s)
      doc.sentences.push_back(draw_sentence(o, doc.topic, rng));
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string render(const std::vector<std::string>& surface, const std::vector<std::size_t>& words) {
  std::string line;
  for (std::size_t w : words) {
    if (!line.empty()) line.push_back(' ');
    line += surface.at(w);
  }
  return line;
}

}  // namespace

LatentCorpus generate(const Options& options) {
  if (options.topics == 0 || options.latent_vocab < options.topics ||
      options.min_length == 0 || options.max_length < options.min_length)
    throw ConfigError("invalid synthetic corpus options");
  LatentCorpus corpus;
  corpus.options = options;
  Rng rng(options.seed);
  for (std::size_t i = 0; i < options.sentences; ++i) {
    const std::size_t topic = i % options.topics;
    corpus.sentences.push_back({draw_sentence(options, topic, rng), topic});
  }
  corpus.train_documents = draw_documents(options, options.train_documents, "train", rng);
  corpus.test_documents = draw_documents(options, options.test_documents, "test", rng);
  return corpus;
}

std::string topic_label(std::size_t topic) { return "topic" + std::to_string(topic); }

std::vector<std::string> surface_vocabulary(const LatentCorpus& corpus, const std::string& language) {
  std::vector<std::size_t> perm(corpus.options.latent_vocab);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(corpus.options.seed, fnv1a(language)));
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::string> words;
  for (std::size_t p : perm) words.push_back(language + "_" + std::to_string(p));
  return words;
}

std::string surface_word(const LatentCorpus& corpus, const std::string& language,
                         std::size_t latent_word) {
  return surface_vocabulary(corpus, language).at(latent_word);
}

std::vector<std::string> sentence_lines(const LatentCorpus& corpus, const std::string& language) {
  const auto surface = surface_vocabulary(corpus, language);
  std::vector<std::string> lines;
  for (const auto& s : corpus.sentences) lines.push_back(render(surface, s.words));
  return lines;
}

std::vector<std::string> document_lines(const LatentCorpus& corpus,
                                        const std::vector<LatentDocument>& documents,
                                        const std::string& language) {
  const auto surface = surface_vocabulary(corpus, language);
  std::vector<std::string> lines;
  for (const auto& doc : documents) {
    std::string line = doc.id + "\t" + language + "\t" + topic_label(doc.topic) + "\t";
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      if (s) line += " ||| ";
      line += render(surface, doc.sentences[s]);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace mlcvm::synthetic
