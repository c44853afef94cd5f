// Writes the synthetic multilingual corpus used by the acceptance suite:
// one sentence file per language (line-aligned) and train/test document
// files per language.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlcvm/synthetic.hpp"

namespace {

bool write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic parallel corpus with topic-labeled documents", "mlcvm-synth"};
  mlcvm::synthetic::Options o;
  std::vector<std::string> languages{"en", "de"};
  std::string out;
  app.add_option("--langs", languages, "Languages to render")->delimiter(',')->capture_default_str();
  app.add_option("--latent-vocab", o.latent_vocab, "Latent words shared by all languages")->capture_default_str();
  app.add_option("--topics", o.topics, "Topic labels")->capture_default_str();
  app.add_option("--sentences", o.sentences, "Parallel sentences")->capture_default_str();
  app.add_option("--topic-prob", o.topic_prob, "Chance a word comes from the sentence's topic block")->capture_default_str();
  app.add_option("--train-docs", o.train_documents, "Labeled training documents")->capture_default_str();
  app.add_option("--test-docs", o.test_documents, "Labeled test documents")->capture_default_str();
  app.add_option("--doc-sentences", o.sentences_per_document, "Sentences per document")->capture_default_str();
  app.add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  app.add_option("--out", out, "Output directory")->required();
  CLI11_PARSE(app, argc, argv);

  const auto corpus = mlcvm::synthetic::generate(o);
  std::filesystem::create_directories(out);
  for (const auto& l : languages) {
    const std::filesystem::path dir(out);
    if (!write_lines(dir / (l + ".txt"), mlcvm::synthetic::sentence_lines(corpus, l)) ||
        !write_lines(dir / (l + ".train.docs"),
                     mlcvm::synthetic::document_lines(corpus, corpus.train_documents, l)) ||
        !write_lines(dir / (l + ".test.docs"),
                     mlcvm::synthetic::document_lines(corpus, corpus.test_documents, l))) {
      std::cerr << "failed writing files for " << l << " in " << out << '\n';
      return 1;
    }
  }
  std::cout << "wrote " << corpus.sentences.size() << " sentences and "
            << corpus.train_documents.size() + corpus.test_documents.size()
            << " documents per language to " << out << '\n';
  return 0;
}
