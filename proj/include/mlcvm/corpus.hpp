#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlcvm/random.hpp"
#include "mlcvm/vocabulary.hpp"

namespace mlcvm {

struct Sentence {
  std::vector<TokenId> tokens;
  bool operator==(const Sentence&) const = default;
};

struct ParallelPair {
  Sentence source;
  Sentence target;
  std::size_t index = 0;
};

// Half-open range of pair indices forming one sentence-aligned document.
struct DocumentSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct ParallelCorpus {
  std::string source_language;
  std::string target_language;
  std::vector<ParallelPair> pairs;
  // Empty unless the input carried document markers.
  std::vector<DocumentSpan> documents;
};

struct LabeledDocument {
  std::string id;
  std::string language;
  std::set<std::string> labels;
  std::vector<Sentence> sentences;
};

struct NoiseSample {
  Sentence sentence;
  std::size_t source_index = 0;
};

// Lowercases (per code point, UTF-8 aware) and splits on whitespace runs.
std::vector<std::string> tokenize(std::string_view text);

// Line that starts a new document in a parallel file loaded with documents.
inline constexpr std::string_view kDocumentMarker = "<doc>";

// Line i of path_a is aligned with line i of path_b. Pairs where either side
// tokenizes to nothing are dropped; the survivors are indexed 0..n-1.
// Vocabularies are extended with unseen tokens.
std::vector<ParallelPair> load_parallel(const std::filesystem::path& path_a,
                                        const std::filesystem::path& path_b, Vocabulary& vocab_a,
                                        Vocabulary& vocab_b);

// Same as load_parallel, optionally honoring kDocumentMarker lines (which
// must occur on the same line numbers in both files).
ParallelCorpus load_parallel_corpus(const std::filesystem::path& path_a,
                                    const std::filesystem::path& path_b,
                                    const std::string& language_a, const std::string& language_b,
                                    Vocabulary& vocab_a, Vocabulary& vocab_b,
                                    bool with_documents);

enum class VocabPolicy {
  Extend,  // unseen tokens get new ids
  Frozen,  // unseen tokens map to kUnknownToken
};

// One document per line: id TAB lang TAB label,label TAB sent ||| sent
std::vector<LabeledDocument> parse_documents(std::istream& in, Vocabulary& vocab,
                                             VocabPolicy policy,
                                             std::string_view source_name = "<stream>");
std::vector<LabeledDocument> load_documents(const std::filesystem::path& path, Vocabulary& vocab,
                                            VocabPolicy policy = VocabPolicy::Extend);

struct TopLabels {
  std::set<std::string> labels;
  // Fewer distinct labels than requested.
  bool underfull = false;
};

// The n labels attached to the most documents; ties go to the
// lexicographically smaller label.
TopLabels select_top_labels(std::span<const LabeledDocument> docs, std::size_t n);

// Drops every label not in keep.
void restrict_labels(std::vector<LabeledDocument>& docs, const std::set<std::string>& keep);

// k indices drawn uniformly with replacement from [0, corpus_size) minus
// positive_index (redrawn on collision).
std::vector<std::size_t> sample_noise_indices(std::size_t corpus_size, std::size_t positive_index,
                                              std::size_t k, Rng& rng);

// Target-side noise sentences for the pair at positive_index.
std::vector<NoiseSample> sample_noise(std::span<const ParallelPair> corpus,
                                      std::size_t positive_index, std::size_t k, Rng& rng);

}  // namespace mlcvm
