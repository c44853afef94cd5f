#include "mlcvm/corpus.hpp"

#include <algorithm>
#include <clocale>
#include <cwctype>
#include <fstream>
#include <locale.h>
#include <map>
#include <wctype.h>

#include "mlcvm/error.hpp"

namespace mlcvm {

namespace {

// Decodes one UTF-8 sequence at text[i]; returns false (and consumes one
// byte) on malformed input.
bool decode_utf8(std::string_view text, std::size_t& i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  if (b0 < 0x80) {
    cp = b0;
    ++i;
    return true;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return false;
  }
  if (i + len > text.size()) {
    ++i;
    return false;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return false;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return true;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

locale_t utf8_locale() {
  static locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    return l;
  }();
  return loc;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return false;
  return iswspace_l(static_cast<wint_t>(cp), loc) != 0;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("failed reading " + path.string());
  return lines;
}

Sentence to_sentence(const std::vector<std::string>& tokens, Vocabulary& vocab,
                     VocabPolicy policy) {
  Sentence s;
  s.tokens.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (policy == VocabPolicy::Extend) {
      s.tokens.push_back(vocab.add(t));
    } else {
      auto id = vocab.find(t);
      s.tokens.push_back(id ? *id : kUnknownToken);
    }
  }
  return s;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_on(std::string_view text, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + sep.size();
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    char32_t cp = 0;
    if (!decode_utf8(text, i, cp)) {
      current.append(text.substr(start, i - start));
      continue;
    }
    if (is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      encode_utf8(to_lower(cp), current);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& path_a,
                                    const std::filesystem::path& path_b,
                                    const std::string& language_a, const std::string& language_b,
                                    Vocabulary& vocab_a, Vocabulary& vocab_b,
                                    bool with_documents) {
  const auto lines_a = read_lines(path_a);
  const auto lines_b = read_lines(path_b);
  if (lines_a.size() != lines_b.size())
    throw AlignmentError(path_a.string() + " has " + std::to_string(lines_a.size()) +
                         " lines but " + path_b.string() + " has " +
                         std::to_string(lines_b.size()));

  ParallelCorpus corpus;
  corpus.source_language = language_a;
  corpus.target_language = language_b;
  std::size_t doc_begin = 0;
  auto close_document = [&] {
    if (corpus.pairs.size() > doc_begin) corpus.documents.push_back({doc_begin, corpus.pairs.size()});
    doc_begin = corpus.pairs.size();
  };

  for (std::size_t i = 0; i < lines_a.size(); ++i) {
    if (with_documents) {
      const bool marker_a = trim(lines_a[i]) == kDocumentMarker;
      const bool marker_b = trim(lines_b[i]) == kDocumentMarker;
      if (marker_a != marker_b)
        throw AlignmentError("document marker on line " + std::to_string(i + 1) + " of only one side");
      if (marker_a) {
        close_document();
        continue;
      }
    }
    const auto tokens_a = tokenize(lines_a[i]);
    const auto tokens_b = tokenize(lines_b[i]);
    if (tokens_a.empty() || tokens_b.empty()) continue;
    ParallelPair pair;
    pair.source = to_sentence(tokens_a, vocab_a, VocabPolicy::Extend);
    pair.target = to_sentence(tokens_b, vocab_b, VocabPolicy::Extend);
    pair.index = corpus.pairs.size();
    corpus.pairs.push_back(std::move(pair));
  }
  if (with_documents) close_document();
  return corpus;
}

std::vector<ParallelPair> load_parallel(const std::filesystem::path& path_a,
                                        const std::filesystem::path& path_b, Vocabulary& vocab_a,
                                        Vocabulary& vocab_b) {
  return load_parallel_corpus(path_a, path_b, {}, {}, vocab_a, vocab_b, false).pairs;
}

std::vector<LabeledDocument> parse_documents(std::istream& in, Vocabulary& vocab,
                                             VocabPolicy policy, std::string_view source_name) {
  std::vector<LabeledDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_on(line, "\t");
    if (fields.size() != 4)
      throw ParseError(std::string(source_name) + ":" + std::to_string(line_no) +
                       ": expected 4 tab-separated fields, found " +
                       std::to_string(fields.size()));
    LabeledDocument doc;
    doc.id = std::string(fields[0]);
    doc.language = std::string(fields[1]);
    for (auto label : split_on(fields[2], ",")) {
      label = trim(label);
      if (!label.empty()) doc.labels.emplace(label);
    }
    for (auto text : split_on(fields[3], " ||| ")) {
      const auto tokens = tokenize(text);
      if (tokens.empty()) continue;
      doc.sentences.push_back(to_sentence(tokens, vocab, policy));
    }
    if (!doc.sentences.empty()) docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<LabeledDocument> load_documents(const std::filesystem::path& path, Vocabulary& vocab,
                                            VocabPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_documents(in, vocab, policy, path.string());
}

TopLabels select_top_labels(std::span<const LabeledDocument> docs, std::size_t n) {
  if (n == 0) throw ContractError("select_top_labels: n must be positive");
  std::map<std::string, std::size_t> frequency;
  for (const auto& doc : docs)
    for (const auto& label : doc.labels) ++frequency[label];
  std::vector<std::pair<std::string, std::size_t>> ranked(frequency.begin(), frequency.end());
  // map order is lexicographic, so a stable sort by count keeps that tie-break
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  TopLabels top;
  top.underfull = ranked.size() < n;
  for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) top.labels.insert(ranked[i].first);
  return top;
}

void restrict_labels(std::vector<LabeledDocument>& docs, const std::set<std::string>& keep) {
  for (auto& doc : docs)
    std::erase_if(doc.labels, [&](const std::string& label) { return keep.count(label) == 0; });
}

std::vector<std::size_t> sample_noise_indices(std::size_t corpus_size, std::size_t positive_index,
                                              std::size_t k, Rng& rng) {
  if (corpus_size < 2)
    throw SamplingError("cannot draw noise from a corpus of " + std::to_string(corpus_size) +
                        " item(s)");
  std::vector<std::size_t> picks;
  picks.reserve(k);
  while (picks.size() < k) {
    const std::size_t j = rng.below(corpus_size);
    if (j != positive_index) picks.push_back(j);
  }
  return picks;
}

std::vector<NoiseSample> sample_noise(std::span<const ParallelPair> corpus,
                                      std::size_t positive_index, std::size_t k, Rng& rng) {
  std::vector<NoiseSample> noise;
  noise.reserve(k);
  for (std::size_t j : sample_noise_indices(corpus.size(), positive_index, k, rng))
    noise.push_back({corpus[j].target, j});
  return noise;
}

}  // namespace mlcvm
