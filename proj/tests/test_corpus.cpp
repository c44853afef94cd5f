#include <gtest/gtest.h>

#include <sstream>

#include "mlcvm/corpus.hpp"
#include "mlcvm/error.hpp"
#include "test_util.hpp"

using namespace mlcvm;
using testutil::TempDir;
using testutil::write_file;

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("Hello  World"), (std::vector<std::string>{"hello", "world"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t ").empty());
  EXPECT_EQ(tokenize("Ich bin's"), (std::vector<std::string>{"ich", "bin's"}));
}

TEST(Tokenize, NonAsciiLowercase) {
  EXPECT_EQ(tokenize("ÄPFEL Über ÉCOLE"), (std::vector<std::string>{"äpfel", "über", "école"}));
}

TEST(Tokenize, IdempotentOnOwnOutput) {
  for (std::string text : {"Der  Hund\tBELLT", "ÀÉÎ õü  x", "a\nb\r\nc", "Ich bin's!"}) {
    const auto once = tokenize(text);
    std::string joined;
    for (const auto& t : once) joined += (joined.empty() ? "" : " ") + t;
    EXPECT_EQ(tokenize(joined), once);
  }
}

TEST(LoadParallel, DropsPairsWithAnEmptySide) {
  TempDir dir;
  write_file(dir / "a.en", "the house\nthe dog\nthe cat\n");
  write_file(dir / "a.de", "das haus\n\ndie katze\n");
  Vocabulary en, de;
  const auto pairs = load_parallel(dir / "a.en", dir / "a.de", en, de);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].index, 0u);
  EXPECT_EQ(pairs[1].index, 1u);
  EXPECT_EQ(en.token(pairs[1].source.tokens[1]), "cat");
  EXPECT_EQ(de.token(pairs[1].target.tokens[0]), "die");
}

TEST(LoadParallel, LineCountMismatchIsAlignmentError) {
  TempDir dir;
  write_file(dir / "a", "1\n2\n3\n4\n5\n");
  write_file(dir / "b", "1\n2\n3\n4\n");
  Vocabulary va, vb;
  EXPECT_THROW(load_parallel(dir / "a", dir / "b", va, vb), AlignmentError);
}

TEST(LoadParallel, SharedVocabularyGivesEqualIds) {
  TempDir dir;
  write_file(dir / "a", "a b\n");
  write_file(dir / "b", "a b\n");
  Vocabulary v;
  const auto pairs = load_parallel(dir / "a", dir / "b", v, v);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].source, pairs[0].target);
}

TEST(LoadParallel, MissingFileIsIoError) {
  TempDir dir;
  Vocabulary va, vb;
  EXPECT_THROW(load_parallel(dir / "nope", dir / "nope2", va, vb), IoError);
}

TEST(LoadParallel, OutputLengthCountsNonEmptyPairs) {
  TempDir dir;
  std::string a, b;
  std::size_t expected = 0;
  for (int i = 0; i < 40; ++i) {
    const bool empty_a = i % 3 == 0, empty_b = i % 5 == 0;
    a += empty_a ? " \n" : "w" + std::to_string(i) + "\n";
    b += empty_b ? "\n" : "v" + std::to_string(i) + "\n";
    expected += !empty_a && !empty_b;
  }
  write_file(dir / "a", a);
  write_file(dir / "b", b);
  Vocabulary va, vb;
  EXPECT_EQ(load_parallel(dir / "a", dir / "b", va, vb).size(), expected);
}

TEST(LoadParallelCorpus, DocumentMarkers) {
  TempDir dir;
  write_file(dir / "a", "<doc>\na b\nc\n<doc>\nd\n\n<doc>\ne\n");
  write_file(dir / "b", "<doc>\nx\ny\n<doc>\nz\nw\n<doc>\n\n");
  Vocabulary va, vb;
  const auto c = load_parallel_corpus(dir / "a", dir / "b", "en", "de", va, vb, true);
  ASSERT_EQ(c.pairs.size(), 3u);
  // third document lost its only pair and is dropped
  ASSERT_EQ(c.documents.size(), 2u);
  EXPECT_EQ(c.documents[0].begin, 0u);
  EXPECT_EQ(c.documents[0].end, 2u);
  EXPECT_EQ(c.documents[1].begin, 2u);
  EXPECT_EQ(c.documents[1].end, 3u);
  EXPECT_EQ(c.source_language, "en");

  write_file(dir / "b2", "x\n<doc>\ny\n<doc>\nz\nw\n<doc>\n\n");
  EXPECT_THROW(load_parallel_corpus(dir / "a", dir / "b2", "en", "de", va, vb, true), AlignmentError);
}

TEST(ParseDocuments, FourFieldFormat) {
  std::istringstream in("d1\ten\tart,science\thello world ||| good day\nd2\tde\t\tguten tag\n");
  Vocabulary v;
  const auto docs = parse_documents(in, v, VocabPolicy::Extend);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].id, "d1");
  EXPECT_EQ(docs[0].language, "en");
  EXPECT_EQ(docs[0].sentences.size(), 2u);
  EXPECT_EQ(docs[0].labels, (std::set<std::string>{"art", "science"}));
  EXPECT_TRUE(docs[1].labels.empty());
  EXPECT_EQ(docs[1].sentences.size(), 1u);
}

TEST(ParseDocuments, WrongFieldCountNamesLine) {
  std::istringstream in("d1\ten\ta\tx y\nd2\ten\tonly three\n");
  Vocabulary v;
  try {
    parse_documents(in, v, VocabPolicy::Extend, "docs.tsv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("docs.tsv:2"), std::string::npos) << e.what();
  }
}

TEST(ParseDocuments, DropsEmptySentencesAndDocuments) {
  std::istringstream in("d1\ten\ta\tx |||  ||| y\nd2\ten\tb\t  \n");
  Vocabulary v;
  const auto docs = parse_documents(in, v, VocabPolicy::Extend);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences.size(), 2u);
}

TEST(ParseDocuments, FrozenVocabularyMapsUnknownToSentinel) {
  Vocabulary v;
  v.add("known");
  std::istringstream in("d1\ten\ta\tknown novel\n");
  const auto docs = parse_documents(in, v, VocabPolicy::Frozen);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences[0].tokens, (std::vector<TokenId>{0, kUnknownToken}));
  EXPECT_EQ(v.size(), 1u);
}

namespace {
std::vector<LabeledDocument> with_labels(const std::vector<std::set<std::string>>& sets) {
  std::vector<LabeledDocument> docs;
  for (const auto& s : sets) docs.push_back({"d", "en", s, {{{0}}}});
  return docs;
}
}  // namespace

TEST(SelectTopLabels, FrequencyThenLexicographic) {
  const auto docs = with_labels({{"a", "b", "c"}, {"a", "b"}, {"a"}});
  EXPECT_EQ(select_top_labels(docs, 2).labels, (std::set<std::string>{"a", "b"}));
  EXPECT_FALSE(select_top_labels(docs, 2).underfull);

  const auto tied = with_labels({{"b"}, {"a"}, {"a", "b"}});
  EXPECT_EQ(select_top_labels(tied, 1).labels, (std::set<std::string>{"a"}));

  const auto top = select_top_labels(with_labels({{"a"}}), 15);
  EXPECT_EQ(top.labels, (std::set<std::string>{"a"}));
  EXPECT_TRUE(top.underfull);
}

TEST(SelectTopLabels, KeptLabelsDominateExcluded) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::set<std::string>> sets(1 + rng.below(30));
    for (auto& s : sets)
      for (int j = 0; j < 3; ++j)
        if (rng.uniform() < 0.5) s.insert(std::string(1, static_cast<char>('a' + rng.below(8))));
    const auto docs = with_labels(sets);
    std::map<std::string, int> freq;
    for (const auto& s : sets)
      for (const auto& l : s) ++freq[l];
    const auto kept = select_top_labels(docs, 1 + rng.below(5)).labels;
    for (const auto& [l, f] : freq)
      if (!kept.count(l))
        for (const auto& k : kept) EXPECT_GE(freq[k], f);
  }
}

TEST(RestrictLabels, DropsOthers) {
  auto docs = with_labels({{"a", "b"}, {"c"}});
  restrict_labels(docs, {"a"});
  EXPECT_EQ(docs[0].labels, (std::set<std::string>{"a"}));
  EXPECT_TRUE(docs[1].labels.empty());
}

TEST(SampleNoise, ExcludesPositiveIndex) {
  std::vector<ParallelPair> corpus;
  for (std::size_t i = 0; i < 5; ++i) corpus.push_back({{{0}}, {{static_cast<TokenId>(i)}}, i});
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto noise = sample_noise(corpus, 2, 3, rng);
    ASSERT_EQ(noise.size(), 3u);
    for (const auto& n : noise) {
      EXPECT_NE(n.source_index, 2u);
      EXPECT_EQ(n.sentence, corpus[n.source_index].target);
    }
  }
}

TEST(SampleNoise, DeterministicGivenSeed) {
  Rng a(42), b(42);
  EXPECT_EQ(sample_noise_indices(100, 7, 20, a), sample_noise_indices(100, 7, 20, b));
}

TEST(SampleNoise, TwoElementCorpusAlwaysPicksTheOther) {
  Rng rng(3);
  for (auto i : sample_noise_indices(2, 0, 50, rng)) EXPECT_EQ(i, 1u);
}

TEST(SampleNoise, TooSmallCorpusThrows) {
  Rng rng(1);
  EXPECT_THROW(sample_noise_indices(1, 0, 3, rng), SamplingError);
}
