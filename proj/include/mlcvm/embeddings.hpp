#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string_view>
#include <utility>
#include <string>
#include <vector>

#include "mlcvm/composition.hpp"
#include "mlcvm/linalg.hpp"
#include "mlcvm/vocabulary.hpp"

namespace mlcvm {

// V x d row-major matrix of word vectors for one language.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::string language, std::size_t rows, std::size_t dim);

  const std::string& language() const { return language_; }
  void set_language(std::string language) { language_ = std::move(language); }
  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  Row row(std::size_t id) { return {data_.data() + id * dim_, dim_}; }
  ConstRow row(std::size_t id) const { return {data_.data() + id * dim_, dim_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::string language_;
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Entries i.i.d. Normal(0, 0.1).
inline constexpr double kInitVariance = 0.1;
EmbeddingTable init_table(std::size_t rows, std::size_t dim, std::uint64_t seed,
                          std::string language = {});

// Text embedding format: "V d" header, then "word v1 ... vd" per row, values
// in shortest round-trip decimal form, LF endings.
void write_table(std::ostream& out, const EmbeddingTable& table,
                 const std::vector<std::string>& row_names);
void export_table(const EmbeddingTable& table, const Vocabulary& vocab,
                  const std::filesystem::path& path);

struct NamedTable {
  std::vector<std::string> names;
  EmbeddingTable table;
};
// Reads the same format with arbitrary row names (no uniqueness check).
NamedTable read_table(std::istream& in, const std::string& source_name);

struct ImportedTable {
  Vocabulary vocab;
  EmbeddingTable table;
};
ImportedTable import_table(const std::filesystem::path& path);

struct LanguageSpace {
  Vocabulary vocab;
  EmbeddingTable table;
};

// The model parameters: one vocabulary and table per language, all sharing
// the same dimensionality and composition family.
class ModelBundle {
 public:
  ModelBundle(std::size_t dim, CompositionKind kind) : dim_(dim), kind_(kind) {}

  // Throws ConfigError on dimension or row-count mismatch or a duplicate code.
  void add_language(const std::string& code, Vocabulary vocab, EmbeddingTable table);

  bool contains(const std::string& code) const { return spaces_.count(code) != 0; }
  LanguageSpace& at(const std::string& code);
  const LanguageSpace& at(const std::string& code) const;
  EmbeddingTable& table(const std::string& code) { return at(code).table; }
  const EmbeddingTable& table(const std::string& code) const { return at(code).table; }

  std::vector<std::string> languages() const;
  std::size_t dim() const { return dim_; }
  CompositionKind kind() const { return kind_; }
  const std::map<std::string, LanguageSpace>& spaces() const { return spaces_; }

 private:
  std::size_t dim_;
  CompositionKind kind_;
  std::map<std::string, LanguageSpace> spaces_;
};

enum class SimilarityMetric { Cosine, Euclidean };
SimilarityMetric parse_similarity_metric(std::string_view text);

// Cosine with zero vectors defined as 0.
double cosine_similarity(ConstRow a, ConstRow b);

struct Neighbor {
  std::string language;
  std::string token;
  // Cosine similarity, or negated Euclidean distance; higher is closer.
  double score = 0.0;
};

inline constexpr std::string_view kAllLanguages = "all";

// Top-n tokens closest to (language, token) among target_language ("all"
// pools every language). Never returns the query itself. Ties ordered by
// (language, token).
std::vector<Neighbor> nearest_neighbors(const ModelBundle& bundle, const std::string& language,
                                        const std::string& token, std::size_t n,
                                        const std::string& target_language,
                                        SimilarityMetric metric = SimilarityMetric::Cosine);

}  // namespace mlcvm
