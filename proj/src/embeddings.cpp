#include "mlcvm/embeddings.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "mlcvm/error.hpp"
#include "mlcvm/random.hpp"

namespace mlcvm {

EmbeddingTable::EmbeddingTable(std::string language, std::size_t rows, std::size_t dim)
    : language_(std::move(language)), rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

EmbeddingTable init_table(std::size_t rows, std::size_t dim, std::uint64_t seed,
                          std::string language) {
  if (dim == 0) throw ConfigError("embedding dimensionality must be at least 1");
  EmbeddingTable table(std::move(language), rows, dim);
  Rng rng(seed);
  const double stddev = std::sqrt(kInitVariance);
  for (double& v : table.data()) v = rng.normal(0.0, stddev);
  return table;
}

namespace {

void append_double(std::string& line, double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  line.append(buf.data(), end);
}

bool parse_size(std::string_view text, std::size_t& value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace

void write_table(std::ostream& out, const EmbeddingTable& table,
                 const std::vector<std::string>& row_names) {
  if (row_names.size() != table.rows())
    throw ContractError("table has " + std::to_string(table.rows()) + " rows but " +
                        std::to_string(row_names.size()) + " names were given");
  out << table.rows() << ' ' << table.dim() << '\n';
  std::string line;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    line = row_names[r];
    for (double v : table.row(r)) {
      line.push_back(' ');
      append_double(line, v);
    }
    line.push_back('\n');
    out << line;
  }
}

void export_table(const EmbeddingTable& table, const Vocabulary& vocab,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_table(out, table, vocab.tokens());
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

NamedTable read_table(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_spaces(line);
  std::size_t rows = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], rows) || !parse_size(header[1], dim) ||
      dim == 0)
    throw ParseError(source_name + ": malformed header '" + line + "' (expected 'V d')");

  NamedTable result{{}, EmbeddingTable({}, rows, dim)};
  result.names.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw ParseError(source_name + ": expected " + std::to_string(rows) + " rows, found " +
                       std::to_string(r));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_spaces(line);
    const std::string where = source_name + ":" + std::to_string(r + 2);
    if (fields.size() != dim + 1)
      throw ParseError(where + ": expected a word and " + std::to_string(dim) + " values, got " +
                       std::to_string(fields.empty() ? 0 : fields.size() - 1) + " values");
    result.names.emplace_back(fields[0]);
    Row row = result.table.row(r);
    for (std::size_t c = 0; c < dim; ++c) {
      std::string_view f = fields[c + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[c]);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(row[c]))
        throw ParseError(where + ": bad value '" + std::string(f) + "'");
    }
  }
  while (std::getline(in, line))
    if (!line.empty() && line != "\r")
      throw ParseError(source_name + ": more rows than the header's " + std::to_string(rows));
  return result;
}

ImportedTable import_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  NamedTable named = read_table(in, path.string());
  ImportedTable result;
  for (std::size_t r = 0; r < named.names.size(); ++r) {
    if (result.vocab.find(named.names[r]))
      throw ParseError(path.string() + ":" + std::to_string(r + 2) + ": duplicate word '" +
                       named.names[r] + "'");
    result.vocab.add(named.names[r]);
  }
  result.table = std::move(named.table);
  result.table.set_language(path.stem().string());
  return result;
}

void ModelBundle::add_language(const std::string& code, Vocabulary vocab, EmbeddingTable table) {
  if (table.dim() != dim_)
    throw ConfigError("table for '" + code + "' has d=" + std::to_string(table.dim()) +
                      " but the bundle has d=" + std::to_string(dim_));
  if (table.rows() != vocab.size())
    throw ConfigError("table for '" + code + "' has " + std::to_string(table.rows()) +
                      " rows for a vocabulary of " + std::to_string(vocab.size()));
  if (contains(code)) throw ConfigError("language '" + code + "' already in bundle");
  table.set_language(code);
  spaces_.emplace(code, LanguageSpace{std::move(vocab), std::move(table)});
}

LanguageSpace& ModelBundle::at(const std::string& code) {
  auto it = spaces_.find(code);
  if (it == spaces_.end()) throw LookupError("no embeddings for language '" + code + "'");
  return it->second;
}

const LanguageSpace& ModelBundle::at(const std::string& code) const {
  auto it = spaces_.find(code);
  if (it == spaces_.end()) throw LookupError("no embeddings for language '" + code + "'");
  return it->second;
}

std::vector<std::string> ModelBundle::languages() const {
  std::vector<std::string> codes;
  for (const auto& [code, space] : spaces_) codes.push_back(code);
  return codes;
}

SimilarityMetric parse_similarity_metric(std::string_view text) {
  if (text == "cosine") return SimilarityMetric::Cosine;
  if (text == "euclidean") return SimilarityMetric::Euclidean;
  throw ConfigError("unknown metric '" + std::string(text) + "' (expected cosine or euclidean)");
}

double cosine_similarity(ConstRow a, ConstRow b) {
  const double na = squared_norm(a), nb = squared_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Neighbor> nearest_neighbors(const ModelBundle& bundle, const std::string& language,
                                        const std::string& token, std::size_t n,
                                        const std::string& target_language,
                                        SimilarityMetric metric) {
  const LanguageSpace& source = bundle.at(language);
  const auto query_id = source.vocab.find(token);
  if (!query_id) throw LookupError("unknown word '" + token + "' in language '" + language + "'");
  const ConstRow query = source.table.row(*query_id);

  std::vector<std::string> targets;
  if (target_language == kAllLanguages) {
    targets = bundle.languages();
  } else {
    bundle.at(target_language);
    targets.push_back(target_language);
  }

  std::vector<Neighbor> candidates;
  for (const auto& code : targets) {
    const LanguageSpace& space = bundle.at(code);
    for (TokenId id = 0; id < space.vocab.size(); ++id) {
      if (code == language && id == *query_id) continue;
      const ConstRow v = space.table.row(id);
      const double score = metric == SimilarityMetric::Cosine
                               ? cosine_similarity(query, v)
                               : -std::sqrt(squared_distance(query, v));
      candidates.push_back({code, space.vocab.token(id), score});
    }
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.language, a.token) < std::tie(b.language, b.token);
  };
  const std::size_t keep = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), better);
  candidates.resize(keep);
  return candidates;
}

}  // namespace mlcvm
