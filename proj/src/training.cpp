#include "mlcvm/training.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "mlcvm/error.hpp"
#include "mlcvm/random.hpp"

namespace mlcvm {

std::string_view to_string(TrainMode mode) { return mode == TrainMode::Single ? "single" : "joint"; }

TrainMode parse_train_mode(std::string_view text) {
  if (text == "single") return TrainMode::Single;
  if (text == "joint") return TrainMode::Joint;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected single or joint)");
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be at least 1");
  if (!(margin > 0.0) || !std::isfinite(margin)) throw ConfigError("margin must be positive");
  if (noise < 1) throw ConfigError("noise count k must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be non-negative");
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive");
  if (batch < 1) throw ConfigError("batch must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

AdaGradState AdaGradState::zeros_like(const ModelBundle& bundle) {
  AdaGradState state;
  for (const auto& [code, space] : bundle.spaces())
    state.acc_[code] = EmbeddingTable(code, space.table.rows(), space.table.dim());
  return state;
}

EmbeddingTable& AdaGradState::accumulator(const std::string& language) {
  auto it = acc_.find(language);
  if (it == acc_.end()) throw LookupError("no AdaGrad state for language '" + language + "'");
  return it->second;
}

const EmbeddingTable& AdaGradState::accumulator(const std::string& language) const {
  auto it = acc_.find(language);
  if (it == acc_.end()) throw LookupError("no AdaGrad state for language '" + language + "'");
  return it->second;
}

double adagrad_apply(ModelBundle& bundle, const SparseGradient& grads, AdaGradState& state,
                     const TrainConfig& config) {
  for (const auto& [key, g] : grads.entries()) {
    if (!all_finite(g))
      throw UpdateError("non-finite gradient for " + key.language + ":" +
                        std::to_string(key.token) + "; update rejected");
    const EmbeddingTable& table = bundle.table(key.language);
    if (key.token >= table.rows() || g.size() != table.dim())
      throw LookupError("gradient for " + key.language + ":" + std::to_string(key.token) +
                        " does not fit its table");
    if (!state.contains(key.language))
      state.set(key.language, EmbeddingTable(key.language, table.rows(), table.dim()));
    const EmbeddingTable& acc = state.accumulator(key.language);
    if (acc.rows() != table.rows() || acc.dim() != table.dim())
      throw ContractError("AdaGrad state for '" + key.language + "' does not match its table");
  }

  double regularizer = 0.0;
  for (const auto& [key, g] : grads.entries()) {
    Row w = bundle.table(key.language).row(key.token);
    Row acc = state.accumulator(key.language).row(key.token);
    regularizer += 0.5 * config.lambda * squared_norm(w);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double gc = g[c] + config.lambda * w[c];
      acc[c] += gc * gc;
      w[c] -= config.step * gc / std::sqrt(acc[c] + config.epsilon);
    }
  }
  return regularizer;
}

namespace {

struct UnitResult {
  LossAndGradient value;
  std::size_t hinge_terms = 0;
};

// Noise drawn for one training unit (a pair, or a document with its
// sentences).
struct UnitNoise {
  std::vector<NoiseSample> sentences;
  std::vector<std::vector<Sentence>> documents;
  std::vector<std::vector<NoiseSample>> per_sentence;
};

class CorpusStream {
 public:
  CorpusStream(const ParallelCorpus& corpus, const TrainConfig& config)
      : corpus_(corpus),
        config_(config),
        languages_{corpus.source_language, corpus.target_language},
        by_document_(config.doc_signal && !corpus.documents.empty()) {
    if (corpus.pairs.size() < 2)
      throw SamplingError("corpus " + corpus.source_language + "-" + corpus.target_language +
                          " needs at least 2 pairs");
    if (by_document_ && corpus.documents.size() < 2)
      throw SamplingError("document-level training needs at least 2 documents");
  }

  std::size_t units() const { return by_document_ ? corpus_.documents.size() : corpus_.pairs.size(); }

  UnitNoise draw(std::size_t unit, Rng& rng) const {
    UnitNoise noise;
    if (!by_document_) {
      noise.sentences = sample_noise(corpus_.pairs, unit, config_.noise, rng);
      return noise;
    }
    for (std::size_t j : sample_noise_indices(corpus_.documents.size(), unit, config_.noise, rng))
      noise.documents.push_back(target_side(corpus_.documents[j]));
    const DocumentSpan span = corpus_.documents[unit];
    for (std::size_t p = span.begin; p < span.end; ++p)
      noise.per_sentence.push_back(sample_noise(corpus_.pairs, p, config_.noise, rng));
    return noise;
  }

  UnitResult evaluate(std::size_t unit, const UnitNoise& noise, const ModelBundle& bundle) const {
    UnitResult r;
    if (!by_document_) {
      r.value = pair_loss_and_grads(corpus_.pairs[unit], noise.sentences, bundle, languages_,
                                    config_.kind, config_.margin);
      r.hinge_terms = noise.sentences.size();
      return r;
    }
    const DocumentSpan span = corpus_.documents[unit];
    DocumentPair docs;
    for (std::size_t p = span.begin; p < span.end; ++p) {
      docs.source.push_back(corpus_.pairs[p].source);
      docs.target.push_back(corpus_.pairs[p].target);
    }
    r.value = doc_loss_and_grads(docs, noise.documents, noise.per_sentence, bundle, languages_,
                                 config_.kind, config_.margin, true);
    r.hinge_terms = noise.documents.size() + span.size() * config_.noise;
    return r;
  }

 private:
  std::vector<Sentence> target_side(const DocumentSpan& span) const {
    std::vector<Sentence> doc;
    for (std::size_t p = span.begin; p < span.end; ++p) doc.push_back(corpus_.pairs[p].target);
    return doc;
  }

  const ParallelCorpus& corpus_;
  const TrainConfig& config_;
  LanguagePair languages_;
  bool by_document_;
};

std::vector<UnitResult> evaluate_batch(const CorpusStream& stream,
                                       std::span<const std::size_t> units,
                                       const std::vector<UnitNoise>& noise,
                                       const ModelBundle& bundle, std::size_t threads) {
  std::vector<UnitResult> results(units.size());
  const std::size_t workers = std::min(threads, units.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < units.size(); ++i)
      results[i] = stream.evaluate(units[i], noise[i], bundle);
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < units.size(); i += workers)
            results[i] = stream.evaluate(units[i], noise[i], bundle);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void check_bundle(std::span<const ParallelCorpus> corpora, const ModelBundle& bundle,
                  const TrainConfig& config) {
  if (corpora.empty()) throw ConfigError("no training corpus given");
  if (bundle.dim() != config.dim)
    throw ConfigError("model has d=" + std::to_string(bundle.dim()) + " but config asks for d=" +
                      std::to_string(config.dim));
  const std::string& pivot = corpora.front().source_language;
  for (const auto& c : corpora) {
    if (c.source_language != pivot)
      throw ConfigError("sub-corpora do not share a pivot language ('" + pivot + "' vs '" +
                        c.source_language + "')");
    if (c.target_language == pivot)
      throw ConfigError("sub-corpus pairs '" + pivot + "' with itself");
    bundle.at(c.source_language);
    bundle.at(c.target_language);
  }
}

}  // namespace

TrainReport train_joint(std::span<const ParallelCorpus> corpora, ModelBundle& bundle,
                        AdaGradState& state, const TrainConfig& config, std::size_t first_epoch) {
  config.validate();
  check_bundle(corpora, bundle, config);
  for (const auto& code : bundle.languages())
    if (!state.contains(code)) {
      const auto& t = bundle.table(code);
      state.set(code, EmbeddingTable(code, t.rows(), t.dim()));
    }

  std::vector<CorpusStream> streams;
  streams.reserve(corpora.size());
  for (const auto& c : corpora) streams.emplace_back(c, config);

  TrainReport report;
  for (std::size_t e = first_epoch; e < first_epoch + config.epochs; ++e) {
    const auto start = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = e;
    std::size_t hinge_terms = 0;

    std::vector<std::vector<std::size_t>> orders;
    std::vector<Rng> noise_rngs;
    std::size_t rounds = 0;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      std::vector<std::size_t> order(streams[s].units());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng shuffle_rng(derive_seed(config.seed + e, 2 * s));
      shuffle_rng.shuffle(std::span<std::size_t>(order));
      orders.push_back(std::move(order));
      noise_rngs.emplace_back(derive_seed(config.seed + e, 2 * s + 1));
      rounds = std::max(rounds, (orders.back().size() + config.batch - 1) / config.batch);
    }

    for (std::size_t b = 0; b < rounds; ++b) {
      for (std::size_t s = 0; s < streams.size(); ++s) {
        const auto& order = orders[s];
        const std::size_t begin = b * config.batch;
        if (begin >= order.size()) continue;
        const std::size_t end = std::min(order.size(), begin + config.batch);
        const std::span<const std::size_t> units(order.data() + begin, end - begin);

        std::vector<UnitNoise> noise;
        noise.reserve(units.size());
        for (std::size_t u : units) noise.push_back(streams[s].draw(u, noise_rngs[s]));
        auto results = evaluate_batch(streams[s], units, noise, bundle, config.threads);

        SparseGradient batch_grad;
        for (auto& r : results) {
          stats.hinge_total += r.value.loss.hinge_total;
          stats.active_fraction += static_cast<double>(r.value.loss.active_noise_count);
          hinge_terms += r.hinge_terms;
          batch_grad.merge(r.value.gradient);
        }
        stats.regularizer += adagrad_apply(bundle, batch_grad, state, config);
        ++stats.updates;
      }
    }
    stats.active_fraction = hinge_terms ? stats.active_fraction / static_cast<double>(hinge_terms) : 0.0;
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.epochs.push_back(stats);
  }
  return report;
}

TrainReport train_joint(std::span<const ParallelCorpus> corpora, ModelBundle& bundle,
                        const TrainConfig& config) {
  AdaGradState state = AdaGradState::zeros_like(bundle);
  return train_joint(corpora, bundle, state, config, 0);
}

TrainReport train_single(const ParallelCorpus& corpus, ModelBundle& bundle, AdaGradState& state,
                         const TrainConfig& config, std::size_t first_epoch) {
  return train_joint(std::span<const ParallelCorpus>(&corpus, 1), bundle, state, config,
                     first_epoch);
}

TrainReport train_single(const ParallelCorpus& corpus, ModelBundle& bundle,
                         const TrainConfig& config) {
  AdaGradState state = AdaGradState::zeros_like(bundle);
  return train_single(corpus, bundle, state, config, 0);
}

namespace {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResumeError("cannot read " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ResumeError(path.string() + ": malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ResumeError("checkpoint metadata lacks '" + key + "'");
  return it->second;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ResumeError("checkpoint metadata: bad value for '" + key + "': '" + text + "'");
  return value;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

void checkpoint(const ModelBundle& bundle, const AdaGradState& state, const TrainConfig& config,
                std::size_t epochs_done, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string languages;
  for (const auto& [code, space] : bundle.spaces()) {
    export_table(space.table, space.vocab, dir / (code + std::string(kEmbeddingSuffix)));
    if (!languages.empty()) languages += ',';
    languages += code;
  }

  {
    std::size_t rows = 0;
    std::vector<std::string> names;
    for (const auto& [code, space] : bundle.spaces()) rows += space.table.rows();
    EmbeddingTable all({}, rows, bundle.dim());
    std::size_t r = 0;
    for (const auto& [code, space] : bundle.spaces()) {
      const EmbeddingTable* acc = state.contains(code) ? &state.accumulator(code) : nullptr;
      for (std::size_t id = 0; id < space.table.rows(); ++id, ++r) {
        names.push_back(code + ":" + std::to_string(id));
        if (acc) std::copy(acc->row(id).begin(), acc->row(id).end(), all.row(r).begin());
      }
    }
    std::ofstream out(dir / kStateFile, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / kStateFile).string());
    write_table(out, all, names);
    if (!out) throw IoError("failed writing " + (dir / kStateFile).string());
  }

  std::ofstream meta(dir / kMetaFile, std::ios::binary);
  if (!meta) throw IoError("cannot write " + (dir / kMetaFile).string());
  meta << "dim=" << config.dim << '\n'
       << "margin=" << format_double(config.margin) << '\n'
       << "noise=" << config.noise << '\n'
       << "lambda=" << format_double(config.lambda) << '\n'
       << "step=" << format_double(config.step) << '\n'
       << "batch=" << config.batch << '\n'
       << "epochs=" << config.epochs << '\n'
       << "cvm=" << to_string(config.kind) << '\n'
       << "doc_signal=" << (config.doc_signal ? "true" : "false") << '\n'
       << "mode=" << to_string(config.mode) << '\n'
       << "seed=" << config.seed << '\n'
       << "epsilon=" << format_double(config.epsilon) << '\n'
       << "threads=" << config.threads << '\n'
       << "epochs_done=" << epochs_done << '\n'
       << "languages=" << languages << '\n';
  if (!meta) throw IoError("failed writing " + (dir / kMetaFile).string());
}

namespace {

TrainConfig config_from_meta(const std::map<std::string, std::string>& kv) {
  TrainConfig c;
  c.dim = parse_number<std::size_t>(require(kv, "dim"), "dim");
  c.margin = parse_number<double>(require(kv, "margin"), "margin");
  c.noise = parse_number<std::size_t>(require(kv, "noise"), "noise");
  c.lambda = parse_number<double>(require(kv, "lambda"), "lambda");
  c.step = parse_number<double>(require(kv, "step"), "step");
  c.batch = parse_number<std::size_t>(require(kv, "batch"), "batch");
  c.epochs = parse_number<std::size_t>(require(kv, "epochs"), "epochs");
  c.kind = parse_composition_kind(require(kv, "cvm"));
  c.doc_signal = require(kv, "doc_signal") == "true";
  c.mode = parse_train_mode(require(kv, "mode"));
  c.seed = parse_number<std::uint64_t>(require(kv, "seed"), "seed");
  c.epsilon = parse_number<double>(require(kv, "epsilon"), "epsilon");
  c.threads = parse_number<std::size_t>(require(kv, "threads"), "threads");
  return c;
}

}  // namespace

Checkpoint resume(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ResumeError("checkpoint directory " + dir.string() + " does not exist");
  if (!std::filesystem::exists(dir / kMetaFile))
    throw ResumeError(dir.string() + " is not a checkpoint (no " + std::string(kMetaFile) + ")");
  try {
    const auto kv = read_key_values(dir / kMetaFile);
    const TrainConfig config = config_from_meta(kv);
    const auto epochs_done = parse_number<std::size_t>(require(kv, "epochs_done"), "epochs_done");
    ModelBundle bundle(config.dim, config.kind);
    for (const auto& code : split_commas(require(kv, "languages"))) {
      auto imported = import_table(dir / (code + std::string(kEmbeddingSuffix)));
      bundle.add_language(code, std::move(imported.vocab), std::move(imported.table));
    }

    std::ifstream in(dir / kStateFile, std::ios::binary);
    if (!in) throw ResumeError("missing " + (dir / kStateFile).string());
    NamedTable named = read_table(in, (dir / kStateFile).string());
    AdaGradState state = AdaGradState::zeros_like(bundle);
    if (named.table.dim() != config.dim) throw ResumeError("AdaGrad state has the wrong dimensionality");
    std::size_t expected_rows = 0;
    for (const auto& [code, space] : bundle.spaces()) expected_rows += space.table.rows();
    if (named.names.size() != expected_rows)
      throw ResumeError("AdaGrad state has " + std::to_string(named.names.size()) +
                        " rows, expected " + std::to_string(expected_rows));
    for (std::size_t r = 0; r < named.names.size(); ++r) {
      const std::string& name = named.names[r];
      const auto colon = name.rfind(':');
      if (colon == std::string::npos) throw ResumeError("bad AdaGrad row name '" + name + "'");
      const std::string code = name.substr(0, colon);
      const auto id = parse_number<std::size_t>(name.substr(colon + 1), "state row");
      if (!state.contains(code)) throw ResumeError("AdaGrad row for unknown language '" + code + "'");
      EmbeddingTable& acc = state.accumulator(code);
      if (id >= acc.rows()) throw ResumeError("AdaGrad row '" + name + "' out of range");
      for (double v : named.table.row(r))
        if (v < 0.0) throw ResumeError("negative AdaGrad accumulator in row '" + name + "'");
      std::copy(named.table.row(r).begin(), named.table.row(r).end(), acc.row(id).begin());
    }
    return Checkpoint{std::move(bundle), std::move(state), config, epochs_done};
  } catch (const ResumeError&) {
    throw;
  } catch (const Error& e) {
    throw ResumeError("cannot resume from " + dir.string() + ": " + e.what());
  }
}

ModelBundle load_model(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("model directory " + dir.string() + " does not exist");
  std::size_t dim = 0;
  CompositionKind kind = CompositionKind::Add;
  std::vector<std::string> languages;
  if (std::filesystem::exists(dir / kMetaFile)) {
    const auto kv = read_key_values(dir / kMetaFile);
    dim = parse_number<std::size_t>(require(kv, "dim"), "dim");
    kind = parse_composition_kind(require(kv, "cvm"));
    languages = split_commas(require(kv, "languages"));
  } else {
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.path().extension() == kEmbeddingSuffix) languages.push_back(entry.path().stem().string());
    std::sort(languages.begin(), languages.end());
  }
  if (languages.empty()) throw IoError("no embeddings found in " + dir.string());

  std::vector<ImportedTable> tables;
  for (const auto& code : languages) tables.push_back(import_table(dir / (code + std::string(kEmbeddingSuffix))));
  if (dim == 0) dim = tables.front().table.dim();
  ModelBundle bundle(dim, kind);
  for (std::size_t i = 0; i < languages.size(); ++i)
    bundle.add_language(languages[i], std::move(tables[i].vocab), std::move(tables[i].table));
  return bundle;
}

}  // namespace mlcvm
