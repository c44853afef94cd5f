#include "mlcvm/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mlcvm/corpus.hpp"
#include "mlcvm/embeddings.hpp"
#include "mlcvm/error.hpp"
#include "mlcvm/evaluation.hpp"
#include "mlcvm/random.hpp"
#include "mlcvm/training.hpp"

namespace fs = std::filesystem;

namespace mlcvm::cli {

namespace {

constexpr std::string_view kManifestFile = "manifest.ini";

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q.push_back('\\');
    q.push_back(c);
  }
  return q + "\"";
}

std::string quote_list(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + quote(items[i]);
  return s + "]";
}

std::string absolute(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

// Key=value lines in the format --config reads back.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}
  Manifest& set(const std::string& key, const std::string& value) {
    lines_.push_back(key + "=" + value);
    return *this;
  }
  void write(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::ofstream out(dir / kManifestFile, std::ios::binary);
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    std::string section = subcommand_;
    std::replace(section.begin(), section.end(), ' ', '.');
    out << "# mlcvm " << subcommand_ << " run manifest; replay with: mlcvm " << subcommand_
        << " --config <this file>\n[" << section << "]\n";
    for (const auto& l : lines_) out << l << '\n';
    if (!out) throw IoError("failed writing manifest in " + dir.string());
  }

 private:
  std::string subcommand_;
  std::vector<std::string> lines_;
};

bool non_empty_directory(const fs::path& dir) {
  return fs::exists(dir) && (!fs::is_directory(dir) || !fs::is_empty(dir));
}

void require_fresh_output(const fs::path& dir, bool force) {
  if (non_empty_directory(dir) && !force)
    throw ConfigError("output path " + dir.string() + " exists and is not empty (use --force)");
}

struct LangFile {
  std::string language;
  std::string path;
};

LangFile parse_lang_file(const std::string& spec, const std::string& flag) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
    throw ConfigError(flag + " expects LANG:FILE, got '" + spec + "'");
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

struct PairSpec {
  std::string source, target, source_file, target_file;
};

PairSpec parse_pair(const std::string& spec) {
  std::array<std::size_t, 3> cuts{};
  std::size_t from = 0;
  for (auto& cut : cuts) {
    cut = spec.find(':', from);
    if (cut == std::string::npos)
      throw ConfigError("--pair expects LANG1:LANG2:FILE1:FILE2, got '" + spec + "'");
    from = cut + 1;
  }
  PairSpec p{spec.substr(0, cuts[0]), spec.substr(cuts[0] + 1, cuts[1] - cuts[0] - 1),
             spec.substr(cuts[1] + 1, cuts[2] - cuts[1] - 1), spec.substr(cuts[2] + 1)};
  if (p.source.empty() || p.target.empty() || p.source_file.empty() || p.target_file.empty())
    throw ConfigError("--pair expects LANG1:LANG2:FILE1:FILE2, got '" + spec + "'");
  return p;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> pairs;
  std::size_t dim = 128;
  std::optional<double> margin;
  std::size_t noise = 50;
  double lambda = 1.0;
  double step = 0.05;
  std::size_t batch = 50;
  std::size_t epochs = 100;
  std::string cvm = "add";
  bool doc_signal = false;
  std::string mode = "single";
  std::uint64_t seed = 1;
  double epsilon = 1e-6;
  std::size_t threads = 1;
  std::string out;
  bool force = false;
};

void add_train_options(CLI::App& cmd, TrainArgs& a) {
  cmd.add_option("--pair", a.pairs, "Parallel corpus LANG1:LANG2:FILE1:FILE2 (repeatable)")
      ->required();
  cmd.add_option("--dim", a.dim, "Embedding dimensionality [reference setup]")
      ->capture_default_str();
  cmd.add_option("--margin", a.margin, "Hinge margin m > 0; defaults to --dim [reference setup: m = d]");
  cmd.add_option("--noise", a.noise, "Noise samples k per pair [reference setup; 1 and 10 also used]")
      ->capture_default_str();
  cmd.add_option("--lambda", a.lambda, "L2 coefficient, applied to touched rows [reference setup]")
      ->capture_default_str();
  cmd.add_option("--step", a.step, "AdaGrad base step [reference setup; 0.01 also used]")
      ->capture_default_str();
  cmd.add_option("--batch", a.batch, "Minibatch size [reference setup; 10 also used]")
      ->capture_default_str();
  cmd.add_option("--epochs", a.epochs, "Passes over the corpus [reference setup for RCV-style runs]")
      ->capture_default_str();
  cmd.add_option("--cvm", a.cvm, "Composition: add or bi [toolkit choice]")->capture_default_str();
  cmd.add_flag("--doc-signal", a.doc_signal,
               "Add the document-level signal; parallel files mark documents with '<doc>' lines "
               "[toolkit choice]");
  cmd.add_option("--mode", a.mode, "single or joint (pairs share their first language) [toolkit choice]")
      ->capture_default_str();
  cmd.add_option("--seed", a.seed, "Seed for every random choice [toolkit choice]")->capture_default_str();
  cmd.add_option("--epsilon", a.epsilon, "AdaGrad stabilizer [toolkit choice]")->capture_default_str();
  cmd.add_option("--threads", a.threads,
                 "Gradient workers per minibatch; 1 is bitwise deterministic [toolkit choice]")
      ->capture_default_str();
  cmd.add_option("--out", a.out, "Output directory for checkpoint, manifest and loss log")->required();
  cmd.add_flag("--force", a.force, "Allow writing into a non-empty output directory");
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  config.dim = a.dim;
  config.margin = a.margin.value_or(static_cast<double>(a.dim));
  config.noise = a.noise;
  config.lambda = a.lambda;
  config.step = a.step;
  config.batch = a.batch;
  config.epochs = a.epochs;
  config.kind = parse_composition_kind(a.cvm);
  config.doc_signal = a.doc_signal;
  config.mode = parse_train_mode(a.mode);
  config.seed = a.seed;
  config.epsilon = a.epsilon;
  config.threads = a.threads;
  config.validate();

  std::vector<PairSpec> pairs;
  for (const auto& p : a.pairs) pairs.push_back(parse_pair(p));
  if (config.mode == TrainMode::Single && pairs.size() != 1)
    throw ConfigError("--mode single takes exactly one --pair (got " + std::to_string(pairs.size()) +
                      "); use --mode joint");
  for (const auto& p : pairs)
    if (p.source != pairs.front().source)
      throw ConfigError("joint pairs must share their first (pivot) language: '" +
                        pairs.front().source + "' vs '" + p.source + "'");

  const fs::path out_dir(a.out);
  require_fresh_output(out_dir, a.force);

  std::vector<std::string> resolved_pairs;
  for (const auto& p : pairs)
    resolved_pairs.push_back(p.source + ":" + p.target + ":" + absolute(p.source_file) + ":" +
                             absolute(p.target_file));
  Manifest manifest("train");
  manifest.set("pair", quote_list(resolved_pairs))
      .set("dim", std::to_string(config.dim))
      .set("margin", format_double(config.margin))
      .set("noise", std::to_string(config.noise))
      .set("lambda", format_double(config.lambda))
      .set("step", format_double(config.step))
      .set("batch", std::to_string(config.batch))
      .set("epochs", std::to_string(config.epochs))
      .set("cvm", quote(std::string(to_string(config.kind))))
      .set("doc-signal", config.doc_signal ? "true" : "false")
      .set("mode", quote(std::string(to_string(config.mode))))
      .set("seed", std::to_string(config.seed))
      .set("epsilon", format_double(config.epsilon))
      .set("threads", std::to_string(config.threads))
      .set("out", quote(absolute(a.out)));
  manifest.write(out_dir);

  std::map<std::string, Vocabulary> vocabs;
  std::vector<ParallelCorpus> corpora;
  for (const auto& p : pairs) {
    corpora.push_back(load_parallel_corpus(p.source_file, p.target_file, p.source, p.target,
                                           vocabs[p.source], vocabs[p.target], config.doc_signal));
    err << "loaded " << corpora.back().pairs.size() << " " << p.source << "-" << p.target
        << " pairs";
    if (config.doc_signal) err << " in " << corpora.back().documents.size() << " documents";
    err << '\n';
    if (config.doc_signal && corpora.back().documents.empty())
      err << "warning: no '<doc>' markers in " << p.source_file
          << "; training that corpus at sentence level\n";
  }

  ModelBundle bundle(config.dim, config.kind);
  for (auto& [code, vocab] : vocabs) {
    auto table = init_table(vocab.size(), config.dim, derive_seed(config.seed, fnv1a(code)), code);
    bundle.add_language(code, std::move(vocab), std::move(table));
  }

  AdaGradState state = AdaGradState::zeros_like(bundle);
  const TrainReport report = train_joint(corpora, bundle, state, config, 0);

  {
    std::ofstream loss(out_dir / "loss.tsv", std::ios::binary);
    std::ofstream timing(out_dir / "timing.tsv", std::ios::binary);
    loss << "epoch\thinge_total\tregularizer\tactive_fraction\tupdates\n";
    timing << "epoch\tseconds\n";
    for (const auto& e : report.epochs) {
      loss << e.epoch + 1 << '\t' << format_double(e.hinge_total) << '\t'
           << format_double(e.regularizer) << '\t' << format_double(e.active_fraction) << '\t'
           << e.updates << '\n';
      timing << e.epoch + 1 << '\t' << e.seconds << '\n';
    }
    if (!loss || !timing) throw IoError("failed writing loss log in " + out_dir.string());
  }
  checkpoint(bundle, state, config, report.epochs.size(), out_dir);
  if (!report.epochs.empty())
    out << "trained " << report.epochs.size() << " epochs; final hinge loss "
        << report.epochs.back().hinge_total << "; checkpoint in " << out_dir.string() << '\n';
  return kOk;
}

// --- model loading shared by eval/query/export ---------------------------

struct LoadedModel {
  ModelBundle bundle;
  bool doc_signal = false;
};

LoadedModel open_model(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("model directory '" + dir + "' does not exist");
  if (fs::exists(fs::path(dir) / kMetaFile)) {
    Checkpoint cp = resume(dir);
    return {std::move(cp.bundle), cp.config.doc_signal};
  }
  return {load_model(dir), false};
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::string> docs;
  std::string langs;
  std::string task = "single";
  std::string repr;
  std::size_t top_labels = 15;
  std::size_t perceptron_epochs = 10;
  double perceptron_rate = 1.0;
  std::uint64_t seed = 1;
  std::optional<std::size_t> dim;
  std::string out;
  bool force = false;
};

void add_eval_options(CLI::App& cmd, EvalArgs& a, bool transfer) {
  cmd.add_option("--model", a.model, "Checkpoint or embedding directory")->required();
  if (transfer) {
    cmd.add_option("--langs", a.langs, "Comma-separated languages (at least two)")->required();
    cmd.add_option("--docs", a.docs, "LANG:FILE used for both training and testing (repeatable)");
    cmd.add_option("--train", a.train, "LANG:FILE training documents (repeatable, overrides --docs)");
    cmd.add_option("--test", a.test, "LANG:FILE test documents (repeatable, overrides --docs)");
  } else {
    cmd.add_option("--train", a.train, "LANG:FILE labeled training documents")->required()->expected(1);
    cmd.add_option("--test", a.test, "LANG:FILE labeled test documents")->required()->expected(1);
  }
  cmd.add_option("--task", a.task, "single (accuracy) or multi (micro-F1) [toolkit choice]")
      ->capture_default_str();
  cmd.add_option("--repr", a.repr,
                 "avg (sentence average) or doc (document CVM); default avg, or doc for "
                 "multi-label tasks on models trained with --doc-signal [toolkit choice]");
  cmd.add_option("--top-labels", a.top_labels, "Multi-label: most frequent labels kept [reference setup]")
      ->capture_default_str();
  cmd.add_option("--perceptron-epochs", a.perceptron_epochs, "Averaged perceptron epochs [toolkit choice]")
      ->capture_default_str();
  cmd.add_option("--perceptron-rate", a.perceptron_rate, "Perceptron learning rate [toolkit choice]")
      ->capture_default_str();
  cmd.add_option("--seed", a.seed, "Seed for classifier shuffling [toolkit choice]")->capture_default_str();
  cmd.add_option("--dim", a.dim, "Expected model dimensionality (checked against the model)");
  cmd.add_option("--out", a.out,
                 "Optional directory for manifest, report.tsv and report.extra.tsv; the report "
                 "always goes to stdout");
  cmd.add_flag("--force", a.force, "Allow writing into a non-empty output directory");
}

std::vector<LabeledDocument> load_docs_for(const LangFile& spec, const ModelBundle& bundle) {
  Vocabulary vocab = bundle.at(spec.language).vocab;
  return load_documents(spec.path, vocab, VocabPolicy::Frozen);
}

int cmd_eval(const EvalArgs& a, bool transfer, std::ostream& out, std::ostream& err) {
  LoadedModel model = open_model(a.model);
  const ModelBundle& bundle = model.bundle;
  if (a.dim && *a.dim != bundle.dim())
    throw ConfigError("model in " + a.model + " has d=" + std::to_string(bundle.dim()) +
                      " but --dim " + std::to_string(*a.dim) + " was requested");

  ReprConfig config;
  config.kind = bundle.kind();
  config.task = parse_task_kind(a.task);
  if (a.repr.empty())
    config.level = (model.doc_signal && config.task == TaskKind::MultiLabel) ? ReprLevel::DocCvm
                                                                            : ReprLevel::SentenceAverage;
  else
    config.level = parse_repr_level(a.repr);
  config.top_labels = a.top_labels;
  config.perceptron.epochs = a.perceptron_epochs;
  config.perceptron.learning_rate = a.perceptron_rate;
  config.perceptron.seed = a.seed;
  if (config.top_labels == 0) throw ConfigError("--top-labels must be positive");

  const fs::path out_dir(a.out);
  if (!a.out.empty()) require_fresh_output(out_dir, a.force);

  auto resolve = [](const std::vector<std::string>& specs, const std::string& flag) {
    std::vector<std::string> r;
    for (const auto& s : specs) {
      const LangFile lf = parse_lang_file(s, flag);
      r.push_back(lf.language + ":" + absolute(lf.path));
    }
    return r;
  };
  Manifest manifest(transfer ? "eval transfer" : "eval cldc");
  manifest.set("model", quote(absolute(a.model)));
  if (transfer) {
    manifest.set("langs", quote(a.langs));
    if (!a.docs.empty()) manifest.set("docs", quote_list(resolve(a.docs, "--docs")));
  }
  if (!a.train.empty()) manifest.set("train", quote_list(resolve(a.train, "--train")));
  if (!a.test.empty()) manifest.set("test", quote_list(resolve(a.test, "--test")));
  manifest.set("task", quote(a.task))
      .set("repr", quote(config.level == ReprLevel::DocCvm ? "doc" : "avg"))
      .set("top-labels", std::to_string(config.top_labels))
      .set("perceptron-epochs", std::to_string(config.perceptron.epochs))
      .set("perceptron-rate", format_double(config.perceptron.learning_rate))
      .set("seed", std::to_string(config.perceptron.seed));
  if (!a.out.empty()) {
    manifest.set("out", quote(absolute(a.out)));
    manifest.write(out_dir);
  }

  EvalReport report;
  if (!transfer) {
    const LangFile train = parse_lang_file(a.train.front(), "--train");
    const LangFile test = parse_lang_file(a.test.front(), "--test");
    const auto train_docs = load_docs_for(train, bundle);
    const auto test_docs = load_docs_for(test, bundle);
    report = cldc_run(train.language, train_docs, test.language, test_docs, bundle, config);
  } else {
    std::vector<std::string> languages;
    std::stringstream ss(a.langs);
    for (std::string l; std::getline(ss, l, ',');)
      if (!l.empty()) languages.push_back(l);
    if (languages.size() < 2) throw ConfigError("--langs needs at least two languages");
    std::map<std::string, std::string> train_files, test_files;
    for (const auto& s : a.docs) {
      const LangFile lf = parse_lang_file(s, "--docs");
      train_files[lf.language] = test_files[lf.language] = lf.path;
    }
    for (const auto& s : a.train) {
      const LangFile lf = parse_lang_file(s, "--train");
      train_files[lf.language] = lf.path;
    }
    for (const auto& s : a.test) {
      const LangFile lf = parse_lang_file(s, "--test");
      test_files[lf.language] = lf.path;
    }
    DocumentSets train_sets, test_sets;
    for (const auto& l : languages) {
      if (!train_files.count(l) || !test_files.count(l))
        throw ConfigError("no documents given for language '" + l + "'");
      train_sets[l] = load_docs_for({l, train_files[l]}, bundle);
      test_sets[l] = load_docs_for({l, test_files[l]}, bundle);
    }
    report = transfer_matrix(languages, train_sets, test_sets, bundle, config);
  }

  if (!a.out.empty()) {
    std::ofstream primary(out_dir / "report.tsv", std::ios::binary);
    write_report_tsv(primary, report.primary);
    std::ofstream extra(out_dir / "report.extra.tsv", std::ios::binary);
    write_report_tsv(extra, report.extra);
    if (!primary || !extra) throw IoError("failed writing report in " + out_dir.string());
  }
  write_report_tsv(out, report.primary);
  for (const auto& e : report.extra)
    err << e.train_language << "->" << e.test_language << ' ' << e.metric << ' ' << e.value << '\n';
  for (const auto& l : report.flagged_labels)
    err << "warning: label '" << l << "' has no positive training document\n";
  return kOk;
}

// --- query -------------------------------------------------------------------

struct QueryArgs {
  std::string model;
  std::string word;
  std::size_t n = 10;
  std::string target = "all";
  std::string metric = "cosine";
  std::string out;
  bool force = false;
};

int cmd_query(const QueryArgs& a, std::ostream& out) {
  const LangFile word = parse_lang_file(a.word, "--word");
  const SimilarityMetric metric = parse_similarity_metric(a.metric);
  std::optional<fs::path> out_dir;
  if (!a.out.empty()) {
    out_dir = a.out;
    require_fresh_output(*out_dir, a.force);
    Manifest manifest("query");
    manifest.set("model", quote(absolute(a.model)))
        .set("word", quote(a.word))
        .set("n", std::to_string(a.n))
        .set("target", quote(a.target))
        .set("metric", quote(a.metric))
        .set("out", quote(absolute(a.out)));
    manifest.write(*out_dir);
  }
  const LoadedModel model = open_model(a.model);
  const auto neighbors =
      nearest_neighbors(model.bundle, word.language, word.path, a.n, a.target, metric);
  std::ostringstream rows;
  for (const auto& nb : neighbors)
    rows << nb.language << '\t' << nb.token << '\t' << format_double(nb.score) << '\n';
  out << rows.str();
  if (out_dir) {
    std::ofstream file(*out_dir / "neighbors.tsv", std::ios::binary);
    file << rows.str();
    if (!file) throw IoError("failed writing neighbors in " + out_dir->string());
  }
  return kOk;
}

// --- export ------------------------------------------------------------------

struct ExportArgs {
  std::string model;
  std::vector<std::string> langs;
  std::string out;
  bool force = false;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const fs::path out_dir(a.out);
  require_fresh_output(out_dir, a.force);
  const LoadedModel model = open_model(a.model);
  std::vector<std::string> languages = a.langs.empty() ? model.bundle.languages() : a.langs;
  for (const auto& l : languages) model.bundle.at(l);

  Manifest manifest("export");
  manifest.set("model", quote(absolute(a.model)));
  if (!a.langs.empty()) manifest.set("lang", quote_list(a.langs));
  manifest.set("out", quote(absolute(a.out)));
  manifest.write(out_dir);

  for (const auto& l : languages) {
    const auto& space = model.bundle.at(l);
    const fs::path file = out_dir / (l + std::string(kEmbeddingSuffix));
    export_table(space.table, space.vocab, file);
    out << "wrote " << file.string() << " (" << space.table.rows() << " x " << space.table.dim()
        << ")\n";
  }
  return kOk;
}

// CLI11 reads config files only at the top level; accept the flag after the
// subcommand too by moving it to the front.
std::vector<std::string> hoist_config(const std::vector<std::string>& args) {
  std::vector<std::string> front, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      front.push_back(args[i]);
      front.push_back(args[++i]);
    } else if (args[i].starts_with("--config=")) {
      front.push_back(args[i]);
    } else {
      rest.push_back(args[i]);
    }
  }
  front.insert(front.end(), rest.begin(), rest.end());
  return front;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilingual compositional word embeddings from parallel corpora", "mlcvm"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Run manifest or key=value file with a [subcommand] section; flags override it. "
                 "May also follow the subcommand name");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Learn joint-space embeddings from parallel corpora");
  add_train_options(*train, train_args);

  auto* eval = app.add_subcommand("eval", "Cross-lingual document classification");
  eval->require_subcommand(1);
  EvalArgs cldc_args, transfer_args;
  auto* cldc = eval->add_subcommand("cldc", "Train a classifier in one language, test in another");
  add_eval_options(*cldc, cldc_args, false);
  auto* transfer = eval->add_subcommand("transfer", "All ordered language pairs (matrix sans diagonal)");
  add_eval_options(*transfer, transfer_args, true);

  QueryArgs query_args;
  auto* query = app.add_subcommand("query", "Nearest neighbors of a word across languages");
  query->add_option("--model", query_args.model, "Checkpoint or embedding directory")->required();
  query->add_option("--word", query_args.word, "LANG:WORD to query")->required();
  query->add_option("--n", query_args.n, "Number of neighbors")->capture_default_str();
  query->add_option("--target", query_args.target, "Language to search, or 'all'")->capture_default_str();
  query->add_option("--metric", query_args.metric,
                    "cosine or euclidean (ranked by negated distance) [toolkit choice]")
      ->capture_default_str();
  query->add_option("--out", query_args.out, "Optional directory for manifest and neighbors.tsv");
  query->add_flag("--force", query_args.force, "Allow writing into a non-empty output directory");

  ExportArgs export_args;
  auto* exporter = app.add_subcommand("export", "Write embeddings in the text format");
  exporter->add_option("--model", export_args.model, "Checkpoint or embedding directory")->required();
  exporter->add_option("--lang", export_args.langs, "Only these languages (repeatable)");
  exporter->add_option("--out", export_args.out, "Output directory")->required();
  exporter->add_flag("--force", export_args.force, "Allow writing into a non-empty output directory");

  try {
    std::vector<std::string> reversed = hoist_config(args);
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (*train) return cmd_train(train_args, out, err);
    if (*cldc) return cmd_eval(cldc_args, false, out, err);
    if (*transfer) return cmd_eval(transfer_args, true, out, err);
    if (*query) return cmd_query(query_args, out);
    if (*exporter) return cmd_export(export_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace mlcvm::cli
