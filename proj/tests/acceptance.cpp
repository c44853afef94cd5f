// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every criterion also has a wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "fixtures.hpp"
#include "mlcvm/cli.hpp"
#include "mlcvm/evaluation.hpp"
#include "mlcvm/objective.hpp"
#include "mlcvm/synthetic.hpp"
#include "mlcvm/training.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace mlcvm;
using testutil::read_file;
using testutil::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  testutil::write_file(p, text);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1: gradients against central differences

Outcome gradients() {
  Outcome o{true, ""};
  struct Case {
    const char* name;
    std::function<oracle::TrialStats()> run;
  };
  const std::vector<Case> cases{
      {"add/sentence", [] { return oracle::pair_gradient_trials(CompositionKind::Add, 100, 1001); }},
      {"bi/sentence", [] { return oracle::pair_gradient_trials(CompositionKind::Bi, 100, 1002); }},
      {"add/document", [] { return oracle::doc_gradient_trials(CompositionKind::Add, 100, 1003, false); }},
      {"bi/document", [] { return oracle::doc_gradient_trials(CompositionKind::Bi, 100, 1004, false); }},
  };
  for (const auto& c : cases) {
    const auto s = c.run();
    const bool ok = s.instances == 100 && s.max_rel_error < 1e-6 && s.active_terms > 0 &&
                    s.active_terms < s.terms;
    o.pass = o.pass && ok;
    o.detail += std::string(c.name) + " max_rel=" + fmt("%.2e", s.max_rel_error) +
                " active=" + std::to_string(s.active_terms) + "/" + std::to_string(s.terms) + " ";
  }
  return o;
}

// ---- 2: objective invariants

Outcome invariants() {
  Rng rng(2024);
  std::size_t hinge_bad = 0, zero_bad = 0, zero_cases = 0, energy_bad = 0, adagrad_bad = 0;
  const int n = 1000;
  for (int t = 0; t < n; ++t) {
    const auto kind = t % 2 ? CompositionKind::Bi : CompositionKind::Add;
    ModelBundle bundle = oracle::random_bundle(rng, 1 + rng.below(5), kind);
    const ParallelPair pair{oracle::random_sentence(rng), oracle::random_sentence(rng), 0};
    std::vector<NoiseSample> noise;
    for (std::size_t i = 0, k = 1 + rng.below(3); i < k; ++i)
      noise.push_back({oracle::random_sentence(rng), i + 1});
    const double margin = 0.01 + 4 * rng.uniform();
    const auto r = pair_loss_and_grads(pair, noise, bundle, {"src", "tgt"}, kind, margin);
    const double h = hinge(rng.normal(0, 3), rng.normal(0, 3), rng.normal(0, 3));
    if (r.loss.hinge_total < 0 || h < 0) ++hinge_bad;
    if (r.loss.hinge_total == 0.0) {
      ++zero_cases;
      if (!r.gradient.empty()) ++zero_bad;
    }
  }
  for (int t = 0; t < n; ++t) {
    Vec a(1 + rng.below(8)), b(a.size());
    for (auto& v : a) v = rng.normal(0, 2);
    for (auto& v : b) v = rng.normal(0, 2);
    if (energy(a, b) != energy(b, a) || energy(a, b) < 0 || energy(a, a) != 0) ++energy_bad;
  }
  {
    ModelBundle b(3, CompositionKind::Add);
    Vocabulary v;
    for (int i = 0; i < 10; ++i) v.add(std::to_string(i));
    b.add_language("en", std::move(v), init_table(10, 3, 1, "en"));
    auto state = AdaGradState::zeros_like(b);
    TrainConfig c;
    for (int t = 0; t < n; ++t) {
      SparseGradient g;
      for (int j = 0; j < 3; ++j) {
        Vec row(3);
        for (auto& x : row) x = rng.normal(0, 3);
        g.accumulate("en", static_cast<TokenId>(rng.below(10)), row);
      }
      c.lambda = rng.uniform();
      const auto before = state.accumulator("en").data();
      adagrad_apply(b, g, state, c);
      const auto& after = state.accumulator("en").data();
      for (std::size_t i = 0; i < after.size(); ++i) adagrad_bad += after[i] < before[i];
    }
  }
  const bool pass = hinge_bad == 0 && zero_bad == 0 && zero_cases > 0 && energy_bad == 0 && adagrad_bad == 0;
  return {pass, "cases=" + std::to_string(n) + " each; negative_hinge=" + std::to_string(hinge_bad) +
                    " zero_hinge_with_gradient=" + std::to_string(zero_bad) + "/" +
                    std::to_string(zero_cases) + " energy_violations=" + std::to_string(energy_bad) +
                    " accumulator_decreases=" + std::to_string(adagrad_bad)};
}

// Writes sentences and documents of every language in langs to dir.
synthetic::LatentCorpus write_corpus(const std::filesystem::path& dir,
                                     const std::vector<std::string>& langs, std::uint64_t seed) {
  synthetic::Options opt;  // 500 sentences, 200 latent words, 4 topics
  opt.seed = seed;
  const auto c = synthetic::generate(opt);
  for (const auto& l : langs) {
    write_lines(dir / (l + ".txt"), synthetic::sentence_lines(c, l));
    write_lines(dir / (l + ".train.docs"), synthetic::document_lines(c, c.train_documents, l));
    write_lines(dir / (l + ".test.docs"), synthetic::document_lines(c, c.test_documents, l));
  }
  return c;
}

std::vector<LabeledDocument> docs_for(const ModelBundle& bundle, const std::string& lang,
                                      const std::filesystem::path& path) {
  Vocabulary v = bundle.at(lang).vocab;
  return load_documents(path, v, VocabPolicy::Frozen);
}

double extra_value(const EvalReport& r, const std::string& train, const std::string& test,
                   const std::string& metric) {
  for (const auto& e : r.extra)
    if (e.train_language == train && e.test_language == test && e.metric == metric) return e.value;
  return NAN;
}

TrainConfig desk_config(std::size_t dim) {
  TrainConfig c;
  c.dim = dim;
  c.margin = static_cast<double>(dim);
  c.noise = 10;
  c.lambda = 1.0;
  c.step = 0.05;
  c.batch = 10;
  c.epochs = 100;
  c.seed = 1;
  return c;
}

// ---- 3: bilingual document classification on synthetic data

Outcome bilingual_cldc() {
  TempDir dir;
  write_corpus(dir.path(), {"en", "de"}, 2014);
  std::map<std::string, Vocabulary> vocabs;
  const auto corpus = load_parallel_corpus(dir / "en.txt", dir / "de.txt", "en", "de", vocabs["en"],
                                           vocabs["de"], false);
  TrainConfig config = desk_config(16);
  ModelBundle bundle = fixtures::bundle_for(vocabs, config.dim, config.kind, config.seed);
  train_single(corpus, bundle, config);

  const auto train = docs_for(bundle, "en", dir / "en.train.docs");
  const auto test = docs_for(bundle, "de", dir / "de.test.docs");
  const auto r = cldc_run("en", train, "de", test, bundle, {});
  const double acc = r.primary.at(0).value;
  const double base = extra_value(r, "en", "de", "majority_baseline");
  return {acc >= 0.90 && base <= 0.35,
          "en->de accuracy=" + fmt("%.4f", acc) + " (>= 0.90) majority_baseline=" + fmt("%.4f", base) +
              " (<= 0.35) test_docs=" + std::to_string(r.primary.at(0).support)};
}

// ---- 4: pivot effect

Outcome pivot() {
  TempDir dir;
  const auto latent = write_corpus(dir.path(), {"en", "de", "fr"}, 2014);
  std::map<std::string, Vocabulary> vocabs;
  std::vector<ParallelCorpus> corpora;
  corpora.push_back(load_parallel_corpus(dir / "en.txt", dir / "de.txt", "en", "de", vocabs["en"],
                                         vocabs["de"], false));
  corpora.push_back(load_parallel_corpus(dir / "en.txt", dir / "fr.txt", "en", "fr", vocabs["en"],
                                         vocabs["fr"], false));
  TrainConfig config = desk_config(64);
  config.mode = TrainMode::Joint;
  ModelBundle bundle = fixtures::bundle_for(vocabs, config.dim, config.kind, config.seed);
  train_joint(corpora, bundle, config);

  // Latent words seen in both de and fr.
  std::vector<std::pair<TokenId, TokenId>> rows;
  for (std::size_t w = 0; w < latent.options.latent_vocab; ++w) {
    const auto d = bundle.at("de").vocab.find(synthetic::surface_word(latent, "de", w));
    const auto f = bundle.at("fr").vocab.find(synthetic::surface_word(latent, "fr", w));
    if (d && f) rows.emplace_back(*d, *f);
  }
  const auto& de = bundle.table("de");
  const auto& fr = bundle.table("fr");
  double trans = 0;
  for (auto [d, f] : rows) trans += cosine_similarity(de.row(d), fr.row(f));
  trans /= static_cast<double>(rows.size());
  std::vector<double> random;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (i != j) random.push_back(cosine_similarity(de.row(rows[i].first), fr.row(rows[j].second)));
  double mean = 0;
  for (double x : random) mean += x;
  mean /= static_cast<double>(random.size());
  double var = 0;
  for (double x : random) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(random.size() - 1));
  const double gap_sd = (trans - mean) / sd;

  DocumentSets train, test;
  for (const std::string l : {"de", "fr"}) {
    train[l] = docs_for(bundle, l, dir / (l + ".train.docs"));
    test[l] = docs_for(bundle, l, dir / (l + ".test.docs"));
  }
  const auto r = transfer_matrix({"de", "fr"}, train, test, bundle, {});
  double acc = NAN;
  for (const auto& e : r.primary)
    if (e.train_language == "de" && e.test_language == "fr") acc = e.value;
  const double base = extra_value(r, "de", "fr", "majority_baseline");
  return {gap_sd >= 3.0 && acc > base,
          "words=" + std::to_string(rows.size()) + " translation_cos=" + fmt("%.4f", trans) +
              " random_cos=" + fmt("%.4f", mean) + " sd=" + fmt("%.4f", sd) + " gap=" + fmt("%.2f", gap_sd) +
              "sd (>= 3) de->fr accuracy=" + fmt("%.4f", acc) + " majority_baseline=" + fmt("%.4f", base)};
}

// ---- 5: joint-mode sharing

Outcome joint_sharing() {
  const auto w = checks::joint_sharing_witness();
  const auto toy = fixtures::toy(60, 40, 8);
  TrainConfig config = desk_config(8);
  config.noise = 3;
  config.epochs = 5;
  ModelBundle single = toy.bundle, joint = toy.bundle;
  AdaGradState s1 = AdaGradState::zeros_like(single), s2 = AdaGradState::zeros_like(joint);
  const auto r1 = train_single(toy.corpus, single, s1, config);
  config.mode = TrainMode::Joint;
  const auto r2 = train_joint(std::span<const ParallelCorpus>(&toy.corpus, 1), joint, s2, config);
  bool same_log = r1.epochs.size() == r2.epochs.size();
  for (std::size_t i = 0; same_log && i < r1.epochs.size(); ++i)
    same_log = r1.epochs[i].hinge_total == r2.epochs[i].hinge_total &&
               r1.epochs[i].updates == r2.epochs[i].updates;
  const bool one_equals_single = checks::same_parameters(single, joint) && s1 == s2 && same_log;
  auto b = [](bool x) { return x ? "yes" : "no"; };
  return {w.replay_matches && w.pivot_update_visible && w.shared_row_moved && one_equals_single,
          std::string("replay_matches=") + b(w.replay_matches) + " pivot_update_visible=" +
              b(w.pivot_update_visible) + " shared_row_moved=" + b(w.shared_row_moved) +
              " one_subcorpus_bitwise_single=" + b(one_equals_single)};
}

// ---- 6: document loss on one-sentence documents

Outcome doc_reduction() {
  Rng rng(606);
  double worst = 0;
  bool structure = true;
  std::size_t active = 0;
  const int n = 500;
  for (int t = 0; t < n; ++t) {
    ModelBundle bundle = oracle::random_bundle(rng, 1 + rng.below(5), CompositionKind::Add);
    const ParallelPair pair{oracle::random_sentence(rng), oracle::random_sentence(rng), 0};
    std::vector<NoiseSample> noise;
    std::vector<std::vector<Sentence>> noise_docs;
    for (std::size_t i = 0, k = 1 + rng.below(3); i < k; ++i) {
      noise.push_back({oracle::random_sentence(rng), i + 1});
      noise_docs.push_back({noise.back().sentence});
    }
    const double margin = 0.1 + 3 * rng.uniform();
    const LanguagePair langs{"src", "tgt"};
    const auto p = pair_loss_and_grads(pair, noise, bundle, langs, CompositionKind::Add, margin);
    const auto d = doc_loss_and_grads({{pair.source}, {pair.target}}, noise_docs, {}, bundle, langs,
                                      CompositionKind::Add, margin, false);
    worst = std::max(worst, std::abs(p.loss.hinge_total - d.loss.hinge_total));
    active += p.loss.active_noise_count > 0;
    structure = structure && p.gradient.size() == d.gradient.size() &&
                p.loss.active_noise_count == d.loss.active_noise_count;
    for (const auto& [key, g] : p.gradient.entries()) {
      const Vec* other = d.gradient.find(key.language, key.token);
      if (!other) {
        structure = false;
        continue;
      }
      for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(g[j] - (*other)[j]));
    }
  }
  return {structure && worst <= 1e-12 && active > 0,
          "instances=" + std::to_string(n) + " active=" + std::to_string(active) +
              " max_abs_diff=" + fmt("%.2e", worst) + " (<= 1e-12)"};
}

// ---- 7: determinism and persistence

Outcome determinism() {
  TempDir dir;
  synthetic::Options opt;
  opt.sentences = 150;
  opt.latent_vocab = 60;
  const auto c = synthetic::generate(opt);
  write_lines(dir / "en.txt", synthetic::sentence_lines(c, "en"));
  write_lines(dir / "de.txt", synthetic::sentence_lines(c, "de"));
  std::ostringstream out, err;
  const auto p = [&](const std::string& n) { return (dir / n).string(); };
  const int c1 = cli::run({"train", "--pair", "en:de:" + p("en.txt") + ":" + p("de.txt"), "--dim", "16",
                           "--epochs", "5", "--noise", "5", "--batch", "10", "--seed", "7", "--out",
                           p("run1")},
                          out, err);
  const int c2 = cli::run({"train", "--config", p("run1/manifest.ini"), "--out", p("run2")}, out, err);
  bool replay = c1 == 0 && c2 == 0;
  for (auto f : {"en.vec", "de.vec", "adagrad.state", "loss.tsv", "meta.ini"})
    replay = replay && read_file(dir / "run1" / f) == read_file(dir / "run2" / f);

  std::filesystem::create_directories(dir / "ckpt");
  const bool resumed = checks::resume_matches_uninterrupted(dir / "ckpt", CompositionKind::Add) &&
                       checks::resume_matches_uninterrupted(dir / "ckpt", CompositionKind::Bi);

  bool round_trip = c1 == 0;
  if (round_trip) {
    for (const std::string l : {"en", "de"}) {
      const auto imported = import_table(dir / "run1" / (l + ".vec"));
      export_table(imported.table, imported.vocab, dir / (l + ".again.vec"));
      round_trip = round_trip && read_file(dir / "run1" / (l + ".vec")) == read_file(dir / (l + ".again.vec"));
    }
  }
  auto b = [](bool x) { return x ? "yes" : "no"; };
  return {replay && resumed && round_trip, std::string("manifest_replay_bitwise=") + b(replay) +
                                               " resume_equals_uninterrupted=" + b(resumed) +
                                               " export_import_export_identical=" + b(round_trip)};
}

// ---- 8: classifiers

Outcome classifiers() {
  // Points in [-1,1]^6 labeled by argmax of a fixed linear map, kept only
  // when the best class wins by at least 0.5: separable by construction.
  Rng rng(808);
  const std::size_t dim = 6, classes = 4;
  std::vector<Vec> w(classes, Vec(dim));
  for (auto& row : w)
    for (auto& x : row) x = rng.normal(0, 1);
  std::vector<ClassExample> ex;
  while (ex.size() < 200) {
    Vec x(dim);
    for (auto& v : x) v = 2 * rng.uniform() - 1;
    std::vector<double> s(classes);
    for (std::size_t k = 0; k < classes; ++k)
      for (std::size_t j = 0; j < dim; ++j) s[k] += w[k][j] * x[j];
    std::vector<double> sorted = s;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] - sorted[1] < 0.5) continue;
    ex.push_back({x, static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin())});
  }
  std::size_t first_perfect = 0;
  for (std::size_t epochs = 1; epochs <= 10 && first_perfect == 0; ++epochs) {
    const auto m = train_multiclass(ex, {epochs, 1.0, 1});
    std::size_t correct = 0;
    for (const auto& e : ex) correct += m.predict(e.x) == e.label;
    if (correct == ex.size()) first_perfect = epochs;
  }

  using Labels = std::vector<std::set<std::string>>;
  struct Fixture {
    Labels pred, gold;
    double expected;
  };
  const std::vector<Fixture> fixtures{
      {{{"a", "x"}}, {{"a", "c"}}, 0.5},                                  // TP=1 FP=1 FN=1
      {{{"a"}, {"b", "c"}, {}}, {{"a"}, {"b", "c"}, {}}, 1.0},            // perfect
      {{{}, {}}, {{"a"}, {"b"}}, 0.0},                                    // nothing predicted
      {{{"a"}, {"b", "z"}, {}}, {{"a"}, {"b", "c"}, {"d"}}, 4.0 / 7.0},   // TP=2 FP=1 FN=2
      {{{"a", "b", "c"}}, {{"a"}}, 0.5},                                  // TP=1 FP=2 FN=0
  };
  std::size_t f1_ok = 0;
  for (const auto& f : fixtures) f1_ok += std::abs(micro_f1(f.pred, f.gold) - f.expected) < 1e-15;
  return {first_perfect != 0 && f1_ok == fixtures.size(),
          "separable_examples=" + std::to_string(ex.size()) + " perfect_after_epochs=" +
              (first_perfect ? std::to_string(first_perfect) : std::string("never")) +
              " (<= 10) micro_f1_fixtures=" + std::to_string(f1_ok) + "/" + std::to_string(fixtures.size())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", 10, gradients},
      {2, "objective invariants", 10, invariants},
      {3, "synthetic bilingual classification", 120, bilingual_cldc},
      {4, "pivot effect", 180, pivot},
      {5, "joint-mode sharing", 5, joint_sharing},
      {6, "document loss reduction", 5, doc_reduction},
      {7, "determinism and persistence", 30, determinism},
      {8, "classifier correctness", 5, classifiers},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_seconds;
    failures += !pass;
    std::printf("%s %d %s: %s time=%.2fs (< %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
