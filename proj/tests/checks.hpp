#pragma once

// End-to-end witnesses shared by the unit tests and the acceptance binary.

#include <filesystem>

#include "fixtures.hpp"
#include "mlcvm/objective.hpp"
#include "mlcvm/training.hpp"

namespace checks {

inline bool same_parameters(const mlcvm::ModelBundle& a, const mlcvm::ModelBundle& b) {
  if (a.languages() != b.languages() || a.dim() != b.dim()) return false;
  for (const auto& l : a.languages())
    if (a.table(l) != b.table(l) || a.at(l).vocab.tokens() != b.at(l).vocab.tokens()) return false;
  return true;
}

struct JointWitness {
  // Joint run equals: en-de batch, then an en-fr batch computed against the
  // en table as updated by the en-de batch.
  bool replay_matches = false;
  // The en-fr update differs from one computed against the initial en table.
  bool pivot_update_visible = false;
  // The en-de batch moved the shared en row.
  bool shared_row_moved = false;
};

// Two sub-corpora of two pairs each, batch = 2, one epoch: exactly one
// minibatch per sub-corpus, en-de first. With two pairs, noise for a pair is
// always the other pair's target, so the en-fr batch can be recomputed by
// hand.
inline JointWitness joint_sharing_witness() {
  using namespace mlcvm;
  std::map<std::string, Vocabulary> vocabs;
  const ParallelCorpus de = fixtures::parallel({"shared a", "shared b"}, {"x y", "z"}, "en", "de",
                                               vocabs["en"], vocabs["de"]);
  const ParallelCorpus fr = fixtures::parallel({"shared c", "d shared"}, {"p", "q r"}, "en", "fr",
                                               vocabs["en"], vocabs["fr"]);
  TrainConfig config;
  config.dim = 4;
  config.margin = 4.0;
  config.noise = 2;
  config.batch = 2;
  config.epochs = 1;
  config.lambda = 0.5;
  config.step = 0.1;
  config.mode = TrainMode::Joint;
  config.seed = 5;
  const ModelBundle init = fixtures::bundle_for(vocabs, config.dim, config.kind, 17);

  ModelBundle joint = init;
  AdaGradState joint_state = AdaGradState::zeros_like(joint);
  const std::vector<ParallelCorpus> both{de, fr};
  train_joint(both, joint, joint_state, config, 0);

  auto fr_batch = [&](const ModelBundle& tables) {
    SparseGradient g;
    for (std::size_t i = 0; i < 2; ++i) {
      const std::vector<NoiseSample> noise(config.noise, NoiseSample{fr.pairs[1 - i].target, 1 - i});
      g.merge(pair_loss_and_grads(fr.pairs[i], noise, tables, {"en", "fr"}, config.kind, config.margin)
                  .gradient);
    }
    return g;
  };

  ModelBundle replay = init;
  AdaGradState replay_state = AdaGradState::zeros_like(replay);
  train_joint(std::span<const ParallelCorpus>(&de, 1), replay, replay_state, config, 0);
  const TokenId shared = *init.at("en").vocab.find("shared");
  const bool moved = [&] {
    auto a = init.table("en").row(shared);
    auto b = replay.table("en").row(shared);
    return !std::equal(a.begin(), a.end(), b.begin());
  }();
  adagrad_apply(replay, fr_batch(replay), replay_state, config);

  ModelBundle stale = init;
  AdaGradState stale_state = AdaGradState::zeros_like(stale);
  adagrad_apply(stale, fr_batch(init), stale_state, config);

  JointWitness w;
  w.replay_matches = same_parameters(joint, replay) && joint_state == replay_state;
  w.pivot_update_visible = joint.table("fr") != stale.table("fr");
  w.shared_row_moved = moved;
  return w;
}

// Train 2 epochs, checkpoint, resume, train 2 more; compare with 4
// uninterrupted epochs.
inline bool resume_matches_uninterrupted(const std::filesystem::path& dir,
                                         mlcvm::CompositionKind kind = mlcvm::CompositionKind::Add) {
  using namespace mlcvm;
  const auto toy = fixtures::toy(60, 40, 8, kind);
  TrainConfig config;
  config.dim = 8;
  config.margin = 8;
  config.noise = 3;
  config.batch = 10;
  config.kind = kind;
  config.seed = 99;

  config.epochs = 4;
  ModelBundle full = toy.bundle;
  AdaGradState full_state = AdaGradState::zeros_like(full);
  train_single(toy.corpus, full, full_state, config, 0);

  config.epochs = 2;
  ModelBundle part = toy.bundle;
  AdaGradState part_state = AdaGradState::zeros_like(part);
  train_single(toy.corpus, part, part_state, config, 0);
  checkpoint(part, part_state, config, 2, dir);
  Checkpoint cp = resume(dir);
  train_single(toy.corpus, cp.bundle, cp.state, cp.config, cp.epochs_done);
  return same_parameters(full, cp.bundle) && full_state == cp.state;
}

}  // namespace checks
