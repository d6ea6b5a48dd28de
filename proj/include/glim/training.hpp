#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "glim/autoencoder.hpp"
#include "glim/evaluation.hpp"
#include "glim/kb.hpp"
#include "glim/model.hpp"
#include "glim/objectives.hpp"
#include "glim/optimizer.hpp"
#include "glim/types.hpp"

namespace glim {

struct TrainConfig {
  int d = 256;
  int c = 16;
  double eta1 = 1.0 / 64;
  double lambda1 = std::pow(2.0, -14);
  double eta2 = std::pow(2.0, -14);
  double lambda2 = std::pow(2.0, -14);
  int k = 64;        // noise tails per positive (KB objective)
  int k_recon = 4;   // noise relations per positive (reconstruction objective)
  double rho = 1.0 / 64;
  int batch_size = 32;
  double poisson_mean = 1.0;
  bool joint = false;
  bool compositional = false;
  int max_epochs = 100;
  int eval_every = 1;
  int patience = 2;
  std::uint64_t seed = 1;
  int threads = 1;  // evaluation only; training is single-threaded

  // ablation toggles for the base-model settings
  bool normalize = true;       // maintenance normalization of relation matrices
  bool pure_gaussian = false;  // initialize matrices as G instead of (I+G)/2
  bool unigram_noise = false;  // frequency-proportional instead of uniform noise
};

struct EpochStats {
  double mean_l1 = 0.0;
  double mean_l2 = 0.0;
  std::uint64_t updates = 0;
};

// One pass over the training facts in shared-head batches. Positives are
// triples, or Poisson-length random-walk paths seeded at each triple when
// compositional training is on. With joint training, the epoch ends with one
// reconstruction step per relation in id order.
inline EpochStats train_epoch(const KnowledgeBase& kb, ModelParams& params,
                              AutoencoderParams& ae, OptimizerState& opt,
                              const TrainConfig& config, Rng& rng) {
  EpochStats stats;
  const auto& facts = kb.facts();
  if (facts.empty()) return stats;

  std::vector<std::uint32_t> order(facts.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  // Group the shuffled list by head, heads in first-appearance order.
  std::vector<std::vector<std::uint32_t>> by_head(kb.num_entities());
  std::vector<EntityId> head_order;
  for (std::uint32_t idx : order) {
    EntityId h = facts[idx].head;
    if (by_head[h].empty()) head_order.push_back(h);
    by_head[h].push_back(idx);
  }

  double l1_sum = 0.0;
  std::size_t n_pos = 0;
  std::optional<std::poisson_distribution<int>> poisson;
  if (config.compositional && config.poisson_mean > 0.0)
    poisson.emplace(config.poisson_mean);
  std::optional<std::discrete_distribution<EntityId>> unigram;
  if (config.unigram_noise) {
    auto weights = tail_frequencies(kb);
    unigram.emplace(weights.begin(), weights.end());
  }

  for (EntityId h : head_order) {
    const auto& group = by_head[h];
    for (std::size_t start = 0; start < group.size(); start += config.batch_size) {
      std::size_t end = std::min(group.size(), start + config.batch_size);
      for (std::size_t i = start; i < end; ++i) {
        const Triple& fact = facts[group[i]];
        PathSample positive;
        if (config.compositional) {
          int extra = poisson ? (*poisson)(rng) : 0;
          positive = extend_fact_walk(kb, rng, fact, 1 + extra);
        } else {
          positive = {fact.head, {fact.relation}, fact.tail};
        }
        auto noises = unigram ? sample_negatives_unigram(rng, config.k, *unigram)
                              : sample_negatives(rng, config.k, kb.num_entities());
        TermResult term = l1_term_grads(params, positive, noises, config.k);
        stats.updates += apply_updates(params, ae, opt, term.grads);
        l1_sum += term.objective;
        ++n_pos;
      }
    }
  }
  if (n_pos > 0) stats.mean_l1 = l1_sum / n_pos;

  if (config.joint) {
    double l2_sum = 0.0;
    for (RelationId r = 0; r < kb.num_relations(); ++r) {
      auto noises = sample_negative_relations(rng, config.k_recon, kb.num_relations());
      TermResult term = l2_term_grads(params, ae, r, noises, config.k_recon);
      stats.updates += apply_updates(params, ae, opt, term.grads);
      l2_sum += term.objective;
    }
    stats.mean_l2 = l2_sum / kb.num_relations();
  }
  return stats;
}

struct EpochLogRow {
  int epoch;
  double mean_l1;
  double mean_l2;
  bool evaluated = false;
  double valid_mr = std::nan("");
  double valid_mrr = std::nan("");
  double valid_h10 = std::nan("");
};

struct TrainedModel {
  ModelParams params;
  AutoencoderParams ae;
  OptimizerState opt;
  std::vector<EpochLogRow> log;
  int epochs_run = 0;
  int best_epoch = 0;
};

// Trains until neither validation MR nor MRR has improved for `patience`
// consecutive evaluations (or max_epochs); returns the state snapshot from
// the last evaluation at which either metric improved. Without a validation
// split, runs max_epochs and returns the final state.
inline TrainedModel fit(const DatasetSplits& splits, const TrainConfig& config) {
  Rng rng(config.seed);
  const KnowledgeBase& kb = splits.train();

  TrainedModel result;
  result.params = init_params(rng, config.d, kb.num_entities(), kb.num_relations(),
                              config.pure_gaussian ? MatrixInit::kPureGaussian
                                                   : MatrixInit::kIdentityPlusGaussian);
  result.ae = init_autoencoder(rng, config.d, config.c);
  result.opt = OptimizerState::init(config.eta1, config.lambda1, config.eta2, config.lambda2,
                                    config.rho, kb.num_entities(), kb.num_relations());
  result.opt.k = config.k;
  result.opt.normalize = config.normalize;

  ModelParams params = result.params;
  AutoencoderParams ae = result.ae;
  OptimizerState opt = result.opt;

  double best_mr = std::numeric_limits<double>::infinity();
  double best_mrr = -std::numeric_limits<double>::infinity();
  int stale = 0;
  bool track_valid = !splits.valid().empty();
  bool snapshotted = false;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochStats stats = train_epoch(kb, params, ae, opt, config, rng);
    EpochLogRow row{epoch, stats.mean_l1, stats.mean_l2};

    if (track_valid && config.eval_every > 0 && epoch % config.eval_every == 0) {
      EvalReport rep = evaluate(splits, params, splits.valid(), {.threads = config.threads});
      row.evaluated = true;
      row.valid_mr = rep.mr;
      row.valid_mrr = rep.mrr;
      row.valid_h10 = rep.h10;

      bool improved = rep.mr < best_mr || rep.mrr > best_mrr;
      best_mr = std::min(best_mr, rep.mr);
      best_mrr = std::max(best_mrr, rep.mrr);
      if (improved) {
        stale = 0;
        result.params = params;
        result.ae = ae;
        result.opt = opt;
        result.best_epoch = epoch;
        snapshotted = true;
      } else {
        ++stale;
      }
      result.log.push_back(row);
      result.epochs_run = epoch;
      if (stale >= config.patience) return result;
    } else {
      result.log.push_back(row);
      result.epochs_run = epoch;
    }
  }

  if (!track_valid || !snapshotted) {
    result.params = std::move(params);
    result.ae = std::move(ae);
    result.opt = std::move(opt);
    result.best_epoch = result.epochs_run;
  }
  return result;
}

}  // namespace glim
