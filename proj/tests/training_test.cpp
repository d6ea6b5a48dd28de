#include "glim/training.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "glim/objectives.hpp"
#include "glim/optimizer.hpp"
#include "oracles.hpp"

using namespace glim;

TEST(LearningRate, ScheduleValues) {
  EXPECT_DOUBLE_EQ(learning_rate(0.3, 0.1, 0), 0.3);
  EXPECT_DOUBLE_EQ(learning_rate(1.0 / 64, std::pow(2.0, -14), 0), 0.015625);
  // eta*lambda*tau = 2^-6 * 2^-14 * 2^14 = 2^-6 exactly, so the quotient is 1/65
  EXPECT_EQ(learning_rate(1.0 / 64, std::pow(2.0, -14), 1ull << 14), 1.0 / 65);
}

TEST(LearningRate, RatioApproachesLambdaRatio) {
  // alpha1/alpha2 -> lambda2/lambda1 as tau grows
  double eta1 = 1.0 / 64, lambda1 = std::pow(2.0, -14);
  double eta2 = std::pow(2.0, -14), lambda2 = std::pow(2.0, -13);
  double tau = 1e12;
  double ratio = learning_rate(eta1, lambda1, tau) / learning_rate(eta2, lambda2, tau);
  EXPECT_NEAR(ratio, lambda2 / lambda1, 1e-3 * (lambda2 / lambda1));
}

TEST(SampleNegatives, SingleEntityVocabulary) {
  Rng rng(1);
  for (EntityId t : sample_negatives(rng, 16, 1)) EXPECT_EQ(t, 0);
}

TEST(SampleNegatives, UniformConcentration) {
  Rng rng(2);
  std::vector<int> counts(100, 0);
  const int n = 1000000;
  auto draws = sample_negatives(rng, n, 100);
  for (EntityId t : draws) counts[t]++;
  for (int c : counts) {
    double freq = static_cast<double>(c) / n;
    EXPECT_NEAR(freq, 0.01, 0.001);
  }
}

TEST(SampleNegatives, FixedSeedIsReproducible) {
  Rng a(7), b(7);
  EXPECT_EQ(sample_negatives(a, 32, 50), sample_negatives(b, 32, 50));
}

TEST(L1TermGrads, PositiveWeightArithmetic) {
  // u^T M v = 0 gives s = 1; with k = 1 the positive weight is 1/2
  ModelParams p;
  p.d = 2;
  p.U.resize(2, 2);
  p.V.resize(2, 2);
  p.U << 1, 0, 0, 1;
  p.V << 0, 1, 1, 0;  // V.row(0) orthogonal to U.row(0)
  p.M.push_back(Mat::Identity(2, 2));
  PathSample path{0, {0}, 0};
  auto res = l1_term_grads(p, path, {}, 1);
  ASSERT_EQ(res.grads.tail_grads.size(), 1u);
  Vec dv = res.grads.tail_grads[0].second;
  // dv = w+ * u^T M = 0.5 * (1, 0)
  EXPECT_DOUBLE_EQ(dv[0], 0.5);
  EXPECT_DOUBLE_EQ(dv[1], 0.0);
  EXPECT_DOUBLE_EQ(res.objective, std::log(0.5));
}

namespace {

// Finite-difference check of every gradient block produced by l1_term_grads.
void check_l1_gradients(ModelParams& p, const PathSample& path,
                        const std::vector<EntityId>& noises, int k, double tol) {
  auto res = l1_term_grads(p, path, noises, k);
  auto objective = [&] { return oracle::l1_objective(p, path, noises, k); };

  for (const auto& [h, grad] : res.grads.head_grads) {
    Mat fd = oracle::fd_matrix_grad(objective, [&](int i, int j) -> double& { return p.U(h, j); },
                                    1, p.d);
    EXPECT_LT(oracle::rel_error_vec(grad, fd.row(0).transpose()), tol);
  }
  for (const auto& [t, grad] : res.grads.tail_grads) {
    Mat fd = oracle::fd_matrix_grad(objective, [&](int i, int j) -> double& { return p.V(t, j); },
                                    1, p.d);
    EXPECT_LT(oracle::rel_error_vec(grad, fd.row(0).transpose()), tol);
  }
  for (const auto& [r, grad] : res.grads.rel_grads_l1) {
    Mat fd = oracle::fd_matrix_grad(objective,
                                    [&](int i, int j) -> double& { return p.M[r](i, j); }, p.d,
                                    p.d);
    EXPECT_LT(oracle::rel_error(grad, fd), tol);
  }
}

}  // namespace

TEST(L1TermGrads, SingleHopMatchesFiniteDifferences) {
  Rng rng(11);
  auto p = init_params(rng, 2, 4, 2);
  PathSample path{0, {1}, 2};
  std::vector<EntityId> noises{1, 3, 2};  // includes the gold as a noise
  check_l1_gradients(p, path, noises, 3, 1e-5);
}

TEST(L1TermGrads, LengthThreePathMatchesFiniteDifferences) {
  Rng rng(13);
  auto p = init_params(rng, 4, 6, 3);
  PathSample path{1, {0, 2, 0}, 4};  // repeated relation accumulates
  std::vector<EntityId> noises{0, 5};
  check_l1_gradients(p, path, noises, 2, 1e-5);
}

TEST(L2TermGrads, DeadReluGivesAllZeroGradients) {
  Rng rng(17);
  auto p = init_params(rng, 2, 0, 3);
  AutoencoderParams ae;
  ae.d = 2;
  ae.c = 2;
  ae.A = Mat::Zero(2, 4);
  ae.B = Mat::Zero(4, 2);
  std::vector<RelationId> noises{1, 2};
  auto res = l2_term_grads(p, ae, 0, noises, 2);
  EXPECT_EQ(res.grads.enc_grad.norm(), 0.0);
  EXPECT_EQ(res.grads.dec_grad.norm(), 0.0);
  for (const auto& [r, g] : res.grads.rel_grads_l2) EXPECT_EQ(g.norm(), 0.0);

  // nothing changes and no counter moves
  OptimizerState opt = OptimizerState::init(0.1, 0.0, 0.1, 0.0, 0.0, 0, 3);
  Mat m_before = p.M[0];
  int updated = apply_updates(p, ae, opt, res.grads);
  EXPECT_EQ(updated, 0);
  EXPECT_TRUE(p.M[0] == m_before);
  EXPECT_EQ(opt.tau_ae, 0u);
}

namespace {

void check_l2_gradients(ModelParams& p, AutoencoderParams& ae, RelationId r,
                        const std::vector<RelationId>& noises, int k, double tol_ab,
                        double tol_m) {
  auto res = l2_term_grads(p, ae, r, noises, k);
  auto objective = [&] { return oracle::l2_objective(p, ae, r, noises, k); };

  Mat fd_a = oracle::fd_matrix_grad(objective, [&](int i, int j) -> double& { return ae.A(i, j); },
                                    ae.c, ae.d * ae.d);
  EXPECT_LT(oracle::rel_error(res.grads.enc_grad, fd_a), tol_ab);
  Mat fd_b = oracle::fd_matrix_grad(objective, [&](int i, int j) -> double& { return ae.B(i, j); },
                                    ae.d * ae.d, ae.c);
  EXPECT_LT(oracle::rel_error(res.grads.dec_grad, fd_b), tol_ab);

  for (const auto& [rel, grad] : res.grads.rel_grads_l2) {
    Mat fd = oracle::fd_matrix_grad(objective,
                                    [&](int i, int j) -> double& { return p.M[rel](i, j); },
                                    ae.d, ae.d);
    EXPECT_LT(oracle::rel_error(grad, fd), tol_m) << "relation " << rel;
  }
}

}  // namespace

TEST(L2TermGrads, EncoderDecoderMatchFiniteDifferences) {
  Rng rng(19);
  auto p = init_params(rng, 2, 0, 4);
  auto ae = init_autoencoder(rng, 2, 2);
  std::vector<RelationId> noises{2, 3, 2};  // duplicate noise accumulates
  check_l2_gradients(p, ae, 0, noises, 3, 1e-5, 1e-4);
}

TEST(L2TermGrads, NoiseEqualToPositiveAccumulates) {
  Rng rng(23);
  auto p = init_params(rng, 2, 0, 2);
  auto ae = init_autoencoder(rng, 2, 2);
  std::vector<RelationId> noises{0, 1};  // noise coincides with the positive
  check_l2_gradients(p, ae, 0, noises, 2, 1e-5, 1e-4);
}

TEST(ApplyUpdates, AllZeroGradsChangeNothing) {
  Rng rng(29);
  auto p = init_params(rng, 3, 4, 2);
  auto ae = init_autoencoder(rng, 3, 2);
  auto opt = OptimizerState::init(0.1, 0.0, 0.1, 0.0, 1.0 / 64, 4, 2);
  GradientSet gs;
  gs.head_grads.emplace_back(0, Vec::Zero(3));
  gs.rel_grads_l1.emplace_back(1, Mat::Zero(3, 3));
  Mat m_before = p.M[1];
  EXPECT_EQ(apply_updates(p, ae, opt, gs), 0);
  EXPECT_TRUE(p.M[1] == m_before);
  EXPECT_EQ(opt.tau_head[0], 0u);
  EXPECT_EQ(opt.tau_rel[1], 0u);
}

TEST(ApplyUpdates, SingleRelationHandComputation) {
  Rng rng(31);
  auto p = init_params(rng, 3, 2, 2);
  auto ae = init_autoencoder(rng, 3, 2);
  double eta1 = 0.25, lambda1 = 0.5, rho = 1.0 / 64;
  auto opt = OptimizerState::init(eta1, lambda1, 0.1, 0.1, rho, 2, 2);
  opt.tau_rel[0] = 3;

  Mat delta = Mat::Ones(3, 3);
  Mat expected = p.M[0];
  double alpha = eta1 / (1.0 + eta1 * lambda1 * 3);
  expected += alpha * delta - alpha * rho * orthogonal_penalty(p.M[0]).gradient;
  expected *= std::sqrt(3.0) / expected.norm();

  GradientSet gs;
  gs.rel_grads_l1.emplace_back(0, delta);
  EXPECT_EQ(apply_updates(p, ae, opt, gs), 1);
  EXPECT_LT((p.M[0] - expected).norm(), 1e-12);
  EXPECT_EQ(opt.tau_rel[0], 4u);
  EXPECT_NEAR(p.M[0].norm(), std::sqrt(3.0), 1e-6);  // post-update invariant
}

TEST(ApplyUpdates, SequentialUpdatesAdvanceTheSchedule) {
  Rng rng(37);
  auto p = init_params(rng, 2, 2, 1);
  auto ae = init_autoencoder(rng, 2, 2);
  double eta1 = 0.5, lambda1 = 1.0;
  auto opt = OptimizerState::init(eta1, lambda1, 0.1, 0.1, 0.0, 2, 1);

  GradientSet gs;
  gs.head_grads.emplace_back(0, Vec::Ones(2));
  Vec u0 = p.U.row(0).transpose();
  apply_updates(p, ae, opt, gs);
  Vec u1 = p.U.row(0).transpose();
  apply_updates(p, ae, opt, gs);
  Vec u2 = p.U.row(0).transpose();

  EXPECT_NEAR((u1 - u0)[0], learning_rate(eta1, lambda1, 0), 1e-15);
  EXPECT_NEAR((u2 - u1)[0], learning_rate(eta1, lambda1, 1), 1e-15);
  EXPECT_EQ(opt.tau_head[0], 2u);
}

TEST(ApplyUpdates, JointRelationGradientsCountAsOneUpdate) {
  Rng rng(41);
  auto p = init_params(rng, 2, 2, 1);
  auto ae = init_autoencoder(rng, 2, 2);
  auto opt = OptimizerState::init(0.25, 0.0, 0.125, 0.0, 0.0, 2, 1);
  Mat expected = p.M[0] + 0.25 * Mat::Ones(2, 2) + 0.125 * (2.0 * Mat::Ones(2, 2));
  normalize_matrix(expected);

  GradientSet gs;
  gs.rel_grads_l1.emplace_back(0, Mat::Ones(2, 2));
  gs.rel_grads_l2.emplace_back(0, 2.0 * Mat::Ones(2, 2));
  EXPECT_EQ(apply_updates(p, ae, opt, gs), 1);
  EXPECT_EQ(opt.tau_rel[0], 1u);
  EXPECT_LT((p.M[0] - expected).norm(), 1e-12);
}

TEST(ApplyUpdates, AutoencoderSharesOneCounter) {
  Rng rng(43);
  auto p = init_params(rng, 2, 1, 1);
  auto ae = init_autoencoder(rng, 2, 2);
  auto opt = OptimizerState::init(0.1, 0.0, 0.5, 0.0, 0.0, 1, 1);
  GradientSet gs;
  gs.enc_grad = Mat::Ones(2, 4);
  gs.dec_grad = Mat::Ones(4, 2);
  Mat a_before = ae.A;
  apply_updates(p, ae, opt, gs);
  EXPECT_EQ(opt.tau_ae, 1u);
  EXPECT_LT((ae.A - (a_before + 0.5 * Mat::Ones(2, 4))).norm(), 1e-15);
}

namespace {

KnowledgeBase toy_kb(std::uint64_t seed, int entities = 20, int relations = 4, int count = 80) {
  std::mt19937_64 rng(seed);
  return KnowledgeBase::build(oracle::random_raw_triples(rng, entities, relations, count));
}

}  // namespace

TEST(TrainEpoch, CompositionalWithZeroMeanMatchesPlainTriples) {
  auto kb = toy_kb(47);
  TrainConfig base;
  base.d = 4;
  base.c = 2;
  base.k = 4;
  base.joint = false;
  base.compositional = false;

  TrainConfig comp = base;
  comp.compositional = true;
  comp.poisson_mean = 0.0;  // every path has length exactly 1

  Rng rng1(5), rng2(5);
  auto p1 = init_params(rng1, base.d, kb.num_entities(), kb.num_relations());
  auto p2 = init_params(rng2, base.d, kb.num_entities(), kb.num_relations());
  auto ae1 = init_autoencoder(rng1, base.d, base.c);
  auto ae2 = init_autoencoder(rng2, base.d, base.c);
  auto o1 = OptimizerState::init(base.eta1, base.lambda1, base.eta2, base.lambda2, base.rho,
                                 kb.num_entities(), kb.num_relations());
  auto o2 = o1;
  train_epoch(kb, p1, ae1, o1, base, rng1);
  train_epoch(kb, p2, ae2, o2, comp, rng2);
  EXPECT_TRUE(p1.U == p2.U);
  for (std::size_t r = 0; r < p1.M.size(); ++r) EXPECT_TRUE(p1.M[r] == p2.M[r]);
}

TEST(TrainEpoch, FixedSeedIsBitIdentical) {
  auto kb = toy_kb(53);
  TrainConfig cfg;
  cfg.d = 4;
  cfg.c = 2;
  cfg.k = 4;
  cfg.joint = true;
  cfg.compositional = true;

  auto run = [&] {
    Rng rng(9);
    auto p = init_params(rng, cfg.d, kb.num_entities(), kb.num_relations());
    auto ae = init_autoencoder(rng, cfg.d, cfg.c);
    auto opt = OptimizerState::init(cfg.eta1, cfg.lambda1, cfg.eta2, cfg.lambda2, cfg.rho,
                                    kb.num_entities(), kb.num_relations());
    for (int e = 0; e < 3; ++e) train_epoch(kb, p, ae, opt, cfg, rng);
    return p;
  };
  auto a = run();
  auto b = run();
  EXPECT_TRUE(a.U == b.U);
  EXPECT_TRUE(a.V == b.V);
  for (std::size_t r = 0; r < a.M.size(); ++r) EXPECT_TRUE(a.M[r] == b.M[r]);
}

TEST(TrainEpoch, MeanObjectiveImprovesOnToyKb) {
  auto kb = toy_kb(59);
  TrainConfig cfg;
  cfg.d = 8;
  cfg.c = 2;
  cfg.k = 8;
  cfg.joint = false;

  Rng rng(3);
  auto p = init_params(rng, cfg.d, kb.num_entities(), kb.num_relations());
  auto ae = init_autoencoder(rng, cfg.d, cfg.c);
  auto opt = OptimizerState::init(cfg.eta1, cfg.lambda1, cfg.eta2, cfg.lambda2, cfg.rho,
                                  kb.num_entities(), kb.num_relations());
  std::vector<double> means;
  for (int e = 0; e < 50; ++e) means.push_back(train_epoch(kb, p, ae, opt, cfg, rng).mean_l1);
  for (int e = 1; e < 10; ++e) EXPECT_GT(means[e], means[e - 1]) << "epoch " << e;
}

TEST(TrainEpoch, PostUpdateMatrixNormsAreMaintained) {
  auto kb = toy_kb(61);
  TrainConfig cfg;
  cfg.d = 6;
  cfg.c = 3;
  cfg.k = 4;
  cfg.joint = true;

  Rng rng(4);
  auto p = init_params(rng, cfg.d, kb.num_entities(), kb.num_relations());
  auto ae = init_autoencoder(rng, cfg.d, cfg.c);
  auto opt = OptimizerState::init(cfg.eta1, cfg.lambda1, cfg.eta2, cfg.lambda2, cfg.rho,
                                  kb.num_entities(), kb.num_relations());
  train_epoch(kb, p, ae, opt, cfg, rng);
  for (RelationId r = 0; r < kb.num_relations(); ++r) {
    if (opt.tau_rel[r] == 0) continue;  // untouched matrices keep their init norm
    EXPECT_NEAR(p.M[r].norm(), std::sqrt(static_cast<double>(cfg.d)), 1e-6);
  }
}

TEST(TrainEpoch, CounterIncrementsEqualNonzeroUpdates) {
  auto kb = toy_kb(67);
  const int d = 4;
  Rng rng(10);
  auto p = init_params(rng, d, kb.num_entities(), kb.num_relations());
  auto ae = init_autoencoder(rng, d, 2);
  auto opt = OptimizerState::init(1.0 / 64, 0.01, 1.0 / 64, 0.01, 1.0 / 64, kb.num_entities(),
                                  kb.num_relations());

  std::vector<std::uint64_t> want_head(kb.num_entities(), 0), want_tail(kb.num_entities(), 0),
      want_rel(kb.num_relations(), 0);
  std::uint64_t want_ae = 0;

  auto predict = [&](const GradientSet& gs) {
    for (const auto& [h, g] : gs.head_grads)
      if (g.norm() != 0.0) ++want_head[h];
    for (const auto& [t, g] : gs.tail_grads)
      if (g.norm() != 0.0) ++want_tail[t];
    std::vector<RelationId> seen;
    auto rel_nonzero = [&](RelationId r) {
      for (const auto& [rr, g] : gs.rel_grads_l1)
        if (rr == r && g.norm() != 0.0) return true;
      for (const auto& [rr, g] : gs.rel_grads_l2)
        if (rr == r && g.norm() != 0.0) return true;
      return false;
    };
    for (const auto& [r, g] : gs.rel_grads_l1)
      if (std::find(seen.begin(), seen.end(), r) == seen.end()) seen.push_back(r);
    for (const auto& [r, g] : gs.rel_grads_l2)
      if (std::find(seen.begin(), seen.end(), r) == seen.end()) seen.push_back(r);
    for (RelationId r : seen)
      if (rel_nonzero(r)) ++want_rel[r];
    bool ae_touch = (gs.enc_grad.size() && gs.enc_grad.norm() != 0.0) ||
                    (gs.dec_grad.size() && gs.dec_grad.norm() != 0.0);
    if (ae_touch) ++want_ae;
  };

  std::uniform_int_distribution<std::size_t> pick_fact(0, kb.facts().size() - 1);
  std::uniform_int_distribution<RelationId> pick_rel(0, kb.num_relations() - 1);
  for (int step = 0; step < 300; ++step) {
    const Triple& f = kb.facts()[pick_fact(rng)];
    auto noises = sample_negatives(rng, 4, kb.num_entities());
    auto res = l1_term_grads(p, {f.head, {f.relation}, f.tail}, noises, 4);
    predict(res.grads);
    apply_updates(p, ae, opt, res.grads);

    if (step % 3 == 0) {
      auto rel_noises = sample_negative_relations(rng, 2, kb.num_relations());
      auto l2 = l2_term_grads(p, ae, pick_rel(rng), rel_noises, 2);
      predict(l2.grads);
      apply_updates(p, ae, opt, l2.grads);
    }
  }
  EXPECT_EQ(opt.tau_head, want_head);
  EXPECT_EQ(opt.tau_tail, want_tail);
  EXPECT_EQ(opt.tau_rel, want_rel);
  EXPECT_EQ(opt.tau_ae, want_ae);
}

namespace {

DatasetSplits toy_splits(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto raw = oracle::random_raw_triples(rng, 20, 3, 120);
  std::vector<RawTriple> train(raw.begin(), raw.begin() + 96);
  std::vector<RawTriple> valid(raw.begin() + 96, raw.begin() + 108);
  std::vector<RawTriple> test(raw.begin() + 108, raw.end());
  return DatasetSplits::from_raw(train, valid, test);
}

}  // namespace

TEST(Fit, ZeroEpochsReturnsInitialization) {
  auto splits = toy_splits(71);
  TrainConfig cfg;
  cfg.d = 4;
  cfg.c = 2;
  cfg.max_epochs = 0;
  cfg.seed = 77;
  auto trained = fit(splits, cfg);
  EXPECT_TRUE(trained.log.empty());
  EXPECT_EQ(trained.epochs_run, 0);

  Rng rng(77);
  auto p = init_params(rng, cfg.d, splits.train().num_entities(), splits.train().num_relations());
  EXPECT_TRUE(trained.params.U == p.U);
}

TEST(Fit, StopsAfterPatienceWithoutImprovement) {
  auto splits = toy_splits(73);
  TrainConfig cfg;
  cfg.d = 4;
  cfg.c = 2;
  cfg.k = 4;
  cfg.max_epochs = 200;
  cfg.patience = 2;
  cfg.seed = 5;
  auto trained = fit(splits, cfg);
  ASSERT_LT(trained.epochs_run, cfg.max_epochs);  // early stopping fired
  // exactly `patience` evaluated epochs after the snapshot epoch
  int after_best = 0;
  for (const auto& row : trained.log)
    if (row.evaluated && row.epoch > trained.best_epoch) ++after_best;
  EXPECT_EQ(after_best, cfg.patience);
}

TEST(AblationToggles, PureGaussianInitHasNoIdentityOffset) {
  Rng rng(83);
  const int d = 8;
  Mat mean = Mat::Zero(d, d);
  for (int i = 0; i < 500; ++i) {
    auto p = init_params(rng, d, 0, 1, MatrixInit::kPureGaussian);
    mean += p.M[0];
  }
  mean /= 500;
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.1);  // no I/2 shift on the diagonal
}

TEST(AblationToggles, NormalizationOffLeavesNormsFree) {
  Rng rng(89);
  auto p = init_params(rng, 4, 2, 1);
  auto ae = init_autoencoder(rng, 4, 2);
  auto opt = OptimizerState::init(0.5, 0.0, 0.5, 0.0, 0.0, 2, 1);
  opt.normalize = false;
  GradientSet gs;
  gs.rel_grads_l1.emplace_back(0, Mat::Ones(4, 4));
  Mat expected = p.M[0] + 0.5 * Mat::Ones(4, 4);
  apply_updates(p, ae, opt, gs);
  EXPECT_LT((p.M[0] - expected).norm(), 1e-12);  // no rescaling applied
}

TEST(AblationToggles, UnigramNoiseFollowsTailFrequencies) {
  // skewed KB: entity B is the tail of most facts
  std::vector<RawTriple> raw;
  for (int i = 0; i < 9; ++i) raw.push_back({"h" + std::to_string(i), "r", "B"});
  raw.push_back({"h0", "r", "C"});
  auto kb = KnowledgeBase::build(raw);
  auto weights = tail_frequencies(kb);

  Rng rng(91);
  std::discrete_distribution<EntityId> unigram(weights.begin(), weights.end());
  std::vector<int> counts(kb.num_entities(), 0);
  const int n = 200000;
  for (EntityId t : sample_negatives_unigram(rng, n, unigram)) counts[t]++;

  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  for (EntityId e = 0; e < kb.num_entities(); ++e) {
    double expected = weights[e] / total_weight;
    EXPECT_NEAR(static_cast<double>(counts[e]) / n, expected, 0.01) << "entity " << e;
  }
}

TEST(AblationToggles, TrainEpochRunsWithAllTogglesFlipped) {
  auto kb = toy_kb(97);
  TrainConfig cfg;
  cfg.d = 4;
  cfg.c = 2;
  cfg.k = 4;
  cfg.joint = true;
  cfg.normalize = false;
  cfg.unigram_noise = true;
  cfg.pure_gaussian = true;
  cfg.rho = 0.0;

  Rng rng(7);
  auto p = init_params(rng, cfg.d, kb.num_entities(), kb.num_relations(),
                       MatrixInit::kPureGaussian);
  auto ae = init_autoencoder(rng, cfg.d, cfg.c);
  auto opt = OptimizerState::init(cfg.eta1, cfg.lambda1, cfg.eta2, cfg.lambda2, cfg.rho,
                                  kb.num_entities(), kb.num_relations());
  opt.normalize = cfg.normalize;
  auto stats = train_epoch(kb, p, ae, opt, cfg, rng);
  EXPECT_GT(stats.updates, 0u);
}

TEST(Fit, ValidationH10DoesNotDegradeFromInit) {
  auto splits = toy_splits(79);
  TrainConfig cfg;
  cfg.d = 8;
  cfg.c = 2;
  cfg.k = 8;
  cfg.max_epochs = 30;
  cfg.seed = 6;

  Rng rng(cfg.seed);
  auto p0 = init_params(rng, cfg.d, splits.train().num_entities(),
                        splits.train().num_relations());
  double h10_init = evaluate(splits, p0, splits.valid()).h10;
  auto trained = fit(splits, cfg);
  double h10_final = evaluate(splits, trained.params, splits.valid()).h10;
  EXPECT_GE(h10_final, h10_init);
}
