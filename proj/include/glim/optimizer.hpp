#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "glim/autoencoder.hpp"
#include "glim/model.hpp"
#include "glim/types.hpp"

namespace glim {

// alpha(tau) = eta / (1 + eta * lambda * tau)
inline double learning_rate(double eta, double lambda, std::uint64_t tau) {
  return eta / (1.0 + eta * lambda * static_cast<double>(tau));
}

// Per-parameter step counters plus the two schedule hyper-parameter pairs:
// (eta1, lambda1) scales KB-objective updates, (eta2, lambda2) scales
// reconstruction updates. A counter advances by exactly one whenever its
// parameter receives a nonzero update.
struct OptimizerState {
  double eta1 = 1.0 / 64;
  double lambda1 = std::pow(2.0, -14);
  double eta2 = std::pow(2.0, -14);
  double lambda2 = std::pow(2.0, -14);
  int k = 64;              // noises per positive in the KB objective
  double rho = 1.0 / 64;   // orthogonality regularizer coefficient
  bool normalize = true;   // maintenance normalization of relation matrices
  std::vector<std::uint64_t> tau_rel;
  std::vector<std::uint64_t> tau_head;
  std::vector<std::uint64_t> tau_tail;
  std::uint64_t tau_ae = 0;

  static OptimizerState init(double eta1, double lambda1, double eta2, double lambda2,
                             double rho, EntityId num_entities, RelationId num_relations) {
    OptimizerState s;
    s.eta1 = eta1;
    s.lambda1 = lambda1;
    s.eta2 = eta2;
    s.lambda2 = lambda2;
    s.rho = rho;
    s.tau_rel.assign(num_relations, 0);
    s.tau_head.assign(num_entities, 0);
    s.tau_tail.assign(num_entities, 0);
    return s;
  }
};

// Sparse gradient bundle produced by one objective term. Producers merge
// duplicate ids, so each listed parameter receives exactly one update.
struct GradientSet {
  std::vector<std::pair<EntityId, Vec>> head_grads;
  std::vector<std::pair<EntityId, Vec>> tail_grads;
  std::vector<std::pair<RelationId, Mat>> rel_grads_l1;
  std::vector<std::pair<RelationId, Mat>> rel_grads_l2;
  Mat enc_grad;  // dL2/dA, empty when the term does not touch the autoencoder
  Mat dec_grad;  // dL2/dB
};

namespace detail {
template <typename M>
bool exactly_zero(const M& m) {
  return (m.array() == 0.0).all();
}
}  // namespace detail

// Ascends the objectives: relation matrices move by
//   alpha1(tau_r) D1 + alpha2(tau_r) D2 - alpha1(tau_r) rho grad_penalty
// and are renormalized to Frobenius norm sqrt(d) afterwards; entity vectors
// move by alpha1 D, autoencoder matrices by alpha2 D. Exactly-zero gradients
// leave their parameter and its counter untouched. Returns the number of
// parameter blocks updated.
inline int apply_updates(ModelParams& params, AutoencoderParams& ae, OptimizerState& opt,
                         const GradientSet& grads) {
  int updated = 0;
  for (const auto& [h, g] : grads.head_grads) {
    if (detail::exactly_zero(g)) continue;
    params.U.row(h) += learning_rate(opt.eta1, opt.lambda1, opt.tau_head[h]) * g.transpose();
    ++opt.tau_head[h];
    ++updated;
  }
  for (const auto& [t, g] : grads.tail_grads) {
    if (detail::exactly_zero(g)) continue;
    params.V.row(t) += learning_rate(opt.eta1, opt.lambda1, opt.tau_tail[t]) * g.transpose();
    ++opt.tau_tail[t];
    ++updated;
  }

  auto apply_rel = [&](RelationId r, const Mat* d1, const Mat* d2) {
    bool z1 = d1 == nullptr || detail::exactly_zero(*d1);
    bool z2 = d2 == nullptr || detail::exactly_zero(*d2);
    if (z1 && z2) return;
    Mat& m = params.M[r];
    double a1 = learning_rate(opt.eta1, opt.lambda1, opt.tau_rel[r]);
    double a2 = learning_rate(opt.eta2, opt.lambda2, opt.tau_rel[r]);
    Mat step = Mat::Zero(m.rows(), m.cols());
    if (!z1) step += a1 * (*d1);
    if (!z2) step += a2 * (*d2);
    if (opt.rho != 0.0) step -= (a1 * opt.rho) * orthogonal_penalty(m).gradient;
    m += step;
    if (opt.normalize) normalize_matrix(m);
    ++opt.tau_rel[r];
    ++updated;
  };

  for (const auto& [r, d1] : grads.rel_grads_l1) {
    const Mat* d2 = nullptr;
    for (const auto& [r2, g2] : grads.rel_grads_l2)
      if (r2 == r) d2 = &g2;
    apply_rel(r, &d1, d2);
  }
  for (const auto& [r, d2] : grads.rel_grads_l2) {
    bool in_l1 = false;
    for (const auto& [r1, g1] : grads.rel_grads_l1)
      if (r1 == r) in_l1 = true;
    if (!in_l1) apply_rel(r, nullptr, &d2);
  }

  bool za = grads.enc_grad.size() == 0 || detail::exactly_zero(grads.enc_grad);
  bool zb = grads.dec_grad.size() == 0 || detail::exactly_zero(grads.dec_grad);
  if (!za || !zb) {
    double a2 = learning_rate(opt.eta2, opt.lambda2, opt.tau_ae);
    if (!za) ae.A += a2 * grads.enc_grad;
    if (!zb) ae.B += a2 * grads.dec_grad;
    ++opt.tau_ae;
    ++updated;
  }
  return updated;
}

}  // namespace glim
