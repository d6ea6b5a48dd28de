#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "glim/autoencoder.hpp"
#include "glim/kb.hpp"
#include "glim/model.hpp"
#include "glim/optimizer.hpp"
#include "glim/types.hpp"

namespace glim {

inline std::vector<EntityId> sample_negatives(Rng& rng, int k, EntityId num_entities) {
  if (num_entities < 1) throw std::invalid_argument("sample_negatives: empty entity vocabulary");
  std::uniform_int_distribution<EntityId> uniform(0, num_entities - 1);
  std::vector<EntityId> noises(k);
  for (auto& t : noises) t = uniform(rng);
  return noises;
}

inline std::vector<RelationId> sample_negative_relations(Rng& rng, int k,
                                                         RelationId num_relations) {
  if (num_relations < 1)
    throw std::invalid_argument("sample_negative_relations: empty relation vocabulary");
  std::uniform_int_distribution<RelationId> uniform(0, num_relations - 1);
  std::vector<RelationId> noises(k);
  for (auto& r : noises) r = uniform(rng);
  return noises;
}

// Frequency-proportional noise draws, the unigram ablation baseline to the
// uniform default.
inline std::vector<EntityId> sample_negatives_unigram(
    Rng& rng, int k, std::discrete_distribution<EntityId>& unigram) {
  std::vector<EntityId> noises(k);
  for (auto& t : noises) t = unigram(rng);
  return noises;
}

// Entity frequencies as tails of training facts, the unigram noise weights.
inline std::vector<double> tail_frequencies(const KnowledgeBase& kb) {
  std::vector<double> counts(kb.num_entities(), 0.0);
  for (const Triple& f : kb.facts()) counts[f.tail] += 1.0;
  return counts;
}

namespace detail {

// exp with the exponent clamped to +-30; used only where the result feeds an
// NCE weight, which is bounded in (0,1) regardless.
inline double nce_exp(double x) { return std::exp(std::clamp(x, -30.0, 30.0)); }

// log(k + e^x), computed without overflow.
inline double log_k_plus_exp(double k, double x) {
  double lk = std::log(k);
  double hi = std::max(lk, x);
  return hi + std::log(std::exp(lk - hi) + std::exp(x - hi));
}

template <typename Id, typename G>
void accumulate(std::vector<std::pair<Id, G>>& entries, Id id, const G& grad) {
  for (auto& [eid, g] : entries) {
    if (eid == id) {
      g += grad;
      return;
    }
  }
  entries.emplace_back(id, grad);
}

}  // namespace detail

struct TermResult {
  GradientSet grads;
  double objective;
};

// Gradient of one KB-objective term,
//   ln(s/(k+s)) + sum_noise ln(k/(k+s*)),
// with s = exp(u_h^T M_{r1}...M_{rl} v). The positive contributes with
// weight k/(k+s), each noise with weight -s*/(k+s*); weights multiply the
// bilinear-form gradients (outer products of path prefixes and suffixes).
inline TermResult l1_term_grads(const ModelParams& params, const PathSample& path,
                                std::span<const EntityId> noises, int k) {
  const int len = static_cast<int>(path.relations.size());
  if (len < 1) throw std::invalid_argument("l1_term_grads: empty path");
  params.check_entity(path.head);
  params.check_entity(path.tail);
  for (RelationId r : path.relations) params.check_relation(r);
  for (EntityId t : noises) params.check_entity(t);

  const double kf = static_cast<double>(k);

  // prefixes[i] = u^T M_{r1}...M_{ri}; prefixes[0] = u^T
  std::vector<RowVec> prefixes(len + 1);
  prefixes[0] = params.U.row(path.head);
  for (int i = 0; i < len; ++i) prefixes[i + 1] = prefixes[i] * params.M[path.relations[i]];
  const RowVec& z = prefixes[len];

  double f_pos = z.dot(params.V.row(path.tail));
  double s_pos = detail::nce_exp(f_pos);
  double w_pos = kf / (kf + s_pos);
  double objective = f_pos - detail::log_k_plus_exp(kf, f_pos);

  TermResult res;
  detail::accumulate<EntityId, Vec>(res.grads.tail_grads, path.tail, w_pos * z.transpose());

  // Combined tail carries every term's weight, so one suffix recursion
  // yields all relation gradients.
  Vec combined_tail = w_pos * params.V.row(path.tail).transpose();
  for (EntityId noise : noises) {
    double f = z.dot(params.V.row(noise));
    double s = detail::nce_exp(f);
    double w = -s / (kf + s);
    objective += std::log(kf) - detail::log_k_plus_exp(kf, f);
    detail::accumulate<EntityId, Vec>(res.grads.tail_grads, noise, w * z.transpose());
    combined_tail += w * params.V.row(noise).transpose();
  }

  Vec suffix = combined_tail;  // M_{r_{i+1}}...M_{rl} (w+ v + sum w- v*)
  for (int i = len - 1; i >= 0; --i) {
    Mat dm = prefixes[i].transpose() * suffix.transpose();
    detail::accumulate<RelationId, Mat>(res.grads.rel_grads_l1, path.relations[i], dm);
    suffix = params.M[path.relations[i]] * suffix;
  }
  res.grads.head_grads.emplace_back(path.head, suffix);

  res.objective = objective;
  return res;
}

namespace detail {

// Gradient of the vectorization map x -> sqrt(d) x / ||x|| applied to the
// flattened matrix: the component along m_r is projected out, the rest is
// scaled by sqrt(d)/||M_r||_F.
inline Mat backprop_vectorization(const Mat& m, const Vec& m_vec, const Vec& grad_m_vec) {
  const int d = static_cast<int>(m.rows());
  double fro = m.norm();
  Vec projected = grad_m_vec - (m_vec.dot(grad_m_vec) / d) * m_vec;
  projected *= std::sqrt(static_cast<double>(d)) / fro;
  return Eigen::Map<const Mat>(projected.data(), d, d);
}

}  // namespace detail

// Gradient of one reconstruction term,
//   ln(g(r,r)/(k+g(r,r))) + sum_noise ln(k/(k+g(r,r*))),
// with respect to A, B, and the underlying relation matrices. Backprop runs
// through relu (subgradient 0 at 0) and the norm constraint of the
// vectorization (tangent-space projection).
inline TermResult l2_term_grads(const ModelParams& params, const AutoencoderParams& ae,
                                RelationId r, std::span<const RelationId> noises, int k) {
  params.check_relation(r);
  for (RelationId x : noises) params.check_relation(x);
  const double kf = static_cast<double>(k);
  const int dsq = ae.d * ae.d;
  const double sigma = 1.0 / std::sqrt(static_cast<double>(ae.d) * ae.c);

  // Unique relations appearing on the coding side (positive first).
  std::vector<RelationId> unique_ids{r};
  for (RelationId x : noises)
    if (std::find(unique_ids.begin(), unique_ids.end(), x) == unique_ids.end())
      unique_ids.push_back(x);

  std::vector<Vec> m_vecs(unique_ids.size());
  std::vector<Vec> pre_acts(unique_ids.size());
  std::vector<Vec> codings(unique_ids.size());
  for (std::size_t i = 0; i < unique_ids.size(); ++i) {
    m_vecs[i] = vectorize(params.M[unique_ids[i]]);
    pre_acts[i] = ae.A * m_vecs[i];
    codings[i] = pre_acts[i].cwiseMax(0.0);
  }
  auto index_of = [&](RelationId x) {
    return std::distance(unique_ids.begin(), std::find(unique_ids.begin(), unique_ids.end(), x));
  };

  const Vec& m_r = m_vecs[0];
  Vec h_vec = sigma * (ae.B.transpose() * m_r);  // shared left factor of every term

  double psi_pos = h_vec.dot(codings[0]);
  double g_pos = detail::nce_exp(psi_pos);
  double w_pos = kf / (kf + g_pos);
  double objective = psi_pos - detail::log_k_plus_exp(kf, psi_pos);

  // Per unique coding-side relation: total term weight.
  std::vector<double> weight_of(unique_ids.size(), 0.0);
  weight_of[0] = w_pos;
  for (RelationId x : noises) {
    std::size_t i = index_of(x);
    double psi = h_vec.dot(codings[i]);
    double g = detail::nce_exp(psi);
    double w = -g / (kf + g);
    weight_of[i] += w;
    objective += std::log(kf) - detail::log_k_plus_exp(kf, psi);
  }

  Vec combined_coding = Vec::Zero(ae.c);
  for (std::size_t i = 0; i < unique_ids.size(); ++i) combined_coding += weight_of[i] * codings[i];

  TermResult res;
  res.objective = objective;
  res.grads.dec_grad = sigma * (m_r * combined_coding.transpose());
  res.grads.enc_grad = Mat::Zero(ae.c, dsq);

  // d/dm gradients: the positive-side m_r appears in every term directly,
  // each coding-side m_x flows through relu(A m_x).
  std::vector<Vec> m_grads(unique_ids.size(), Vec::Zero(dsq));
  m_grads[0] = sigma * (ae.B * combined_coding);
  for (std::size_t i = 0; i < unique_ids.size(); ++i) {
    Vec gated = (pre_acts[i].array() > 0.0).select(h_vec, 0.0);
    res.grads.enc_grad += weight_of[i] * (gated * m_vecs[i].transpose());
    m_grads[i] += weight_of[i] * (ae.A.transpose() * gated);
  }

  for (std::size_t i = 0; i < unique_ids.size(); ++i) {
    Mat dm = detail::backprop_vectorization(params.M[unique_ids[i]], m_vecs[i], m_grads[i]);
    res.grads.rel_grads_l2.emplace_back(unique_ids[i], std::move(dm));
  }
  return res;
}

}  // namespace glim
