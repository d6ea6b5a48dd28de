#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "glim/types.hpp"

namespace glim {

// Bilinear embedding parameters: head vectors u_h (rows of U), tail vectors
// v_t (rows of V), one d x d matrix per relation (inverses included).
struct ModelParams {
  int d = 0;
  Mat U;               // num_entities x d
  Mat V;               // num_entities x d
  std::vector<Mat> M;  // num_relations matrices, d x d

  EntityId num_entities() const { return static_cast<EntityId>(U.rows()); }
  RelationId num_relations() const { return static_cast<RelationId>(M.size()); }

  void check_entity(EntityId e) const {
    if (e < 0 || e >= num_entities()) throw std::out_of_range("unknown entity id");
  }
  void check_relation(RelationId r) const {
    if (r < 0 || r >= num_relations()) throw std::out_of_range("unknown relation id");
  }
};

enum class MatrixInit {
  kIdentityPlusGaussian,  // (I+G)/2; the identity passes information head to tail
  kPureGaussian,          // ablation variant: plain G
};

// Entity vectors are i.i.d. Gaussian with variance 1/d, so ||u_h|| ~ 1.
// Relation matrices start at (I+G)/2 with the same Gaussian G by default.
inline ModelParams init_params(Rng& rng, int d, EntityId num_entities, RelationId num_relations,
                               MatrixInit matrix_init = MatrixInit::kIdentityPlusGaussian) {
  if (d < 1) throw std::invalid_argument("init_params: d must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  ModelParams p;
  p.d = d;
  p.U.resize(num_entities, d);
  p.V.resize(num_entities, d);
  for (EntityId e = 0; e < num_entities; ++e)
    for (int j = 0; j < d; ++j) p.U(e, j) = gauss(rng);
  for (EntityId e = 0; e < num_entities; ++e)
    for (int j = 0; j < d; ++j) p.V(e, j) = gauss(rng);
  p.M.reserve(num_relations);
  for (RelationId r = 0; r < num_relations; ++r) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double g = gauss(rng);
        m(i, j) = matrix_init == MatrixInit::kIdentityPlusGaussian
                      ? ((i == j ? 1.0 : 0.0) + g) * 0.5
                      : g;
      }
    p.M.push_back(std::move(m));
  }
  return p;
}

// u_h^T M_{r1} ... M_{rl} v_t, computed by left-to-right vector-matrix
// products (O(l d^2); the matrix chain is never materialized).
inline double log_score(const ModelParams& p, EntityId h, std::span<const RelationId> relations,
                        EntityId t) {
  p.check_entity(h);
  p.check_entity(t);
  if (relations.empty()) throw std::invalid_argument("log_score: empty relation path");
  RowVec z = p.U.row(h);
  for (RelationId r : relations) {
    p.check_relation(r);
    z = z * p.M[r];
  }
  return z.dot(p.V.row(t));
}

inline double log_score(const ModelParams& p, EntityId h, RelationId r, EntityId t) {
  RelationId rel[1] = {r};
  return log_score(p, h, std::span<const RelationId>(rel, 1), t);
}

inline double score(const ModelParams& p, EntityId h, std::span<const RelationId> relations,
                    EntityId t) {
  return std::exp(log_score(p, h, relations, t));
}

// Row-major flatten of M_r rescaled to ||m_r|| = sqrt(d).
inline Vec vectorize(const Mat& m) {
  Eigen::Map<const Vec> flat(m.data(), m.size());
  double norm = flat.norm();
  if (norm == 0.0) throw std::invalid_argument("vectorize: zero matrix");
  return flat * (std::sqrt(static_cast<double>(m.rows())) / norm);
}

// Rescales M_r in place to Frobenius norm sqrt(d), direction unchanged.
inline void normalize_matrix(Mat& m) {
  double norm = m.norm();
  if (norm == 0.0) throw std::invalid_argument("normalize_matrix: zero matrix");
  m *= std::sqrt(static_cast<double>(m.rows())) / norm;
}

struct PenaltyResult {
  double value;  // || M^T M - (1/d) tr(M^T M) I ||_F
  Mat gradient;
};

// Frobenius-norm distance of M^T M from a multiple of the identity; zero
// exactly on (scaled) orthogonal matrices. The gradient at the minimum set
// (value 0) is taken as 0.
inline PenaltyResult orthogonal_penalty(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  Mat gram = m.transpose() * m;
  double tr = gram.trace();
  Mat dev = gram;
  dev.diagonal().array() -= tr / d;
  double value = dev.norm();
  PenaltyResult res;
  res.value = value;
  if (value == 0.0) {
    res.gradient = Mat::Zero(d, d);
  } else {
    res.gradient = (2.0 / value) * (m * dev);
  }
  return res;
}

}  // namespace glim
