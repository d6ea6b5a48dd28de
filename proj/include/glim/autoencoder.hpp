#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glim/model.hpp"
#include "glim/types.hpp"

namespace glim {

// Relation autoencoder: encoder A maps vectorized relation matrices (d^2) to
// c-dimension codings, decoder B maps codings back.
struct AutoencoderParams {
  int d = 0;
  int c = 0;
  Mat A;  // c x d^2
  Mat B;  // d^2 x c
};

inline AutoencoderParams init_autoencoder(Rng& rng, int d, int c) {
  if (d < 1 || c < 1) throw std::invalid_argument("init_autoencoder: d and c must be >= 1");
  if (c >= d * d) throw std::invalid_argument("init_autoencoder: requires c < d^2");
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  AutoencoderParams ae;
  ae.d = d;
  ae.c = c;
  ae.A.resize(c, d * d);
  ae.B.resize(d * d, c);
  for (int i = 0; i < ae.A.rows(); ++i)
    for (int j = 0; j < ae.A.cols(); ++j) ae.A(i, j) = gauss(rng);
  for (int i = 0; i < ae.B.rows(); ++i)
    for (int j = 0; j < ae.B.cols(); ++j) ae.B(i, j) = gauss(rng);
  return ae;
}

// c_r = relu(A m_r)
inline Vec encode(const AutoencoderParams& ae, const Vec& m) {
  if (m.size() != ae.A.cols()) throw std::invalid_argument("encode: vectorization size mismatch");
  return (ae.A * m).cwiseMax(0.0);
}

// g(r1, r2) = exp( m_{r1}^T B c_{r2} / sqrt(dc) ). The 1/sqrt(dc) scaling
// keeps reconstruction gradients on the same scale as the KB gradients.
inline double recon_similarity(const AutoencoderParams& ae, const Vec& m, const Vec& coding) {
  if (m.size() != ae.B.rows() || coding.size() != ae.B.cols())
    throw std::invalid_argument("recon_similarity: shape mismatch");
  double bilinear = m.dot(ae.B * coding);
  return std::exp(bilinear / std::sqrt(static_cast<double>(ae.d) * ae.c));
}

// Rescales a nonnegative coding to sum 1; the all-zero coding maps to the
// uniform vector so the export stays total.
inline Vec normalized_coding(const Vec& coding) {
  double sum = coding.sum();
  if (sum <= 0.0) return Vec::Constant(coding.size(), 1.0 / coding.size());
  return coding / sum;
}

struct SparsityRow {
  RelationId relation;
  Vec coding;        // normalized, sums to 1
  int mass_entries;  // smallest k whose top-k entries hold >= 90% of the mass
  bool degenerate;   // coding was all-zero before normalization
};

// Per-relation coding concentration, ordered by relation id.
inline std::vector<SparsityRow> coding_sparsity_report(const AutoencoderParams& ae,
                                                       const ModelParams& params) {
  std::vector<SparsityRow> rows;
  rows.reserve(params.M.size());
  for (RelationId r = 0; r < params.num_relations(); ++r) {
    Vec coding = encode(ae, vectorize(params.M[r]));
    bool degenerate = coding.sum() <= 0.0;
    Vec norm = normalized_coding(coding);
    std::vector<double> sorted(norm.data(), norm.data() + norm.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double mass = 0.0;
    int k = 0;
    while (k < static_cast<int>(sorted.size()) && mass < 0.9) mass += sorted[k++];
    rows.push_back({r, std::move(norm), k, degenerate});
  }
  return rows;
}

}  // namespace glim
