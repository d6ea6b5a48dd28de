#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "glim/kb.hpp"
#include "glim/model.hpp"
#include "glim/types.hpp"

namespace glim {

// A mined constraint r1/r2 -> r3: the 2-hop content set C(r1/r2) nearly
// coincides with C(r3).
struct CompositionalConstraint {
  RelationId r1;
  RelationId r2;
  RelationId r3;
  std::int64_t support;  // |C(r1/r2) n C(r3)|
  double jaccard;
};

// Scans every ordered relation pair (inverses included) for a third relation
// whose content set overlaps the composition by at least min_support pairs
// and min_jaccard similarity. Degenerate combinations (r1 = r3 or
// r2 = r1^-1) are dropped. Output is sorted by (jaccard desc, support desc,
// ids) and deterministic for a fixed KB.
inline std::vector<CompositionalConstraint> extract_constraints(const KnowledgeBase& kb,
                                                                std::int64_t min_support = 50,
                                                                double min_jaccard = 0.4) {
  const RelationId nr = kb.num_relations();
  std::vector<CompositionalConstraint> out;
  if (nr == 0) return out;

  // (h,t) -> relations connecting them; candidates for r3 during the sweep.
  std::unordered_map<std::uint64_t, std::vector<RelationId>> pair_relations;
  pair_relations.reserve(kb.facts().size() * 2);
  auto pack = [](EntityId h, EntityId t) {
    return (std::uint64_t(std::uint32_t(h)) << 32) | std::uint64_t(std::uint32_t(t));
  };
  for (const Triple& f : kb.facts()) pair_relations[pack(f.head, f.tail)].push_back(f.relation);

  std::int64_t max_freq = 0;
  for (RelationId r = 0; r < nr; ++r) max_freq = std::max(max_freq, kb.relation_frequency(r));
  // Jaccard can only reach min_jaccard while |C(r1/r2)| <= max_freq/min_jaccard.
  const std::size_t join_cap =
      static_cast<std::size_t>(static_cast<double>(max_freq) / min_jaccard) + 1;

  std::vector<std::int64_t> overlap(nr, 0);
  std::vector<RelationId> touched;
  std::unordered_set<std::uint64_t> join;

  for (RelationId r1 = 0; r1 < nr; ++r1) {
    RelationId r1_inv = kb.inverse(r1);
    const auto& mids_left = kb.heads_of(r1_inv);  // tails of r1
    for (RelationId r2 = 0; r2 < nr; ++r2) {
      if (r2 == r1_inv) continue;  // degenerate by definition
      const auto& mids_right = kb.heads_of(r2);
      join.clear();
      for (RelationId r : touched) overlap[r] = 0;
      touched.clear();

      bool capped = false;
      auto il = mids_left.begin();
      auto ir = mids_right.begin();
      while (il != mids_left.end() && ir != mids_right.end() && !capped) {
        if (*il < *ir) {
          ++il;
          continue;
        }
        if (*ir < *il) {
          ++ir;
          continue;
        }
        EntityId m = *il;
        for (const auto& [m1, h] : kb.edges(m, r1_inv)) {
          for (const auto& [m2, t] : kb.edges(m, r2)) {
            if (!join.insert(pack(h, t)).second) continue;
            if (join.size() > join_cap) {
              capped = true;
              break;
            }
            auto it = pair_relations.find(pack(h, t));
            if (it == pair_relations.end()) continue;
            for (RelationId r3 : it->second) {
              if (overlap[r3] == 0) touched.push_back(r3);
              ++overlap[r3];
            }
          }
          if (capped) break;
        }
        ++il;
        ++ir;
      }
      if (capped) continue;  // no r3 can reach min_jaccard against this join

      const auto join_size = static_cast<std::int64_t>(join.size());
      for (RelationId r3 : touched) {
        if (overlap[r3] < min_support) continue;
        if (r3 == r1 || r2 == r1_inv) continue;
        double denom =
            static_cast<double>(join_size + kb.relation_frequency(r3) - overlap[r3]);
        double jaccard = overlap[r3] / denom;
        if (jaccard >= min_jaccard) out.push_back({r1, r2, r3, overlap[r3], jaccard});
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.jaccard != b.jaccard) return a.jaccard > b.jaccard;
    if (a.support != b.support) return a.support > b.support;
    return std::tie(a.r1, a.r2, a.r3) < std::tie(b.r1, b.r2, b.r3);
  });
  return out;
}

namespace detail {

inline double flat_cosine(const Mat& a, const Mat& b) {
  Eigen::Map<const Vec> fa(a.data(), a.size());
  Eigen::Map<const Vec> fb(b.data(), b.size());
  double denom = fa.norm() * fb.norm();
  return denom == 0.0 ? 0.0 : fa.dot(fb) / denom;
}

}  // namespace detail

// Rank of M_{r3} by cosine similarity against M_{r1} M_{r2}, among all
// relation matrices, pessimistic ties.
inline int rank_constraint_pair(const ModelParams& params, RelationId r1, RelationId r2,
                                RelationId r3) {
  params.check_relation(r1);
  params.check_relation(r2);
  params.check_relation(r3);
  Mat product = params.M[r1] * params.M[r2];
  double gold = detail::flat_cosine(product, params.M[r3]);
  int rank = 1;
  for (RelationId r = 0; r < params.num_relations(); ++r) {
    if (r == r3) continue;
    if (detail::flat_cosine(product, params.M[r]) >= gold) ++rank;
  }
  return rank;
}

inline int rank_constraint(const ModelParams& params, const CompositionalConstraint& c) {
  return rank_constraint_pair(params, c.r1, c.r2, c.r3);
}

enum class ConstraintEvalMode { kModel, kRandomM2 };

struct ConstraintEvalResult {
  double mr;
  double mrr;
};

// MR/MRR of constraint discovery. kRandomM2 replaces M2 with a uniformly
// random relation matrix per constraint, the clustering-vs-composition
// control.
inline ConstraintEvalResult constraint_eval(const ModelParams& params,
                                            const std::vector<CompositionalConstraint>& constraints,
                                            ConstraintEvalMode mode, Rng& rng) {
  if (constraints.empty()) throw std::invalid_argument("constraint_eval: empty constraint list");
  double sum = 0.0, rsum = 0.0;
  std::uniform_int_distribution<RelationId> uniform(0, params.num_relations() - 1);
  for (const auto& c : constraints) {
    RelationId r2 = mode == ConstraintEvalMode::kRandomM2 ? uniform(rng) : c.r2;
    int rank = rank_constraint_pair(params, c.r1, r2, c.r3);
    sum += rank;
    rsum += 1.0 / rank;
  }
  return {sum / constraints.size(), rsum / constraints.size()};
}

}  // namespace glim
