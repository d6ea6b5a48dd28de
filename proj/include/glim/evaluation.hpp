#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "glim/kb.hpp"
#include "glim/model.hpp"
#include "glim/types.hpp"

namespace glim {

struct EvalReport {
  std::vector<int> ranks;
  double mr = 0.0;
  double mrr = 0.0;
  double h10 = 0.0;  // percentage

  static EvalReport from_ranks(std::vector<int> ranks) {
    EvalReport rep;
    rep.ranks = std::move(ranks);
    if (rep.ranks.empty()) {
      rep.mr = rep.mrr = rep.h10 = std::nan("");
      return rep;
    }
    double sum = 0.0, rsum = 0.0;
    std::int64_t hits = 0;
    for (int r : rep.ranks) {
      sum += r;
      rsum += 1.0 / r;
      if (r <= 10) ++hits;
    }
    rep.mr = sum / rep.ranks.size();
    rep.mrr = rsum / rep.ranks.size();
    rep.h10 = 100.0 * hits / rep.ranks.size();
    return rep;
  }
};

// A tail-prediction query <head, relation, ?> with known gold answer. Head
// prediction is expressed through the inverse relation.
struct Query {
  EntityId head;
  RelationId relation;
  EntityId gold;
};

struct OovResolution {
  EntityId head;   // in-vocabulary head to score with
  bool gold_oov;   // gold tail is scored with the zero vector
};

// Out-of-vocabulary test heads are replaced by the most frequent training
// head of the queried relation; an out-of-vocabulary gold keeps its id but
// is scored with the zero vector.
inline OovResolution resolve_oov(const DatasetSplits& splits, EntityId h, RelationId r,
                                 EntityId t) {
  OovResolution res;
  res.head = splits.is_oov(h) ? splits.most_frequent_head(r) : h;
  res.gold_oov = splits.is_oov(t);
  return res;
}

// Entities e with <h,r,e> unknown across train/valid/test, plus the gold
// itself. h is the raw query head (filtering is about the query's facts, not
// the substituted head's).
inline std::vector<EntityId> filtered_candidates(const DatasetSplits& splits, EntityId h,
                                                 RelationId r, EntityId gold) {
  if (r < 0 || r >= splits.train().num_relations())
    throw std::out_of_range("filtered_candidates: unknown relation id");
  const EntityId n = splits.train().num_entities();
  auto known = splits.known_tails(h, r);
  std::vector<EntityId> candidates;
  candidates.reserve(static_cast<std::size_t>(n) + 1);
  std::size_t ki = 0;
  for (EntityId e = 0; e < n; ++e) {
    while (ki < known.size() && known[ki] < e) ++ki;
    bool is_known = ki < known.size() && known[ki] == e;
    if (e == gold || !is_known) candidates.push_back(e);
  }
  if (gold >= n) candidates.push_back(gold);  // out-of-vocabulary gold
  return candidates;
}

// Rank of the gold among the candidates with pessimistic tie-breaking: ties
// count against the gold. Candidates at or past the entity-vocabulary end
// (out-of-vocabulary golds) score as the zero vector.
inline int rank_gold(const ModelParams& params, EntityId h, RelationId r, EntityId gold,
                     std::span<const EntityId> candidates) {
  params.check_entity(h);
  params.check_relation(r);
  RowVec w = params.U.row(h) * params.M[r];
  double gold_score = gold < params.num_entities() ? w.dot(params.V.row(gold)) : 0.0;
  int rank = 1;
  for (EntityId e : candidates) {
    if (e == gold) continue;
    double s = w.dot(params.V.row(e));
    if (s >= gold_score) ++rank;
  }
  return rank;
}

inline std::vector<Query> make_queries(const std::vector<Triple>& triples,
                                       const KnowledgeBase& kb) {
  std::vector<Query> queries;
  queries.reserve(2 * triples.size());
  for (const Triple& f : triples) {
    queries.push_back({f.head, f.relation, f.tail});
    queries.push_back({f.tail, kb.inverse(f.relation), f.head});
  }
  return queries;
}

struct EvalOptions {
  bool drop_oov = false;  // remove triples with out-of-vocabulary entities
  int threads = 1;
};

// Filtered ranking over both prediction directions of each triple, pooled
// into a single rank list (triple order, tail query before head query).
inline EvalReport evaluate(const DatasetSplits& splits, const ModelParams& params,
                           const std::vector<Triple>& triples, EvalOptions opts = {}) {
  std::vector<Query> queries;
  queries.reserve(2 * triples.size());
  for (const Triple& f : triples) {
    if (opts.drop_oov && (splits.is_oov(f.head) || splits.is_oov(f.tail))) continue;
    queries.push_back({f.head, f.relation, f.tail});
    queries.push_back({f.tail, splits.train().inverse(f.relation), f.head});
  }

  std::vector<int> ranks(queries.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Query& q = queries[i];
      OovResolution oov = resolve_oov(splits, q.head, q.relation, q.gold);
      std::vector<EntityId> candidates = filtered_candidates(splits, q.head, q.relation, q.gold);
      ranks[i] = rank_gold(params, oov.head, q.relation, q.gold, candidates);
    }
  };

  int n_threads = std::max(1, opts.threads);
  if (n_threads == 1 || queries.size() < 2 * static_cast<std::size_t>(n_threads)) {
    run(0, queries.size());
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (queries.size() + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(queries.size(), begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run, begin, end);
    }
    for (auto& th : workers) th.join();
  }
  return EvalReport::from_ranks(std::move(ranks));
}

}  // namespace glim
