#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "glim/types.hpp"

namespace glim {

struct RawTriple {
  std::string head;
  std::string relation;
  std::string tail;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  bool operator==(const Triple&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Reads tab-separated "head<TAB>relation<TAB>tail" lines. Triples are kept
// in file order, duplicates included.
inline std::vector<RawTriple> parse_triples(std::istream& in) {
  std::vector<RawTriple> triples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = (tab1 == std::string::npos) ? std::string::npos
                                                   : line.find('\t', tab1 + 1);
    bool extra = tab2 != std::string::npos && line.find('\t', tab2 + 1) != std::string::npos;
    if (tab1 == std::string::npos || tab2 == std::string::npos || extra) {
      std::ostringstream msg;
      msg << "malformed triple at line " << lineno << ": expected 3 tab-separated fields";
      throw ParseError(msg.str(), lineno);
    }
    triples.push_back({line.substr(0, tab1),
                       line.substr(tab1 + 1, tab2 - tab1 - 1),
                       line.substr(tab2 + 1)});
  }
  return triples;
}

inline std::vector<RawTriple> parse_triples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file: " + path);
  try {
    return parse_triples(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

// Dense string<->id mapping, ids assigned in first-appearance order.
class Vocabulary {
 public:
  std::int32_t add(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<std::int32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }
  std::optional<std::int32_t> find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name(std::int32_t id) const { return names_.at(id); }
  std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

// Reserved suffix for auto-generated inverse relation names.
inline constexpr const char* kInverseSuffix = "**-1**";

using EdgeList = std::vector<std::pair<RelationId, EntityId>>;
using PairList = std::vector<std::pair<EntityId, EntityId>>;

// Immutable fact store. Every input triple <h,r,t> is stored together with
// its inverse <t,r^-1,h>; inverse relation ids are base_id + #base_relations.
class KnowledgeBase {
 public:
  static KnowledgeBase build(const std::vector<RawTriple>& raw) {
    KnowledgeBase kb;
    std::vector<Triple> base_facts;
    base_facts.reserve(raw.size());
    std::unordered_set<std::uint64_t> seen;
    for (const auto& rt : raw) {
      EntityId h = kb.entities_.add(rt.head);
      RelationId r = kb.relations_.add(rt.relation);
      EntityId t = kb.entities_.add(rt.tail);
      if (h >= (1 << 24) || t >= (1 << 24) || r >= (1 << 16))
        throw std::runtime_error("vocabulary exceeds supported id range");
      std::uint64_t key = (std::uint64_t(h) << 40) | (std::uint64_t(r) << 24) | std::uint64_t(t);
      if (seen.insert(key).second) base_facts.push_back({h, r, t});
    }
    kb.num_base_relations_ = kb.relations_.size();
    for (std::int32_t r = 0; r < kb.num_base_relations_; ++r)
      kb.relations_.add(kb.relations_.name(r) + kInverseSuffix);

    kb.facts_ = std::move(base_facts);
    std::size_t n_base = kb.facts_.size();
    kb.facts_.reserve(2 * n_base);
    for (std::size_t i = 0; i < n_base; ++i) {
      Triple f = kb.facts_[i];
      kb.facts_.push_back({f.tail, f.relation + kb.num_base_relations_, f.head});
    }

    kb.adjacency_.assign(kb.num_entities(), {});
    kb.relation_pairs_.assign(kb.num_relations(), {});
    for (const Triple& f : kb.facts_) {
      kb.adjacency_[f.head].emplace_back(f.relation, f.tail);
      kb.relation_pairs_[f.relation].emplace_back(f.head, f.tail);
    }
    for (auto& out : kb.adjacency_) std::sort(out.begin(), out.end());
    kb.relation_heads_.assign(kb.num_relations(), {});
    for (RelationId r = 0; r < kb.num_relations(); ++r) {
      auto& pairs = kb.relation_pairs_[r];
      std::sort(pairs.begin(), pairs.end());
      auto& heads = kb.relation_heads_[r];
      for (const auto& [h, t] : pairs)
        if (heads.empty() || heads.back() != h) heads.push_back(h);
    }
    return kb;
  }

  EntityId num_entities() const { return entities_.size(); }
  RelationId num_relations() const { return relations_.size(); }
  RelationId num_base_relations() const { return num_base_relations_; }
  const Vocabulary& entity_vocab() const { return entities_; }
  const Vocabulary& relation_vocab() const { return relations_; }

  RelationId inverse(RelationId r) const {
    check_relation(r);
    return r < num_base_relations_ ? r + num_base_relations_ : r - num_base_relations_;
  }

  const std::vector<Triple>& facts() const { return facts_; }

  // All outgoing (relation, tail) edges of h, sorted by (relation, tail).
  std::span<const std::pair<RelationId, EntityId>> outgoing(EntityId h) const {
    check_entity(h);
    return adjacency_[h];
  }

  // The (h, t) pairs of r with head h; tails are the .second column, ascending.
  std::span<const std::pair<EntityId, EntityId>> edges(EntityId h, RelationId r) const {
    check_entity(h);
    check_relation(r);
    const auto& pairs = relation_pairs_[r];
    auto lo = std::lower_bound(pairs.begin(), pairs.end(),
                               std::pair{h, std::numeric_limits<EntityId>::min()});
    auto hi = std::upper_bound(pairs.begin(), pairs.end(),
                               std::pair{h, std::numeric_limits<EntityId>::max()});
    return {pairs.data() + (lo - pairs.begin()), static_cast<std::size_t>(hi - lo)};
  }

  bool contains(EntityId h, RelationId r, EntityId t) const {
    check_entity(h);
    check_relation(r);
    const auto& pairs = relation_pairs_[r];
    return std::binary_search(pairs.begin(), pairs.end(), std::pair{h, t});
  }

  // C(r): the set of (head, tail) pairs connected by r, sorted ascending.
  const PairList& content_set(RelationId r) const {
    check_relation(r);
    return relation_pairs_[r];
  }

  std::int64_t relation_frequency(RelationId r) const {
    check_relation(r);
    return static_cast<std::int64_t>(relation_pairs_[r].size());
  }

  // Entities with at least one outgoing r-fact, sorted ascending.
  const std::vector<EntityId>& heads_of(RelationId r) const {
    check_relation(r);
    return relation_heads_[r];
  }

  // C(r1/r2) = { (h,t) : some m links <h,r1,m> and <m,r2,t> }, sorted, deduped.
  PairList path_content_set(RelationId r1, RelationId r2) const {
    check_relation(r1);
    check_relation(r2);
    PairList out;
    RelationId r1_inv = inverse(r1);
    const auto& mids_left = relation_heads_[r1_inv];  // tails of r1
    const auto& mids_right = relation_heads_[r2];
    auto il = mids_left.begin();
    auto ir = mids_right.begin();
    while (il != mids_left.end() && ir != mids_right.end()) {
      if (*il < *ir) {
        ++il;
      } else if (*ir < *il) {
        ++ir;
      } else {
        EntityId m = *il;
        for (const auto& [m1, h] : edges(m, r1_inv))
          for (const auto& [m2, t] : edges(m, r2)) out.emplace_back(h, t);
        ++il;
        ++ir;
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  void check_entity(EntityId e) const {
    if (e < 0 || e >= num_entities()) throw std::out_of_range("unknown entity id");
  }
  void check_relation(RelationId r) const {
    if (r < 0 || r >= num_relations()) throw std::out_of_range("unknown relation id");
  }

  Vocabulary entities_;
  Vocabulary relations_;
  RelationId num_base_relations_ = 0;
  std::vector<Triple> facts_;
  std::vector<EdgeList> adjacency_;
  std::vector<PairList> relation_pairs_;
  std::vector<std::vector<EntityId>> relation_heads_;
};

struct PathSample {
  EntityId head;
  std::vector<RelationId> relations;
  EntityId tail;
};

// Extends a chosen first hop into a path of up to target_len hops by a
// uniform random walk; truncates silently at dead ends.
inline PathSample extend_fact_walk(const KnowledgeBase& kb, Rng& rng, const Triple& first,
                                   int target_len) {
  PathSample path{first.head, {first.relation}, first.tail};
  EntityId cur = first.tail;
  while (static_cast<int>(path.relations.size()) < target_len) {
    auto out = kb.outgoing(cur);
    if (out.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    const auto& [r, t] = out[pick(rng)];
    path.relations.push_back(r);
    cur = t;
  }
  path.tail = cur;
  return path;
}

// Samples a path of length 1+X, X ~ Poisson(poisson_mean), starting from a
// uniformly chosen fact.
inline PathSample sample_path(const KnowledgeBase& kb, Rng& rng, double poisson_mean) {
  if (kb.facts().empty()) throw std::invalid_argument("sample_path: empty knowledge base");
  int extra = 0;
  if (poisson_mean > 0.0) {
    std::poisson_distribution<int> poisson(poisson_mean);
    extra = poisson(rng);
  }
  std::uniform_int_distribution<std::size_t> pick(0, kb.facts().size() - 1);
  const Triple& first = kb.facts()[pick(rng)];
  return extend_fact_walk(kb, rng, first, 1 + extra);
}

// Train KB plus evaluation splits. Entities appearing only in valid/test get
// ids past the training vocabulary; they are out-of-vocabulary for the model.
class DatasetSplits {
 public:
  static DatasetSplits from_raw(const std::vector<RawTriple>& raw_train,
                                const std::vector<RawTriple>& raw_valid,
                                const std::vector<RawTriple>& raw_test) {
    DatasetSplits sp;
    sp.train_ = KnowledgeBase::build(raw_train);
    sp.extra_entities_ = Vocabulary{};
    sp.valid_ = sp.resolve_split(raw_valid, "valid");
    sp.test_ = sp.resolve_split(raw_test, "test");

    for (const Triple& f : sp.train_.facts()) sp.add_known(f.head, f.relation, f.tail);
    for (const Triple& f : sp.valid_) {
      sp.add_known(f.head, f.relation, f.tail);
      sp.add_known(f.tail, sp.train_.inverse(f.relation), f.head);
    }
    for (const Triple& f : sp.test_) {
      sp.add_known(f.head, f.relation, f.tail);
      sp.add_known(f.tail, sp.train_.inverse(f.relation), f.head);
    }
    for (auto& [key, tails] : sp.known_tails_) {
      std::sort(tails.begin(), tails.end());
      tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
    }

    sp.frequent_heads_.assign(sp.train_.num_relations(), -1);
    for (RelationId r = 0; r < sp.train_.num_relations(); ++r) {
      std::size_t best = 0;
      for (EntityId h : sp.train_.heads_of(r)) {
        std::size_t deg = sp.train_.edges(h, r).size();
        if (deg > best) {
          best = deg;
          sp.frequent_heads_[r] = h;
        }
      }
    }
    EntityId global = -1;
    std::size_t best_deg = 0;
    for (EntityId e = 0; e < sp.train_.num_entities(); ++e) {
      std::size_t deg = sp.train_.outgoing(e).size();
      if (deg > best_deg) {
        best_deg = deg;
        global = e;
      }
    }
    sp.global_frequent_head_ = global;
    return sp;
  }

  static DatasetSplits load(const std::string& train_path, const std::string& valid_path,
                            const std::string& test_path) {
    auto raw_train = parse_triples_file(train_path);
    auto raw_valid = valid_path.empty() ? std::vector<RawTriple>{} : parse_triples_file(valid_path);
    auto raw_test = test_path.empty() ? std::vector<RawTriple>{} : parse_triples_file(test_path);
    return from_raw(raw_train, raw_valid, raw_test);
  }

  const KnowledgeBase& train() const { return train_; }
  const std::vector<Triple>& valid() const { return valid_; }
  const std::vector<Triple>& test() const { return test_; }

  // Entities in train plus the valid/test-only extras.
  EntityId total_entities() const { return train_.num_entities() + extra_entities_.size(); }
  bool is_oov(EntityId e) const { return e >= train_.num_entities(); }

  bool known_fact(EntityId h, RelationId r, EntityId t) const {
    auto it = known_tails_.find(pack(h, r));
    if (it == known_tails_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), t);
  }

  // Tails t with <h,r,t> in train/valid/test (inversion-closed), sorted.
  std::span<const EntityId> known_tails(EntityId h, RelationId r) const {
    auto it = known_tails_.find(pack(h, r));
    if (it == known_tails_.end()) return {};
    return it->second;
  }

  // Most frequent training head of r; falls back to the globally most
  // frequent entity when r has no training heads. Ties go to the smaller id.
  EntityId most_frequent_head(RelationId r) const {
    if (r < 0 || r >= train_.num_relations()) throw std::out_of_range("unknown relation id");
    EntityId h = frequent_heads_[r];
    return h >= 0 ? h : global_frequent_head_;
  }

 private:
  std::vector<Triple> resolve_split(const std::vector<RawTriple>& raw, const char* split) {
    std::vector<Triple> out;
    out.reserve(raw.size());
    for (const auto& rt : raw) {
      auto r = train_.relation_vocab().find(rt.relation);
      if (!r)
        throw std::runtime_error(std::string(split) + " split uses relation '" + rt.relation +
                                 "' absent from the training set");
      out.push_back({resolve_entity(rt.head), *r, resolve_entity(rt.tail)});
    }
    return out;
  }

  EntityId resolve_entity(const std::string& name) {
    if (auto id = train_.entity_vocab().find(name)) return *id;
    return train_.num_entities() + extra_entities_.add(name);
  }

  static std::uint64_t pack(EntityId h, RelationId r) {
    return (std::uint64_t(std::uint32_t(h)) << 20) | std::uint64_t(std::uint32_t(r));
  }

  void add_known(EntityId h, RelationId r, EntityId t) {
    known_tails_[pack(h, r)].push_back(t);
  }

  KnowledgeBase train_;
  Vocabulary extra_entities_;
  std::vector<Triple> valid_;
  std::vector<Triple> test_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> known_tails_;
  std::vector<EntityId> frequent_heads_;
  EntityId global_frequent_head_ = -1;
};

}  // namespace glim
