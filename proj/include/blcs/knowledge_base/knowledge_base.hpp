#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "blcs/knowledge_base/knowledge_triple.hpp"
#include "blcs/relation_net/relation_net.hpp"

namespace blcs::kb {

/// The registered vocabularies of the three bases.
class EntityRegistry {
 public:
  void add(Base base, std::string token);
  bool contains(Base base, std::string_view token) const;
  /// Throws UnknownEntity naming the first unregistered token.
  void require(const TokenTriple& t) const;
  const std::set<std::string, std::less<>>& tokens(Base base) const;

 private:
  std::array<std::set<std::string, std::less<>>, 3> bases_;
};

struct Entity {
  Base base = Base::identification;
  std::string token;

  friend auto operator<=>(const Entity&, const Entity&) = default;
};

struct Neighbor {
  Entity entity;
  double weight = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct IsbEdge {
  Entity a;  // a < b
  Entity b;
  double weight = 0.0;
  Eigen::VectorXd relation;
  TokenTriple source;
};

/// Identification-status-behavior relational graph.
struct IsbRn {
  std::set<Entity> entities;
  std::map<std::pair<Entity, Entity>, IsbEdge> edges;
  std::map<Entity, std::vector<Neighbor>> adjacency;  // sorted like query_relations
  std::uint64_t version = 0;
  double rho = 0.5;
};

/// Scores every distinct triple on its own and links i-s, i-b and s-b when the
/// score reaches `rho`. Parallel evidence for one pair keeps the highest weight.
IsbRn build_isb_rn(const std::set<TokenTriple>& triples, rn::TripleEvaluator& eval, double rho);

/// Rebuilds `adjacency` from `edges`.
void index_adjacency(IsbRn& g);

/// Neighbours by weight descending, ties by token. Unknown entity -> {}.
std::vector<Neighbor> query_relations(const IsbRn& g, const Entity& e);

/// Breadth-first expansion up to `depth` hops; the start entity is excluded.
std::set<Entity> associate(const IsbRn& g, const Entity& start, int depth);

nlohmann::json to_json(const IsbRn& g);

class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::shared_ptr<const EntityRegistry> registry);

  /// Returns false for an exact duplicate. Throws UnknownEntity for an
  /// unregistered token and InvalidInput when an origin's timestamps regress.
  bool insert(const KnowledgeTriple& t);

  std::size_t size() const noexcept { return triples_.size(); }
  const std::vector<KnowledgeTriple>& triples() const noexcept { return triples_; }
  const std::set<TokenTriple>& distinct() const noexcept { return distinct_; }
  const EntityRegistry& registry() const noexcept { return *registry_; }
  const IsbRn& isb_rn() const noexcept { return graph_; }

  void rebuild(rn::TripleEvaluator& eval, double rho);

  /// Inserts `snapshot` and rebuilds only when `tick` is a multiple of
  /// `period`; returns whether it did. Throws InvalidInput for period < 1.
  bool periodic_update(std::span<const KnowledgeTriple> snapshot, Tick tick, Tick period,
                       rn::TripleEvaluator& eval, double rho);

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const EntityRegistry> registry_;
  std::vector<KnowledgeTriple> triples_;
  std::set<KnowledgeTriple> seen_;
  std::set<TokenTriple> distinct_;
  std::map<DomainId, Tick> last_timestamp_;
  IsbRn graph_;
};

}  // namespace blcs::kb
