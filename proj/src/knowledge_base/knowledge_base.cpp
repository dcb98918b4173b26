#include "blcs/knowledge_base/knowledge_base.hpp"

#include <algorithm>
#include <deque>

#include "blcs/common/error.hpp"

namespace blcs::kb {

namespace {

std::size_t slot(Base b) { return static_cast<std::size_t>(b); }

}  // namespace

void EntityRegistry::add(Base base, std::string token) { bases_[slot(base)].insert(std::move(token)); }

bool EntityRegistry::contains(Base base, std::string_view token) const {
  return bases_[slot(base)].find(token) != bases_[slot(base)].end();
}

void EntityRegistry::require(const TokenTriple& t) const {
  auto check = [&](Base b, const std::string& token) {
    if (!contains(b, token)) throw UnknownEntity(std::string(to_string(b)) + " token '" + token + "' is not registered");
  };
  check(Base::identification, t.identification);
  check(Base::status, t.status);
  check(Base::behavior, t.behavior);
}

const std::set<std::string, std::less<>>& EntityRegistry::tokens(Base base) const { return bases_[slot(base)]; }

IsbRn build_isb_rn(const std::set<TokenTriple>& triples, rn::TripleEvaluator& eval, double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw InvalidInput("rho must lie in (0, 1]");
  IsbRn g;
  g.rho = rho;
  for (const auto& t : triples) {
    const Entity i{Base::identification, t.identification};
    const Entity s{Base::status, t.status};
    const Entity b{Base::behavior, t.behavior};
    g.entities.insert(i);
    g.entities.insert(s);
    g.entities.insert(b);
    const double w = eval.score(t);
    if (w < rho) continue;
    const Entity pairs[3][2] = {{i, s}, {i, b}, {s, b}};
    for (const auto& p : pairs) {
      const Entity& lo = std::min(p[0], p[1]);
      const Entity& hi = std::max(p[0], p[1]);
      auto key = std::make_pair(lo, hi);
      auto it = g.edges.find(key);
      if (it == g.edges.end() || w > it->second.weight)
        g.edges[key] = IsbEdge{lo, hi, w, eval.relation(t), t};
    }
  }
  index_adjacency(g);
  return g;
}

void index_adjacency(IsbRn& g) {
  g.adjacency.clear();
  for (const auto& [key, e] : g.edges) {
    g.adjacency[e.a].push_back({e.b, e.weight});
    g.adjacency[e.b].push_back({e.a, e.weight});
  }
  for (auto& [entity, list] : g.adjacency)
    std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) {
      if (x.weight != y.weight) return x.weight > y.weight;
      if (x.entity.token != y.entity.token) return x.entity.token < y.entity.token;
      return x.entity.base < y.entity.base;
    });
}

std::vector<Neighbor> query_relations(const IsbRn& g, const Entity& e) {
  auto it = g.adjacency.find(e);
  return it == g.adjacency.end() ? std::vector<Neighbor>{} : it->second;
}

std::set<Entity> associate(const IsbRn& g, const Entity& start, int depth) {
  std::set<Entity> visited{start};
  std::deque<std::pair<Entity, int>> queue{{start, 0}};
  while (!queue.empty()) {
    auto [e, d] = queue.front();
    queue.pop_front();
    if (d >= depth) continue;
    for (const auto& n : query_relations(g, e))
      if (visited.insert(n.entity).second) queue.emplace_back(n.entity, d + 1);
  }
  visited.erase(start);
  return visited;
}

nlohmann::json to_json(const IsbRn& g) {
  nlohmann::json entities = nlohmann::json::array();
  for (const auto& e : g.entities) entities.push_back({{"base", to_string(e.base)}, {"token", e.token}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [key, e] : g.edges)
    edges.push_back({{"a", e.a.token}, {"b", e.b.token}, {"weight", e.weight}});
  return {{"version", g.version}, {"rho", g.rho}, {"entities", entities}, {"edges", edges}};
}

KnowledgeBase::KnowledgeBase(std::shared_ptr<const EntityRegistry> registry) : registry_(std::move(registry)) {
  if (!registry_) throw InvalidInput("knowledge base needs a registry");
}

bool KnowledgeBase::insert(const KnowledgeTriple& t) {
  registry_->require(t.tokens());
  if (seen_.count(t)) return false;
  auto last = last_timestamp_.find(t.origin_domain);
  if (last != last_timestamp_.end() && t.timestamp < last->second)
    throw InvalidInput("timestamp regression for origin domain " + std::to_string(t.origin_domain));
  last_timestamp_[t.origin_domain] = t.timestamp;
  seen_.insert(t);
  triples_.push_back(t);
  distinct_.insert(t.tokens());
  return true;
}

void KnowledgeBase::rebuild(rn::TripleEvaluator& eval, double rho) {
  const std::uint64_t next = graph_.version + 1;
  graph_ = build_isb_rn(distinct_, eval, rho);
  graph_.version = next;
}

bool KnowledgeBase::periodic_update(std::span<const KnowledgeTriple> snapshot, Tick tick, Tick period,
                                    rn::TripleEvaluator& eval, double rho) {
  if (period < 1) throw InvalidInput("period must be >= 1");
  if (tick % period != 0) return false;
  for (const auto& t : snapshot) insert(t);
  rebuild(eval, rho);
  return true;
}

nlohmann::json KnowledgeBase::to_json() const {
  nlohmann::json triples = nlohmann::json::array();
  for (const auto& t : triples_)
    triples.push_back({{"identification", t.identification},
                       {"status", t.status},
                       {"behavior", t.behavior},
                       {"timestamp", t.timestamp},
                       {"origin_domain", t.origin_domain}});
  return {{"triples", triples}, {"isb_rn", kb::to_json(graph_)}};
}

}  // namespace blcs::kb
