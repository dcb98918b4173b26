#include "blcs/routing/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>

#include "blcs/common/error.hpp"

namespace blcs::routing {

using fron::SlotInterval;
using fron::Topology;

std::string_view to_string(BlockReason r) noexcept {
  switch (r) {
    case BlockReason::NoPath: return "NoPath";
    case BlockReason::NoSpectrum: return "NoSpectrum";
    case BlockReason::StalePlan: return "StalePlan";
    case BlockReason::Unroutable: return "Unroutable";
    case BlockReason::SetupFault: return "SetupFault";
  }
  return "NoPath";
}

std::variant<DomainGraph, Blocked> trusted_domain_graph(const Topology& topo, const RouteRequest& req,
                                                        const TrustPredicate& trusted) {
  const DomainId src = topo.domain_of(req.source);
  const DomainId dst = topo.domain_of(req.destination);
  if (!trusted(src)) return Blocked{BlockReason::Unroutable, "source domain is not trusted"};
  if (!trusted(dst)) return Blocked{BlockReason::Unroutable, "destination domain is not trusted"};
  DomainGraph g;
  for (const auto& d : topo.domains())
    if (trusted(d.id)) g.domains.insert(d.id);
  for (const auto& l : topo.links()) {
    if (!l.inter_domain) continue;
    if (g.domains.count(topo.domain_of(l.a)) && g.domains.count(topo.domain_of(l.b))) g.inter_links.insert(l.id);
  }
  return g;
}

namespace {

bool fits(std::uint64_t mask, int slots, int width) {
  const std::uint64_t m[] = {mask};
  return fron::first_fit_alloc(m, slots, width).has_value();
}

// Domain-level hop counts to `target` over allowed, unvisited domains, using
// only inter-domain links that can still carry `width` slots under `mask`
// (any link when `width` is 0).
std::map<DomainId, int> domain_hops(const Topology& topo, const DomainGraph& g, DomainId target,
                                    const std::set<DomainId>& visited, std::uint64_t mask, int width) {
  std::map<DomainId, std::set<DomainId>> adj;
  for (LinkId l : g.inter_links) {
    const auto& link = topo.link(l);
    if (width > 0 && !fits(mask & link.spectrum.free_bits(), topo.slots(), width)) continue;
    const DomainId a = topo.domain_of(link.a), b = topo.domain_of(link.b);
    if (visited.count(a) || visited.count(b)) continue;
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::map<DomainId, int> hops{{target, 0}};
  std::deque<DomainId> q{target};
  while (!q.empty()) {
    const DomainId d = q.front();
    q.pop_front();
    for (DomainId n : adj[d])
      if (!hops.count(n)) {
        hops[n] = hops[d] + 1;
        q.push_back(n);
      }
  }
  return hops;
}

struct IntraTree {
  std::map<NodeId, Tick> dist;
  std::map<NodeId, LinkId> via;            // link used to reach the node
  std::map<NodeId, std::uint64_t> reach;  // free slots common to the tree path
};

// Shortest delay from `from` inside domain `d`. With a mask, a link extends a
// tree path only if the slots free along the path, on the link and in `mask`
// still hold a run of `width`. Ties: lower node id, then lower link id.
IntraTree intra_dijkstra(const Topology& topo, DomainId d, NodeId from, std::optional<std::uint64_t> mask, int width) {
  IntraTree t;
  using Item = std::pair<Tick, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t.dist[from] = 0;
  t.reach[from] = mask.value_or(~std::uint64_t{0});
  pq.push({0, from});
  while (!pq.empty()) {
    auto [dist, u] = pq.top();
    pq.pop();
    if (dist != t.dist[u]) continue;
    for (LinkId l : topo.incident(u)) {
      const auto& link = topo.link(l);
      if (link.inter_domain) continue;
      const NodeId v = link.other(u);
      if (topo.domain_of(v) != d) continue;
      const std::uint64_t r = t.reach[u] & link.spectrum.free_bits();
      if (mask && !fits(r, topo.slots(), width)) continue;
      const Tick nd = dist + link.delay;
      auto it = t.dist.find(v);
      if (it == t.dist.end() || nd < it->second || (nd == it->second && t.via.count(v) && l < t.via.at(v))) {
        t.dist[v] = nd;
        t.via[v] = l;
        t.reach[v] = r;
        pq.push({nd, v});
      }
    }
  }
  return t;
}

// Nodes and links from the tree root to `to`.
void unwind(const Topology& topo, const IntraTree& t, NodeId to, std::vector<NodeId>& nodes, std::vector<LinkId>& links) {
  std::vector<LinkId> rev;
  NodeId cur = to;
  while (t.via.count(cur)) {
    const LinkId l = t.via.at(cur);
    rev.push_back(l);
    cur = topo.link(l).other(cur);
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    links.push_back(*it);
    nodes.push_back(topo.link(*it).other(nodes.back()));
  }
}

std::uint64_t path_mask(const Topology& topo, const IntraTree& t, NodeId to) {
  std::uint64_t m = ~std::uint64_t{0};
  NodeId cur = to;
  while (t.via.count(cur)) {
    const LinkId l = t.via.at(cur);
    m &= topo.link(l).spectrum.free_bits();
    cur = topo.link(l).other(cur);
  }
  return m;
}

}  // namespace

std::variant<RoutePlan, Blocked> greedy_route(const Topology& topo, const DomainGraph& graph, const RouteRequest& req) {
  if (req.width < 1) throw InvalidInput("request width must be >= 1");
  if (req.source == req.destination) throw InvalidInput("source and destination must differ");
  const DomainId src = topo.domain_of(req.source);
  const DomainId dst = topo.domain_of(req.destination);
  if (!graph.domains.count(src) || !graph.domains.count(dst))
    return Blocked{BlockReason::Unroutable, "endpoint domain outside the trusted graph"};
  if (!domain_hops(topo, graph, dst, {}, ~std::uint64_t{0}, 0).count(src))
    return Blocked{BlockReason::NoPath, "destination domain unreachable"};

  RoutePlan plan;
  plan.nodes.push_back(req.source);
  plan.domains.push_back(src);
  std::set<DomainId> visited{src};
  std::uint64_t mask = ~std::uint64_t{0};
  NodeId at = req.source;
  DomainId dom = src;
  bool spectrum_limited = false;

  while (true) {
    const IntraTree tree = intra_dijkstra(topo, dom, at, mask, req.width);
    if (dom == dst) {
      if (!tree.dist.count(req.destination)) {
        const IntraTree bare = intra_dijkstra(topo, dom, at, std::nullopt, req.width);
        const bool reachable = bare.dist.count(req.destination) > 0;
        return Blocked{reachable ? BlockReason::NoSpectrum : BlockReason::NoPath, "no intra-domain path to destination"};
      }
      const std::uint64_t m = mask & path_mask(topo, tree, req.destination);
      if (!fits(m, topo.slots(), req.width)) return Blocked{BlockReason::NoSpectrum, "no common free interval"};
      unwind(topo, tree, req.destination, plan.nodes, plan.links);
      mask = m;
      break;
    }
    struct Exit {
      int hop;
      double util;
      LinkId link;
      NodeId inner;
      std::uint64_t mask;
    };
    std::optional<Exit> best;
    bool structural_exit = false;
    const auto hops = domain_hops(topo, graph, dst, visited, mask, req.width);
    for (LinkId l : graph.inter_links) {
      const auto& link = topo.link(l);
      NodeId inner, outer;
      if (topo.domain_of(link.a) == dom) {
        inner = link.a;
        outer = link.b;
      } else if (topo.domain_of(link.b) == dom) {
        inner = link.b;
        outer = link.a;
      } else {
        continue;
      }
      const DomainId next = topo.domain_of(outer);
      if (visited.count(next)) continue;
      structural_exit = true;
      if (!hops.count(next)) continue;
      if (!tree.dist.count(inner)) continue;
      const std::uint64_t m = mask & path_mask(topo, tree, inner) & link.spectrum.free_bits();
      if (!fits(m, topo.slots(), req.width)) continue;
      // entering the destination domain: the last leg must fit as well
      if (next == dst && !intra_dijkstra(topo, dst, outer, m, req.width).dist.count(req.destination)) continue;
      Exit e{hops.at(next), topo.utilization(l), l, inner, m};
      if (!best || std::tie(e.hop, e.util, e.link) < std::tie(best->hop, best->util, best->link)) best = e;
    }
    if (!best) {
      if (structural_exit) spectrum_limited = true;
      return Blocked{spectrum_limited ? BlockReason::NoSpectrum : BlockReason::NoPath, "no usable exit from domain"};
    }
    unwind(topo, tree, best->inner, plan.nodes, plan.links);
    plan.links.push_back(best->link);
    at = topo.link(best->link).other(best->inner);
    plan.nodes.push_back(at);
    dom = topo.domain_of(at);
    visited.insert(dom);
    plan.domains.push_back(dom);
    mask = best->mask;
  }
  const std::uint64_t m[] = {mask};
  plan.slots = *fron::first_fit_alloc(m, topo.slots(), req.width);
  return plan;
}

std::variant<Provisioned, Blocked> provision(const RoutePlan& plan, Topology& topo, const RouteRequest& req,
                                             LightpathId lightpath_id, int auth_rounds, const ProvisionCost& cost) {
  if (plan.links.empty()) throw InvalidInput("cannot provision an empty plan");
  if (auth_rounds < 0) throw InvalidInput("negative authentication rounds");
  for (LinkId l : plan.links)
    if (!topo.link(l).spectrum.range_free(plan.slots)) return Blocked{BlockReason::StalePlan, "slots taken since planning"};
  fron::Lightpath lp{lightpath_id, plan.links, plan.slots, req.id};
  topo.commit(lp);
  Provisioned out;
  out.lightpath = std::move(lp);
  out.latency = cost.per_domain * static_cast<Tick>(plan.domains.size()) + cost.per_auth_round * auth_rounds;
  out.release_at = req.arrival + req.holding;
  return out;
}

void audit_plan(const Topology& topo, const RouteRequest& req, const RoutePlan& plan, const TrustPredicate& trusted) {
  if (plan.nodes.size() != plan.links.size() + 1) throw Inconsistent("plan node and link counts disagree");
  if (plan.nodes.front() != req.source || plan.nodes.back() != req.destination)
    throw Inconsistent("plan does not join source and destination");
  std::vector<DomainId> seq{topo.domain_of(plan.nodes.front())};
  std::set<NodeId> seen{plan.nodes.front()};
  for (std::size_t k = 0; k < plan.links.size(); ++k) {
    const auto& l = topo.link(plan.links[k]);
    const NodeId a = plan.nodes[k], b = plan.nodes[k + 1];
    if (!((l.a == a && l.b == b) || (l.a == b && l.b == a))) throw Inconsistent("plan link does not join its nodes");
    if (!seen.insert(b).second) throw Inconsistent("plan revisits a node");
    const DomainId d = topo.domain_of(b);
    if (d != seq.back()) seq.push_back(d);
  }
  if (seq != plan.domains) throw Inconsistent("plan domain sequence does not match its path");
  for (DomainId d : plan.domains)
    if (!trusted(d)) throw Inconsistent("plan crosses an untrusted domain");
  if (plan.slots.width() != req.width) throw Inconsistent("plan width differs from the request");
  for (LinkId l : plan.links)
    if (!topo.link(l).spectrum.range_free(plan.slots)) throw Inconsistent("plan slots are not free on every link");
}

}  // namespace blcs::routing
