#include <random>

#include "doctest.h"

#include "blcs/common/error.hpp"
#include "blcs/routing/routing.hpp"
#include "routing_oracle.hpp"

using namespace blcs;
using namespace blcs::routing;
using fron::DomainKind;
using fron::Topology;

namespace {

auto all_trusted = [](DomainId) { return true; };

// Domain chain A - B - C plus a parallel pair of A-B links.
struct Chain {
  Topology t{8};
  NodeId a0, a1, b0, b1, c0;
  LinkId ab_low, ab_high, bc;
  Chain() {
    auto A = t.add_domain("A", DomainKind::wireless, 0);
    auto B = t.add_domain("B", DomainKind::optical, 1);
    auto C = t.add_domain("C", DomainKind::computing, 2);
    a0 = t.add_node(A, "a0");
    a1 = t.add_node(A, "a1");
    b0 = t.add_node(B, "b0");
    b1 = t.add_node(B, "b1");
    c0 = t.add_node(C, "c0");
    t.add_link(a0, a1, 1);
    t.add_link(b0, b1, 1);
    ab_low = t.add_link(a1, b0, 2);
    ab_high = t.add_link(a1, b0, 2);
    bc = t.add_link(b1, c0, 1);
  }
};

}  // namespace

TEST_CASE("block reasons have stable names") {
  CHECK(to_string(BlockReason::NoPath) == "NoPath");
  CHECK(to_string(BlockReason::StalePlan) == "StalePlan");
  CHECK(to_string(BlockReason::SetupFault) == "SetupFault");
}

TEST_CASE("single-domain request takes the shortest path and first slots") {
  Topology t(8);
  auto d = t.add_domain("A", DomainKind::optical, 0);
  auto n0 = t.add_node(d, ""), n1 = t.add_node(d, ""), n2 = t.add_node(d, "");
  t.add_link(n0, n1, 1);
  t.add_link(n1, n2, 1);
  auto direct = t.add_link(n0, n2, 5);
  RouteRequest req{1, n0, n2, 2, 0, 10};
  auto g = std::get<DomainGraph>(trusted_domain_graph(t, req, all_trusted));
  auto plan = std::get<RoutePlan>(greedy_route(t, g, req));
  CHECK(plan.links == std::vector<LinkId>{0, 1});
  CHECK(plan.slots == fron::SlotInterval{0, 1});
  CHECK(plan.domains == std::vector<DomainId>{d});
  (void)direct;
}

TEST_CASE("equal inter-domain links resolve to the lower id") {
  Chain c;
  RouteRequest req{1, c.a0, c.c0, 1, 0, 10};
  auto g = std::get<DomainGraph>(trusted_domain_graph(c.t, req, all_trusted));
  auto plan = std::get<RoutePlan>(greedy_route(c.t, g, req));
  CHECK(std::find(plan.links.begin(), plan.links.end(), c.ab_low) != plan.links.end());
  CHECK(plan.domains == std::vector<DomainId>{0, 1, 2});
  CHECK_NOTHROW(audit_plan(c.t, req, plan, all_trusted));
  // loading the lower link makes utilisation decide
  c.t.commit({9, {c.ab_low}, {7, 7}, 0});
  auto again = std::get<RoutePlan>(greedy_route(c.t, g, req));
  CHECK(std::find(again.links.begin(), again.links.end(), c.ab_high) != again.links.end());
}

TEST_CASE("trusted domain graph filters domains and guards endpoints") {
  Chain c;
  RouteRequest req{1, c.a0, c.c0, 1, 0, 10};
  auto untrusted_b = [](DomainId d) { return d != 1; };
  auto g = std::get<DomainGraph>(trusted_domain_graph(c.t, req, untrusted_b));
  CHECK(g.domains == std::set<DomainId>{0, 2});
  CHECK(g.inter_links.empty());
  auto blocked = std::get<Blocked>(greedy_route(c.t, g, req));
  CHECK(blocked.reason == BlockReason::NoPath);
  auto no_dst = trusted_domain_graph(c.t, req, [](DomainId d) { return d != 2; });
  CHECK(std::get<Blocked>(no_dst).reason == BlockReason::Unroutable);
}

TEST_CASE("domain filter equals a set-difference oracle on a 5-domain mesh") {
  Topology t(8);
  std::vector<NodeId> n;
  for (int d = 0; d < 5; ++d) n.push_back(t.add_node(t.add_domain("D", DomainKind::optical, d), ""));
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) t.add_link(n[static_cast<std::size_t>(a)], n[static_cast<std::size_t>(b)], 1);
  const std::set<DomainId> bad{1, 3};
  RouteRequest req{1, n[0], n[4], 1, 0, 1};
  auto g = std::get<DomainGraph>(trusted_domain_graph(t, req, [&](DomainId d) { return !bad.count(d); }));
  std::set<LinkId> expect;
  for (const auto& l : t.links())
    if (!bad.count(t.domain_of(l.a)) && !bad.count(t.domain_of(l.b))) expect.insert(l.id);
  CHECK(g.inter_links == expect);
  CHECK(g.domains == std::set<DomainId>{0, 2, 4});
}

TEST_CASE("spectrum exhaustion is NoSpectrum, not NoPath") {
  Chain c;
  for (LinkId l : {c.ab_low, c.ab_high}) c.t.commit({100 + l, {l}, {0, 7}, 0});
  RouteRequest req{1, c.a0, c.c0, 1, 0, 10};
  auto g = std::get<DomainGraph>(trusted_domain_graph(c.t, req, all_trusted));
  CHECK(std::get<Blocked>(greedy_route(c.t, g, req)).reason == BlockReason::NoSpectrum);
}

TEST_CASE("provision latency and stale plans") {
  Chain c;
  RouteRequest req{7, c.a0, c.c0, 2, 100, 50};
  auto g = std::get<DomainGraph>(trusted_domain_graph(c.t, req, all_trusted));
  auto plan = std::get<RoutePlan>(greedy_route(c.t, g, req));
  auto stale = plan;
  auto done = std::get<Provisioned>(provision(plan, c.t, req, 1, 0));
  CHECK(done.latency == 15);
  CHECK(done.release_at == 150);
  CHECK_NOTHROW(c.t.audit());

  const auto snapshot = c.t.links();
  auto blocked = std::get<Blocked>(provision(stale, c.t, req, 2, 3));
  CHECK(blocked.reason == BlockReason::StalePlan);
  for (std::size_t l = 0; l < snapshot.size(); ++l) CHECK(c.t.links()[l].spectrum == snapshot[l].spectrum);

  c.t.release(1);
  auto cold = std::get<Provisioned>(provision(plan, c.t, req, 3, 3));
  CHECK(cold.latency == 3 * 5 + 3 * 20);
  RoutePlan two = plan;
  two.domains = {0, 1};
  c.t.release(3);
  CHECK(std::get<Provisioned>(provision(two, c.t, req, 4, 0)).latency == 10);
}

TEST_CASE("greedy routing is deterministic and agrees with exhaustive search") {
  std::mt19937_64 rng(17);
  int feasible = 0, misses = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = testing::random_routing_instance(rng);
    auto trusted = [&](DomainId d) { return !inst.untrusted.count(d); };
    const bool oracle = testing::exhaustive_feasible(inst.topo, inst.req, trusted);
    auto gv = trusted_domain_graph(inst.topo, inst.req, trusted);
    REQUIRE(std::holds_alternative<DomainGraph>(gv));
    auto result = greedy_route(inst.topo, std::get<DomainGraph>(gv), inst.req);
    auto again = greedy_route(inst.topo, std::get<DomainGraph>(gv), inst.req);
    if (auto* plan = std::get_if<RoutePlan>(&result)) {
      CHECK(oracle);
      CHECK_NOTHROW(audit_plan(inst.topo, inst.req, *plan, trusted));
      CHECK(std::get<RoutePlan>(again).links == plan->links);
    }
    feasible += oracle;
    misses += oracle && std::holds_alternative<Blocked>(result);
  }
  CHECK(feasible > 50);
  CHECK(static_cast<double>(misses) / 200.0 < 0.05);
  MESSAGE("feasible " << feasible << " greedy misses " << misses);
}
