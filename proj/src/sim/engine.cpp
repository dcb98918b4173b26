#include "blcs/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <queue>
#include <tuple>

#include "blcs/common/error.hpp"
#include "blcs/controller/controller.hpp"
#include "blcs/controller/sync.hpp"
#include "blcs/routing/routing.hpp"

namespace blcs::sim {

namespace {

using nlohmann::json;

enum class Kind { arrival, release, affair, kb_refresh, sync };

struct Event {
  Tick tick = 0;
  std::uint64_t seq = 0;
  Kind kind = Kind::arrival;
  std::int64_t payload = 0;

  bool operator>(const Event& o) const { return std::tie(tick, seq) > std::tie(o.tick, o.seq); }
};

struct Active {
  RequestId request = 0;
  Tick arrival = 0;
  Tick holding = 0;
  std::vector<DomainId> domains;
  std::vector<LinkId> links;
  std::size_t lost = 0;
  std::set<DomainId> faulty;  // malicious domains that dropped units
};

class Engine {
 public:
  Engine(const Scenario& sc, std::shared_ptr<const rn::RnModel> model)
      : sc_(sc),
        topo_(sc.topology),
        world_(build_world(sc.topology, sc.objects)),
        traffic_(derive_seed(sc.seed, Stream::traffic)),
        affairs_(derive_seed(sc.seed, Stream::affairs)),
        behavior_(derive_seed(sc.seed, Stream::behavior)),
        loss_(derive_seed(sc.seed, Stream::loss)) {
    assignment_ = inject_malicious(world_.eligible, sc.malicious_ratio, sc.collusion, sc.seed);
    if (!model) model = std::make_shared<rn::RnModel>(rn::init_model(world_.vocabulary, rn::RnLayout{}, 4, 0));
    requester_ = world_.requester_domains.front();
    for (const auto& d : topo_.domains()) {
      ctl::ControllerState s(d.controller, d.id, d.id == requester_ ? ctl::Role::leader : ctl::Role::receiver,
                             world_.registry, model, sc.controller);
      s.honest = !assignment_.malicious.count(d.controller);
      if (!s.honest && sc.collusion)
        for (ControllerId c : assignment_.malicious)
          if (c != d.controller) s.accomplices.insert(c);
      ctl::register_directory(s, world_.directory, topo_);
      s.slots = topo_.slots();
      ctls_.push_back(std::move(s));
    }
  }

  RunOutput run() {
    json head{{"type", "RUN"},
              {"seed", sc_.seed},
              {"variant", variant()},
              {"malicious", assignment_.malicious},
              {"collusion", assignment_.collusion},
              {"malicious_ratio", sc_.malicious_ratio},
              {"load", sc_.load},
              {"duration", sc_.duration},
              {"warmup", sc_.warmup()}};
    trace_.push_back(std::move(head));

    if (sc_.load > 0.0) schedule_next_arrival(0.0);
    schedule_next_affair(0.0);
    push(sc_.kb_period, Kind::kb_refresh, 0);
    push(sc_.sync_period, Kind::sync, 0);

    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      switch (e.kind) {
        case Kind::arrival: on_arrival(e.tick); break;
        case Kind::release: on_release(e.tick, e.payload); break;
        case Kind::affair: on_affair(e.tick); break;
        case Kind::kb_refresh: on_refresh(e.tick); break;
        case Kind::sync: on_sync(e.tick); break;
      }
    }
    RunOutput out;
    out.report = compute_metrics(trace_, sc_);
    out.trace = std::move(trace_);
    out.assignment = assignment_;
    return out;
  }

 private:
  std::string variant() const { return sc_.blcs ? "blcs" : "baseline"; }

  void push(Tick t, Kind k, std::int64_t payload) { queue_.push({t, seq_++, k, payload}); }

  void schedule_next_arrival(double from) {
    arrival_clock_ = from + traffic_.exponential(sc_.mean_holding / sc_.load);
    auto t = static_cast<Tick>(std::floor(arrival_clock_));
    if (t < sc_.duration) push(t, Kind::arrival, 0);
  }

  void schedule_next_affair(double from) {
    const double rate = sc_.affair_rate * static_cast<double>(ctls_.size());
    affair_clock_ = from + affairs_.exponential(1.0 / rate);
    auto t = static_cast<Tick>(std::floor(affair_clock_));
    if (t < sc_.duration) push(t, Kind::affair, 0);
  }

  ctl::ControllerState& controller_of(DomainId d) { return ctls_.at(static_cast<std::size_t>(d)); }
  bool malicious(DomainId d) const { return assignment_.malicious.count(topo_.domain(d).controller) > 0; }

  void on_affair(Tick now) {
    auto d = static_cast<DomainId>(affairs_.index(ctls_.size()));
    Affair a = draw_affair(world_, d, malicious(d), sc_.malicious, affairs_, now, serial_++);
    snapshot_.push_back(a.triple);
    latest_[d] = a;
    schedule_next_affair(affair_clock_);
  }

  void on_refresh(Tick now) {
    if (sc_.blcs)
      for (auto& c : ctls_) ctl::refresh_knowledge(c, snapshot_);
    snapshot_.clear();
    if (now + sc_.kb_period < sc_.duration) push(now + sc_.kb_period, Kind::kb_refresh, 0);
  }

  void on_sync(Tick now) {
    std::vector<ctl::ControllerState*> followers;
    for (auto& c : ctls_)
      if (c.domain != requester_) followers.push_back(&c);
    try {
      ctl::sync_with_leader(controller_of(requester_), followers, now, sync_lock_,
                            [&](const json& j) { trace_.push_back(j); });
    } catch (const LeaderQuarantined& e) {
      trace_.push_back({{"type", "SYNC_SKIPPED"}, {"tick", now}, {"reason", e.what()}});
    }
    if (now + sc_.sync_period < sc_.duration) push(now + sc_.sync_period, Kind::sync, 0);
  }

  // The sender's answer to an authentication request, including a malicious
  // sender's lies.
  ctl::PartialInfo respond(DomainId d, const routing::RouteRequest& req, std::uint64_t nonce) {
    auto& peer = controller_of(d);
    const bool bad = malicious(d);
    ctl::EventInfo ev;
    if (auto it = latest_.find(d); it != latest_.end()) {
      const auto& t = it->second.triple;
      ev = {it->second.event_id, t.timestamp, t.identification, t.behavior};
    } else {
      const auto& o = world_.objects[world_.objects_by_domain.at(d).front()];
      ev = {"ev-none", req.arrival, o.token, object_type(o.type).pairs.front().second};
    }
    if (bad && behavior_.bernoulli(sc_.malicious.lie)) {
      // replay an event handled elsewhere
      std::vector<std::size_t> foreign;
      for (std::size_t i = 0; i < world_.objects.size(); ++i)
        if (world_.objects[i].domain != d) foreign.push_back(i);
      const auto& o = world_.objects[foreign[behavior_.index(foreign.size())]];
      const auto& pairs = object_type(o.type).pairs;
      ev.location = o.token;
      ev.affair_type = pairs[behavior_.index(pairs.size())].second;
    }

    std::optional<LightpathId> shared;
    for (auto it = active_.rbegin(); it != active_.rend() && !shared; ++it) {
      const auto& ds = it->second.domains;
      if (std::count(ds.begin(), ds.end(), d) && std::count(ds.begin(), ds.end(), requester_)) shared = it->first;
    }
    ctl::DisclosurePolicy policy;
    policy.fragment_slots = shared ? sc_.fragment_slots : 0;
    ctl::refresh_own_snapshot(peer, topo_);
    auto info = ctl::make_partial_info(peer, ev, policy, nonce, shared);
    if (!info.fragments.empty()) {
      info.candidate = ctl::propose_candidate(peer, info.fragments.front().link, req.width);
      if (bad && behavior_.bernoulli(sc_.malicious.falsify)) falsify(info, peer);
    }
    return info;
  }

  // Moves the reported lightpath by one slot, or, when that is invisible in
  // the window, proposes its own slots as free.
  void falsify(ctl::PartialInfo& info, const ctl::ControllerState& peer) {
    auto& f = info.fragments.front();
    const auto& mask = peer.own_snapshot.at(f.link);
    int lo = -1, hi = -1;
    for (int i = 0; i < mask.slots(); ++i)
      if (mask.owner(i) == f.lightpath) {
        if (lo < 0) lo = i;
        hi = i;
      }
    const int delta = hi + 1 < mask.slots() ? 1 : -1;
    auto shifted = f.states;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      if (shifted[i] == fron::SlotState::unknown) continue;
      int s = static_cast<int>(i);
      shifted[i] = s >= lo + delta && s <= hi + delta ? fron::SlotState::occupied : fron::SlotState::free;
    }
    if (shifted != f.states) {
      f.states = std::move(shifted);
    } else {
      info.candidate = ctl::CandidateResources{{f.link}, {lo, hi}};
    }
  }

  void authenticate(ctl::ControllerState& me, DomainId d, const routing::RouteRequest& req, Tick now) {
    const ControllerId peer = topo_.domain(d).controller;
    const std::uint64_t nonce = ++nonce_;
    json q = ctl::auth_message(ctl::MessageType::AUTH_REQ, me.id, nonce, {{"to", peer}, {"request", req.id}});
    q["tick"] = now;
    trace_.push_back(std::move(q));
    if (!sc_.blcs) {
      json r = ctl::auth_message(ctl::MessageType::AUTH_RESP, peer, nonce, json::object());
      r["tick"] = now;
      r["verdict"] = {{"trusted", true}, {"reason", "accepted without verification"}};
      trace_.push_back(std::move(r));
      return;
    }
    auto info = respond(d, req, nonce);
    ctl::record_reply(me, peer, true);
    ctl::refresh_own_snapshot(me, topo_);
    auto v = ctl::verify_peer(me, info);
    ctl::record_verdict(me, v, now);
    json r = ctl::auth_message(ctl::MessageType::AUTH_RESP, peer, nonce, ctl::to_json(info));
    r["tick"] = now;
    r["verdict"] = {{"trusted", v.trusted}, {"reason", v.reason}, {"confidence", v.confidence}};
    trace_.push_back(std::move(r));
  }

  void on_arrival(Tick now) {
    routing::RouteRequest req;
    req.id = next_request_++;
    req.arrival = now;
    const auto& obj = world_.objects[world_.requesters[traffic_.index(world_.requesters.size())]];
    req.source = obj.node;
    req.width = traffic_.range(sc_.width_min, sc_.width_max);
    req.holding = std::max<Tick>(1, static_cast<Tick>(std::llround(traffic_.exponential(sc_.mean_holding))));
    const std::size_t preferred = traffic_.index(world_.destinations.size());
    schedule_next_arrival(arrival_clock_);

    const DomainId home = topo_.domain_of(req.source);
    auto& me = controller_of(home);
    json rec{{"type", "REQUEST"}, {"id", req.id},       {"arrival", now},      {"source", obj.token},
             {"width", req.width}, {"holding", req.holding}, {"variant", variant()}};

    std::optional<routing::RoutePlan> plan;
    routing::Blocked blocked{routing::BlockReason::NoPath, ""};
    int rounds = 0;
    const std::size_t nd = world_.destinations.size();

    if (!sc_.blcs) {
      req.destination = world_.destinations[preferred];
      auto g = routing::trusted_domain_graph(topo_, req, [](DomainId) { return true; });
      auto r = routing::greedy_route(topo_, std::get<routing::DomainGraph>(g), req);
      if (auto* p = std::get_if<routing::RoutePlan>(&r)) {
        for (DomainId d : p->domains)
          if (d != home) {
            authenticate(me, d, req, now);
            ++rounds;
          }
        plan = *p;
      } else {
        blocked = std::get<routing::Blocked>(r);
      }
    } else {
      auto allowed = [&](DomainId d) {
        if (d == home) return true;
        ControllerId c = topo_.domain(d).controller;
        auto cv = ctl::cached_verdict(me, c, now);
        return !cv || (*cv && ctl::routing_trusted(me, c, now));
      };
      for (int attempt = 0; attempt <= sc_.max_auth_attempts; ++attempt) {
        std::optional<NodeId> dst;
        for (std::size_t k = 0; k < nd && !dst; ++k) {
          NodeId cand = world_.destinations[(preferred + k) % nd];
          if (allowed(topo_.domain_of(cand))) dst = cand;
        }
        if (!dst) {
          blocked = {routing::BlockReason::Unroutable, "no trusted destination domain"};
          break;
        }
        req.destination = *dst;
        auto g = routing::trusted_domain_graph(topo_, req, allowed);
        if (auto* b = std::get_if<routing::Blocked>(&g)) {
          blocked = *b;
          break;
        }
        auto r = routing::greedy_route(topo_, std::get<routing::DomainGraph>(g), req);
        if (auto* b = std::get_if<routing::Blocked>(&r)) {
          blocked = *b;
          break;
        }
        const auto& p = std::get<routing::RoutePlan>(r);
        std::vector<DomainId> unknown;
        for (DomainId d : p.domains)
          if (d != home && !ctl::cached_verdict(me, topo_.domain(d).controller, now)) unknown.push_back(d);
        if (unknown.empty()) {
          plan = p;
          break;
        }
        if (attempt == sc_.max_auth_attempts) {
          blocked = {routing::BlockReason::Unroutable, "authentication did not settle"};
          break;
        }
        for (DomainId d : unknown) {
          authenticate(me, d, req, now);
          ++rounds;
        }
      }
    }

    json interactions = json::array();
    if (plan) {
      for (DomainId d : plan->domains)
        if (d != home) {
          interactions.push_back({{"controller", topo_.domain(d).controller}, {"malicious", malicious(d)}});
          plan->authenticated.insert(topo_.domain(d).controller);
        }
      // sabotage by malicious domains on the accepted plan
      std::optional<DomainId> saboteur;
      for (DomainId d : plan->domains)
        if (d != home && malicious(d) && behavior_.bernoulli(sc_.malicious.setup_fault) && !saboteur) saboteur = d;
      if (saboteur) {
        blocked = {routing::BlockReason::SetupFault, "setup sabotaged in " + topo_.domain(*saboteur).name};
        if (sc_.blcs) ctl::record_segment(me, topo_.domain(*saboteur).controller, false);
        plan.reset();
      }
    }
    if (plan) {
      const LightpathId lp = next_lightpath_++;
      auto res = routing::provision(*plan, topo_, req, lp, rounds, sc_.cost);
      if (auto* p = std::get_if<routing::Provisioned>(&res)) {
        Active a{req.id, now, req.holding, plan->domains, plan->links, 0, {}};
        for (Tick t = 0; t < req.holding; ++t) {
          bool lost = false;
          for (DomainId d : plan->domains)
            if (d != home && malicious(d) && loss_.bernoulli(sc_.malicious.loss)) {
              lost = true;
              a.faulty.insert(d);
            }
          a.lost += lost ? 1 : 0;
        }
        fron::Skeleton sk{lp, plan->links};
        for (DomainId d : plan->domains) ctl::note_lightpath(controller_of(d), sk, true, now);
        active_.emplace(lp, std::move(a));
        push(p->release_at, Kind::release, lp);
        rec["outcome"] = "admitted";
        rec["latency"] = p->latency;
        rec["lightpath"] = lp;
        rec["slots"] = {plan->slots.lo, plan->slots.hi};
      } else {
        blocked = std::get<routing::Blocked>(res);
        plan.reset();
      }
    }
    if (!plan) {
      rec["outcome"] = "blocked";
      rec["reason"] = routing::to_string(blocked.reason);
      rec["detail"] = blocked.detail;
    }
    rec["destination"] = req.destination;
    rec["auth_rounds"] = rounds;
    rec["interactions"] = std::move(interactions);
    trace_.push_back(std::move(rec));
  }

  void on_release(Tick now, LightpathId lp) {
    auto it = active_.find(lp);
    const Active& a = it->second;
    topo_.release(lp);
    const DomainId home = world_.requester_domains.front();
    fron::Skeleton sk{lp, a.links};
    for (DomainId d : a.domains) ctl::note_lightpath(controller_of(d), sk, false, now);
    if (sc_.blcs)
      for (DomainId d : a.domains)
        if (d != home) ctl::record_segment(controller_of(home), topo_.domain(d).controller, !a.faulty.count(d));
    trace_.push_back({{"type", "RELEASE"},
                      {"id", a.request},
                      {"lightpath", lp},
                      {"arrival", a.arrival},
                      {"tick", now},
                      {"offered", a.holding},
                      {"lost", a.lost}});
    active_.erase(it);
  }

  const Scenario& sc_;
  fron::Topology topo_;
  World world_;
  Assignment assignment_;
  DomainId requester_ = 0;
  std::vector<ctl::ControllerState> ctls_;
  Rng traffic_, affairs_, behavior_, loss_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double arrival_clock_ = 0.0;
  double affair_clock_ = 0.0;
  std::vector<kb::KnowledgeTriple> snapshot_;
  std::map<DomainId, Affair> latest_;
  std::map<LightpathId, Active> active_;
  std::vector<json> trace_;
  std::mutex sync_lock_;
  std::uint64_t nonce_ = 0;
  std::uint64_t serial_ = 0;
  RequestId next_request_ = 0;
  LightpathId next_lightpath_ = 1;
};

}  // namespace

RunOutput run(const Scenario& scenario, std::shared_ptr<const rn::RnModel> model) {
  validate(scenario);
  Engine e(scenario, std::move(model));
  return e.run();
}

std::string to_jsonl(std::span<const nlohmann::json> trace) {
  std::string out;
  for (const auto& r : trace) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace blcs::sim
