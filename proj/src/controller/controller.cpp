#include "blcs/controller/controller.hpp"

#include <algorithm>
#include <cstdio>

#include "blcs/common/error.hpp"

namespace blcs::ctl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string show(const kb::TokenTriple& t) {
  return "(" + t.identification + ", " + t.status + ", " + t.behavior + ")";
}

void push_capped(std::deque<bool>& d, bool v, std::size_t cap) {
  d.push_back(v);
  while (d.size() > cap) d.pop_front();
}

double fraction(const std::deque<bool>& d, std::size_t window) {
  if (d.empty() || window == 0) return 0.5;
  std::size_t n = std::min(window, d.size());
  auto good = std::count(d.end() - static_cast<std::ptrdiff_t>(n), d.end(), true);
  return static_cast<double>(good) / static_cast<double>(n);
}

std::optional<DomainId> domain_of_controller(const ControllerState& s, ControllerId c) {
  for (const auto& [d, ctl] : s.virtual_info.controllers)
    if (ctl == c) return d;
  return std::nullopt;
}

const std::string kUnknown = "<unk>";

}  // namespace

void validate(const ControllerConfig& c) {
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw ConfigError("controller.tau", "must lie in [0, 1]");
  if (c.depth < 0) throw ConfigError("controller.depth", "must be >= 0");
  if (c.cache_expiry < 1) throw ConfigError("controller.cache_expiry", "must be >= 1");
  if (!(c.rho > 0.0 && c.rho <= 1.0)) throw ConfigError("controller.rho", "must lie in (0, 1]");
  if (c.history_window < 1) throw ConfigError("controller.history_window", "must be >= 1");
  if (c.recall_iters < 1) throw ConfigError("controller.recall_iters", "must be >= 1");
  if (c.evaluation_window < 1) throw ConfigError("controller.evaluation_window", "must be >= 1");
  if (!(c.composite_threshold >= 0.0 && c.composite_threshold <= 1.0))
    throw ConfigError("controller.composite_threshold", "must lie in [0, 1]");
  if (c.memory_k < 1) throw ConfigError("controller.memory_k", "must be >= 1");
  if (!(c.memory_match >= 0.0 && c.memory_match <= 1.0))
    throw ConfigError("controller.memory_match", "must lie in [0, 1]");
}

nlohmann::json to_json(const TrustVerdict& v) {
  return {{"subject", v.subject},   {"trusted", v.trusted}, {"score", v.score},
          {"confidence", v.confidence}, {"reason", v.reason}, {"evidence", v.evidence}};
}

ControllerState::ControllerState(ControllerId id_, DomainId domain_, Role role_,
                                 std::shared_ptr<const kb::EntityRegistry> registry,
                                 std::shared_ptr<const rn::RnModel> model, ControllerConfig config_)
    : id(id_),
      domain(domain_),
      role(role_),
      config(config_),
      kb(std::move(registry)),
      evaluator(std::move(model)),
      memory(evaluator.relation_dim(), config_.memory_k, config_.memory_match) {
  validate(config);
}

void refresh_own_snapshot(ControllerState& s, const fron::Topology& topo) {
  s.slots = topo.slots();
  s.own_snapshot.clear();
  for (const auto& l : topo.links()) {
    auto ds = topo.link_domains(l.id);
    if (std::find(ds.begin(), ds.end(), s.domain) != ds.end()) s.own_snapshot.emplace(l.id, l.spectrum);
  }
}

void register_directory(ControllerState& s, const std::map<std::string, DomainId, std::less<>>& locations,
                        const fron::Topology& topo) {
  s.virtual_info.locations = locations;
  s.virtual_info.controllers.clear();
  for (const auto& d : topo.domains()) s.virtual_info.controllers[d.id] = d.controller;
}

void refresh_knowledge(ControllerState& s, std::span<const kb::KnowledgeTriple> snapshot) {
  for (const auto& t : snapshot) s.kb.insert(t);
  s.kb.rebuild(s.evaluator, s.config.rho);
  for (const auto& t : s.kb.distinct()) {
    if (!s.memorised.insert(t).second) continue;
    if (s.evaluator.score(t) < s.config.rho) continue;
    s.memory.store(s.evaluator.relation(t));
    s.memory_sources.push_back(t);
  }
}

void note_lightpath(ControllerState& s, const fron::Skeleton& sk, bool add, Tick tick) {
  if (add) s.virtual_info.skeletons[sk.id] = sk.links;
  else s.virtual_info.skeletons.erase(sk.id);
  s.pending.push_back({tick, s.id, s.next_seq++, add, sk});
}

SpectrumFragment make_fragment(const fron::SpectrumMask& mask, LinkId link, LightpathId lightpath, int k) {
  int lo = -1, hi = -1;
  for (int i = 0; i < mask.slots(); ++i)
    if (mask.owner(i) == lightpath) {
      if (lo < 0) lo = i;
      hi = i;
    }
  if (lo < 0) throw InvalidInput("lightpath " + std::to_string(lightpath) + " not on link " + std::to_string(link));
  k = std::clamp(k, 1, mask.slots());
  int width = hi - lo + 1;
  int start = std::clamp(lo - std::max(0, (k - width) / 2), 0, mask.slots() - k);
  SpectrumFragment f{lightpath, link, fron::SlotStates(static_cast<std::size_t>(mask.slots()), fron::SlotState::unknown)};
  for (int i = start; i < start + k; ++i)
    f.states[static_cast<std::size_t>(i)] =
        mask.owner(i) == lightpath ? fron::SlotState::occupied : fron::SlotState::free;
  return f;
}

PartialInfo make_partial_info(const ControllerState& s, const EventInfo& event, const DisclosurePolicy& policy,
                              std::uint64_t nonce, std::optional<LightpathId> fragment_of) {
  PartialInfo p;
  p.sender = s.id;
  p.nonce = nonce;
  if (policy.include_time) p.t = event.t;
  if (policy.include_location) p.location = event.location;
  if (policy.include_affair) p.affair_type = event.affair_type;
  if (policy.include_event_id) p.event_id = event.event_id;
  if (!p.t && !p.location && !p.affair_type && !p.event_id)
    throw InsufficientDisclosure("disclosure policy redacts every field");
  if (fragment_of && policy.fragment_slots > 0) {
    if (policy.fragment_slots >= s.slots) throw PrivacyViolation("fragment would expose a full spectrum mask");
    bool found = false;
    for (const auto& [link, mask] : s.own_snapshot) {
      for (int i = 0; i < mask.slots() && !found; ++i) found = mask.owner(i) == *fragment_of;
      if (found) {
        p.fragments.push_back(make_fragment(mask, link, *fragment_of, policy.fragment_slots));
        break;
      }
    }
    if (!found) throw InvalidInput("lightpath " + std::to_string(*fragment_of) + " does not touch the own domain");
  }
  check_privacy(p, policy.event_id_private);
  return p;
}

std::optional<CandidateResources> propose_candidate(const ControllerState& s, LinkId link, int width) {
  auto it = s.own_snapshot.find(link);
  if (it == s.own_snapshot.end()) throw InvalidInput("link " + std::to_string(link) + " is not an own link");
  const fron::SpectrumMask* m = &it->second;
  auto iv = fron::first_fit_alloc(std::span<const fron::SpectrumMask* const>(&m, 1), width);
  if (!iv) return std::nullopt;
  return CandidateResources{{link}, *iv};
}

std::vector<kb::KnowledgeTriple> recent_history(const ControllerState& s, DomainId domain) {
  std::vector<kb::KnowledgeTriple> out;
  const auto& all = s.kb.triples();
  for (auto it = all.rbegin(); it != all.rend() && static_cast<int>(out.size()) < s.config.history_window; ++it)
    if (it->origin_domain == domain) out.push_back(*it);
  std::reverse(out.begin(), out.end());
  return out;
}

bool history_clean(ControllerState& s, DomainId domain) {
  for (const auto& t : recent_history(s, domain))
    if (s.evaluator.score(t.tokens()) < s.config.rho) return false;
  return true;
}

namespace {

// Checks one fragment against the own links of the same lightpath; returns a
// failure description or an empty string.
std::string check_fragment(ControllerState& s, const SpectrumFragment& f, const std::optional<CandidateResources>& cand,
                           std::vector<std::string>& evidence) {
  auto sk = s.virtual_info.skeletons.find(f.lightpath);
  if (sk == s.virtual_info.skeletons.end()) {
    evidence.push_back("fragment on unknown lightpath " + std::to_string(f.lightpath) + " not checked");
    return {};
  }
  const auto& links = sk->second;
  if (std::find(links.begin(), links.end(), f.link) == links.end())
    return "lightpath " + std::to_string(f.lightpath) + " does not cross link " + std::to_string(f.link);
  if (static_cast<int>(f.states.size()) != s.slots) return "fragment has the wrong slot count";

  fron::PartialView view;
  fron::Skeleton local{f.lightpath, links};
  for (LinkId l : links) {
    auto own = s.own_snapshot.find(l);
    if (own == s.own_snapshot.end()) continue;
    fron::SlotStates st(static_cast<std::size_t>(s.slots));
    for (int i = 0; i < s.slots; ++i)
      st[static_cast<std::size_t>(i)] =
          own->second.owner(i) == f.lightpath ? fron::SlotState::occupied : fron::SlotState::free;
    view[l] = std::move(st);
  }
  try {
    fron::merge_views(view, fron::PartialView{{f.link, f.states}});
    auto inferred = fron::infer_occupancy(view, std::span<const fron::Skeleton>(&local, 1), s.slots);
    evidence.push_back("fragment of lightpath " + std::to_string(f.lightpath) + " on link " + std::to_string(f.link) +
                       " consistent with " + std::to_string(view.size()) + " known links");
    if (cand && fron::check_candidate(inferred, cand->links, cand->slots, s.slots) ==
                    fron::CandidateVerdict::conflicting)
      return "candidate slots " + std::to_string(cand->slots.lo) + "-" + std::to_string(cand->slots.hi) +
             " overlap lightpath " + std::to_string(f.lightpath);
  } catch (const Inconsistent& e) {
    return std::string("spectrum inconsistent: ") + e.what();
  } catch (const InvalidInput& e) {
    return std::string("spectrum malformed: ") + e.what();
  }
  return {};
}

}  // namespace

TrustVerdict verify_peer(ControllerState& s, const PartialInfo& info) {
  TrustVerdict v;
  v.subject = info.sender;
  if (s.accomplices.count(info.sender)) {
    v.trusted = true;
    v.score = 1.0;
    v.confidence = 1.0;
    v.reason = "accomplice";
    return v;
  }
  if (s.memory.empty()) {
    v.reason = "no relations: relation memory is empty";
    return v;
  }
  if (!info.location && !info.affair_type) {
    v.reason = "insufficient disclosure";
    return v;
  }
  auto sender_domain = domain_of_controller(s, info.sender);
  if (!sender_domain) {
    v.reason = "unknown sender";
    return v;
  }

  std::vector<std::string> failures;
  const std::string loc = info.location.value_or(kUnknown);
  const std::string affair = info.affair_type.value_or(kUnknown);
  const auto& graph = s.kb.isb_rn();

  // implied handler of the claimed location
  if (info.location) {
    auto it = s.virtual_info.locations.find(loc);
    if (it == s.virtual_info.locations.end()) {
      failures.push_back("unknown location " + loc);
    } else {
      auto c = s.virtual_info.controllers.find(it->second);
      ControllerId handler = c == s.virtual_info.controllers.end() ? -1 : c->second;
      v.evidence.push_back("handler of " + loc + " is controller " + std::to_string(handler));
      if (handler != info.sender) failures.push_back("handler mismatch for " + loc);
    }
  }

  // complete the cue with statuses related to the claim
  std::vector<std::string> statuses;
  auto add_statuses = [&](const kb::Entity& e) {
    for (const auto& n : kb::query_relations(graph, e))
      if (n.entity.base == kb::Base::status &&
          std::find(statuses.begin(), statuses.end(), n.entity.token) == statuses.end())
        statuses.push_back(n.entity.token);
  };
  if (info.affair_type) add_statuses({kb::Base::behavior, affair});
  if (statuses.empty() && info.location) add_statuses({kb::Base::identification, loc});
  if (statuses.empty()) statuses.push_back(kUnknown);

  kb::TokenTriple cue;
  mem::RecallResult best;
  bool have = false;
  for (const auto& st : statuses) {
    kb::TokenTriple t{loc, st, affair};
    Eigen::VectorXd q = s.evaluator.relation(t);
    auto r = s.memory.recall(q, s.config.recall_iters);
    if (!have || r.confidence > best.confidence) {
      best = std::move(r);
      cue = t;
      have = true;
    }
  }
  v.confidence = std::clamp(best.confidence, 0.0, 1.0);
  v.evidence.push_back("cue " + show(cue) + " recalled " + best.group + " confidence " + fmt(v.confidence));

  // recursive association from the claim and the recalled relations
  std::set<kb::Entity> seeds{{kb::Base::identification, loc}, {kb::Base::behavior, affair}};
  for (std::size_t id : best.visited) {
    const auto& src = s.memory_sources.at(id);
    v.evidence.push_back("recalled " + show(src));
    seeds.insert({kb::Base::identification, src.identification});
    seeds.insert({kb::Base::status, src.status});
    seeds.insert({kb::Base::behavior, src.behavior});
  }
  std::set<kb::Entity> reached = seeds;
  for (const auto& e : seeds) {
    auto more = kb::associate(graph, e, s.config.depth);
    reached.insert(more.begin(), more.end());
  }
  v.evidence.push_back("association reached " + std::to_string(reached.size()) + " entities");

  // abnormal behaviors: the claim itself and the sender's recent history
  double claim_score = s.evaluator.score(cue);
  if (info.affair_type && claim_score < s.config.rho)
    failures.push_back("abnormal claimed behavior " + affair + " score " + fmt(claim_score));
  for (const auto& t : recent_history(s, *sender_domain)) {
    double sc = s.evaluator.score(t.tokens());
    if (sc < s.config.rho)
      failures.push_back("abnormal behavior " + t.behavior + " of " + t.identification + " at t=" +
                         std::to_string(t.timestamp) + " score " + fmt(sc));
  }

  for (const auto& f : info.fragments) {
    auto msg = check_fragment(s, f, info.candidate, v.evidence);
    if (!msg.empty()) failures.push_back(msg);
    if (fron::has_unknown(f.states)) s.virtual_info.peer_views[info.sender][f.link] = f.states;
  }

  if (v.confidence < s.config.tau) failures.push_back("recall confidence " + fmt(v.confidence) + " below tau");
  v.trusted = failures.empty();
  v.score = v.trusted || v.confidence < s.config.tau ? v.confidence : 0.0;
  v.reason = v.trusted ? "trusted" : failures.front();
  for (const auto& f : failures) v.evidence.push_back(f);
  return v;
}

void record_verdict(ControllerState& s, const TrustVerdict& v, Tick now) {
  auto& r = s.trust[v.subject];
  r.has_cache = true;
  r.cached_trusted = v.trusted;
  r.issued = now;
  r.expiry = now + s.config.cache_expiry;
  push_capped(r.last_verdicts, v.trusted, s.config.evaluation_window);
  push_capped(s.logs[v.subject].claims, v.trusted, s.config.evaluation_window);
}

void record_segment(ControllerState& s, ControllerId peer, bool ok) {
  push_capped(s.logs[peer].segments, ok, s.config.evaluation_window);
}

void record_reply(ControllerState& s, ControllerId peer, bool on_time) {
  push_capped(s.logs[peer].replies, on_time, s.config.evaluation_window);
}

TrustRecord evaluate_peer(const ControllerState& s, ControllerId peer, std::size_t window) {
  TrustRecord r;
  if (auto it = s.trust.find(peer); it != s.trust.end()) r = it->second;
  if (auto it = s.logs.find(peer); it != s.logs.end()) {
    r.honesty = fraction(it->second.claims, window);
    r.reliability = fraction(it->second.segments, window);
    r.collaboration = fraction(it->second.replies, window);
  } else {
    r.honesty = r.reliability = r.collaboration = 0.5;
  }
  r.composite = (r.honesty + r.reliability + r.collaboration) / 3.0;
  return r;
}

std::optional<bool> cached_verdict(const ControllerState& s, ControllerId peer, Tick now) {
  auto it = s.trust.find(peer);
  if (it == s.trust.end() || !it->second.has_cache || now >= it->second.expiry) return std::nullopt;
  return it->second.cached_trusted;
}

bool routing_trusted(const ControllerState& s, ControllerId peer, Tick now) {
  auto c = cached_verdict(s, peer, now);
  if (!c || !*c) return false;
  return evaluate_peer(s, peer, s.config.evaluation_window).composite >= s.config.composite_threshold;
}

std::vector<VerdictSummary> publish_verdicts(const ControllerState& s, Tick now) {
  std::map<ControllerId, VerdictSummary> out;
  for (const auto& [peer, r] : s.trust)
    if (r.has_cache && now < r.expiry) out[peer] = {s.id, peer, r.cached_trusted, r.issued};
  for (ControllerId a : s.accomplices) out[a] = {s.id, a, true, now};
  std::vector<VerdictSummary> v;
  for (auto& [_, sum] : out) v.push_back(sum);
  return v;
}

std::size_t adopt_vouches(ControllerState& s, Tick now) {
  std::size_t adopted = 0;
  for (const auto& [key, sum] : s.virtual_info.summaries) {
    if (!sum.trusted || sum.endorser == s.id || sum.subject == s.id) continue;
    if (cached_verdict(s, sum.subject, now)) continue;
    if (!routing_trusted(s, sum.endorser, now)) continue;
    auto d = domain_of_controller(s, sum.subject);
    if (!d || !history_clean(s, *d)) continue;
    auto& r = s.trust[sum.subject];
    r.has_cache = true;
    r.cached_trusted = true;
    r.issued = now;
    r.expiry = now + s.config.cache_expiry;
    ++adopted;
  }
  return adopted;
}

void audit_privacy(const ControllerState& s) {
  for (const auto& [peer, view] : s.virtual_info.peer_views)
    for (const auto& [link, states] : view)
      if (!fron::has_unknown(states))
        throw PrivacyViolation("controller " + std::to_string(s.id) + " holds a full mask of link " +
                               std::to_string(link) + " from controller " + std::to_string(peer));
}

}  // namespace blcs::ctl
