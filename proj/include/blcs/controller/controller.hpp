#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/assoc_memory/relation_memory.hpp"
#include "blcs/common/types.hpp"
#include "blcs/controller/messages.hpp"
#include "blcs/fron/topology.hpp"
#include "blcs/knowledge_base/knowledge_base.hpp"
#include "blcs/relation_net/relation_net.hpp"

namespace blcs::ctl {

struct ControllerConfig {
  double tau = 0.7;            // recall confidence needed for a trusted verdict
  int depth = 3;               // association depth
  Tick cache_expiry = 200;     // lifetime of a cached verdict
  double rho = 0.5;            // ISB-RN edge threshold; lower scores count as abnormal
  int history_window = 6;      // recent triples of the sender inspected
  int recall_iters = 5;
  std::size_t evaluation_window = 20;
  double composite_threshold = 0.5;
  int memory_k = 3;
  double memory_match = 0.8;
};

/// Throws ConfigError naming the bad field.
void validate(const ControllerConfig& c);

enum class Role { leader, receiver };

struct TrustVerdict {
  ControllerId subject = 0;
  bool trusted = false;
  double score = 0.0;       // in [0,1]
  double confidence = 0.0;  // recall confidence
  std::string reason;
  std::vector<std::string> evidence;
};

nlohmann::json to_json(const TrustVerdict& v);

/// Sliding-window outcomes observed for one peer.
struct PeerLog {
  std::deque<bool> claims;    // verified claims consistent with inference
  std::deque<bool> segments;  // path segments that carried traffic without fault
  std::deque<bool> replies;   // authentication responses within deadline
};

struct TrustRecord {
  double honesty = 0.5;
  double reliability = 0.5;
  double collaboration = 0.5;
  double composite = 0.5;
  std::deque<bool> last_verdicts;
  bool has_cache = false;
  bool cached_trusted = false;
  Tick issued = 0;
  Tick expiry = 0;
};

struct VerdictSummary {
  ControllerId endorser = 0;
  ControllerId subject = 0;
  bool trusted = false;
  Tick tick = 0;

  friend bool operator==(const VerdictSummary&, const VerdictSummary&) = default;
};

struct SkeletonUpdate {
  Tick tick = 0;
  ControllerId origin = 0;
  std::uint64_t seq = 0;
  bool add = true;
  fron::Skeleton skeleton;
};

/// Public, shareable knowledge about other domains.
struct VirtualInfo {
  std::map<std::string, DomainId, std::less<>> locations;  // object token -> handling domain
  std::map<DomainId, ControllerId> controllers;
  std::map<LightpathId, std::vector<LinkId>> skeletons;
  std::map<LightpathId, std::vector<LinkId>> synced_skeletons;  // state at the last sync
  std::map<std::pair<ControllerId, ControllerId>, VerdictSummary> summaries;
  std::map<ControllerId, fron::PartialView> peer_views;  // received fragments
};

struct ControllerState {
  ControllerState(ControllerId id, DomainId domain, Role role, std::shared_ptr<const kb::EntityRegistry> registry,
                  std::shared_ptr<const rn::RnModel> model, ControllerConfig config = {});

  ControllerId id;
  DomainId domain;
  Role role;
  ControllerConfig config;
  bool honest = true;                   // ground truth; protocol steps never read it
  std::set<ControllerId> accomplices;   // colluding peers of a malicious controller
  std::map<LinkId, fron::SpectrumMask> own_snapshot;  // private
  int slots = fron::kDefaultSlots;
  VirtualInfo virtual_info;
  kb::KnowledgeBase kb;
  rn::TripleEvaluator evaluator;
  mem::RelationMemory memory;
  std::vector<kb::TokenTriple> memory_sources;  // memory node id -> triple
  std::set<kb::TokenTriple> memorised;
  std::map<ControllerId, TrustRecord> trust;
  std::map<ControllerId, PeerLog> logs;
  std::vector<SkeletonUpdate> pending;
  std::uint64_t next_seq = 0;
};

/// Copies the masks of every link touching the own domain.
void refresh_own_snapshot(ControllerState& s, const fron::Topology& topo);

/// Fills the public location directory and controller map.
void register_directory(ControllerState& s, const std::map<std::string, DomainId, std::less<>>& locations,
                        const fron::Topology& topo);

/// Inserts `snapshot` into the knowledge base, rebuilds the ISB-RN and stores
/// the relation vector of every new triple scoring at least rho.
void refresh_knowledge(ControllerState& s, std::span<const kb::KnowledgeTriple> snapshot);

/// Records a lightpath crossing the own domain and queues it for the next sync.
void note_lightpath(ControllerState& s, const fron::Skeleton& sk, bool add, Tick tick);

/// Redacts `event` per `policy`. With `fragment_of` and a positive fragment
/// size, attaches the window of one own link carrying that lightpath.
/// Throws InsufficientDisclosure when nothing remains, PrivacyViolation when
/// a private P_id would be sent, InvalidInput for an unknown lightpath.
PartialInfo make_partial_info(const ControllerState& s, const EventInfo& event, const DisclosurePolicy& policy,
                              std::uint64_t nonce, std::optional<LightpathId> fragment_of = std::nullopt);

/// Window of `k` slots around the lightpath's interval on `link`.
SpectrumFragment make_fragment(const fron::SpectrumMask& mask, LinkId link, LightpathId lightpath, int k);

/// Lowest free interval of `width` on the own link, or nullopt.
std::optional<CandidateResources> propose_candidate(const ControllerState& s, LinkId link, int width);

/// The sender's last `history_window` triples in the knowledge base.
std::vector<kb::KnowledgeTriple> recent_history(const ControllerState& s, DomainId domain);
/// No recent triple of the domain scores below rho.
bool history_clean(ControllerState& s, DomainId domain);

TrustVerdict verify_peer(ControllerState& s, const PartialInfo& info);

/// Caches the verdict until now + cache_expiry and logs the claim outcome.
void record_verdict(ControllerState& s, const TrustVerdict& v, Tick now);
void record_segment(ControllerState& s, ControllerId peer, bool ok);
void record_reply(ControllerState& s, ControllerId peer, bool on_time);

/// Component scores over the last `window` entries of each log; 0.5 for an
/// empty log.
TrustRecord evaluate_peer(const ControllerState& s, ControllerId peer, std::size_t window);

/// Cached verdict still valid at `now`, if any.
std::optional<bool> cached_verdict(const ControllerState& s, ControllerId peer, Tick now);

/// Valid trusted verdict and composite score at the threshold.
bool routing_trusted(const ControllerState& s, ControllerId peer, Tick now);

/// Verdicts this controller shares at sync. Colluders vouch for each other.
std::vector<VerdictSummary> publish_verdicts(const ControllerState& s, Tick now);

/// Takes over trusted vouches from currently trusted endorsers for subjects
/// with a clean recent history. Returns the number adopted.
std::size_t adopt_vouches(ControllerState& s, Tick now);

/// Throws PrivacyViolation when a stored foreign view has a link without
/// unknown slots.
void audit_privacy(const ControllerState& s);

}  // namespace blcs::ctl
