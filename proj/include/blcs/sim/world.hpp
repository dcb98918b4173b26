#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blcs/fron/topology.hpp"
#include "blcs/knowledge_base/knowledge_base.hpp"
#include "blcs/relation_net/vocabulary.hpp"
#include "blcs/sim/rng.hpp"
#include "blcs/sim/scenario.hpp"

namespace blcs::sim {

struct ObjectType {
  std::string name;
  std::vector<std::pair<std::string, std::string>> pairs;  // valid (status, behavior)
};

/// Physical object types followed by the infrastructure types "roadm" and "server".
const std::vector<ObjectType>& object_types();
const ObjectType& object_type(const std::string& name);
const std::vector<std::string>& abnormal_behaviors();

struct PhysicalObject {
  std::string token;
  std::string type;
  DomainId domain = 0;
  NodeId node = 0;
};

/// Objects, public location directory and vocabularies derived from a topology.
struct World {
  std::vector<PhysicalObject> objects;
  std::map<std::string, DomainId, std::less<>> directory;
  std::map<DomainId, std::vector<std::size_t>> objects_by_domain;
  std::vector<std::size_t> requesters;  // physical objects issuing requests
  std::vector<NodeId> destinations;     // computing nodes without inter-domain links
  std::vector<DomainId> requester_domains;
  std::vector<ControllerId> eligible;  // controllers that may be made malicious
  std::shared_ptr<kb::EntityRegistry> registry;
  rn::Vocabulary vocabulary;
};

/// Physical objects go round-robin to wireless nodes without inter-domain
/// links; each optical node hosts a roadm and each computing node a server.
/// Throws ConfigError when the topology lacks a wireless or computing domain.
World build_world(const fron::Topology& topo, int physical_objects);

/// The act is one of the object's valid (status, behavior) pairs.
bool valid_act(const World& w, const kb::TokenTriple& t);

struct Affair {
  kb::KnowledgeTriple triple;
  std::string event_id;
  bool abnormal = false;
};

/// One affair in `domain`; a malicious domain emits an abnormal act with the
/// profile's probability (a swapped status-behavior pair or an abnormal behavior).
Affair draw_affair(const World& w, DomainId domain, bool malicious, const MaliciousProfile& profile, Rng& rng,
                   Tick tick, std::uint64_t serial);

struct Assignment {
  std::set<ControllerId> malicious;
  bool collusion = false;
};

/// Picks round(ratio * n) of the eligible controllers uniformly. A fractional
/// expected count is rounded by one seeded uniform draw v: floor(ratio * n + v).
/// For a fixed seed the chosen set grows monotonically with the ratio.
Assignment inject_malicious(std::span<const ControllerId> eligible, double ratio, bool collusion, std::uint64_t seed);

}  // namespace blcs::sim
