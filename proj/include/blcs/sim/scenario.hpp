#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "blcs/common/types.hpp"
#include "blcs/controller/controller.hpp"
#include "blcs/fron/topology.hpp"
#include "blcs/routing/routing.hpp"

namespace blcs::sim {

struct MaliciousProfile {
  double abnormal_act = 0.35;  // share of a malicious domain's affairs that are abnormal acts
  double lie = 0.5;            // claim replays another domain's event
  double falsify = 0.5;        // spectrum fragment or candidate is falsified
  double setup_fault = 0.5;    // provisioning through the domain is sabotaged
  double loss = 0.2;           // per-tick unit loss on a traversed malicious domain
};

struct TrainingSettings {
  int epochs = 2000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 32;
  int input_dim = 16;
  int rounds = 16;        // bootstrap assignments used for training
  Tick ticks = 3000;      // affair ticks simulated per round
  int heldout_rounds = 2;  // independent assignments used for evaluation
  std::uint64_t seed = 7;
  int acceptance_claims = 200;
};

struct Scenario {
  fron::Topology topology;
  std::string topology_ref;  // file name or "inline"
  int objects = 30;
  double malicious_ratio = 0.3;
  bool collusion = false;
  double load = 12.0;  // Erlang
  double mean_holding = 40.0;
  int width_min = 1;
  int width_max = 3;
  Tick duration = 8000;
  double warmup_fraction = 0.1;
  Tick sync_period = 50;
  Tick kb_period = 25;
  double affair_rate = 0.05;  // per controller per tick
  std::uint64_t seed = 1;
  bool blcs = true;
  int fragment_slots = 4;
  int max_auth_attempts = 3;
  MaliciousProfile malicious;
  ctl::ControllerConfig controller;
  routing::ProvisionCost cost;
  TrainingSettings training;

  Tick warmup() const noexcept { return static_cast<Tick>(warmup_fraction * static_cast<double>(duration)); }
};

/// Throws ConfigError naming the offending field.
void validate(const Scenario& s);

/// `topology` is either an inline object or a file name resolved against
/// `base_dir`. Missing keys take the defaults above. Throws ConfigError.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& file);
nlohmann::json scenario_to_json(const Scenario& s);

/// Five domains: a wireless access domain holding the physical objects, two
/// optical transit domains and two computing domains.
fron::Topology default_topology();

}  // namespace blcs::sim
