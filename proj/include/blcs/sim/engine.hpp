#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/relation_net/relation_net.hpp"
#include "blcs/sim/metrics.hpp"
#include "blcs/sim/scenario.hpp"
#include "blcs/sim/world.hpp"

namespace blcs::sim {

struct RunOutput {
  MetricsReport report;
  std::vector<nlohmann::json> trace;
  Assignment assignment;
};

/// Runs one scenario to completion: arrivals stop at `duration`, admitted
/// connections are always released. `model` may be null for the baseline.
/// Throws ConfigError before the first event on an invalid scenario.
RunOutput run(const Scenario& scenario, std::shared_ptr<const rn::RnModel> model);

/// One JSON document per line.
std::string to_jsonl(std::span<const nlohmann::json> trace);

}  // namespace blcs::sim
