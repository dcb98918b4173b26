#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/sim/scenario.hpp"

namespace blcs::sim {

struct MetricsReport {
  double mistrust_rate = 0.0;
  double latency_ticks = 0.0;
  double packet_loss = 0.0;
  double blocking = 0.0;
  std::size_t requests = 0;
  std::size_t admitted = 0;
  std::size_t blocked = 0;
  std::size_t interactions = 0;
  std::size_t malicious_interactions = 0;
  std::size_t offered_units = 0;
  std::size_t lost_units = 0;
  std::vector<std::string> flags;  // metrics reported as 0 because their denominator was empty
};

/// Recomputes the four metrics from REQUEST and RELEASE records alone,
/// skipping records marked as warmup.
MetricsReport compute_metrics(std::span<const nlohmann::json> trace, const Scenario& scenario);

nlohmann::json to_json(const MetricsReport& m);

}  // namespace blcs::sim
