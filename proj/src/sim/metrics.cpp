#include "blcs/sim/metrics.hpp"

namespace blcs::sim {

MetricsReport compute_metrics(std::span<const nlohmann::json> trace, const Scenario& scenario) {
  MetricsReport m;
  const Tick warmup = scenario.warmup();
  double latency_sum = 0.0;
  for (const auto& r : trace) {
    const auto& type = r.at("type");
    if (type == "REQUEST") {
      if (r.at("arrival").get<Tick>() < warmup) continue;
      ++m.requests;
      if (r.at("outcome") == "admitted") {
        ++m.admitted;
        latency_sum += r.at("latency").get<double>();
      } else {
        ++m.blocked;
      }
      for (const auto& i : r.at("interactions")) {
        ++m.interactions;
        if (i.at("malicious").get<bool>()) ++m.malicious_interactions;
      }
    } else if (type == "RELEASE") {
      if (r.at("arrival").get<Tick>() < warmup) continue;
      m.offered_units += r.at("offered").get<std::size_t>();
      m.lost_units += r.at("lost").get<std::size_t>();
    }
  }
  auto ratio = [&](double num, std::size_t den, const char* flag) {
    if (den == 0) {
      m.flags.emplace_back(flag);
      return 0.0;
    }
    return num / static_cast<double>(den);
  };
  m.mistrust_rate = ratio(static_cast<double>(m.malicious_interactions), m.interactions, "no_interactions");
  m.latency_ticks = ratio(latency_sum, m.admitted, "no_admitted_requests");
  m.packet_loss = ratio(static_cast<double>(m.lost_units), m.offered_units, "no_offered_units");
  m.blocking = ratio(static_cast<double>(m.blocked), m.requests, "no_requests");
  return m;
}

nlohmann::json to_json(const MetricsReport& m) {
  return {{"mistrust_rate", m.mistrust_rate},
          {"latency_ticks", m.latency_ticks},
          {"packet_loss", m.packet_loss},
          {"blocking", m.blocking},
          {"requests", m.requests},
          {"admitted", m.admitted},
          {"blocked", m.blocked},
          {"interactions", m.interactions},
          {"malicious_interactions", m.malicious_interactions},
          {"offered_units", m.offered_units},
          {"lost_units", m.lost_units},
          {"flags", m.flags}};
}

}  // namespace blcs::sim
