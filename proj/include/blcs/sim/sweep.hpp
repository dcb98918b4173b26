#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/relation_net/relation_net.hpp"
#include "blcs/sim/metrics.hpp"
#include "blcs/sim/scenario.hpp"

namespace blcs::sim {

struct SweepSpec {
  std::string param = "load";  // "load" or "malicious_ratio"
  std::vector<double> values;
  int seeds = 20;
  bool baseline = true;
};

/// Throws ConfigError naming the offending field ("sweep.values", ...).
void validate(const SweepSpec& s);
SweepSpec sweep_from_json(const nlohmann::json& j);

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::string variant;  // "blcs" or "baseline"
  double mistrust_rate = 0.0;
  double latency_ticks = 0.0;
  double packet_loss = 0.0;
  double blocking = 0.0;
  double ci_mistrust_rate = 0.0;  // 1.96 s / sqrt(n) over seeds
  double ci_latency_ticks = 0.0;
  double ci_packet_loss = 0.0;
  double ci_blocking = 0.0;
  int seeds = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Mean and CI half-width of each metric over per-seed reports.
SweepRow summarize(std::string param, double value, std::string variant, const std::vector<MetricsReport>& reports);

/// Seeds are scenario.seed + i for every point and variant. Runs execute on
/// `threads` workers; rows come back sorted by point, then blcs before baseline.
/// `runs`, when given, receives every per-seed report in row order.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, std::shared_ptr<const rn::RnModel> model,
                                unsigned threads = 0, std::vector<MetricsReport>* runs = nullptr);

std::string csv_header();
std::string to_csv(const std::vector<SweepRow>& rows);
/// Inverse of to_csv. Throws InvalidInput on a malformed document.
std::vector<SweepRow> rows_from_csv(std::string_view csv);

}  // namespace blcs::sim
