#include "blcs/sim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "blcs/common/error.hpp"
#include "blcs/sim/engine.hpp"

namespace blcs::sim {

void validate(const SweepSpec& s) {
  if (s.param != "load" && s.param != "malicious_ratio")
    throw ConfigError("sweep.param", "must be \"load\" or \"malicious_ratio\"");
  if (s.values.empty()) throw ConfigError("sweep.values", "must not be empty");
  for (std::size_t i = 1; i < s.values.size(); ++i)
    if (!(s.values[i] > s.values[i - 1])) throw ConfigError("sweep.values", "must be strictly increasing");
  if (s.seeds < 1) throw ConfigError("sweep.seeds", "must be >= 1");
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep", "expected an object");
  SweepSpec s;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "param") {
        s.param = v.get<std::string>();
      } else if (k == "values") {
        s.values = v.get<std::vector<double>>();
      } else if (k == "seeds") {
        if (!v.is_number_integer()) throw ConfigError("sweep.seeds", "expected an integer");
        s.seeds = v.get<int>();
      } else if (k == "baseline") {
        s.baseline = v.get<bool>();
      } else {
        throw ConfigError("sweep." + k, "unknown field");
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("sweep." + k, "wrong type");
    }
  }
  if (!j.contains("values")) throw ConfigError("sweep.values", "missing");
  validate(s);
  return s;
}

SweepRow summarize(std::string param, double value, std::string variant, const std::vector<MetricsReport>& reports) {
  SweepRow row;
  row.param = std::move(param);
  row.value = value;
  row.variant = std::move(variant);
  row.seeds = static_cast<int>(reports.size());
  const double n = static_cast<double>(reports.size());
  auto stat = [&](double MetricsReport::*field, double& mean, double& ci) {
    mean = 0.0;
    ci = 0.0;
    if (reports.empty()) return;
    for (const auto& r : reports) mean += r.*field;
    mean /= n;
    if (reports.size() < 2) return;
    double ss = 0.0;
    for (const auto& r : reports) ss += (r.*field - mean) * (r.*field - mean);
    ci = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  };
  stat(&MetricsReport::mistrust_rate, row.mistrust_rate, row.ci_mistrust_rate);
  stat(&MetricsReport::latency_ticks, row.latency_ticks, row.ci_latency_ticks);
  stat(&MetricsReport::packet_loss, row.packet_loss, row.ci_packet_loss);
  stat(&MetricsReport::blocking, row.blocking, row.ci_blocking);
  return row;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, std::shared_ptr<const rn::RnModel> model,
                                unsigned threads, std::vector<MetricsReport>* runs) {
  validate(spec);
  validate(base);
  struct Job {
    std::size_t point;
    bool blcs;
    int seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < spec.values.size(); ++p)
    for (bool blcs : {true, false}) {
      if (!blcs && !spec.baseline) continue;
      for (int k = 0; k < spec.seeds; ++k) jobs.push_back({p, blcs, k});
    }
  std::vector<Scenario> points;
  for (double v : spec.values) {
    Scenario s = base;
    (spec.param == "load" ? s.load : s.malicious_ratio) = v;
    validate(s);
    points.push_back(std::move(s));
  }

  std::vector<MetricsReport> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        Scenario s = points[jobs[i].point];
        s.blcs = jobs[i].blcs;
        s.seed = base.seed + static_cast<std::uint64_t>(jobs[i].seed);
        reports[i] = run(s, s.blcs ? model : nullptr).report;
      } catch (...) {
        std::lock_guard<std::mutex> g(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  std::size_t i = 0;
  for (std::size_t p = 0; p < spec.values.size(); ++p)
    for (bool blcs : {true, false}) {
      if (!blcs && !spec.baseline) continue;
      std::vector<MetricsReport> group(reports.begin() + static_cast<std::ptrdiff_t>(i),
                                       reports.begin() + static_cast<std::ptrdiff_t>(i + spec.seeds));
      i += static_cast<std::size_t>(spec.seeds);
      rows.push_back(summarize(spec.param, spec.values[p], blcs ? "blcs" : "baseline", group));
    }
  if (runs) *runs = std::move(reports);
  return rows;
}

std::string csv_header() {
  return "sweep_param,value,variant,mistrust_rate,latency_ticks,packet_loss,blocking,"
         "ci_mistrust_rate,ci_latency_ticks,ci_packet_loss,ci_blocking,seeds";
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw InvalidInput("bad number in csv: " + s);
  return v;
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += r.param + "," + num(r.value) + "," + r.variant;
    for (double v : {r.mistrust_rate, r.latency_ticks, r.packet_loss, r.blocking, r.ci_mistrust_rate,
                     r.ci_latency_ticks, r.ci_packet_loss, r.ci_blocking})
      out += "," + num(v);
    out += "," + std::to_string(r.seeds) + "\n";
  }
  return out;
}

std::vector<SweepRow> rows_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw InvalidInput("csv header mismatch");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw InvalidInput("csv row needs 12 fields: " + line);
    SweepRow r;
    r.param = f[0];
    r.value = parse_num(f[1]);
    r.variant = f[2];
    double* dst[] = {&r.mistrust_rate,    &r.latency_ticks,    &r.packet_loss,    &r.blocking,
                     &r.ci_mistrust_rate, &r.ci_latency_ticks, &r.ci_packet_loss, &r.ci_blocking};
    for (std::size_t k = 0; k < 8; ++k) *dst[k] = parse_num(f[3 + k]);
    r.seeds = static_cast<int>(parse_num(f[11]));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace blcs::sim
