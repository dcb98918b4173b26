#include "blcs/sim/scenario.hpp"

#include <fstream>
#include <set>

#include "blcs/common/error.hpp"

namespace blcs::sim {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class T>
void read(const json& j, const char* key, const std::string& path, T& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected a boolean");
  } else if constexpr (std::is_arithmetic_v<T>) {
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    if constexpr (std::is_integral_v<T>)
      if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  }
  try {
    out = v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(join(path, key), "wrong type");
  }
}

void known_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "scenario" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw ConfigError(join(path, k), "unknown field");
}

void probability(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field, "must lie in [0, 1]");
}

}  // namespace

void validate(const Scenario& s) {
  if (s.objects < 1) throw ConfigError("objects", "must be >= 1");
  probability(s.malicious_ratio, "malicious_ratio");
  if (!(s.load >= 0.0)) throw ConfigError("load", "must be >= 0");
  if (!(s.mean_holding >= 1.0)) throw ConfigError("mean_holding", "must be >= 1");
  if (s.width_min < 1) throw ConfigError("width.min", "must be >= 1");
  if (s.width_max < s.width_min || s.width_max > s.topology.slots())
    throw ConfigError("width.max", "must lie in [width.min, slots]");
  if (s.duration < 1) throw ConfigError("duration", "must be >= 1");
  if (!(s.warmup_fraction >= 0.0 && s.warmup_fraction < 1.0)) throw ConfigError("warmup_fraction", "must lie in [0, 1)");
  if (s.sync_period < 1) throw ConfigError("sync_period", "must be >= 1");
  if (s.kb_period < 1) throw ConfigError("kb_period", "must be >= 1");
  if (!(s.affair_rate > 0.0 && s.affair_rate <= 1.0)) throw ConfigError("affair_rate", "must lie in (0, 1]");
  if (s.fragment_slots < 0 || s.fragment_slots >= s.topology.slots())
    throw ConfigError("fragment_slots", "must lie in [0, slots)");
  if (s.max_auth_attempts < 1) throw ConfigError("max_auth_attempts", "must be >= 1");
  probability(s.malicious.abnormal_act, "malicious.abnormal_act");
  probability(s.malicious.lie, "malicious.lie");
  probability(s.malicious.falsify, "malicious.falsify");
  probability(s.malicious.setup_fault, "malicious.setup_fault");
  probability(s.malicious.loss, "malicious.loss");
  ctl::validate(s.controller);
  if (s.cost.per_domain < 0) throw ConfigError("cost.per_domain", "must be >= 0");
  if (s.cost.per_auth_round < 0) throw ConfigError("cost.per_auth_round", "must be >= 0");
  const auto& t = s.training;
  if (t.epochs < 1) throw ConfigError("training.epochs", "must be >= 1");
  if (!(t.learning_rate > 0.0)) throw ConfigError("training.learning_rate", "must be > 0");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0)) throw ConfigError("training.momentum", "must lie in [0, 1)");
  if (t.batch_size < 1) throw ConfigError("training.batch_size", "must be >= 1");
  if (t.input_dim < 1) throw ConfigError("training.input_dim", "must be >= 1");
  if (t.rounds < 1) throw ConfigError("training.rounds", "must be >= 1");
  if (t.ticks < 1) throw ConfigError("training.ticks", "must be >= 1");
  if (t.heldout_rounds < 1)
    throw ConfigError("training.heldout_rounds", "must be >= 1");
  if (t.acceptance_claims < 1) throw ConfigError("training.acceptance_claims", "must be >= 1");
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  known_keys(j, "", {"topology", "objects", "malicious_ratio", "collusion", "load", "mean_holding", "width", "duration",
                     "warmup_fraction", "sync_period", "kb_period", "affair_rate", "seed", "blcs", "fragment_slots",
                     "max_auth_attempts", "malicious", "controller", "cost", "training"});
  if (!j.contains("topology")) throw ConfigError("topology", "missing");
  Scenario s;
  const auto& tj = j.at("topology");
  if (tj.is_string()) {
    auto file = base_dir / tj.get<std::string>();
    std::ifstream in(file);
    if (!in) throw ConfigError("topology", "cannot read " + file.string());
    json parsed;
    try {
      parsed = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("topology", std::string("invalid JSON: ") + e.what());
    }
    s.topology = fron::topology_from_json(parsed);
    s.topology_ref = tj.get<std::string>();
  } else if (tj.is_object()) {
    s.topology = fron::topology_from_json(tj);
    s.topology_ref = "inline";
  } else {
    throw ConfigError("topology", "expected a file name or an object");
  }

  read(j, "objects", "", s.objects);
  read(j, "malicious_ratio", "", s.malicious_ratio);
  read(j, "collusion", "", s.collusion);
  read(j, "load", "", s.load);
  read(j, "mean_holding", "", s.mean_holding);
  if (j.contains("width")) {
    const auto& w = j.at("width");
    known_keys(w, "width", {"min", "max"});
    read(w, "min", "width", s.width_min);
    read(w, "max", "width", s.width_max);
  }
  read(j, "duration", "", s.duration);
  read(j, "warmup_fraction", "", s.warmup_fraction);
  read(j, "sync_period", "", s.sync_period);
  read(j, "kb_period", "", s.kb_period);
  read(j, "affair_rate", "", s.affair_rate);
  read(j, "seed", "", s.seed);
  read(j, "blcs", "", s.blcs);
  read(j, "fragment_slots", "", s.fragment_slots);
  read(j, "max_auth_attempts", "", s.max_auth_attempts);
  if (j.contains("malicious")) {
    const auto& m = j.at("malicious");
    known_keys(m, "malicious", {"abnormal_act", "lie", "falsify", "setup_fault", "loss"});
    read(m, "abnormal_act", "malicious", s.malicious.abnormal_act);
    read(m, "lie", "malicious", s.malicious.lie);
    read(m, "falsify", "malicious", s.malicious.falsify);
    read(m, "setup_fault", "malicious", s.malicious.setup_fault);
    read(m, "loss", "malicious", s.malicious.loss);
  }
  if (j.contains("controller")) {
    const auto& c = j.at("controller");
    known_keys(c, "controller", {"tau", "depth", "cache_expiry", "rho", "history_window", "recall_iters",
                                 "evaluation_window", "composite_threshold", "memory_k", "memory_match"});
    auto& cc = s.controller;
    read(c, "tau", "controller", cc.tau);
    read(c, "depth", "controller", cc.depth);
    read(c, "cache_expiry", "controller", cc.cache_expiry);
    read(c, "rho", "controller", cc.rho);
    read(c, "history_window", "controller", cc.history_window);
    read(c, "recall_iters", "controller", cc.recall_iters);
    read(c, "evaluation_window", "controller", cc.evaluation_window);
    read(c, "composite_threshold", "controller", cc.composite_threshold);
    read(c, "memory_k", "controller", cc.memory_k);
    read(c, "memory_match", "controller", cc.memory_match);
  }
  if (j.contains("cost")) {
    const auto& c = j.at("cost");
    known_keys(c, "cost", {"per_domain", "per_auth_round"});
    read(c, "per_domain", "cost", s.cost.per_domain);
    read(c, "per_auth_round", "cost", s.cost.per_auth_round);
  }
  if (j.contains("training")) {
    const auto& t = j.at("training");
    known_keys(t, "training", {"epochs", "learning_rate", "momentum", "batch_size", "input_dim", "rounds", "ticks",
                               "heldout_rounds", "seed", "acceptance_claims"});
    auto& tt = s.training;
    read(t, "epochs", "training", tt.epochs);
    read(t, "learning_rate", "training", tt.learning_rate);
    read(t, "momentum", "training", tt.momentum);
    read(t, "batch_size", "training", tt.batch_size);
    read(t, "input_dim", "training", tt.input_dim);
    read(t, "rounds", "training", tt.rounds);
    read(t, "ticks", "training", tt.ticks);
    read(t, "heldout_rounds", "training", tt.heldout_rounds);
    read(t, "seed", "training", tt.seed);
    read(t, "acceptance_claims", "training", tt.acceptance_claims);
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot read " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j, file.parent_path());
}

json scenario_to_json(const Scenario& s) {
  const auto& c = s.controller;
  const auto& t = s.training;
  return {{"topology", s.topology_ref},
          {"objects", s.objects},
          {"malicious_ratio", s.malicious_ratio},
          {"collusion", s.collusion},
          {"load", s.load},
          {"mean_holding", s.mean_holding},
          {"width", {{"min", s.width_min}, {"max", s.width_max}}},
          {"duration", s.duration},
          {"warmup_fraction", s.warmup_fraction},
          {"sync_period", s.sync_period},
          {"kb_period", s.kb_period},
          {"affair_rate", s.affair_rate},
          {"seed", s.seed},
          {"blcs", s.blcs},
          {"fragment_slots", s.fragment_slots},
          {"max_auth_attempts", s.max_auth_attempts},
          {"malicious",
           {{"abnormal_act", s.malicious.abnormal_act},
            {"lie", s.malicious.lie},
            {"falsify", s.malicious.falsify},
            {"setup_fault", s.malicious.setup_fault},
            {"loss", s.malicious.loss}}},
          {"controller",
           {{"tau", c.tau},
            {"depth", c.depth},
            {"cache_expiry", c.cache_expiry},
            {"rho", c.rho},
            {"history_window", c.history_window},
            {"recall_iters", c.recall_iters},
            {"evaluation_window", c.evaluation_window},
            {"composite_threshold", c.composite_threshold},
            {"memory_k", c.memory_k},
            {"memory_match", c.memory_match}}},
          {"cost", {{"per_domain", s.cost.per_domain}, {"per_auth_round", s.cost.per_auth_round}}},
          {"training",
           {{"epochs", t.epochs},
            {"learning_rate", t.learning_rate},
            {"momentum", t.momentum},
            {"batch_size", t.batch_size},
            {"input_dim", t.input_dim},
            {"rounds", t.rounds},
            {"ticks", t.ticks},
            {"heldout_rounds", t.heldout_rounds},
            {"seed", t.seed},
            {"acceptance_claims", t.acceptance_claims}}}};
}

fron::Topology default_topology() {
  fron::Topology t(fron::kDefaultSlots);
  using fron::DomainKind;
  DomainId w = t.add_domain("W", DomainKind::wireless, 0);
  DomainId o1 = t.add_domain("O1", DomainKind::optical, 1);
  DomainId o2 = t.add_domain("O2", DomainKind::optical, 2);
  DomainId c1 = t.add_domain("C1", DomainKind::computing, 3);
  DomainId c2 = t.add_domain("C2", DomainKind::computing, 4);
  NodeId ap0 = t.add_node(w, "w_ap0"), ap1 = t.add_node(w, "w_ap1"), gw = t.add_node(w, "w_gw");
  NodeId o1i = t.add_node(o1, "o1_in"), o1o = t.add_node(o1, "o1_out");
  NodeId o2i = t.add_node(o2, "o2_in"), o2o = t.add_node(o2, "o2_out");
  NodeId c1i = t.add_node(c1, "c1_in"), c1s = t.add_node(c1, "c1_srv");
  NodeId c2i = t.add_node(c2, "c2_in"), c2s = t.add_node(c2, "c2_srv");
  t.add_link(ap0, gw, 1);
  t.add_link(ap1, gw, 1);
  for (int k = 0; k < 2; ++k) {
    t.add_link(gw, o1i, 2);
    t.add_link(gw, o2i, 2);
    t.add_link(o1i, o1o, 2);
    t.add_link(o2i, o2o, 2);
    t.add_link(c1i, c1s, 1);
    t.add_link(c2i, c2s, 1);
  }
  t.add_link(o1o, c1i, 2);
  t.add_link(o1o, c2i, 2);
  t.add_link(o2o, c1i, 2);
  t.add_link(o2o, c2i, 2);
  t.add_link(o1o, o2i, 3);
  return t;
}

}  // namespace blcs::sim
