// Prints one PASS/FAIL line per acceptance criterion and exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blcs/cli/cli.hpp"
#include "blcs/common/error.hpp"
#include "blcs/controller/controller.hpp"
#include "blcs/fron/spectrum.hpp"
#include "blcs/relation_net/grad_check.hpp"
#include "blcs/relation_net/model_io.hpp"
#include "blcs/routing/routing.hpp"
#include "blcs/sim/bootstrap.hpp"
#include "blcs/sim/engine.hpp"
#include "blcs/sim/sweep.hpp"
#include "memory_oracle.hpp"
#include "routing_oracle.hpp"
#include "spectrum_oracle.hpp"

namespace fs = std::filesystem;
using namespace blcs;

namespace {

int failures = 0;
std::map<int, std::string> lines;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  lines[id] = std::string(ok ? "PASS" : "FAIL") + " [" + std::to_string(id) + "] " + name + ": " + detail;
  std::cerr << lines[id] << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int prec = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Pearson correlation of the ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

const sim::SweepRow& row(const std::vector<sim::SweepRow>& rows, double value, const std::string& variant) {
  for (const auto& r : rows)
    if (r.value == value && r.variant == variant) return r;
  throw std::runtime_error("missing sweep row");
}

struct Context {
  fs::path data;
  fs::path work;
  sim::Scenario scenario;
  std::shared_ptr<const rn::RnModel> model;
};

void criterion_training(Context& c) {
  const fs::path model = c.work / "model.json";
  std::ostringstream log;
  const int code = cli::cmd_train({c.data / "default.json", std::nullopt, model}, log);
  c.model = std::make_shared<const rn::RnModel>(rn::load_model(model));
  // recompute both gates independently of the printed figures
  auto split = sim::bootstrap_samples(c.scenario);
  std::size_t correct = 0;
  for (const auto& s : split.test) correct += (rn::predict(*c.model, s) >= 0.5) == (s.label == 1);
  const double acc = static_cast<double>(correct) / static_cast<double>(split.test.size());
  std::size_t claims = 0;
  const double accept = sim::honest_acceptance_rate(c.scenario, c.model, &claims);
  const bool ok = code == 0 && acc >= 0.95 && accept >= 0.99 && c.scenario.controller.tau == 0.7;
  report(8, ok, "training gate",
         "epochs " + std::to_string(c.scenario.training.epochs) + ", held-out accuracy " + fmt(acc) + " on " +
             std::to_string(split.test.size()) + " interactions, honest acceptance " + fmt(accept) + " over " +
             std::to_string(claims) + " claims at tau " + fmt(c.scenario.controller.tau));
}

void criteria_ratio(Context& c) {
  sim::SweepSpec spec;
  spec.param = "malicious_ratio";
  spec.values = {0.1, 0.2, 0.3, 0.4, 0.5};
  spec.seeds = 20;
  std::vector<sim::MetricsReport> runs;
  auto t0 = std::chrono::steady_clock::now();
  auto rows = sim::run_sweep(c.scenario, spec, c.model, 0, &runs);
  const double secs = elapsed(t0);
  std::size_t min_requests = SIZE_MAX;
  for (const auto& r : runs) min_requests = std::min(min_requests, r.requests);

  std::vector<double> base, blcs;
  bool half = true, increasing = true;
  std::string detail;
  for (double v : spec.values) {
    const auto& b = row(rows, v, "baseline");
    const auto& s = row(rows, v, "blcs");
    if (!base.empty() && !(b.mistrust_rate > base.back())) increasing = false;
    base.push_back(b.mistrust_rate);
    blcs.push_back(s.mistrust_rate);
    half = half && s.mistrust_rate < 0.5 * b.mistrust_rate;
    detail += " " + fmt(v, 2) + ":" + fmt(s.mistrust_rate, 3) + "/" + fmt(b.mistrust_rate, 3);
  }
  const double rho = spearman(spec.values, base);
  report(1, increasing && rho > 0.9 && half && min_requests >= 2000 && secs < 300.0, "mistrust vs malicious ratio",
         "blcs/baseline" + detail + "; spearman " + fmt(rho) + ", min requests per run " +
             std::to_string(min_requests) + ", sweep " + fmt(secs, 3) + " s");
}

void criterion_collusion(Context& c) {
  sim::SweepSpec spec;
  spec.param = "malicious_ratio";
  spec.values = {0.3};
  spec.seeds = 20;
  auto plain = sim::run_sweep(c.scenario, spec, c.model);
  sim::Scenario coll = c.scenario;
  coll.collusion = true;
  spec.baseline = false;
  auto colluding = sim::run_sweep(coll, spec, c.model);
  const double on = row(colluding, 0.3, "blcs").mistrust_rate;
  const double off = row(plain, 0.3, "blcs").mistrust_rate;
  const double base = row(plain, 0.3, "baseline").mistrust_rate;
  const bool ok = (on < 2.0 * off || on == 0.0) && on < base;
  report(2, ok, "collusion",
         "blcs mistrust with collusion " + fmt(on) + ", without " + fmt(off) + ", baseline without " + fmt(base));
}

void criteria_load(Context& c) {
  sim::SweepSpec spec;
  spec.param = "load";
  spec.values = {6, 10, 14, 18, 22};
  spec.seeds = 20;
  auto rows = sim::run_sweep(c.scenario, spec, c.model);
  bool latency = true, loss = true, blocking = true, inc_b = true, inc_s = true;
  std::string lat_detail, fig5;
  double prev_b = -1, prev_s = -1;
  for (double v : spec.values) {
    const auto& b = row(rows, v, "baseline");
    const auto& s = row(rows, v, "blcs");
    latency = latency && s.latency_ticks < b.latency_ticks;
    loss = loss && s.packet_loss <= b.packet_loss;
    blocking = blocking && s.blocking <= b.blocking;
    inc_b = inc_b && b.blocking > prev_b;
    inc_s = inc_s && s.blocking > prev_s;
    prev_b = b.blocking;
    prev_s = s.blocking;
    lat_detail += " " + fmt(v, 3) + ":" + fmt(s.latency_ticks, 3) + "/" + fmt(b.latency_ticks, 3);
    fig5 += " " + fmt(v, 3) + ":" + fmt(s.packet_loss, 2) + "/" + fmt(b.packet_loss, 2) + "," + fmt(s.blocking, 3) +
            "/" + fmt(b.blocking, 3);
  }
  report(3, latency, "provisioning latency vs load", "blcs/baseline ticks" + lat_detail);
  report(4, loss && blocking && inc_b && inc_s, "packet loss and blocking vs load",
         "blcs/baseline loss,blocking" + fig5 + (inc_b && inc_s ? "; blocking increasing" : "; blocking not increasing"));
}

// Shifts, trims or widens the lightpath's occupied run inside the visible window.
bool corrupt(fron::SlotStates& st, std::mt19937_64& rng) {
  using fron::SlotState;
  int lo = -1, hi = -1;
  for (int i = 0; i < static_cast<int>(st.size()); ++i)
    if (st[static_cast<std::size_t>(i)] == SlotState::occupied) {
      if (lo < 0) lo = i;
      hi = i;
    }
  if (lo < 0) return false;
  auto known = [&](int i) { return i >= 0 && i < static_cast<int>(st.size()) && st[static_cast<std::size_t>(i)] != SlotState::unknown; };
  std::vector<int> kinds{0};  // trim the low end
  if (known(hi + 1)) kinds.push_back(1);  // widen
  if (known(lo - 1)) kinds.push_back(2);  // shift down
  const int kind = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];
  auto at = [&](int i) -> SlotState& { return st[static_cast<std::size_t>(i)]; };
  if (kind == 0) {
    at(lo) = SlotState::free;
  } else if (kind == 1) {
    at(hi + 1) = SlotState::occupied;
  } else {
    at(lo - 1) = SlotState::occupied;
    at(hi) = SlotState::free;
  }
  return true;
}

void criterion_detection(Context& c) {
  const auto& sc = c.scenario;
  sim::World w = sim::build_world(sc.topology, sc.objects);
  const DomainId home = w.requester_domains.front();
  ctl::ControllerState verifier(sc.topology.domain(home).controller, home, ctl::Role::leader, w.registry, c.model,
                                sc.controller);
  ctl::register_directory(verifier, w.directory, sc.topology);

  sim::Rng affairs(99);
  std::map<DomainId, sim::Affair> latest;
  std::uint64_t serial = 0;
  for (Tick t = 0; t < 1000; t += sc.kb_period) {
    std::vector<kb::KnowledgeTriple> batch;
    for (const auto& d : sc.topology.domains()) {
      auto a = sim::draw_affair(w, d.id, false, sc.malicious, affairs, t, serial++);
      batch.push_back(a.triple);
      latest[d.id] = a;
    }
    ctl::refresh_knowledge(verifier, batch);
  }

  std::mt19937_64 rng(2718);
  int honest_trusted = 0, violating_caught = 0, honest_cases = 0, violating_cases = 0;
  std::string first_miss;
  for (int k = 0; honest_cases < 100; ++k) {
    fron::Topology topo = sc.topology;
    auto random_request = [&](RequestId id) {
      routing::RouteRequest req;
      req.id = id;
      req.source = w.objects[w.requesters[std::uniform_int_distribution<std::size_t>(0, w.requesters.size() - 1)(rng)]].node;
      req.destination = w.destinations[std::uniform_int_distribution<std::size_t>(0, w.destinations.size() - 1)(rng)];
      req.width = std::uniform_int_distribution<int>(1, 3)(rng);
      return req;
    };
    auto all = [](DomainId) { return true; };
    const int background = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int b = 0; b < background; ++b) {
      auto req = random_request(b);
      auto g = routing::trusted_domain_graph(topo, req, all);
      auto r = routing::greedy_route(topo, std::get<routing::DomainGraph>(g), req);
      if (auto* p = std::get_if<routing::RoutePlan>(&r)) routing::provision(*p, topo, req, 5000 + b, 0);
    }
    auto req = random_request(99);
    auto g = routing::trusted_domain_graph(topo, req, all);
    auto r = routing::greedy_route(topo, std::get<routing::DomainGraph>(g), req);
    auto* plan = std::get_if<routing::RoutePlan>(&r);
    if (!plan) continue;
    const LightpathId lp = 1 + k;
    routing::provision(*plan, topo, req, lp, 0);
    std::vector<DomainId> peers(plan->domains.begin() + 1, plan->domains.end());
    const DomainId pd = peers[std::uniform_int_distribution<std::size_t>(0, peers.size() - 1)(rng)];
    ctl::ControllerState peer(topo.domain(pd).controller, pd, ctl::Role::receiver, w.registry, c.model, sc.controller);
    ctl::refresh_own_snapshot(peer, topo);
    ctl::refresh_own_snapshot(verifier, topo);
    ctl::note_lightpath(verifier, {lp, plan->links}, true, 0);

    const auto& t = latest.at(pd).triple;
    ctl::EventInfo ev{latest.at(pd).event_id, t.timestamp, t.identification, t.behavior};
    ctl::DisclosurePolicy policy;
    policy.fragment_slots = std::uniform_int_distribution<int>(2, 8)(rng);
    auto info = ctl::make_partial_info(peer, ev, policy, static_cast<std::uint64_t>(k), lp);

    auto spectrum_flagged = [](const ctl::TrustVerdict& v) {
      for (const auto& e : v.evidence)
        if (e.rfind("spectrum inconsistent", 0) == 0) return true;
      return false;
    };
    auto honest = ctl::verify_peer(verifier, info);
    ++honest_cases;
    if (honest.trusted && !spectrum_flagged(honest)) ++honest_trusted;
    else if (first_miss.empty()) first_miss = "honest: " + honest.reason;

    auto bad = info;
    if (corrupt(bad.fragments.front().states, rng)) {
      ++violating_cases;
      auto v = ctl::verify_peer(verifier, bad);
      if (!v.trusted && spectrum_flagged(v)) ++violating_caught;
      else if (first_miss.empty()) first_miss = "violating: " + v.reason;
    }
  }
  const bool ok = violating_cases >= 100 && violating_caught == violating_cases && honest_trusted == honest_cases;
  report(5, ok, "spectrum inconsistency detection",
         std::to_string(violating_caught) + "/" + std::to_string(violating_cases) + " violating reports untrusted, " +
             std::to_string(honest_cases - honest_trusted) + "/" + std::to_string(honest_cases) +
             " honest reports untrusted" + (first_miss.empty() ? "" : "; first miss " + first_miss));
}

void criterion_inference() {
  std::mt19937_64 rng(6);
  int equal = 0, inconsistent = 0;
  const int cases = 200;
  for (int i = 0; i < cases; ++i) {
    auto inst = testing::random_inference_instance(rng, 8, 0.2);
    auto oracle = testing::brute_force_inference(inst.partial, inst.skeletons, 8);
    try {
      auto got = fron::infer_occupancy(inst.partial, inst.skeletons, 8);
      equal += oracle && got == *oracle;
    } catch (const Inconsistent&) {
      equal += !oracle;
      ++inconsistent;
    }
  }
  report(6, equal == cases, "spectrum inference equals brute force",
         std::to_string(equal) + "/" + std::to_string(cases) + " equal (" + std::to_string(inconsistent) +
             " inconsistent instances)");
}

// Signs of every ReLU pre-activation in the relation and scoring networks.
std::vector<bool> relu_signs(const rn::RnModel& m, const rn::TrainSample& s) {
  std::vector<bool> out;
  auto run = [&](const rn::Mlp& net, Eigen::VectorXd x) {
    for (const auto& layer : net.layers) {
      Eigen::VectorXd z = layer.weights * x + layer.bias;
      if (layer.activation == rn::Activation::relu)
        for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z(i) > 0.0);
      x = rn::activate(layer.activation, z);
    }
    return x;
  };
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m.rn.g_theta.output_width());
  for (const auto& t : s.triples) sum += run(m.rn.g_theta, rn::relation_input(rn::encode_triple(m, t.tokens())));
  run(m.rn.f_phi, sum);
  return out;
}

void criterion_gradients() {
  std::mt19937_64 rng(31);
  const std::vector<std::string> ids{"motor_01", "robot_02", "roadm_o1_in"}, st{"s_running", "s_idle"},
      bh{"b_start", "b_grasp", "b_handling_error"};
  const double eps = 1e-5;
  double worst = 0.0;
  std::size_t checked = 0, kinks = 0;
  std::string worst_name;
  for (int trial = 0; trial < 20; ++trial) {
    rn::TrainSample s;
    s.label = trial % 2;
    const int n = 1 + trial % 3;
    for (int k = 0; k < n; ++k) {
      auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
      };
      s.triples.push_back({pick(ids), pick(st), pick(bh), 0, 0});
    }
    const std::vector<rn::TrainSample> one{s};
    auto m = rn::init_model(rn::vocabulary_for(one), rn::RnLayout{}, 8, 1000 + static_cast<std::uint64_t>(trial));
    auto analytic = rn::compute_gradients(m, one);
    auto grads = rn::parameter_blocks(analytic.grad);
    auto params = rn::parameter_blocks(m);
    for (std::size_t b = 0; b < params.size(); ++b)
      for (std::size_t e = 0; e < params[b].size; ++e) {
        double& p = params[b].data[e];
        const double saved = p;
        p = saved + eps;
        const double up = rn::sample_loss(m, s);
        const auto up_signs = relu_signs(m, s);
        p = saved - eps;
        const double down = rn::sample_loss(m, s);
        const auto down_signs = relu_signs(m, s);
        p = saved;
        if (up_signs != down_signs) {
          // the loss is not differentiable between the two probes
          ++kinks;
          continue;
        }
        const double numeric = (up - down) / (2.0 * eps);
        const double err = rn::relative_error(grads[b].data[e], numeric, eps);
        ++checked;
        if (err > worst) {
          worst = err;
          worst_name = params[b].name;
        }
      }
  }
  report(7, worst < 1e-4, "relation net gradient check",
         "max relative error " + fmt(worst, 3) + " (" + worst_name + ") over " + std::to_string(checked) +
             " parameters in 20 models, eps 1e-5; " + std::to_string(kinks) +
             " probes straddling a ReLU kink excluded");
}

void criterion_memory() {
  bool exact = true;
  double worst = 0.0;
  auto m = testing::three_group_fixture(16, 10, 4);
  for (const auto& node : m.nodes()) {
    auto r = m.recall(node.vector);
    worst = std::max(worst, std::abs(r.confidence - 1.0));
    exact = exact && r.group == node.group && std::abs(r.confidence - 1.0) <= 1e-9;
  }
  std::mt19937_64 rng(8);
  int correct = 0;
  const int noisy = 300;
  for (int q = 0; q < noisy; ++q) {
    const auto& node = m.nodes()[static_cast<std::size_t>(q) % m.nodes().size()];
    correct += m.recall(testing::perturb(node.vector, 0.1, rng)).group == node.group;
  }
  const double acc = static_cast<double>(correct) / noisy;

  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, 3);
  int agree = 0;
  const int queries = 1000;
  for (int block = 0; block < queries / 50; ++block) {
    mem::RelationMemory mm(8);
    std::vector<std::pair<Eigen::VectorXd, std::string>> stored;
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd v(8);
      for (int d = 0; d < 8; ++d) v(d) = n(rng);
      std::string g = "L" + std::to_string(lab(rng));
      mm.store(v, g);
      stored.emplace_back(v, g);
    }
    for (int q = 0; q < 50; ++q) {
      Eigen::VectorXd x(8);
      for (int d = 0; d < 8; ++d) x(d) = n(rng);
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t k = 0; k < stored.size(); ++k) order.push_back({-testing::plain_cosine(x, stored[k].first), k});
      std::sort(order.begin(), order.end());
      std::map<std::string, int> count;
      for (int r = 0; r < 3; ++r) ++count[stored[order[static_cast<std::size_t>(r)].second].second];
      int top = 0;
      for (auto& [g, cnt] : count) top = std::max(top, cnt);
      std::string expect;
      for (int r = 0; r < 3 && expect.empty(); ++r) {
        const auto& g = stored[order[static_cast<std::size_t>(r)].second].second;
        if (count[g] == top) expect = g;
      }
      agree += mm.knn_assign(x, 3) == expect;
    }
  }
  report(9, exact && acc >= 0.95 && agree == queries, "associative memory",
         "self recall max |confidence - 1| " + fmt(worst, 3) + ", noisy recall accuracy " + fmt(acc) + ", knn " +
             std::to_string(agree) + "/" + std::to_string(queries) + " match the sort oracle");
}

void criterion_determinism(Context& c) {
  bool same = true;
  std::string detail;
  const fs::path model = c.work / "model.json";
  for (const char* name : {"default.json", "baseline.json", "collusion.json"}) {
    cli::RunArgs a{c.data / name, std::nullopt, c.work / "det_a", model};
    cli::RunArgs b = a;
    b.out = c.work / "det_b";
    std::ostringstream log;
    const bool ran = cli::cmd_run(a, log) == 0 && cli::cmd_run(b, log) == 0;
    bool equal = ran;
    for (const char* f : {"metrics.csv", "trace.jsonl"}) {
      const auto x = read_file(a.out / f), y = read_file(b.out / f);
      equal = equal && !x.empty() && x == y;
    }
    same = same && equal;
    detail += std::string(" ") + name + (equal ? " identical" : " differs");
  }
  report(10, same, "determinism of bundled scenarios", detail.substr(1));
}

void criterion_routing() {
  std::mt19937_64 rng(17);
  int misses = 0, audited = 0, audit_failures = 0;
  const int cases = 200;
  for (int trial = 0; trial < cases; ++trial) {
    auto inst = testing::random_routing_instance(rng);
    auto trusted = [&](DomainId d) { return !inst.untrusted.count(d); };
    const bool oracle = testing::exhaustive_feasible(inst.topo, inst.req, trusted);
    auto gv = routing::trusted_domain_graph(inst.topo, inst.req, trusted);
    bool greedy = false;
    if (auto* g = std::get_if<routing::DomainGraph>(&gv)) {
      auto result = routing::greedy_route(inst.topo, *g, inst.req);
      if (auto* plan = std::get_if<routing::RoutePlan>(&result)) {
        greedy = true;
        ++audited;
        try {
          routing::audit_plan(inst.topo, inst.req, *plan, trusted);
        } catch (const Inconsistent&) {
          ++audit_failures;
        }
      }
    }
    misses += greedy != oracle;
  }
  const double rate = static_cast<double>(misses) / cases;
  report(11, rate < 0.05 && audit_failures == 0, "routing feasibility",
         std::to_string(misses) + "/" + std::to_string(cases) + " disagreements with the exhaustive oracle, " +
             std::to_string(audited - audit_failures) + "/" + std::to_string(audited) + " plans pass the audit");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <data dir> <work dir>\n";
    return 2;
  }
  Context c;
  c.data = argv[1];
  c.work = argv[2];
  fs::create_directories(c.work);
  auto t0 = std::chrono::steady_clock::now();
  try {
    c.scenario = sim::load_scenario(c.data / "default.json");
    criterion_training(c);
    criteria_ratio(c);
    criterion_collusion(c);
    criteria_load(c);
    criterion_detection(c);
    criterion_inference();
    criterion_gradients();
    criterion_memory();
    criterion_determinism(c);
    criterion_routing();
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) std::cout << line << "\n";
    std::cout << "FAIL aborted: " << e.what() << std::endl;
    return 1;
  }
  for (const auto& [id, line] : lines) std::cout << line << "\n";
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << " in "
            << fmt(elapsed(t0), 3) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
