#include "blcs/sim/bootstrap.hpp"

#include <algorithm>
#include <set>

#include "blcs/controller/controller.hpp"
#include "blcs/sim/world.hpp"

namespace blcs::sim {

namespace {

// Affairs of one round under its own malicious assignment, in emission order.
std::vector<rn::TrainSample> round_samples(const Scenario& sc, const World& w, std::uint64_t round) {
  const auto& ts = sc.training;
  const std::size_t domains = sc.topology.domains().size();
  const double rate = sc.affair_rate * static_cast<double>(domains);
  Assignment a =
      inject_malicious(w.eligible, sc.malicious_ratio, sc.collusion, derive_seed(ts.seed, Stream::training, round));
  Rng rng(derive_seed(ts.seed, Stream::affairs, round));
  std::vector<rn::TrainSample> out;
  std::uint64_t serial = 0;
  for (double clock = rng.exponential(1.0 / rate); clock < static_cast<double>(ts.ticks);
       clock += rng.exponential(1.0 / rate)) {
    auto d = static_cast<DomainId>(rng.index(domains));
    const bool bad = a.malicious.count(sc.topology.domain(d).controller) > 0;
    Affair af = draw_affair(w, d, bad, sc.malicious, rng, static_cast<Tick>(clock), serial++);
    out.push_back({{af.triple}, valid_act(w, af.triple.tokens()) ? 1 : 0});
  }
  return out;
}

}  // namespace

LabeledSplit bootstrap_samples(const Scenario& sc) {
  const World w = build_world(sc.topology, sc.objects);
  const auto& ts = sc.training;
  LabeledSplit out;
  std::set<kb::TokenTriple> seen;
  for (int r = 0; r < ts.rounds; ++r)
    for (auto& s : round_samples(sc, w, static_cast<std::uint64_t>(r)))
      if (seen.insert(s.triples.front().tokens()).second) out.train.push_back(std::move(s));
  Rng split(derive_seed(ts.seed, Stream::split));
  for (std::size_t i = out.train.size(); i > 1; --i) std::swap(out.train[i - 1], out.train[split.index(i)]);
  for (int r = 0; r < ts.heldout_rounds; ++r) {
    auto held = round_samples(sc, w, static_cast<std::uint64_t>(ts.rounds + r));
    out.test.insert(out.test.end(), std::make_move_iterator(held.begin()), std::make_move_iterator(held.end()));
  }
  return out;
}

double honest_acceptance_rate(const Scenario& sc, std::shared_ptr<const rn::RnModel> model, std::size_t* claims) {
  const World w = build_world(sc.topology, sc.objects);
  const auto& ts = sc.training;
  Assignment a = inject_malicious(w.eligible, sc.malicious_ratio, sc.collusion, derive_seed(ts.seed, Stream::acceptance));
  const auto& topo = sc.topology;
  const DomainId home = w.requester_domains.front();

  ctl::ControllerState verifier(topo.domain(home).controller, home, ctl::Role::leader, w.registry, model, sc.controller);
  ctl::register_directory(verifier, w.directory, topo);

  std::vector<DomainId> honest_peers;
  for (const auto& d : topo.domains())
    if (d.id != home && !a.malicious.count(d.controller)) honest_peers.push_back(d.id);

  Rng rng(derive_seed(ts.seed, Stream::acceptance, 1));
  const std::size_t domains = topo.domains().size();
  const double rate = sc.affair_rate * static_cast<double>(domains);
  const Tick settle = 4 * sc.kb_period;
  std::map<DomainId, Affair> latest;
  std::vector<kb::KnowledgeTriple> pending;
  Tick next_refresh = sc.kb_period;
  std::size_t asked = 0, accepted = 0;
  std::uint64_t serial = 0;
  const auto target = static_cast<std::size_t>(ts.acceptance_claims);

  for (double clock = rng.exponential(1.0 / rate); asked < target && !honest_peers.empty() && clock < 1e7;
       clock += rng.exponential(1.0 / rate)) {
    const auto now = static_cast<Tick>(clock);
    while (now >= next_refresh) {
      ctl::refresh_knowledge(verifier, pending);
      pending.clear();
      next_refresh += sc.kb_period;
    }
    auto d = static_cast<DomainId>(rng.index(domains));
    const bool bad = a.malicious.count(topo.domain(d).controller) > 0;
    Affair af = draw_affair(w, d, bad, sc.malicious, rng, now, serial++);
    pending.push_back(af.triple);
    latest[d] = af;

    if (now < settle) continue;
    DomainId peer = honest_peers[rng.index(honest_peers.size())];
    auto it = latest.find(peer);
    if (it == latest.end()) continue;
    const auto& t = it->second.triple;
    ctl::PartialInfo info;
    info.sender = topo.domain(peer).controller;
    info.nonce = serial;
    info.location = t.identification;
    info.affair_type = t.behavior;
    ++asked;
    if (ctl::verify_peer(verifier, info).trusted) ++accepted;
  }
  if (claims) *claims = asked;
  return asked == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(asked);
}

TrainingReport train_for(const Scenario& sc) {
  LabeledSplit data = bootstrap_samples(sc);
  rn::TrainConfig cfg;
  cfg.epochs = sc.training.epochs;
  cfg.learning_rate = sc.training.learning_rate;
  cfg.momentum = sc.training.momentum;
  cfg.batch_size = sc.training.batch_size;
  cfg.input_dim = sc.training.input_dim;
  cfg.seed = sc.training.seed;

  TrainingReport rep{rn::train(data.train, cfg)};
  rep.train_size = data.train.size();
  rep.test_size = data.test.size();
  rep.heldout_accuracy = data.test.empty() ? 0.0 : rn::accuracy(rep.result.model, data.test);
  auto model = std::make_shared<const rn::RnModel>(rep.result.model);
  rep.honest_acceptance = honest_acceptance_rate(sc, model, &rep.honest_claims);
  return rep;
}

}  // namespace blcs::sim
