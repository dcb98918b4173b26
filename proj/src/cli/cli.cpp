#include "blcs/cli/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blcs/common/error.hpp"
#include "blcs/relation_net/model_io.hpp"
#include "blcs/sim/bootstrap.hpp"
#include "blcs/sim/engine.hpp"
#include "blcs/sim/sweep.hpp"

namespace blcs::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
  if (!f) throw Error("write failed for " + p.string());
}

void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
}

sim::Scenario scenario_for(const fs::path& config, std::optional<std::uint64_t> seed) {
  sim::Scenario sc = sim::load_scenario(config);
  if (seed) sc.seed = *seed;
  return sc;
}

std::shared_ptr<const rn::RnModel> load_or_train(const sim::Scenario& sc, const std::optional<fs::path>& model,
                                                 std::ostream& log, json& info) {
  if (model) {
    try {
      auto m = std::make_shared<const rn::RnModel>(rn::load_model(*model));
      info = {{"source", "file"}, {"path", model->filename().string()}};
      return m;
    } catch (const InvalidInput& e) {
      throw ConfigError("model", e.what());
    }
  }
  log << "training relation model (" << sc.training.epochs << " epochs)\n";
  auto rep = sim::train_for(sc);
  info = {{"source", "trained"},
          {"epochs", sc.training.epochs},
          {"heldout_accuracy", rep.heldout_accuracy},
          {"honest_acceptance", rep.honest_acceptance}};
  return std::make_shared<const rn::RnModel>(std::move(rep.result.model));
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int cmd_run(const RunArgs& a, std::ostream& log) {
  return guarded(log, [&] {
    sim::Scenario sc = scenario_for(a.config, a.seed);
    sim::validate(sc);
    json model_info = nullptr;
    std::shared_ptr<const rn::RnModel> model;
    if (sc.blcs) model = load_or_train(sc, a.model, log, model_info);
    prepare_out(a.out);
    auto out = sim::run(sc, model);
    const std::string variant = sc.blcs ? "blcs" : "baseline";

    json report{{"variant", variant},
                {"seed", sc.seed},
                {"metrics", sim::to_json(out.report)},
                {"malicious_controllers", out.assignment.malicious},
                {"model", model_info},
                {"scenario", sim::scenario_to_json(sc)}};
    write_file(a.out / "report.json", report.dump(2) + "\n");
    auto row = sim::summarize("seed", static_cast<double>(sc.seed), variant, {out.report});
    write_file(a.out / "metrics.csv", sim::to_csv({row}));
    write_file(a.out / "trace.jsonl", sim::to_jsonl(out.trace));
    log << variant << " seed " << sc.seed << ": mistrust " << out.report.mistrust_rate << ", latency "
        << out.report.latency_ticks << ", loss " << out.report.packet_loss << ", blocking " << out.report.blocking
        << " over " << out.report.requests << " requests\n";
  });
}

int cmd_sweep(const SweepArgs& a, std::ostream& log) {
  return guarded(log, [&] {
    sim::Scenario sc = scenario_for(a.config, a.seed);
    sim::validate(sc);
    std::ifstream f(a.sweep);
    if (!f) throw ConfigError("sweep", "cannot read " + a.sweep.string());
    json j;
    try {
      j = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("sweep", e.what());
    }
    sim::SweepSpec spec = sim::sweep_from_json(j);
    json model_info = nullptr;
    auto model = load_or_train(sc, a.model, log, model_info);
    prepare_out(a.out);
    auto rows = sim::run_sweep(sc, spec, model, a.threads);
    write_file(a.out / "metrics.csv", sim::to_csv(rows));
    json report{{"sweep", {{"param", spec.param}, {"values", spec.values}, {"seeds", spec.seeds}, {"baseline", spec.baseline}}},
                {"model", model_info},
                {"scenario", sim::scenario_to_json(sc)},
                {"rows", json::array()}};
    for (const auto& r : rows)
      report["rows"].push_back({{"value", r.value},
                                {"variant", r.variant},
                                {"mistrust_rate", r.mistrust_rate},
                                {"latency_ticks", r.latency_ticks},
                                {"packet_loss", r.packet_loss},
                                {"blocking", r.blocking}});
    write_file(a.out / "report.json", report.dump(2) + "\n");
    log << "wrote " << rows.size() << " rows to " << (a.out / "metrics.csv").string() << "\n";
  });
}

int cmd_train(const TrainArgs& a, std::ostream& log) {
  return guarded(log, [&] {
    sim::Scenario sc = sim::load_scenario(a.config);
    if (a.seed) sc.training.seed = *a.seed;
    sim::validate(sc);
    log << "epochs: " << sc.training.epochs << "\n";
    auto rep = sim::train_for(sc);
    if (rep.result.degenerate_dataset)
      log << "warning: DegenerateDataset: bootstrap holds a single class (no malicious controllers configured)\n";
    if (a.out.has_parent_path()) prepare_out(a.out.parent_path());
    rn::save_model(rep.result.model, a.out);
    log << "samples: " << rep.train_size << " train, " << rep.test_size << " held out\n";
    log << "final loss: " << (rep.result.loss_curve.empty() ? 0.0 : rep.result.loss_curve.back()) << "\n";
    log << "held-out accuracy: " << rep.heldout_accuracy << "\n";
    log << "honest acceptance: " << rep.honest_acceptance << " over " << rep.honest_claims << " claims\n";
  });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Trust-aware multi-domain lightpath provisioning simulator"};
  app.require_subcommand(1);

  RunArgs run;
  std::uint64_t seed = 0;
  std::string model;
  auto* r = app.add_subcommand("run", "run one scenario");
  r->add_option("config", run.config, "scenario file")->required()->check(CLI::ExistingFile);
  auto* r_seed = r->add_option("--seed", seed, "override the scenario seed");
  r->add_option("--out", run.out, "output directory")->required();
  auto* r_model = r->add_option("--model", model, "trained model file")->check(CLI::ExistingFile);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "sweep load or malicious ratio, BLCS against baseline");
  s->add_option("config", sweep.config, "scenario file")->required()->check(CLI::ExistingFile);
  s->add_option("--sweep", sweep.sweep, "sweep spec file")->required()->check(CLI::ExistingFile);
  auto* s_seed = s->add_option("--seed", seed, "first seed");
  s->add_option("--out", sweep.out, "output directory")->required();
  auto* s_model = s->add_option("--model", model, "trained model file")->check(CLI::ExistingFile);
  s->add_option("--threads", sweep.threads, "worker threads, 0 for all cores");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train the relation model on a bootstrap trace");
  t->add_option("config", train.config, "scenario file")->required()->check(CLI::ExistingFile);
  auto* t_seed = t->add_option("--seed", seed, "override the training seed");
  t->add_option("--out", train.out, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log << "usage error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (r->parsed()) {
    if (*r_seed) run.seed = seed;
    if (*r_model) run.model = model;
    return cmd_run(run, log);
  }
  if (s->parsed()) {
    if (*s_seed) sweep.seed = seed;
    if (*s_model) sweep.model = model;
    return cmd_sweep(sweep, log);
  }
  if (*t_seed) train.seed = seed;
  return cmd_train(train, log);
}

}  // namespace blcs::cli
