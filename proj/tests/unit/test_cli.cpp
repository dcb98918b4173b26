#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include <nlohmann/json.hpp>

#include "blcs/cli/cli.hpp"
#include "blcs/sim/sweep.hpp"

using namespace blcs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

struct Workdir {
  fs::path dir;
  explicit Workdir(const std::string& name) : dir(fs::temp_directory_path() / ("blcs_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::copy_file(fs::path(BLCS_DATA_DIR) / "default_topology.json", dir / "default_topology.json");
  }
  ~Workdir() { fs::remove_all(dir); }

  // A short version of the bundled default scenario.
  fs::path config(json patch = json::object()) const {
    json j = json::parse(slurp(fs::path(BLCS_DATA_DIR) / "default.json"));
    j["duration"] = 1200;
    j["training"]["epochs"] = 150;
    j["training"]["rounds"] = 6;
    j.merge_patch(patch);
    spit(dir / "scenario.json", j.dump(2));
    return dir / "scenario.json";
  }
};

int invoke(std::vector<std::string> args, std::string* log_text = nullptr) {
  args.insert(args.begin(), "blcs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, log;
  int rc = cli::main(static_cast<int>(argv.size()), argv.data(), out, log);
  if (log_text) *log_text = log.str();
  return rc;
}

}  // namespace

TEST_CASE("missing topology is a config error naming the field") {
  Workdir w("missing_topology");
  auto cfg = w.config({{"topology", "nowhere.json"}});
  std::string log;
  CHECK(invoke({"run", cfg.string(), "--out", (w.dir / "out").string()}, &log) == cli::kExitConfig);
  CHECK(log.find("topology") != std::string::npos);
  CHECK_FALSE(fs::exists(w.dir / "out" / "metrics.csv"));
}

TEST_CASE("bad field value reports the field") {
  Workdir w("bad_field");
  auto cfg = w.config({{"load", -1}});
  std::string log;
  CHECK(invoke({"run", cfg.string(), "--out", (w.dir / "out").string()}, &log) == cli::kExitConfig);
  CHECK(log.find("load") != std::string::npos);
}

TEST_CASE("unknown subcommand is a usage error") {
  CHECK(invoke({"frobnicate"}) == cli::kExitConfig);
}

TEST_CASE("train then run twice gives identical outputs") {
  Workdir w("train_run");
  auto cfg = w.config();
  std::string log;
  REQUIRE(invoke({"train", cfg.string(), "--out", (w.dir / "m1.json").string()}, &log) == cli::kExitOk);
  CHECK(log.find("held-out accuracy") != std::string::npos);
  REQUIRE(invoke({"train", cfg.string(), "--out", (w.dir / "m2.json").string()}) == cli::kExitOk);
  CHECK(slurp(w.dir / "m1.json") == slurp(w.dir / "m2.json"));

  const std::string model = (w.dir / "m1.json").string();
  REQUIRE(invoke({"run", cfg.string(), "--seed", "3", "--model", model, "--out", (w.dir / "a").string()}) ==
          cli::kExitOk);
  REQUIRE(invoke({"run", cfg.string(), "--seed", "3", "--model", model, "--out", (w.dir / "b").string()}) ==
          cli::kExitOk);
  for (const char* f : {"metrics.csv", "report.json", "trace.jsonl"}) {
    CAPTURE(f);
    CHECK(slurp(w.dir / "a" / f) == slurp(w.dir / "b" / f));
  }
  auto rows = sim::rows_from_csv(slurp(w.dir / "a" / "metrics.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].variant == "blcs");
  CHECK(rows[0].value == 3.0);

  auto report = json::parse(slurp(w.dir / "a" / "report.json"));
  CHECK(report["seed"] == 3);
  CHECK(report["model"]["source"] == "file");
}

TEST_CASE("corrupt model file is a config error") {
  Workdir w("bad_model");
  auto cfg = w.config();
  spit(w.dir / "junk.json", "{\"not\": \"a model\"}");
  std::string log;
  CHECK(invoke({"run", cfg.string(), "--model", (w.dir / "junk.json").string(), "--out", (w.dir / "o").string()},
               &log) == cli::kExitConfig);
  CHECK(log.find("model") != std::string::npos);
}

TEST_CASE("baseline run needs no model") {
  Workdir w("baseline");
  auto cfg = w.config({{"blcs", false}});
  std::string log;
  REQUIRE(invoke({"run", cfg.string(), "--out", (w.dir / "o").string()}, &log) == cli::kExitOk);
  CHECK(log.find("training") == std::string::npos);
  auto rows = sim::rows_from_csv(slurp(w.dir / "o" / "metrics.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].variant == "baseline");
}

TEST_CASE("sweep with one point and one seed writes two rows") {
  Workdir w("sweep");
  auto cfg = w.config();
  REQUIRE(invoke({"train", cfg.string(), "--out", (w.dir / "m.json").string()}) == cli::kExitOk);
  spit(w.dir / "sweep.json", R"({"param": "malicious_ratio", "values": [0.2], "seeds": 1})");
  REQUIRE(invoke({"sweep", cfg.string(), "--sweep", (w.dir / "sweep.json").string(), "--model",
                  (w.dir / "m.json").string(), "--threads", "1", "--out", (w.dir / "o").string()}) == cli::kExitOk);
  auto rows = sim::rows_from_csv(slurp(w.dir / "o" / "metrics.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].variant == "blcs");
  CHECK(rows[1].variant == "baseline");
  CHECK(rows[0].param == "malicious_ratio");
  CHECK(rows[0].value == 0.2);
  CHECK(rows[0].seeds == 1);

  spit(w.dir / "bad_sweep.json", R"({"param": "colour", "values": [1], "seeds": 1})");
  std::string log;
  CHECK(invoke({"sweep", cfg.string(), "--sweep", (w.dir / "bad_sweep.json").string(), "--model",
                (w.dir / "m.json").string(), "--out", (w.dir / "o2").string()},
               &log) == cli::kExitConfig);
  CHECK(log.find("sweep.param") != std::string::npos);
}
