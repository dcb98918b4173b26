#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace blcs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::optional<std::filesystem::path> model;
};

struct SweepArgs {
  std::filesystem::path config;
  std::filesystem::path sweep;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::optional<std::filesystem::path> model;
  unsigned threads = 0;
};

struct TrainArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides training.seed
  std::filesystem::path out;          // model file
};

/// Writes report.json, metrics.csv and trace.jsonl under `out`.
int cmd_run(const RunArgs& a, std::ostream& log);
/// Writes metrics.csv (one row per point and variant) and report.json under `out`.
int cmd_sweep(const SweepArgs& a, std::ostream& log);
int cmd_train(const TrainArgs& a, std::ostream& log);

/// Parses `blcs <run|sweep|train> ...` and dispatches. Errors go to `log`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace blcs::cli
