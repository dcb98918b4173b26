#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/controller/controller.hpp"

namespace blcs::ctl {

using TraceFn = std::function<void(const nlohmann::json&)>;

struct SyncOutcome {
  std::size_t updates = 0;
  std::size_t summaries = 0;
  std::map<ControllerId, std::size_t> adopted;
};

/// Replays `updates` in (tick, origin, seq) order on top of `base`.
std::map<LightpathId, std::vector<LinkId>> replay_updates(std::map<LightpathId, std::vector<LinkId>> base,
                                                          std::vector<SkeletonUpdate> updates);

/// One critical section under `lock`: gathers pending skeleton updates and
/// published verdicts, replays the updates in timestamp order, hands the same
/// skeletons and summaries to every participant and lets honest ones adopt
/// vouches. Spectrum masks are never copied. Throws LeaderQuarantined, without
/// touching any state, when at least half of the honest followers hold an
/// untrusted verdict on the leader.
SyncOutcome sync_with_leader(ControllerState& leader, std::span<ControllerState* const> followers, Tick tick,
                             std::mutex& lock, const TraceFn& trace = {});

}  // namespace blcs::ctl
