#include "blcs/controller/sync.hpp"

#include <algorithm>
#include <tuple>

#include "blcs/common/error.hpp"

namespace blcs::ctl {

std::map<LightpathId, std::vector<LinkId>> replay_updates(std::map<LightpathId, std::vector<LinkId>> base,
                                                          std::vector<SkeletonUpdate> updates) {
  std::sort(updates.begin(), updates.end(), [](const SkeletonUpdate& a, const SkeletonUpdate& b) {
    return std::tie(a.tick, a.origin, a.seq) < std::tie(b.tick, b.origin, b.seq);
  });
  for (const auto& u : updates) {
    if (u.add) base[u.skeleton.id] = u.skeleton.links;
    else base.erase(u.skeleton.id);
  }
  return base;
}

SyncOutcome sync_with_leader(ControllerState& leader, std::span<ControllerState* const> followers, Tick tick,
                             std::mutex& lock, const TraceFn& trace) {
  std::lock_guard<std::mutex> guard(lock);

  std::size_t honest = 0, flags = 0;
  for (const ControllerState* f : followers) {
    if (!f->honest) continue;
    ++honest;
    auto c = cached_verdict(*f, leader.id, tick);
    if (c && !*c) ++flags;
  }
  if (honest > 0 && 2 * flags >= honest)
    throw LeaderQuarantined("leader " + std::to_string(leader.id) + " flagged by " + std::to_string(flags) + " of " +
                            std::to_string(honest) + " honest controllers");

  std::vector<ControllerState*> all{&leader};
  all.insert(all.end(), followers.begin(), followers.end());
  std::vector<ControllerId> ids;
  for (auto* p : all) ids.push_back(p->id);
  if (trace) trace({{"type", "SYNC_BEGIN"}, {"tick", tick}, {"leader", leader.id}, {"participants", ids}});

  SyncOutcome out;
  std::vector<SkeletonUpdate> updates;
  std::map<std::pair<ControllerId, ControllerId>, VerdictSummary> table;
  for (auto* p : all) {
    updates.insert(updates.end(), p->pending.begin(), p->pending.end());
    for (const auto& v : publish_verdicts(*p, tick)) table[{v.endorser, v.subject}] = v;
  }
  out.updates = updates.size();
  out.summaries = table.size();
  auto shared = replay_updates(leader.virtual_info.synced_skeletons, std::move(updates));

  for (auto* p : all) {
    p->pending.clear();
    p->virtual_info.skeletons = shared;
    p->virtual_info.synced_skeletons = shared;
    p->virtual_info.summaries = table;
  }
  for (auto* p : all)
    if (p->accomplices.empty()) out.adopted[p->id] = adopt_vouches(*p, tick);

  if (trace) {
    std::size_t adopted = 0;
    for (const auto& [_, n] : out.adopted) adopted += n;
    trace({{"type", "SYNC_END"},
           {"tick", tick},
           {"leader", leader.id},
           {"updates", out.updates},
           {"summaries", out.summaries},
           {"adopted", adopted}});
  }
  return out;
}

}  // namespace blcs::ctl
