#include "blcs/fron/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>

#include "blcs/common/error.hpp"

namespace blcs::fron {

namespace {

std::uint64_t interval_bits(int lo, int hi) {
  const int w = hi - lo + 1;
  const std::uint64_t run = w >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
  return run << lo;
}

std::uint64_t all_bits(int slots) { return interval_bits(0, slots - 1); }

void check_slots(int slots) {
  if (slots < 1 || slots > kMaxSlots) throw InvalidInput("slot count must lie in [1, 64]");
}

}  // namespace

SpectrumMask::SpectrumMask(int slots) {
  check_slots(slots);
  owner_.assign(static_cast<std::size_t>(slots), 0);
}

bool SpectrumMask::is_free(int slot) const { return owner(slot) == 0; }

LightpathId SpectrumMask::owner(int slot) const {
  if (slot < 0 || slot >= slots()) throw InvalidInput("slot index out of range");
  return owner_[static_cast<std::size_t>(slot)];
}

bool SpectrumMask::range_free(SlotInterval iv) const {
  if (iv.lo < 0 || iv.hi >= slots() || iv.hi < iv.lo) return false;
  for (int s = iv.lo; s <= iv.hi; ++s)
    if (owner_[static_cast<std::size_t>(s)] != 0) return false;
  return true;
}

std::uint64_t SpectrumMask::free_bits() const noexcept {
  std::uint64_t bits = 0;
  for (std::size_t s = 0; s < owner_.size(); ++s)
    if (owner_[s] == 0) bits |= std::uint64_t{1} << s;
  return bits;
}

int SpectrumMask::occupied_count() const noexcept {
  return static_cast<int>(std::count_if(owner_.begin(), owner_.end(), [](LightpathId o) { return o != 0; }));
}

void SpectrumMask::occupy(SlotInterval iv, LightpathId owner) {
  if (owner == 0) throw InvalidInput("lightpath id 0 is reserved for free slots");
  if (!range_free(iv)) throw InvalidInput("slot interval is not free");
  for (int s = iv.lo; s <= iv.hi; ++s) owner_[static_cast<std::size_t>(s)] = owner;
}

void SpectrumMask::release(LightpathId owner) {
  for (auto& o : owner_)
    if (o == owner) o = 0;
}

std::optional<SlotInterval> first_fit_alloc(std::span<const std::uint64_t> free_masks, int slots, int width) {
  check_slots(slots);
  if (width < 1) throw InvalidInput("width must be >= 1");
  if (width > slots) return std::nullopt;
  std::uint64_t run = all_bits(slots);
  for (auto m : free_masks) run &= m;
  // bit s survives when slots s .. s+width-1 are all free
  for (int k = 1; k < width; ++k) run &= run >> 1;
  run &= all_bits(slots - width + 1);
  if (run == 0) return std::nullopt;
  const int lo = std::countr_zero(run);
  return SlotInterval{lo, lo + width - 1};
}

std::optional<SlotInterval> first_fit_alloc(std::span<const SpectrumMask* const> masks, int width) {
  if (masks.empty()) throw InvalidInput("first_fit_alloc needs at least one link");
  std::vector<std::uint64_t> bits;
  for (const auto* m : masks) bits.push_back(m->free_bits());
  return first_fit_alloc(bits, masks.front()->slots(), width);
}

void merge_views(PartialView& into, const PartialView& from) {
  for (const auto& [link, states] : from) {
    auto [it, fresh] = into.try_emplace(link, states);
    if (fresh) continue;
    if (it->second.size() != states.size()) throw InvalidInput("views disagree on slot count");
    for (std::size_t s = 0; s < states.size(); ++s) {
      if (states[s] == SlotState::unknown) continue;
      auto& mine = it->second[s];
      if (mine != SlotState::unknown && mine != states[s])
        throw Inconsistent("link " + std::to_string(link) + " slot " + std::to_string(s) + " reported both free and occupied");
      mine = states[s];
    }
  }
}

bool has_unknown(const SlotStates& states) {
  return std::any_of(states.begin(), states.end(), [](SlotState s) { return s == SlotState::unknown; });
}

namespace {

// One connected group of skeletons (sharing links) and the links they cross.
struct Component {
  std::vector<std::vector<int>> link_index;  // per skeleton: indices into `links`
  std::vector<LinkId> links;
  std::vector<std::uint64_t> known_free;
  std::vector<std::uint64_t> known_occupied;
  std::vector<int> last_skeleton;  // per link: last skeleton (in order) crossing it
  int slots = 0;
};

class Solver {
 public:
  explicit Solver(const Component& c) : c_(c) {}

  // Any completion honouring the known states plus the extra ones.
  bool solve(const std::vector<std::uint64_t>& must_free, const std::vector<std::uint64_t>& must_cover,
             std::vector<std::uint64_t>& covered_out) {
    must_free_ = &must_free;
    must_cover_ = &must_cover;
    const std::size_t n = c_.link_index.size();
    candidates_.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t forbidden = 0;
      for (int l : c_.link_index[k]) forbidden |= must_free[static_cast<std::size_t>(l)];
      for (int lo = 0; lo < c_.slots; ++lo)
        for (int hi = lo; hi < c_.slots; ++hi) {
          const std::uint64_t m = interval_bits(lo, hi);
          if (m & forbidden) break;
          candidates_[k].push_back(m);
        }
      if (candidates_[k].empty()) return false;
    }
    used_.assign(c_.links.size(), 0);
    if (!dfs(0)) return false;
    covered_out = used_;
    return true;
  }

 private:
  bool dfs(std::size_t k) {
    if (k == c_.link_index.size()) return true;
    const auto& links = c_.link_index[k];
    for (std::uint64_t m : candidates_[k]) {
      bool clash = false;
      for (int l : links)
        if (used_[static_cast<std::size_t>(l)] & m) {
          clash = true;
          break;
        }
      if (clash) continue;
      for (int l : links) used_[static_cast<std::size_t>(l)] |= m;
      bool ok = true;
      for (int l : links) {
        const auto li = static_cast<std::size_t>(l);
        if (c_.last_skeleton[li] == static_cast<int>(k) && ((*must_cover_)[li] & ~used_[li]) != 0) {
          ok = false;
          break;
        }
      }
      if (ok && dfs(k + 1)) return true;
      for (int l : links) used_[static_cast<std::size_t>(l)] &= ~m;
    }
    return false;
  }

  const Component& c_;
  const std::vector<std::uint64_t>* must_free_ = nullptr;
  const std::vector<std::uint64_t>* must_cover_ = nullptr;
  std::vector<std::vector<std::uint64_t>> candidates_;
  std::vector<std::uint64_t> used_;
};

void resolve_component(const Component& c, PartialView& out) {
  Solver solver(c);
  const std::size_t nl = c.links.size();
  std::vector<std::uint64_t> seen_covered(nl, 0), seen_free(nl, 0), covered;
  auto record = [&] {
    for (std::size_t l = 0; l < nl; ++l) {
      seen_covered[l] |= covered[l];
      seen_free[l] |= ~covered[l] & all_bits(c.slots);
    }
  };
  if (!solver.solve(c.known_free, c.known_occupied, covered))
    throw Inconsistent("partial spectrum information admits no completion");
  record();
  for (std::size_t l = 0; l < nl; ++l) {
    for (int s = 0; s < c.slots; ++s) {
      const std::uint64_t bit = std::uint64_t{1} << s;
      if (!(seen_covered[l] & bit)) {
        auto cover = c.known_occupied;
        cover[l] |= bit;
        if (solver.solve(c.known_free, cover, covered)) record();
      }
      if (!(seen_free[l] & bit)) {
        auto freed = c.known_free;
        freed[l] |= bit;
        if (solver.solve(freed, c.known_occupied, covered)) record();
      }
    }
    auto& states = out[c.links[l]];
    for (int s = 0; s < c.slots; ++s) {
      const std::uint64_t bit = std::uint64_t{1} << s;
      const bool can_cover = seen_covered[l] & bit;
      const bool can_free = seen_free[l] & bit;
      states[static_cast<std::size_t>(s)] =
          can_cover && can_free ? SlotState::unknown : (can_cover ? SlotState::occupied : SlotState::free);
    }
  }
}

}  // namespace

PartialView infer_occupancy(const PartialView& partial, std::span<const Skeleton> skeletons, int slots) {
  check_slots(slots);
  for (const auto& [link, states] : partial)
    if (static_cast<int>(states.size()) != slots)
      throw InvalidInput("link " + std::to_string(link) + " view has the wrong slot count");

  std::map<LinkId, std::vector<int>> crossing;
  std::set<LightpathId> ids;
  for (std::size_t k = 0; k < skeletons.size(); ++k) {
    const auto& sk = skeletons[k];
    if (sk.links.empty()) throw InvalidInput("skeleton without links");
    if (!ids.insert(sk.id).second) throw InvalidInput("duplicate skeleton id");
    std::set<LinkId> distinct(sk.links.begin(), sk.links.end());
    if (distinct.size() != sk.links.size()) throw InvalidInput("skeleton repeats a link");
    for (LinkId l : sk.links) crossing[l].push_back(static_cast<int>(k));
  }

  PartialView out;
  for (const auto& [link, states] : partial) out[link] = SlotStates(static_cast<std::size_t>(slots), SlotState::free);
  for (const auto& [link, who] : crossing) out[link] = SlotStates(static_cast<std::size_t>(slots), SlotState::unknown);
  for (const auto& [link, states] : partial) {
    if (crossing.count(link)) continue;
    for (SlotState s : states)
      if (s == SlotState::occupied)
        throw Inconsistent("link " + std::to_string(link) + " reports occupancy but carries no lightpath");
  }

  // union-find over skeletons sharing a link
  std::vector<int> parent(skeletons.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const auto& [link, who] : crossing)
    for (std::size_t k = 1; k < who.size(); ++k) parent[static_cast<std::size_t>(find(who[k]))] = find(who[0]);

  std::map<int, std::vector<int>> groups;
  for (std::size_t k = 0; k < skeletons.size(); ++k) groups[find(static_cast<int>(k))].push_back(static_cast<int>(k));

  for (const auto& [root, members] : groups) {
    Component c;
    c.slots = slots;
    std::map<LinkId, int> local;
    for (int k : members)
      for (LinkId l : skeletons[static_cast<std::size_t>(k)].links) local.try_emplace(l, 0);
    for (auto& [l, idx] : local) {
      idx = static_cast<int>(c.links.size());
      c.links.push_back(l);
      std::uint64_t fr = 0, oc = 0;
      if (auto it = partial.find(l); it != partial.end())
        for (int s = 0; s < slots; ++s) {
          if (it->second[static_cast<std::size_t>(s)] == SlotState::free) fr |= std::uint64_t{1} << s;
          if (it->second[static_cast<std::size_t>(s)] == SlotState::occupied) oc |= std::uint64_t{1} << s;
        }
      c.known_free.push_back(fr);
      c.known_occupied.push_back(oc);
    }
    c.last_skeleton.assign(c.links.size(), -1);
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      std::vector<int> li;
      for (LinkId l : skeletons[static_cast<std::size_t>(members[pos])].links) {
        const int idx = local.at(l);
        li.push_back(idx);
        c.last_skeleton[static_cast<std::size_t>(idx)] = static_cast<int>(pos);
      }
      c.link_index.push_back(std::move(li));
    }
    resolve_component(c, out);
  }
  return out;
}

CandidateVerdict check_candidate(const PartialView& inferred, std::span<const LinkId> links, SlotInterval candidate,
                                 int slots) {
  if (candidate.lo < 0 || candidate.hi >= slots || candidate.hi < candidate.lo)
    throw InvalidInput("candidate interval outside the spectrum");
  for (LinkId l : links) {
    auto it = inferred.find(l);
    if (it == inferred.end()) continue;
    for (int s = candidate.lo; s <= candidate.hi; ++s)
      if (it->second.at(static_cast<std::size_t>(s)) == SlotState::occupied) return CandidateVerdict::conflicting;
  }
  return CandidateVerdict::consistent;
}

}  // namespace blcs::fron
