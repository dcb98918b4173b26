#pragma once

#include <optional>
#include <random>
#include <set>
#include <vector>

#include "blcs/fron/spectrum.hpp"

namespace blcs::testing {

/// Enumerates every tuple of intervals for the skeletons and keeps the ones
/// that agree with the partial view. nullopt when none agree.
inline std::optional<fron::PartialView> brute_force_inference(const fron::PartialView& partial,
                                                              const std::vector<fron::Skeleton>& sk, int slots) {
  using fron::SlotState;
  std::set<LinkId> links;
  for (const auto& [l, s] : partial) links.insert(l);
  for (const auto& s : sk) links.insert(s.links.begin(), s.links.end());
  std::vector<std::pair<int, int>> ivs;
  for (int lo = 0; lo < slots; ++lo)
    for (int hi = lo; hi < slots; ++hi) ivs.push_back({lo, hi});

  std::map<LinkId, std::vector<int>> covered_count, free_count;
  for (LinkId l : links) {
    covered_count[l].assign(static_cast<std::size_t>(slots), 0);
    free_count[l].assign(static_cast<std::size_t>(slots), 0);
  }
  long completions = 0;
  std::vector<std::size_t> pick(sk.size(), 0);
  for (;;) {
    // occupancy grid of this tuple
    std::map<LinkId, std::vector<int>> cover;
    for (LinkId l : links) cover[l].assign(static_cast<std::size_t>(slots), 0);
    for (std::size_t k = 0; k < sk.size(); ++k)
      for (LinkId l : sk[k].links)
        for (int s = ivs[pick[k]].first; s <= ivs[pick[k]].second; ++s) ++cover[l][static_cast<std::size_t>(s)];
    bool ok = true;
    for (LinkId l : links)
      for (int s = 0; s < slots && ok; ++s) {
        const int c = cover[l][static_cast<std::size_t>(s)];
        if (c > 1) ok = false;
        auto it = partial.find(l);
        if (it != partial.end()) {
          const SlotState st = it->second[static_cast<std::size_t>(s)];
          if (st == SlotState::occupied && c == 0) ok = false;
          if (st == SlotState::free && c != 0) ok = false;
        }
      }
    if (ok) {
      ++completions;
      for (LinkId l : links)
        for (int s = 0; s < slots; ++s) {
          if (cover[l][static_cast<std::size_t>(s)]) ++covered_count[l][static_cast<std::size_t>(s)];
          else ++free_count[l][static_cast<std::size_t>(s)];
        }
    }
    std::size_t k = 0;
    while (k < sk.size() && ++pick[k] == ivs.size()) pick[k++] = 0;
    if (k == sk.size()) break;
  }
  if (completions == 0) return std::nullopt;
  fron::PartialView out;
  for (LinkId l : links) {
    auto& st = out[l];
    for (int s = 0; s < slots; ++s) {
      const auto cs = static_cast<std::size_t>(s);
      st.push_back(free_count[l][cs] == 0 ? SlotState::occupied
                                          : (covered_count[l][cs] == 0 ? SlotState::free : SlotState::unknown));
    }
  }
  return out;
}

struct InferenceInstance {
  fron::PartialView partial;
  std::vector<fron::Skeleton> skeletons;
};

/// Random instance on up to 4 links x `slots`: a hidden disjoint placement of
/// up to 3 lightpaths, then a random subset of true slot states revealed.
/// With probability `lie` one revealed slot is flipped.
inline InferenceInstance random_inference_instance(std::mt19937_64& rng, int slots, double lie) {
  using fron::SlotState;
  std::uniform_int_distribution<int> n_links(1, 4), n_paths(1, 3), coin(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int L = n_links(rng);
  InferenceInstance inst;
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(L), std::vector<int>(static_cast<std::size_t>(slots), 0));
  const int P = n_paths(rng);
  for (int p = 0; p < P; ++p) {
    fron::Skeleton sk;
    sk.id = p + 1;
    for (int l = 0; l < L; ++l)
      if (coin(rng)) sk.links.push_back(l);
    if (sk.links.empty()) sk.links.push_back(std::uniform_int_distribution<int>(0, L - 1)(rng));
    // place it somewhere free if possible
    std::vector<std::pair<int, int>> options;
    const int maxw = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int lo = 0; lo < slots; ++lo)
      for (int hi = lo; hi < std::min(slots, lo + maxw); ++hi) {
        bool free = true;
        for (int l : sk.links)
          for (int s = lo; s <= hi; ++s) free = free && grid[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)] == 0;
        if (free) options.push_back({lo, hi});
      }
    if (options.empty()) continue;
    auto [lo, hi] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    for (int l : sk.links)
      for (int s = lo; s <= hi; ++s) grid[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)] = sk.id;
    inst.skeletons.push_back(sk);
  }
  const double reveal = u(rng);
  for (int l = 0; l < L; ++l) {
    if (u(rng) < 0.25) continue;  // link absent from the view
    fron::SlotStates st(static_cast<std::size_t>(slots), SlotState::unknown);
    for (int s = 0; s < slots; ++s)
      if (u(rng) < reveal)
        st[static_cast<std::size_t>(s)] = grid[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)] ? SlotState::occupied : SlotState::free;
    inst.partial[l] = st;
  }
  if (!inst.partial.empty() && u(rng) < lie) {
    auto it = inst.partial.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, inst.partial.size() - 1)(rng));
    auto& s = it->second[std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(slots) - 1)(rng)];
    s = s == SlotState::occupied ? SlotState::free : SlotState::occupied;
  }
  return inst;
}

}  // namespace blcs::testing
