#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "blcs/common/types.hpp"

namespace blcs::fron {

inline constexpr int kDefaultSlots = 16;
inline constexpr int kMaxSlots = 64;

struct SlotInterval {
  int lo = 0;
  int hi = 0;  // inclusive

  int width() const noexcept { return hi - lo + 1; }
  bool contains(int s) const noexcept { return s >= lo && s <= hi; }
  bool overlaps(const SlotInterval& o) const noexcept { return lo <= o.hi && o.lo <= hi; }
  friend auto operator<=>(const SlotInterval&, const SlotInterval&) = default;
};

/// Per-slot owner of one link's spectrum; owner 0 means free.
class SpectrumMask {
 public:
  explicit SpectrumMask(int slots = kDefaultSlots);

  int slots() const noexcept { return static_cast<int>(owner_.size()); }
  bool is_free(int slot) const;
  LightpathId owner(int slot) const;
  bool range_free(SlotInterval iv) const;
  /// Bit s set when slot s is free.
  std::uint64_t free_bits() const noexcept;
  int occupied_count() const noexcept;

  /// Throws InvalidInput if any slot is taken or out of range.
  void occupy(SlotInterval iv, LightpathId owner);
  void release(LightpathId owner);

  friend bool operator==(const SpectrumMask&, const SpectrumMask&) = default;

 private:
  std::vector<LightpathId> owner_;
};

/// Lowest interval of `width` slots free on every mask, or nullopt.
std::optional<SlotInterval> first_fit_alloc(std::span<const std::uint64_t> free_masks, int slots, int width);
std::optional<SlotInterval> first_fit_alloc(std::span<const SpectrumMask* const> masks, int width);

enum class SlotState : std::uint8_t { unknown, free, occupied };

using SlotStates = std::vector<SlotState>;
/// Known slot states per link.
using PartialView = std::map<LinkId, SlotStates>;

/// Public routing metadata: which links a lightpath crosses, not its slots.
struct Skeleton {
  LightpathId id = 0;
  std::vector<LinkId> links;
};

/// Adds `from` to `into`; a slot asserted free by one and occupied by the
/// other throws Inconsistent.
void merge_views(PartialView& into, const PartialView& from);

/// Exact occupancy implied by a partial view. Every skeleton occupies one
/// non-empty interval, identical on all of its links; skeletons sharing a link
/// are disjoint; a link slot is occupied exactly when a skeleton on that link
/// covers it. A slot is reported occupied (free) when every completion
/// consistent with `partial` covers (leaves) it, and unknown otherwise. The
/// result lists every link in `partial` or on a skeleton. Throws Inconsistent
/// when no completion exists and InvalidInput on malformed views.
PartialView infer_occupancy(const PartialView& partial, std::span<const Skeleton> skeletons, int slots);

enum class CandidateVerdict { consistent, conflicting };

/// Conflicting iff some candidate slot is inferred occupied on some candidate
/// link. Throws InvalidInput for an interval outside [0, slots).
CandidateVerdict check_candidate(const PartialView& inferred, std::span<const LinkId> links, SlotInterval candidate,
                                 int slots);

bool has_unknown(const SlotStates& states);

}  // namespace blcs::fron
